//! Categorical `german.data` to the 25-column numeric layout.
//!
//! Coded attributes become the trailing digit of their code, the credit
//! amount is expressed in hundreds, and purpose, other debtors, housing and job become indicator columns.
//! Installment rate, the remaining purposes, guarantor, free housing and
//! management jobs are dropped.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};

const COLUMNS: usize = 21;

fn code(token: &str, prefix: &str, row: usize) -> Result<i64> {
    token
        .strip_prefix(prefix)
        .and_then(|rest| rest.parse::<i64>().ok())
        .ok_or_else(|| Error::Dataset(format!("line {row}: expected a `{prefix}..` code, found `{token}`")))
}

fn int(token: &str, row: usize) -> Result<i64> {
    token
        .parse()
        .map_err(|_| Error::Dataset(format!("line {row}: `{token}` is not an integer")))
}

fn flag(b: bool) -> i64 {
    i64::from(b)
}

fn convert_row(t: &[&str], row: usize) -> Result<Vec<i64>> {
    let status = code(t[0], "A1", row)?;
    let duration = int(t[1], row)?;
    let history = code(t[2], "A3", row)?;
    let purpose = t[3];
    let amount = (int(t[4], row)? as f64 / 100.0).round() as i64;
    let savings = code(t[5], "A6", row)?;
    let employment = code(t[6], "A7", row)?;
    let personal = code(t[8], "A9", row)?;
    let debtors = code(t[9], "A10", row)?;
    let residence = int(t[10], row)?;
    let property = code(t[11], "A12", row)?;
    let age = int(t[12], row)?;
    let plans = code(t[13], "A14", row)?;
    let housing = code(t[14], "A15", row)?;
    let credits = int(t[15], row)?;
    let job = code(t[16], "A17", row)?;
    let dependents = int(t[17], row)?;
    let telephone = code(t[18], "A19", row)?;
    let foreign = code(t[19], "A20", row)?;
    let class = int(t[20], row)?;
    Ok(vec![
        status,
        duration,
        history,
        amount,
        savings,
        employment,
        personal,
        residence,
        property,
        age,
        plans,
        credits,
        dependents,
        telephone,
        foreign,
        flag(purpose == "A40"),
        flag(purpose == "A41"),
        flag(debtors == 1),
        flag(debtors == 2),
        flag(housing == 1),
        flag(housing == 2),
        flag(job == 1),
        flag(job == 2),
        flag(job == 3),
        class,
    ])
}

/// Converts every row and returns the number written.
pub fn convert_german_categorical<R: Read, W: Write>(input: R, mut out: W) -> Result<usize> {
    let mut n = 0;
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != COLUMNS {
            return Err(Error::Dataset(format!(
                "line {}: expected {COLUMNS} columns, found {}",
                i + 1,
                tokens.len()
            )));
        }
        let values = convert_row(&tokens, i + 1)?;
        let text: Vec<String> = values.iter().map(i64::to_string).collect();
        writeln!(out, "{}", text.join(" "))?;
        n += 1;
    }
    if n == 0 {
        return Err(Error::Dataset("no rows to convert".into()));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rows_match_the_reference_encoding() {
        let src = "A11 6 A34 A43 1169 A65 A75 4 A93 A101 4 A121 67 A143 A152 2 A173 1 A192 A201 1\n\
                   A12 48 A32 A43 5951 A61 A73 2 A92 A101 2 A121 22 A143 A152 1 A173 1 A191 A201 2\n";
        let mut out = Vec::new();
        assert_eq!(convert_german_categorical(src.as_bytes(), &mut out).unwrap(), 2);
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], "1 6 4 12 5 5 3 4 1 67 3 2 1 2 1 0 0 1 0 0 1 0 0 1 1");
        assert_eq!(rows[1], "2 48 2 60 1 3 2 2 1 22 3 1 1 1 1 0 0 1 0 0 1 0 0 1 2");
    }

    #[test]
    fn rejects_bad_rows() {
        let mut sink = Vec::new();
        assert!(convert_german_categorical(&b"A11 6\n"[..], &mut sink).is_err());
        let bad = "B11 6 A34 A43 1169 A65 A75 4 A93 A101 4 A121 67 A143 A152 2 A173 1 A192 A201 1\n";
        assert!(convert_german_categorical(bad.as_bytes(), &mut sink).is_err());
        assert!(convert_german_categorical(&b""[..], &mut sink).is_err());
    }
}
