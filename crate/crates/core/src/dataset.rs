//! Headered CSV datasets over a [`FeatureSpace`].
//!
//! Columns are matched by name, so their order is free. A column named
//! [`LABEL_COLUMN`] holds 0/1 labels; any other column must name a feature.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::space::{FeatureSpace, Instance, Label, Value};

pub const LABEL_COLUMN: &str = "label";

struct Layout {
    feature_cols: Vec<usize>,
    label_col: Option<usize>,
}

fn layout(space: &FeatureSpace, header: &csv::StringRecord) -> Result<Layout> {
    let mut by_name = HashMap::new();
    for (i, h) in header.iter().enumerate() {
        let h = h.trim();
        if h != LABEL_COLUMN && space.index_of(h).is_none() {
            return Err(Error::UnknownFeature(h.to_owned()));
        }
        if by_name.insert(h.to_owned(), i).is_some() {
            return Err(Error::Dataset(format!("column `{h}` appears twice")));
        }
    }
    let feature_cols = space
        .features()
        .iter()
        .map(|f| {
            by_name
                .get(&f.name)
                .copied()
                .ok_or_else(|| Error::Dataset(format!("no column for feature `{}`", f.name)))
        })
        .collect::<Result<_>>()?;
    Ok(Layout {
        feature_cols,
        label_col: by_name.get(LABEL_COLUMN).copied(),
    })
}

fn parse_row(space: &FeatureSpace, lay: &Layout, rec: &csv::StringRecord, row: usize) -> Result<Instance> {
    let values = space
        .features()
        .iter()
        .zip(&lay.feature_cols)
        .map(|(f, &c)| f.domain.parse(&f.name, rec.get(c).unwrap_or("")))
        .collect::<Result<Vec<Value>>>()
        .map_err(|e| Error::Dataset(format!("row {row}: {e}")))?;
    space
        .instance(values)
        .map_err(|e| Error::Dataset(format!("row {row}: {e}")))
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r)
}

/// Reads instances, ignoring a label column if present.
pub fn read_instances<R: Read>(space: &FeatureSpace, r: R) -> Result<Vec<Instance>> {
    let mut rdr = reader(r);
    let lay = layout(space, rdr.headers()?)?;
    rdr.records()
        .enumerate()
        .map(|(i, rec)| parse_row(space, &lay, &rec?, i + 1))
        .collect()
}

/// Reads labeled instances; the label column is required.
pub fn read_labeled<R: Read>(space: &FeatureSpace, r: R) -> Result<Vec<(Instance, Label)>> {
    let mut rdr = reader(r);
    let lay = layout(space, rdr.headers()?)?;
    let label_col = lay
        .label_col
        .ok_or_else(|| Error::Dataset(format!("no `{LABEL_COLUMN}` column")))?;
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let x = parse_row(space, &lay, &rec, i + 1)?;
            let y = match rec.get(label_col) {
                Some("0") => Label::Zero,
                Some("1") => Label::One,
                other => {
                    return Err(Error::Dataset(format!(
                        "row {}: label `{}` is not 0 or 1",
                        i + 1,
                        other.unwrap_or("")
                    )))
                }
            };
            Ok((x, y))
        })
        .collect()
}

/// Writes `rows` with the features in space order followed by `label`.
pub fn write_labeled<W: Write>(space: &FeatureSpace, w: W, rows: &[(Instance, Label)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = space.features().iter().map(|f| f.name.as_str()).collect();
    header.push(LABEL_COLUMN);
    wtr.write_record(&header)?;
    for (x, y) in rows {
        let mut rec: Vec<String> = x.values().iter().map(ToString::to_string).collect();
        rec.push(y.to_string());
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parses `name=value,name=value,...` into an instance of `space`.
pub fn parse_assignments(space: &FeatureSpace, text: &str) -> Result<Instance> {
    let mut values: Vec<Option<Value>> = vec![None; space.len()];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, raw) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("`{part}` is not of the form name=value")))?;
        let i = space.require(name.trim())?;
        if values[i].is_some() {
            return Err(Error::InvalidArgument(format!("feature `{}` given twice", name.trim())));
        }
        let f = space.feature(i);
        values[i] = Some(f.domain.parse(&f.name, raw)?);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| Error::InvalidArgument(format!("missing value for feature `{}`", space.feature(i).name)))
        })
        .collect::<Result<Vec<_>>>()?;
    space.instance(values)
}
