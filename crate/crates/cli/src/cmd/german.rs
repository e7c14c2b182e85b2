use std::fs::File;

use anyhow::Context;
use bouncer_core::audit::{write_confidence_csv, write_report_csv};
use bouncer_core::credit::{
    convert_german_categorical, credit_space, load_german_numeric, replicate as run_all, CreditConfig,
};

use super::audit::CONFIDENCE_GRID;
use super::{read, write};
use crate::exit::usage;
use crate::replication::Replication;
use crate::{ConvertArgs, ReplicateArgs};

pub fn convert(args: &ConvertArgs) -> anyhow::Result<()> {
    let input = File::open(&args.data).with_context(|| format!("cannot open {}", args.data.display()))?;
    let mut out = Vec::new();
    let rows = convert_german_categorical(input, &mut out)?;
    write(&args.out, out)?;
    println!("wrote {rows} rows to {}", args.out.display());
    Ok(())
}

pub fn replicate(args: &ReplicateArgs, seed: u64) -> anyhow::Result<()> {
    if args.seeds == 0 {
        return Err(usage("--seeds must be at least 1"));
    }
    if !(args.confidence > 0.0 && args.confidence < 1.0) {
        return Err(usage("--confidence must lie strictly between 0 and 1"));
    }
    let mut cfg = match &args.config {
        Some(p) => CreditConfig::from_toml(&read(p)?)?,
        None => CreditConfig::default(),
    };
    if let Some(t) = args.trials {
        cfg.experiment.trials = t;
    }
    let file = File::open(&args.data).with_context(|| format!("cannot open {}", args.data.display()))?;
    let records = load_german_numeric(file)?;
    let space = credit_space(&cfg, &records)?;
    let seeds: Vec<u64> = (seed..seed + args.seeds).collect();
    let runs = run_all(&cfg.experiment, &space, &records, &seeds)?;
    let rep = Replication::from_runs(&runs)?;
    let text = rep.render(args.confidence)?;
    print!("{text}");

    if let Some(dir) = &args.out {
        write(&dir.join("report.txt"), &text)?;
        write(&dir.join("models.csv"), Replication::per_model_csv(&runs))?;
        let mut a = Vec::new();
        write_report_csv(&mut a, std::slice::from_ref(&rep.scenario_a))?;
        write(&dir.join("scenario_a.csv"), a)?;
        let mut b = Vec::new();
        write_report_csv(&mut b, &rep.scenario_b)?;
        write(&dir.join("scenario_b.csv"), b)?;
        let mut c = Vec::new();
        write_confidence_csv(&mut c, &rep.scenario_b, &CONFIDENCE_GRID)?;
        write(&dir.join("confidence.csv"), c)?;
    }
    Ok(())
}
