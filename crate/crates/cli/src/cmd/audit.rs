use std::fmt::Write as _;
use std::fs::File;

use anyhow::Context;
use bouncer_core::audit::{
    queries_needed, summarize, write_confidence_csv, write_report_csv, Auditor, Oracle, QueryScheduler, RateSummary,
};
use bouncer_core::credit::{load_german_numeric, record_instance};
use bouncer_core::dataset::read_instances;
use bouncer_core::{AuditReport, FeatureSpace, Instance};
use bouncer_service::RemoteOracle;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{load_backend, read, write};
use crate::exit::{usage, NetworkError};
use crate::{AuditArgs, DataFormat, ScenarioArg};

/// Pair counts at which confidence.csv evaluates each observed rate.
pub const CONFIDENCE_GRID: [u64; 12] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000];

pub fn run(args: &AuditArgs, seed: u64) -> anyhow::Result<()> {
    if !(args.confidence > 0.0 && args.confidence < 1.0) {
        return Err(usage("--confidence must lie strictly between 0 and 1"));
    }
    let (space, oracle): (FeatureSpace, Box<dyn Oracle>) = match (&args.url, &args.backend, &args.model) {
        (Some(url), None, None) => {
            let path = args.space.as_ref().ok_or_else(|| usage("--url needs --space"))?;
            let space = FeatureSpace::from_toml(&read(path)?)
                .with_context(|| format!("invalid feature space {}", path.display()))?;
            let remote = RemoteOracle::new(url, &args.client_id, space.clone())?;
            remote
                .health()
                .map_err(|e| NetworkError(format!("{url} is not answering: {e}")))?;
            (space, Box::new(remote))
        }
        (None, Some(kind), Some(model)) => {
            let backend = load_backend(*kind, model)?;
            (backend.space().clone(), Box::new(backend))
        }
        _ => return Err(usage("give either --url (with --space) or both --backend and --model")),
    };
    let auditor = Auditor::new(&space).with_scheduler(QueryScheduler::with_workers(args.workers));

    if args.scenario == ScenarioArg::Exhaustive {
        let found = auditor.find_ip_exhaustive(oracle.as_ref())?;
        match &found {
            Some(ip) => println!(
                "incoherent pair: {} -> {} and {} -> {}; the model is discriminative",
                ip.first.instance, ip.first.decision, ip.second.instance, ip.second.decision
            ),
            None => println!(
                "no incoherent pair in {} instances; the model is legitimate",
                space.all_instances()?.len()
            ),
        }
        let mut doc = serde_json::to_string_pretty(&found)?;
        doc.push('\n');
        return write(&args.out.join("exhaustive.json"), doc);
    }

    let profiles = profiles(args, &space, seed)?;
    let reports: Vec<AuditReport> = match args.scenario {
        ScenarioArg::A => vec![auditor.scenario_a_probe(&profiles, oracle.as_ref(), args.trials, seed)?],
        ScenarioArg::B => swap_sets(args, &space)?
            .iter()
            .map(|set| auditor.scenario_b_swap(&profiles, oracle.as_ref(), set))
            .collect::<bouncer_core::Result<_>>()?,
        ScenarioArg::Exhaustive => unreachable!(),
    };
    let rows = reports
        .iter()
        .map(|r| summarize(std::slice::from_ref(r)))
        .collect::<bouncer_core::Result<Vec<RateSummary>>>()?;
    let mut report = Vec::new();
    write_report_csv(&mut report, &rows)?;
    write(&args.out.join("report.csv"), report)?;
    let mut conf = Vec::new();
    write_confidence_csv(&mut conf, &rows, &CONFIDENCE_GRID)?;
    write(&args.out.join("confidence.csv"), conf)?;
    print!("{}", render(&reports, args.confidence)?);
    Ok(())
}

fn render(reports: &[AuditReport], target: f64) -> anyhow::Result<String> {
    let mut s = String::new();
    for r in reports {
        write!(
            s,
            "scenario {} [{}]: {} queries, {}/{} pairs incoherent (rate {:.4})",
            r.scenario,
            r.features.join("+"),
            r.queries_issued,
            r.ips_found.len(),
            r.pairs_tested,
            r.ip_rate
        )?;
        if r.ip_rate > 0.0 {
            writeln!(
                s,
                ", {} pairs give {:.0}% confidence",
                queries_needed(r.ip_rate, target)?,
                target * 100.0
            )?;
        } else {
            writeln!(s)?;
        }
    }
    Ok(s)
}

fn profiles(args: &AuditArgs, space: &FeatureSpace, seed: u64) -> anyhow::Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Some(path) = &args.data else {
        return Ok((0..args.profiles)
            .map(|_| {
                let values = space.features().iter().map(|f| f.domain.sample(&mut rng)).collect();
                Instance::from_values_unchecked(values)
            })
            .collect());
    };
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let all = match args.data_format {
        DataFormat::Csv => read_instances(space, file)?,
        DataFormat::German => load_german_numeric(file)?
            .iter()
            .map(|r| record_instance(space, r))
            .collect::<bouncer_core::Result<_>>()?,
    };
    if all.len() <= args.profiles {
        return Ok(all);
    }
    Ok(all.choose_multiple(&mut rng, args.profiles).cloned().collect())
}

fn swap_sets(args: &AuditArgs, space: &FeatureSpace) -> anyhow::Result<Vec<Vec<usize>>> {
    if args.swap_sets.is_empty() {
        return Ok(vec![space.discriminative_indices().to_vec()]);
    }
    args.swap_sets
        .iter()
        .map(|set| {
            set.split(',')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .map(|n| match space.index_of(n) {
                    Some(i) if space.is_discriminative(i) => Ok(i),
                    Some(_) => Err(usage(format!("`{n}` is not a discriminative feature"))),
                    None => Err(usage(format!("unknown feature `{n}`"))),
                })
                .collect()
        })
        .collect()
}
