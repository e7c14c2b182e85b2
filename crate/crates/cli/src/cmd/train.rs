use std::fmt::Write as _;
use std::fs::File;

use anyhow::Context;
use bouncer_core::credit::{credit_space, load_german_numeric, train_mlp, CreditConfig, CreditModel, TrainSpec};
use bouncer_core::dataset::read_labeled;
use bouncer_core::tree::{train, TrainConfig};
use bouncer_core::{Classifier, FeatureSpace, Label};
use rayon::prelude::*;

use super::{read, write};
use crate::exit::usage;
use crate::{BackendKind, TrainArgs};

pub fn run(args: &TrainArgs, seed: u64) -> anyhow::Result<()> {
    match args.backend {
        BackendKind::Tree => train_tree(args),
        BackendKind::Mlp => train_networks(args, seed),
    }
}

fn train_tree(args: &TrainArgs) -> anyhow::Result<()> {
    let space_path = args
        .space
        .as_ref()
        .ok_or_else(|| usage("--backend tree needs --space"))?;
    let space = FeatureSpace::from_toml(&read(space_path)?)
        .with_context(|| format!("invalid feature space {}", space_path.display()))?;
    let file = File::open(&args.data).with_context(|| format!("cannot open {}", args.data.display()))?;
    let data = read_labeled(&space, file).with_context(|| format!("cannot load {}", args.data.display()))?;
    let cfg = TrainConfig {
        max_depth: args.max_depth,
        min_samples_split: args.min_samples_split,
        ..TrainConfig::default()
    };
    let tree = train(&space, &data, &cfg)?;
    let correct = data.iter().filter(|(x, y)| tree.classify(x) == *y).count();
    let mut doc = tree.to_json_pretty();
    doc.push('\n');
    write(&args.out, doc)?;
    println!(
        "tree: {} nodes, depth {}, training accuracy {:.4} on {} rows, discriminative tests: {}",
        tree.node_count(),
        tree.depth(),
        correct as f64 / data.len() as f64,
        data.len(),
        tree.uses_discriminative()
    );
    Ok(())
}

fn train_networks(args: &TrainArgs, seed: u64) -> anyhow::Result<()> {
    if args.seeds == 0 {
        return Err(usage("--seeds must be at least 1"));
    }
    let cfg = match &args.config {
        Some(p) => CreditConfig::from_toml(&read(p)?)?,
        None => CreditConfig::default(),
    };
    let file = File::open(&args.data).with_context(|| format!("cannot open {}", args.data.display()))?;
    let records = load_german_numeric(file)?;
    let space = credit_space(&cfg, &records)?;
    let mut spec = cfg.experiment.train.clone();
    if let Some(e) = args.epochs {
        spec.epochs = e;
    }
    let xs: Vec<Vec<f64>> = records.iter().map(|r| r.features.clone()).collect();
    let ys: Vec<Label> = records.iter().map(|r| r.label).collect();
    let seeds: Vec<u64> = (seed..seed + args.seeds).collect();
    let outcomes = seeds
        .par_iter()
        .map(|&s| {
            train_mlp(
                &xs,
                &ys,
                &TrainSpec {
                    seed: s,
                    ..spec.clone()
                },
            )
        })
        .collect::<bouncer_core::Result<Vec<_>>>()?;

    let dir = &args.out;
    write(&dir.join("space.toml"), space.to_toml())?;
    let mut metrics = String::from("seed,epochs,train_loss,val_accuracy\n");
    let mut history = String::from("seed,epoch,train_loss,val_accuracy\n");
    for (s, out) in seeds.iter().zip(outcomes) {
        let last_loss = out.history.last().map_or(f64::NAN, |m| m.train_loss);
        writeln!(
            metrics,
            "{s},{},{last_loss:.6},{:.6}",
            out.history.len(),
            out.val_accuracy
        )?;
        for m in &out.history {
            writeln!(history, "{s},{},{:.6},{:.6}", m.epoch, m.train_loss, m.val_accuracy)?;
        }
        let model = CreditModel {
            space: space.clone(),
            model: out.model,
        };
        write(&dir.join(format!("model-{s}.json")), model.to_json())?;
        println!("seed {s}: validation accuracy {:.4}", out.val_accuracy);
    }
    write(&dir.join("metrics.csv"), metrics)?;
    write(&dir.join("history.csv"), history)?;
    Ok(())
}
