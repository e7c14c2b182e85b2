//! Aggregation and text rendering of a German Credit replication.

use std::fmt::Write as _;

use bouncer_core::audit::{mean_and_stddev, queries_needed, summarize, RateSummary};
use bouncer_core::credit::SeedRun;
use bouncer_core::Result;

/// A published mean and standard deviation, in percent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Published {
    pub mean: f64,
    pub stddev: f64,
}

const fn published(mean: f64, stddev: f64) -> Published {
    Published { mean, stddev }
}

pub const PUBLISHED_ACCURACY: Published = published(76.97, 0.92);
pub const PUBLISHED_SCENARIO_A: Published = published(8.09, 4.08);

/// Scenario B, in swap-set order: the four single features, then all four.
pub const PUBLISHED_SWAP: [(&str, Published, u64); 5] = [
    ("employment", published(1.86, 1.48), 490),
    ("sex_status", published(0.27, 0.51), 2555),
    ("age", published(1.40, 1.65), 368),
    ("foreigner", published(2.27, 2.17), 301),
    ("employment+sex_status+age+foreigner", published(4.25, 3.13), 160),
];

pub const COUNT_NOTE: &str = "The published counts are not reproduced by the closed form \
ceil(ln(1 - c) / ln(1 - p)) at the published rates, and no formula in the source \
reconciles the two; the closed form is what this implementation computes.";

#[derive(Clone, Debug)]
pub struct Replication {
    pub seeds: Vec<u64>,
    /// Fractions, not percent.
    pub accuracy_mean: f64,
    pub accuracy_stddev: f64,
    pub scenario_a: RateSummary,
    pub scenario_b: Vec<RateSummary>,
}

impl Replication {
    pub fn from_runs(runs: &[SeedRun]) -> Result<Self> {
        let acc: Vec<f64> = runs.iter().map(|r| r.val_accuracy).collect();
        let (accuracy_mean, accuracy_stddev) = mean_and_stddev(&acc);
        let a: Vec<_> = runs.iter().map(|r| r.scenario_a.clone()).collect();
        let sets = runs.first().map_or(0, |r| r.scenario_b.len());
        let scenario_b = (0..sets)
            .map(|k| summarize(&runs.iter().map(|r| r.scenario_b[k].clone()).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        Ok(Self {
            seeds: runs.iter().map(|r| r.seed).collect(),
            accuracy_mean,
            accuracy_stddev,
            scenario_a: summarize(&a)?,
            scenario_b,
        })
    }

    /// The summary row for the swap set named `features` (joined with `+`).
    pub fn swap(&self, features: &str) -> Option<&RateSummary> {
        self.scenario_b.iter().find(|r| r.features == features)
    }

    /// Per-model rows: seed, accuracy, scenario A rate, one rate per swap set.
    pub fn per_model_csv(runs: &[SeedRun]) -> String {
        let mut s = String::from("seed,val_accuracy,scenario_a");
        if let Some(r) = runs.first() {
            for b in &r.scenario_b {
                write!(s, ",{}", b.features.join("+")).unwrap();
            }
        }
        s.push('\n');
        for r in runs {
            write!(s, "{},{:.6},{:.6}", r.seed, r.val_accuracy, r.scenario_a.ip_rate).unwrap();
            for b in &r.scenario_b {
                write!(s, ",{:.6}", b.ip_rate).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn render(&self, target: f64) -> Result<String> {
        let mut s = String::new();
        let (first, last) = (self.seeds.first(), self.seeds.last());
        let seeds = match (first, last) {
            (Some(a), Some(b)) => format!("seeds {a}..={b}"),
            _ => "no seeds".into(),
        };
        let pct = |x: f64| format!("{:.2}%", 100.0 * x);
        let pubd = |p: Published| format!("{:.2}% (sd {:.2}%)", p.mean, p.stddev);

        writeln!(s, "German Credit replication, {} models ({seeds})", self.seeds.len()).unwrap();
        writeln!(s).unwrap();
        writeln!(s, "{:<38} {:>8} {:>8}   published", "", "mean", "sd").unwrap();
        writeln!(
            s,
            "{:<38} {:>8} {:>8}   {}",
            "validation accuracy",
            pct(self.accuracy_mean),
            pct(self.accuracy_stddev),
            pubd(PUBLISHED_ACCURACY)
        )
        .unwrap();
        writeln!(
            s,
            "{:<38} {:>8} {:>8}   {}",
            "scenario A (random resample)",
            pct(self.scenario_a.rate),
            pct(self.scenario_a.stddev),
            pubd(PUBLISHED_SCENARIO_A)
        )
        .unwrap();
        for row in &self.scenario_b {
            let published = PUBLISHED_SWAP
                .iter()
                .find(|(f, _, _)| *f == row.features)
                .map_or_else(|| "-".to_string(), |(_, p, _)| pubd(*p));
            writeln!(
                s,
                "{:<38} {:>8} {:>8}   {}",
                format!("scenario B swap {}", row.features),
                pct(row.rate),
                pct(row.stddev),
                published
            )
            .unwrap();
        }

        writeln!(s).unwrap();
        writeln!(s, "pairs needed for {:.0}% confidence", 100.0 * target).unwrap();
        writeln!(
            s,
            "{:<38} {:>12} {:>14} {:>10}",
            "swap set", "ours", "closed form", "published"
        )
        .unwrap();
        writeln!(s, "{:<38} {:>12} {:>14} {:>10}", "", "(our rate)", "(published)", "").unwrap();
        for (features, p, count) in PUBLISHED_SWAP {
            let ours = match self.swap(features) {
                Some(r) if r.rate > 0.0 => queries_needed(r.rate, target)?.to_string(),
                Some(_) => "inf".into(),
                None => "-".into(),
            };
            let closed = queries_needed(p.mean / 100.0, target)?;
            writeln!(s, "{features:<38} {ours:>12} {closed:>14} {count:>10}").unwrap();
        }
        writeln!(s).unwrap();
        writeln!(s, "{COUNT_NOTE}").unwrap();
        Ok(s)
    }
}

/// The closed-form pair counts at the published scenario B rates.
pub fn closed_form_counts(target: f64) -> Result<Vec<u64>> {
    PUBLISHED_SWAP
        .iter()
        .map(|(_, p, _)| queries_needed(p.mean / 100.0, target))
        .collect()
}
