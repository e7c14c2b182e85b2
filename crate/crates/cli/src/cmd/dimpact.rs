use bouncer_core::dimpact::{emit_curves, unit_grid, write_curves_csv, Scenario};

use super::write;
use crate::exit::usage;
use crate::{CurveScenario, DimpactArgs};

pub fn run(args: &DimpactArgs) -> anyhow::Result<()> {
    if args.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    let grid = unit_grid(args.steps);
    // alpha = 0 means the protected group never succeeds; the model is
    // defined on (0, 1].
    let alphas: Vec<f64> = grid.iter().copied().filter(|&a| a > 0.0).collect();
    let scenarios: &[Scenario] = match args.scenario {
        CurveScenario::Independence => &[Scenario::Independence],
        CurveScenario::Dependence => &[Scenario::Dependence],
        CurveScenario::Both => &Scenario::ALL,
    };
    let points = emit_curves(&alphas, &grid, scenarios)?;
    let mut buf = Vec::new();
    write_curves_csv(&mut buf, &points)?;
    match &args.out {
        Some(path) => write(path, buf),
        None => {
            print!("{}", String::from_utf8(buf)?);
            Ok(())
        }
    }
}
