use bouncer_core::dataset::parse_assignments;
use bouncer_core::explain::{is_apropos, is_consequent, mentions_discriminative};
use bouncer_core::tree::{pr_attack_prune_with, PruneMode};
use bouncer_core::Explanation;
use bouncer_service::{Backend, Mode, Service};

use super::{load_backend, write};
use crate::exit::usage;
use crate::{DemoArgs, PruneArg};

pub fn run(args: &DemoArgs) -> anyhow::Result<()> {
    let backend = load_backend(args.backend, &args.model)?;
    let space = backend.space().clone();
    let x = parse_assignments(&space, &args.instance)?;
    let decision = backend.decide(&x);

    let (honest, surrogate) = match &backend {
        Backend::Tree(t) => {
            let mode = match args.prune {
                PruneArg::PartialEvaluation => PruneMode::PartialEvaluation,
                PruneArg::PathOnly => PruneMode::PathOnly,
            };
            let s = pr_attack_prune_with(t, &x, mode)?;
            if let Some(out) = &args.out {
                let mut doc = s.to_json_pretty();
                doc.push('\n');
                write(out, doc)?;
            }
            (t.path_explanation(&x)?, s.path_explanation(&x)?)
        }
        Backend::Mlp(_) => {
            if args.out.is_some() {
                return Err(usage("--out writes a surrogate tree and needs --backend tree"));
            }
            let honest = Service::new(backend.clone(), Mode::Honest).explain(&x)?.1;
            let laundered = Service::new(backend.clone(), Mode::PrAttack).explain(&x)?.1;
            (honest, laundered)
        }
    };

    let checks = |e: &Explanation| -> anyhow::Result<String> {
        Ok(format!(
            "apropos={} consequent={} mentions_discriminative={}",
            is_apropos(e, &x, &space)?,
            is_consequent(e, decision),
            mentions_discriminative(e, &space)
        ))
    };
    println!("instance:  {x}");
    println!("decision:  {decision}");
    println!("honest:    {honest}");
    println!("           {}", checks(&honest)?);
    println!("surrogate: {surrogate}");
    println!("           {}", checks(&surrogate)?);
    Ok(())
}
