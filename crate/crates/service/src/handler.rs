//! The request handler, independent of HTTP.

use std::path::Path;

use bouncer_core::classifier::dirac_surrogate;
use bouncer_core::credit::CreditModel;
use bouncer_core::explain::{dirac_explanation, point_explanation, Provenance};
use bouncer_core::tree::pr_attack_prune;
use bouncer_core::{Classifier, DecisionTree, Explanation, FeatureSpace, Instance, Label};

use crate::config::{BackendConfig, Mode};
use crate::error::{Result, ServiceError};
use crate::wire::{ClassifyReply, ClassifyRequest};

/// The model behind the endpoint. Immutable once loaded.
#[derive(Clone, Debug)]
pub enum Backend {
    Tree(DecisionTree),
    Mlp(CreditModel),
}

impl Backend {
    pub fn load(cfg: &BackendConfig) -> Result<Self> {
        let read = |p: &Path| {
            std::fs::read_to_string(p)
                .map_err(|e| ServiceError::Config(format!("cannot read model {}: {e}", p.display())))
        };
        Ok(match cfg {
            BackendConfig::Tree { path } => Backend::Tree(DecisionTree::from_json(&read(path)?)?),
            BackendConfig::Mlp { path } => Backend::Mlp(CreditModel::from_json(&read(path)?)?),
        })
    }

    pub fn space(&self) -> &FeatureSpace {
        match self {
            Backend::Tree(t) => t.space(),
            Backend::Mlp(m) => &m.space,
        }
    }

    pub fn decide(&self, x: &Instance) -> Label {
        match self {
            Backend::Tree(t) => t.classify(x),
            Backend::Mlp(m) => m.classify(x),
        }
    }
}

impl Classifier for Backend {
    fn classify(&self, x: &Instance) -> Label {
        self.decide(x)
    }
}

#[derive(Clone, Debug)]
pub struct Service {
    pub backend: Backend,
    pub mode: Mode,
}

impl Service {
    pub fn new(backend: Backend, mode: Mode) -> Self {
        Self { backend, mode }
    }

    /// Decision and explanation for one conforming input. The decision
    /// never depends on the mode; only the explanation does.
    pub fn explain(&self, x: &Instance) -> Result<(Label, Explanation)> {
        let space = self.backend.space();
        let y = self.backend.decide(x);
        let explanation = match (&self.backend, self.mode) {
            (Backend::Tree(t), Mode::Honest) => t.path_explanation(x)?,
            (Backend::Tree(t), Mode::PrAttack) => {
                let mut a = pr_attack_prune(t, x)?.path_explanation(x)?;
                a.provenance = Some(Provenance::Surrogate);
                a
            }
            (Backend::Mlp(_), Mode::Honest) => {
                let all: Vec<usize> = (0..space.len()).collect();
                point_explanation(space, x, &all, y, Provenance::Honest)
            }
            (Backend::Mlp(_), Mode::PrAttack) => dirac_explanation(&dirac_surrogate(x, y, space)?, space),
        };
        Ok((y, explanation))
    }
}

/// Validates the request's features against the backend's space and
/// answers it under `query_id`.
pub fn handle_classify(req: &ClassifyRequest, service: &Service, query_id: u64) -> Result<ClassifyReply> {
    let x = service
        .backend
        .space()
        .instance_from_map(&req.features)
        .map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    let (decision, explanation) = service.explain(&x)?;
    Ok(ClassifyReply {
        decision,
        explanation: explanation.for_wire(),
        query_id,
    })
}
