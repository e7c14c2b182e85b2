pub mod audit;
pub mod demo;
pub mod dimpact;
pub mod german;
pub mod serve;
pub mod train;

use std::path::Path;

use anyhow::Context;
use bouncer_core::credit::CreditModel;
use bouncer_core::DecisionTree;
use bouncer_service::Backend;

use crate::BackendKind;

pub(crate) fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub(crate) fn write(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub(crate) fn load_backend(kind: BackendKind, path: &Path) -> anyhow::Result<Backend> {
    let doc = read(path)?;
    let parsed = match kind {
        BackendKind::Tree => DecisionTree::from_json(&doc).map(Backend::Tree),
        BackendKind::Mlp => CreditModel::from_json(&doc).map(Backend::Mlp),
    };
    parsed.with_context(|| format!("{} is not a valid {kind:?} model", path.display()))
}
