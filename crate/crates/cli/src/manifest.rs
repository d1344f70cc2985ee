use std::collections::BTreeMap;
use std::path::Path;

use nl2sparql::eval::Method;
use nl2sparql::seq2seq::ModelConfig;
use serde::{Deserialize, Serialize};

use crate::commands::{write, CliError};

/// Everything needed to rerun a command: its settings and inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ModelConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub settings: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: None,
            method: None,
            seed,
            inputs: BTreeMap::new(),
            settings: BTreeMap::new(),
        }
    }

    pub fn input(mut self, name: &str, path: Option<&Path>) -> Self {
        if let Some(p) = path {
            self.inputs.insert(name.into(), p.display().to_string());
        }
        self
    }

    pub fn setting(mut self, name: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("plain settings serialize");
        self.settings.insert(name.into(), v);
        self
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("manifest serializes")
    }

    pub fn save(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write(&dir.join("manifest.json"), text + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nl2sparql::seq2seq::Variant;

    #[test]
    fn json_round_trip_keeps_config() {
        let mut m = RunManifest::new("train", 4)
            .input("pairs", Some(Path::new("data/geo.tsv")))
            .input("vectors", None)
            .setting("max_len", 64);
        m.config = Some(ModelConfig::new(Variant::Attention, 300, 400));
        m.method = Some(Method::OurApp);
        let v = m.to_value();
        assert_eq!(v["config"]["hidden_dim"], 400);
        assert_eq!(v["method"], "OUR-APP");
        assert!(v["inputs"].get("vectors").is_none());
        assert_eq!(serde_json::from_value::<RunManifest>(v).unwrap(), m);
    }
}
