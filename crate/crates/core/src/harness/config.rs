//! Run configuration: TOML file, then `CHAINPROVER_*` environment
//! variables, then command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::HarnessError;
use crate::engine::{Backend, EngineConfig};
use crate::nl2fol::LlmEndpointConfig;
use crate::verifier::Policy;

pub const ENV_PREFIX: &str = "CHAINPROVER_";

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    workers: Option<usize>,
    policy: Option<Policy>,
    seed: Option<u64>,
    engine: Option<EngineConfig>,
    llm: Option<LlmEndpointConfig>,
    nl2fol: Option<Nl2FolFile>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Nl2FolFile {
    speculation_keywords: Option<Vec<String>>,
    prompt_template: Option<PathBuf>,
    llm_script: Option<PathBuf>,
}

/// Values that may come from the environment or from flags.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Overrides {
    pub engine: Option<String>,
    pub prover_cmd: Option<String>,
    pub timeout_ms: Option<String>,
    pub workers: Option<String>,
    pub policy: Option<String>,
    pub seed: Option<String>,
    pub llm_endpoint: Option<String>,
    pub llm_model: Option<String>,
    pub llm_script: Option<String>,
}

impl Overrides {
    /// Read `CHAINPROVER_ENGINE`, `CHAINPROVER_PROVER_CMD`, ... from `vars`.
    pub fn from_env<I, K, V>(vars: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        let mut o = Overrides::default();
        for (k, v) in vars {
            let Some(name) = k.as_ref().strip_prefix(ENV_PREFIX) else {
                continue;
            };
            let slot = match name {
                "ENGINE" => &mut o.engine,
                "PROVER_CMD" => &mut o.prover_cmd,
                "TIMEOUT_MS" => &mut o.timeout_ms,
                "WORKERS" => &mut o.workers,
                "POLICY" => &mut o.policy,
                "SEED" => &mut o.seed,
                "LLM_ENDPOINT" => &mut o.llm_endpoint,
                "LLM_MODEL" => &mut o.llm_model,
                "LLM_SCRIPT" => &mut o.llm_script,
                _ => continue,
            };
            *slot = Some(v.into());
        }
        o
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub engine: EngineConfig,
    pub llm: Option<LlmEndpointConfig>,
    pub llm_script: Option<PathBuf>,
    pub workers: usize,
    pub policy: Policy,
    pub seed: Option<u64>,
    pub speculation_keywords: Option<Vec<String>>,
    pub prompt_template: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: EngineConfig::default(),
            llm: None,
            llm_script: None,
            workers: 1,
            policy: Policy::Lenient,
            seed: None,
            speculation_keywords: None,
            prompt_template: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(what: &str, v: &str) -> Result<T, HarnessError> {
    v.trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("{what}: `{v}` is not a valid number")))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let file: FileConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let nl = file.nl2fol.unwrap_or_default();
        Ok(RunConfig {
            engine: file.engine.unwrap_or_default(),
            llm: file.llm,
            llm_script: nl.llm_script,
            workers: file.workers.unwrap_or(1),
            policy: file.policy.unwrap_or_default(),
            seed: file.seed,
            speculation_keywords: nl.speculation_keywords,
            prompt_template: nl.prompt_template,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), HarnessError> {
        if let Some(v) = &o.engine {
            self.engine.backend = v
                .parse::<Backend>()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        if let Some(v) = &o.prover_cmd {
            self.engine.prover_command = Some(v.clone());
        }
        if let Some(v) = &o.timeout_ms {
            self.engine.timeout_ms = parse_num("timeout_ms", v)?;
        }
        if let Some(v) = &o.workers {
            self.workers = parse_num("workers", v)?;
        }
        if let Some(v) = &o.policy {
            self.policy = v.parse().map_err(HarnessError::Config)?;
        }
        if let Some(v) = &o.seed {
            self.seed = Some(parse_num("seed", v)?);
        }
        if let Some(v) = &o.llm_endpoint {
            self.llm
                .get_or_insert_with(LlmEndpointConfig::default)
                .base_url = v.clone();
        }
        if let Some(v) = &o.llm_model {
            self.llm
                .get_or_insert_with(LlmEndpointConfig::default)
                .model_name = v.clone();
        }
        if let Some(v) = &o.llm_script {
            self.llm_script = Some(PathBuf::from(v));
        }
        Ok(())
    }

    /// File (if any), then environment, then flags; validated.
    pub fn load(
        file: Option<&Path>,
        env: &Overrides,
        flags: &Overrides,
    ) -> Result<Self, HarnessError> {
        let mut cfg = match file {
            Some(p) => Self::from_file(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(env)?;
        cfg.apply(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.engine
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.workers == 0 {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}
