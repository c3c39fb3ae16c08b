//! Resolved run settings. Precedence is flags, then environment, then the
//! config file, then built-in defaults.

use std::path::Path;

use contraforge::backend::{Capability, EndpointConfig};
use contraforge::meta::RunMeta;
use serde::Deserialize;

use crate::args::GlobalArgs;
use crate::error::{CliError, CliResult};

/// Top-level scalar keys of the config file. Endpoint tables are read by
/// [`EndpointConfig::from_toml`] from the same document.
#[derive(Debug, Default, Deserialize)]
pub struct FileSettings {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub lambda: Option<f64>,
    pub threshold: Option<f64>,
}

pub struct Context {
    pub seed: u64,
    pub jobs: usize,
    pub endpoints: EndpointConfig,
    pub file: FileSettings,
}

impl Context {
    pub fn resolve(global: &GlobalArgs) -> CliResult<Self> {
        Self::resolve_with(global, |k| std::env::var(k).ok())
    }

    pub fn resolve_with(global: &GlobalArgs, env: impl Fn(&str) -> Option<String>) -> CliResult<Self> {
        let (file, mut endpoints) = match &global.config_file {
            Some(path) => load_config(path)?,
            None => (FileSettings::default(), EndpointConfig::default()),
        };
        endpoints.apply_env(env);
        let overrides = [
            (Capability::Parse, &global.parse_url),
            (Capability::Fill, &global.fill_url),
            (Capability::Read, &global.read_url),
            (Capability::Detect, &global.detect_url),
            (Capability::Complete, &global.complete_url),
        ];
        for (cap, url) in overrides {
            if let Some(url) = url {
                endpoints.set_url(cap, url.clone());
            }
        }
        let jobs = global
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        Ok(Context {
            seed: global.seed.or(file.seed).unwrap_or(0),
            jobs,
            endpoints,
            file,
        })
    }

    /// Output header for `subcommand`. Worker count is left out because it
    /// never changes results.
    pub fn meta(&self, subcommand: &str) -> RunMeta {
        RunMeta::new(subcommand, self.seed)
    }
}

fn load_config(path: &Path) -> CliResult<(FileSettings, EndpointConfig)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let file: FileSettings = toml::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let endpoints = EndpointConfig::from_toml(&text)?;
    Ok((file, endpoints))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn global(args: &[&str]) -> GlobalArgs {
        let mut full = vec!["contraforge"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["serve-annotation", "--store", "x"]);
        crate::args::Cli::parse_from(full).global
    }

    #[test]
    fn flag_beats_env_beats_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(
            &cfg,
            "seed = 5\njobs = 3\n[endpoints.read]\nurl = \"http://file\"\n[endpoints.parse]\nurl = \"http://file\"\n[endpoints.fill]\nurl = \"http://file\"\n",
        )
        .unwrap();
        let cfg = cfg.to_str().unwrap();
        let env = |k: &str| (k == "CONTRAFORGE_READ_URL" || k == "CONTRAFORGE_PARSE_URL").then(|| "http://env".to_string());

        let ctx = Context::resolve_with(&global(&["--config-file", cfg, "--parse-url", "http://flag"]), env).unwrap();
        assert_eq!(ctx.seed, 5);
        assert_eq!(ctx.jobs, 3);
        assert_eq!(ctx.endpoints.get(Capability::Parse).unwrap().url, "http://flag");
        assert_eq!(ctx.endpoints.get(Capability::Read).unwrap().url, "http://env");
        assert_eq!(ctx.endpoints.get(Capability::Fill).unwrap().url, "http://file");
        assert!(ctx.endpoints.get(Capability::Detect).is_none());

        let ctx = Context::resolve_with(&global(&["--config-file", cfg, "--seed", "9", "--jobs", "1"]), env).unwrap();
        assert_eq!((ctx.seed, ctx.jobs), (9, 1));
    }

    #[test]
    fn defaults_without_file() {
        let ctx = Context::resolve_with(&global(&[]), |_| None).unwrap();
        assert_eq!(ctx.seed, 0);
        assert!(ctx.jobs >= 1);
        assert!(ctx.endpoints.endpoints.is_empty());
    }

    #[test]
    fn zero_jobs_is_a_usage_error() {
        let err = Context::resolve_with(&global(&["--jobs", "0"]), |_| None).err().unwrap();
        assert_eq!(err.code, crate::error::USAGE);
    }
}
