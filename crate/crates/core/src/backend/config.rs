//! Endpoint configuration: config file values, then environment overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Capability {
    Parse,
    Fill,
    Read,
    Detect,
    Complete,
}

impl Capability {
    pub const ALL: [Capability; 5] = [
        Capability::Parse,
        Capability::Fill,
        Capability::Read,
        Capability::Detect,
        Capability::Complete,
    ];

    pub fn route(&self) -> &'static str {
        match self {
            Capability::Parse => "/parse",
            Capability::Fill => "/fill",
            Capability::Read => "/read",
            Capability::Detect => "/detect",
            Capability::Complete => "/complete",
        }
    }

    pub fn env_var(&self) -> String {
        format!("CONTRAFORGE_{}_URL", self.to_string().to_uppercase())
    }
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.route()[1..])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackendEndpoint {
    pub capability: Capability,
    /// Base URL; the capability's route is appended.
    pub url: String,
    pub timeout: Duration,
    pub retry: u32,
    pub backoff: Duration,
    pub max_in_flight: usize,
}

impl BackendEndpoint {
    pub fn new(capability: Capability, url: impl Into<String>) -> Self {
        BackendEndpoint {
            capability,
            url: url.into(),
            timeout: Duration::from_secs(30),
            retry: 2,
            backoff: Duration::from_millis(200),
            max_in_flight: 16,
        }
    }

    pub fn route_url(&self) -> String {
        format!("{}{}", self.url.trim_end_matches('/'), self.capability.route())
    }

    /// `capability@url`, used to identify the endpoint in errors.
    pub fn identity(&self) -> String {
        format!("{}@{}", self.capability, self.url)
    }
}

#[derive(Debug, Deserialize)]
struct EndpointFile {
    url: String,
    timeout_secs: Option<f64>,
    retry: Option<u32>,
    max_in_flight: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    #[serde(default)]
    endpoints: BTreeMap<Capability, EndpointFile>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EndpointConfig {
    pub endpoints: BTreeMap<Capability, BackendEndpoint>,
}

impl EndpointConfig {
    /// Read the `[endpoints.<capability>]` tables of a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut endpoints = BTreeMap::new();
        for (cap, e) in file.endpoints {
            let mut ep = BackendEndpoint::new(cap, e.url);
            if let Some(t) = e.timeout_secs {
                if !(t > 0.0) {
                    return Err(Error::Config(format!("{cap}: timeout must be positive")));
                }
                ep.timeout = Duration::from_secs_f64(t);
            }
            if let Some(r) = e.retry {
                ep.retry = r;
            }
            if let Some(m) = e.max_in_flight {
                ep.max_in_flight = m.max(1);
            }
            endpoints.insert(cap, ep);
        }
        Ok(EndpointConfig { endpoints })
    }

    /// Apply `CONTRAFORGE_<CAP>_URL` overrides.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) {
        for cap in Capability::ALL {
            if let Some(url) = lookup(&cap.env_var()).filter(|u| !u.is_empty()) {
                self.set_url(cap, url);
            }
        }
    }

    pub fn set_url(&mut self, cap: Capability, url: String) {
        self.endpoints
            .entry(cap)
            .and_modify(|e| e.url = url.clone())
            .or_insert_with(|| BackendEndpoint::new(cap, url));
    }

    pub fn get(&self, cap: Capability) -> Option<&BackendEndpoint> {
        self.endpoints.get(&cap)
    }
}
