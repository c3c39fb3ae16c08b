//! Turns `--parser`, `--filler`, `--reader`, ... values into backends.

use contraforge::backend::client::HttpClient;
use contraforge::backend::{
    BackendEndpoint, Capability, ChunkParser, ConstituencyParser, Detector, EndpointConfig,
    Filler, GazetteerFiller, GazetteerTable, HttpCompleter, HttpDetector, HttpFiller, HttpParser,
    HttpReader, OracleDetector, OverlapReader, Reader, TreebankParser,
};

use crate::error::{CliError, CliResult};

/// A backend plus the string recorded for it in output metadata.
pub struct Chosen<T: ?Sized> {
    pub backend: Box<T>,
    pub describe: String,
}

fn is_url(s: &str) -> bool {
    s.starts_with("http://") || s.starts_with("https://")
}

/// The configured endpoint for `cap`, with its URL replaced when `url` is given.
fn client(cap: Capability, url: Option<&str>, endpoints: &EndpointConfig) -> Option<HttpClient> {
    let mut ep = endpoints.get(cap).cloned();
    if let Some(url) = url {
        match &mut ep {
            Some(e) => e.url = url.to_string(),
            None => ep = Some(BackendEndpoint::new(cap, url)),
        }
    }
    ep.map(HttpClient::new)
}

fn unknown(flag: &str, value: &str, expected: &str) -> CliError {
    CliError::usage(format!("--{flag} {value:?}: expected {expected}"))
}

pub fn parser(choice: Option<&str>, endpoints: &EndpointConfig) -> CliResult<Chosen<dyn ConstituencyParser>> {
    let chosen: Chosen<dyn ConstituencyParser> = match choice {
        Some("chunk") => Chosen { backend: Box::new(ChunkParser), describe: "chunk".into() },
        Some(s) if s.starts_with("treebank:") => Chosen {
            backend: Box::new(TreebankParser::load(&s["treebank:".len()..])?),
            describe: s.to_string(),
        },
        Some(s) if is_url(s) => Chosen {
            backend: Box::new(HttpParser(client(Capability::Parse, Some(s), endpoints).expect("url given"))),
            describe: s.to_string(),
        },
        Some(s) => return Err(unknown("parser", s, "chunk, treebank:<file> or a URL")),
        None => match client(Capability::Parse, None, endpoints) {
            Some(c) => Chosen { describe: c.endpoint().url.clone(), backend: Box::new(HttpParser(c)) },
            None => Chosen { backend: Box::new(ChunkParser), describe: "chunk".into() },
        },
    };
    Ok(chosen)
}

pub fn filler(choice: Option<&str>, endpoints: &EndpointConfig) -> CliResult<Chosen<dyn Filler>> {
    match choice {
        Some(s) if s.starts_with("gazetteer:") => Ok(Chosen {
            backend: Box::new(GazetteerFiller::new(GazetteerTable::load(&s["gazetteer:".len()..])?)),
            describe: s.to_string(),
        }),
        Some(s) if is_url(s) => Ok(Chosen {
            backend: Box::new(HttpFiller(client(Capability::Fill, Some(s), endpoints).expect("url given"))),
            describe: s.to_string(),
        }),
        Some(s) => Err(unknown("filler", s, "gazetteer:<table.json> or a URL")),
        None => match client(Capability::Fill, None, endpoints) {
            Some(c) => Ok(Chosen { describe: c.endpoint().url.clone(), backend: Box::new(HttpFiller(c)) }),
            None => Err(CliError::usage("no filler: pass --filler or configure a fill endpoint")),
        },
    }
}

pub fn reader(choice: &str, endpoints: &EndpointConfig) -> CliResult<Chosen<dyn Reader>> {
    match choice {
        "overlap" => Ok(Chosen { backend: Box::new(OverlapReader::default()), describe: "overlap".into() }),
        "endpoint" => match client(Capability::Read, None, endpoints) {
            Some(c) => Ok(Chosen { describe: c.endpoint().url.clone(), backend: Box::new(HttpReader(c)) }),
            None => Err(CliError::usage("--reader endpoint: no read endpoint configured")),
        },
        s if is_url(s) => Ok(Chosen {
            backend: Box::new(HttpReader(client(Capability::Read, Some(s), endpoints).expect("url given"))),
            describe: s.to_string(),
        }),
        s => Err(unknown("reader", s, "overlap, endpoint or a URL")),
    }
}

pub fn detector(choice: &str, endpoints: &EndpointConfig) -> CliResult<Chosen<dyn Detector>> {
    match choice {
        "oracle" => Ok(Chosen { backend: Box::new(OracleDetector), describe: "oracle".into() }),
        "endpoint" => match client(Capability::Detect, None, endpoints) {
            Some(c) => Ok(Chosen { describe: c.endpoint().url.clone(), backend: Box::new(HttpDetector(c)) }),
            None => Err(CliError::usage("--detector endpoint: no detect endpoint configured")),
        },
        s if is_url(s) => Ok(Chosen {
            backend: Box::new(HttpDetector(client(Capability::Detect, Some(s), endpoints).expect("url given"))),
            describe: s.to_string(),
        }),
        s => Err(unknown("detector", s, "oracle, endpoint or a URL")),
    }
}

/// A remote completer, when `choice` names one or when one is configured and
/// `choice` is absent. `None` selects the in-process bigram model.
pub fn remote_completer(choice: Option<&str>, endpoints: &EndpointConfig) -> CliResult<Option<(HttpCompleter, String)>> {
    match choice {
        Some("bigram") => Ok(None),
        Some(s) if is_url(s) => {
            let c = client(Capability::Complete, Some(s), endpoints).expect("url given");
            Ok(Some((HttpCompleter(c), s.to_string())))
        }
        Some(s) => Err(unknown("completer", s, "bigram or a URL")),
        None => Ok(client(Capability::Complete, None, endpoints).map(|c| {
            let url = c.endpoint().url.clone();
            (HttpCompleter(c), url)
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_resolve() {
        let none = EndpointConfig::default();
        assert_eq!(parser(None, &none).unwrap().describe, "chunk");
        assert_eq!(parser(Some("http://x:1"), &none).unwrap().describe, "http://x:1");
        assert!(parser(Some("bogus"), &none).is_err());
        assert!(filler(None, &none).is_err());
        assert_eq!(reader("overlap", &none).unwrap().describe, "overlap");
        assert_eq!(detector("oracle", &none).unwrap().describe, "oracle");
        assert!(detector("endpoint", &none).is_err());

        let mut cfg = EndpointConfig::default();
        cfg.set_url(Capability::Parse, "http://p:2".into());
        cfg.set_url(Capability::Fill, "http://f:3".into());
        assert_eq!(parser(None, &cfg).unwrap().describe, "http://p:2");
        assert_eq!(filler(None, &cfg).unwrap().describe, "http://f:3");
        assert!(remote_completer(None, &cfg).unwrap().is_none());
    }
}
