//! Blocking HTTP clients for the wire protocol.

use std::sync::{Arc, Condvar, Mutex};
use std::thread;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::wire::*;
use super::{
    BackendEndpoint, Completer, ConstituencyParser, Detector, FillRequest, Filler, MaskedSpan,
    Reader, ScoredAnswer,
};
use crate::error::{Error, Result};
use crate::squad::Paragraph;
use crate::text::{char_len, char_slice};

/// Counting gate bounding concurrent requests to one endpoint.
struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
    limit: usize,
}

impl Gate {
    fn acquire(&self) -> GateGuard<'_> {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.limit {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

/// One endpoint: timeout, retries with exponential backoff, in-flight bound.
#[derive(Clone)]
pub struct HttpClient {
    endpoint: BackendEndpoint,
    agent: ureq::Agent,
    gate: Arc<Gate>,
}

enum Attempt {
    Retry(String),
    Fatal(Error),
}

impl HttpClient {
    pub fn new(endpoint: BackendEndpoint) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(endpoint.timeout))
            .http_status_as_error(false)
            .build();
        let gate = Arc::new(Gate {
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
            limit: endpoint.max_in_flight.max(1),
        });
        HttpClient {
            agent: config.into(),
            endpoint,
            gate,
        }
    }

    pub fn endpoint(&self) -> &BackendEndpoint {
        &self.endpoint
    }

    fn attempt<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        url: &str,
        body: &Req,
    ) -> std::result::Result<Resp, Attempt> {
        let _slot = self.gate.acquire();
        let mut response = match self.agent.post(url).send_json(body) {
            Ok(r) => r,
            Err(e) => return Err(Attempt::Retry(e.to_string())),
        };
        let status = response.status().as_u16();
        if status >= 500 && status != 501 {
            return Err(Attempt::Retry(format!("status {status}")));
        }
        if status >= 400 {
            let message = response
                .body_mut()
                .read_json::<ErrorBody>()
                .map(|b| b.error)
                .unwrap_or_else(|_| "request rejected".into());
            return Err(Attempt::Fatal(Error::Protocol {
                endpoint: self.endpoint.identity(),
                status,
                message,
            }));
        }
        response.body_mut().read_json::<Resp>().map_err(|e| {
            Attempt::Fatal(Error::Backend {
                endpoint: self.endpoint.identity(),
                message: format!("malformed response: {e}"),
            })
        })
    }

    /// POST `body` to the capability route, retrying transport failures.
    pub fn call<Req: Serialize, Resp: DeserializeOwned>(&self, body: &Req) -> Result<Resp> {
        let url = self.endpoint.route_url();
        let mut last = String::new();
        for attempt in 0..=self.endpoint.retry {
            if attempt > 0 {
                thread::sleep(self.endpoint.backoff * 2u32.saturating_pow(attempt - 1));
            }
            match self.attempt(&url, body) {
                Ok(r) => return Ok(r),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) => last = msg,
            }
        }
        Err(Error::Backend {
            endpoint: self.endpoint.identity(),
            message: format!(
                "giving up after {} attempts: {last}",
                self.endpoint.retry + 1
            ),
        })
    }
}

pub struct HttpParser(pub HttpClient);

impl ConstituencyParser for HttpParser {
    fn parse(&self, sentence: &str) -> Result<String> {
        let r: ParseResponse = self.0.call(&ParseRequest {
            sentence: sentence.to_string(),
        })?;
        Ok(r.tree)
    }
}

pub struct HttpFiller(pub HttpClient);

impl Filler for HttpFiller {
    fn fill(&self, request: &FillRequest, span: &MaskedSpan, n: usize) -> Result<Vec<String>> {
        let body = FillRequestBody {
            first_sentence: request.first_sentence.clone(),
            previous_sentence: request.previous_sentence.clone(),
            masked_sentence: request.masked_sentence.clone(),
            next_sentence: request.next_sentence.clone(),
            n_candidates: n,
            mask_token: span.mask_token.clone(),
            label: Some(span.label.clone()),
            original: Some(span.original.clone()),
            seed: Some(span.seed),
        };
        let r: FillResponse = self.0.call(&body)?;
        let (clean, dropped): (Vec<String>, Vec<String>) = r
            .candidates
            .into_iter()
            .partition(|c| !c.contains(&span.mask_token));
        if !dropped.is_empty() {
            log::warn!(
                "{}: dropped {} candidates containing the mask token",
                self.0.endpoint().identity(),
                dropped.len()
            );
        }
        Ok(clean.into_iter().take(n).collect())
    }
}

pub struct HttpReader(pub HttpClient);

impl Reader for HttpReader {
    fn read(&self, question: &str, paragraph: &str) -> Result<ScoredAnswer> {
        let r: ReadResponse = self.0.call(&ReadRequest {
            question: question.to_string(),
            paragraph: paragraph.to_string(),
        })?;
        let contract = |msg: String| Error::Contract(format!("{}: {msg}", self.0.endpoint().identity()));
        if r.start > r.end || r.end > char_len(paragraph) {
            return Err(contract(format!(
                "span ({}, {}) outside paragraph of {} chars",
                r.start,
                r.end,
                char_len(paragraph)
            )));
        }
        if char_slice(paragraph, r.start, r.end)? != r.text {
            return Err(contract("answer text does not match its span".into()));
        }
        if !(0.0..=1.0).contains(&r.span_score) {
            return Err(contract(format!("span score {} outside [0, 1]", r.span_score)));
        }
        Ok(ScoredAnswer::new(r.text, (r.start, r.end), r.span_score))
    }
}

pub struct HttpDetector(pub HttpClient);

impl Detector for HttpDetector {
    fn detect(&self, context: &Paragraph) -> Result<f64> {
        let r: DetectResponse = self.0.call(&DetectRequest {
            paragraph: context.text.clone(),
        })?;
        if !(0.0..=1.0).contains(&r.trust) {
            return Err(Error::Contract(format!(
                "{}: trust {} outside [0, 1]",
                self.0.endpoint().identity(),
                r.trust
            )));
        }
        Ok(r.trust)
    }
}

pub struct HttpCompleter(pub HttpClient);

impl Completer for HttpCompleter {
    fn complete(&self, prompt: &str) -> Result<String> {
        let r: CompleteResponse = self.0.call(&CompleteRequest {
            prompt: prompt.to_string(),
        })?;
        Ok(r.continuation)
    }
}
