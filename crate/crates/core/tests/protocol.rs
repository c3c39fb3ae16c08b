//! Wire-contract suite. The same golden cases run against the in-process
//! baselines and, when `CONTRAFORGE_SIDECAR_URL` is set, against an external
//! model service (contract checks only, since model outputs differ).

use std::sync::Arc;
use std::time::Duration;

use axum::routing::post;
use axum::Router;
use contraforge::backend::client::HttpClient;
use contraforge::backend::server::{router, BaselineServices};
use contraforge::backend::{
    BackendEndpoint, BigramCompleter, Capability, ConstituencyParser, Filler, GazetteerFiller,
    GazetteerTable, HttpFiller, HttpParser, HttpReader, LookupDetector, MaskedSpan, OverlapReader,
    Reader, TreebankParser,
};
use contraforge::http::BackgroundServer;
use contraforge::ptb::parse_bracketed;
use contraforge::{Error, FillRequest};
use serde_json::Value;

fn services() -> BaselineServices {
    let table = GazetteerTable::default().with_phrase("NP", "Santa Clara", &["Atlanta"]);
    BaselineServices {
        parser: Some(Arc::new(TreebankParser::from_trees(["(NP (DT the) (NN game))"]).unwrap())),
        filler: Some(Arc::new(GazetteerFiller::new(table))),
        reader: Some(Arc::new(OverlapReader::default())),
        detector: Some(Arc::new(LookupDetector::new(["The Broncos won the game."]))),
        completer: Some(Arc::new(BigramCompleter::fit(
            ["The Broncos won the game and the fans cheered."],
            1,
        ))),
    }
}

fn post_json(url: &str, body: &Value) -> (u16, Value) {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into();
    let mut r = agent.post(url).send_json(body).unwrap();
    let status = r.status().as_u16();
    let text = r.body_mut().read_to_string().unwrap();
    (status, serde_json::from_str(&text).unwrap_or(Value::Null))
}

fn check_contract(name: &str, kind: &str, req: &Value, body: &Value) {
    let chars = |v: &Value| v.as_str().unwrap().chars().collect::<Vec<_>>();
    match kind {
        "tree_aligns" => {
            let tree = body["tree"].as_str().unwrap();
            parse_bracketed(tree, req["sentence"].as_str().unwrap())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        "error_body" => assert!(body["error"].is_string(), "{name}: {body}"),
        "fill_candidates" => {
            let c = body["candidates"].as_array().unwrap();
            let n = req["n_candidates"].as_u64().unwrap_or(3) as usize;
            assert!(!c.is_empty() && c.len() <= n, "{name}: {body}");
            let mask = req["mask_token"].as_str().unwrap_or("[MASK]");
            assert!(c.iter().all(|s| !s.as_str().unwrap().contains(mask)), "{name}");
        }
        "read_span" => {
            let p = chars(&req["paragraph"]);
            let (s, e) = (body["start"].as_u64().unwrap() as usize, body["end"].as_u64().unwrap() as usize);
            assert!(s <= e && e <= p.len(), "{name}: span out of range");
            assert_eq!(p[s..e].iter().collect::<String>(), body["text"].as_str().unwrap(), "{name}");
            let score = body["span_score"].as_f64().unwrap();
            assert!((0.0..=1.0).contains(&score), "{name}");
        }
        "trust" => {
            let t = body["trust"].as_f64().unwrap();
            assert!((0.0..=1.0).contains(&t), "{name}");
        }
        "continuation" => assert!(body["continuation"].is_string(), "{name}"),
        other => panic!("unknown contract {other}"),
    }
}

fn run_suite(base: &str, exact: bool) {
    let golden: Value = serde_json::from_str(include_str!("fixtures/protocol_golden.json")).unwrap();
    for case in golden["cases"].as_array().unwrap() {
        let name = case["name"].as_str().unwrap();
        let url = format!("{base}{}", case["route"].as_str().unwrap());
        let (status, body) = post_json(&url, &case["request"]);
        assert_eq!(status as u64, case["status"].as_u64().unwrap(), "{name}: {body}");
        if exact {
            if let Some(want) = case.get("body") {
                assert_eq!(&body, want, "{name}");
            }
        }
        if let Some(kind) = case["contract"].as_str() {
            check_contract(name, kind, &case["request"], &body);
        }
    }
}

#[test]
fn baselines_pass_golden_suite() {
    let server = BackgroundServer::spawn(router(services())).unwrap();
    run_suite(&server.url(), true);
}

#[test]
fn external_service_passes_golden_suite() {
    match std::env::var("CONTRAFORGE_SIDECAR_URL") {
        Ok(url) if !url.is_empty() => run_suite(url.trim_end_matches('/'), false),
        _ => eprintln!("CONTRAFORGE_SIDECAR_URL not set; external run skipped"),
    }
}

#[test]
fn unconfigured_routes_answer_501() {
    let server = BackgroundServer::spawn(router(BaselineServices::default())).unwrap();
    for cap in Capability::ALL {
        let valid = match cap {
            Capability::Parse => serde_json::json!({"sentence": "a"}),
            Capability::Fill => serde_json::json!({"first_sentence": "", "previous_sentence": "", "masked_sentence": "[MASK]", "next_sentence": ""}),
            Capability::Read => serde_json::json!({"question": "q", "paragraph": "p"}),
            Capability::Detect => serde_json::json!({"paragraph": "p"}),
            Capability::Complete => serde_json::json!({"prompt": "p"}),
        };
        let (status, body) = post_json(&format!("{}{}", server.url(), cap.route()), &valid);
        assert_eq!(status, 501, "{cap}");
        assert!(body["error"].as_str().unwrap().contains("not configured"));
    }
}

fn endpoint(cap: Capability, url: String, retry: u32, timeout_ms: u64) -> BackendEndpoint {
    let mut e = BackendEndpoint::new(cap, url);
    e.retry = retry;
    e.timeout = Duration::from_millis(timeout_ms);
    e.backoff = Duration::from_millis(5);
    e
}

#[test]
fn clients_round_trip_through_server() {
    let server = BackgroundServer::spawn(router(services())).unwrap();
    let parser = HttpParser(HttpClient::new(endpoint(Capability::Parse, server.url(), 0, 5000)));
    assert_eq!(parser.parse("the game").unwrap(), "(NP (DT the) (NN game))");

    let reader = HttpReader(HttpClient::new(endpoint(Capability::Read, server.url(), 0, 5000)));
    let a = reader.read("who won the game", "The Broncos won the game.").unwrap();
    assert_eq!(a.text, "The Broncos");
    assert_eq!(a.char_span, (0, 11));
    assert_eq!(a.span_score, 0.75);

    let filler = HttpFiller(HttpClient::new(endpoint(Capability::Fill, server.url(), 0, 5000)));
    let req = FillRequest {
        first_sentence: String::new(),
        previous_sentence: String::new(),
        masked_sentence: "It was in [MASK].".into(),
        next_sentence: String::new(),
    };
    let span = MaskedSpan {
        label: "NP".into(),
        original: "Santa Clara".into(),
        mask_token: "[MASK]".into(),
        seed: 3,
    };
    assert_eq!(filler.fill(&req, &span, 3).unwrap(), vec!["Atlanta".to_string()]);
}

#[test]
fn client_surfaces_422_as_protocol_error() {
    let server = BackgroundServer::spawn(router(services())).unwrap();
    let parser = HttpParser(HttpClient::new(endpoint(Capability::Parse, server.url(), 2, 5000)));
    match parser.parse("") {
        Err(Error::Protocol { status: 422, .. }) => {}
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn unreachable_endpoint_is_a_backend_error() {
    // Bind then drop to get a port with nothing listening.
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let parser = HttpParser(HttpClient::new(endpoint(
        Capability::Parse,
        format!("http://127.0.0.1:{port}"),
        2,
        500,
    )));
    let err = parser.parse("the game").unwrap_err();
    assert!(err.is_backend(), "{err:?}");
    let msg = err.to_string();
    assert!(msg.contains("parse") && msg.contains(&port.to_string()), "{msg}");
    assert!(msg.contains("3 attempts"), "{msg}");
}

#[test]
fn timeout_after_retries_is_a_backend_error() {
    let slow = Router::new().route(
        "/parse",
        post(|| async {
            tokio::time::sleep(Duration::from_secs(2)).await;
            "{}"
        }),
    );
    let server = BackgroundServer::spawn(slow).unwrap();
    let parser = HttpParser(HttpClient::new(endpoint(Capability::Parse, server.url(), 1, 150)));
    let started = std::time::Instant::now();
    let err = parser.parse("the game").unwrap_err();
    assert!(err.is_backend(), "{err:?}");
    assert!(started.elapsed() < Duration::from_secs(2));
}

#[test]
fn read_span_outside_paragraph_is_a_contract_error() {
    let lying = Router::new().route(
        "/read",
        post(|| async {
            axum::Json(serde_json::json!({"text": "x", "start": 0, "end": 99, "span_score": 0.5}))
        }),
    );
    let server = BackgroundServer::spawn(lying).unwrap();
    let reader = HttpReader(HttpClient::new(endpoint(Capability::Read, server.url(), 0, 2000)));
    match reader.read("q", "short") {
        Err(Error::Contract(_)) => {}
        other => panic!("expected contract error, got {other:?}"),
    }
}

#[test]
fn server_errors_are_retried() {
    use std::sync::atomic::{AtomicUsize, Ordering};
    let hits = Arc::new(AtomicUsize::new(0));
    let h = hits.clone();
    let flaky = Router::new().route(
        "/detect",
        post(move || {
            let h = h.clone();
            async move {
                if h.fetch_add(1, Ordering::SeqCst) == 0 {
                    (axum::http::StatusCode::SERVICE_UNAVAILABLE, "{}".to_string())
                } else {
                    (axum::http::StatusCode::OK, r#"{"trust": 0.25}"#.to_string())
                }
            }
        }),
    );
    let server = BackgroundServer::spawn(flaky).unwrap();
    let client = HttpClient::new(endpoint(Capability::Detect, server.url(), 2, 2000));
    let r: contraforge::backend::wire::DetectResponse = client
        .call(&contraforge::backend::wire::DetectRequest { paragraph: "p".into() })
        .unwrap();
    assert_eq!(r.trust, 0.25);
    assert_eq!(hits.load(Ordering::SeqCst), 2);
}
