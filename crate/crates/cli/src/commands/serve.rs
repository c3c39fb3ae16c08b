use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use contraforge::annotation::{self, AnnotationStore};
use contraforge::backend::server::{router, BaselineServices};
use contraforge::backend::{BigramCompleter, ChunkParser, GazetteerFiller, GazetteerTable, LookupDetector, OverlapReader, TreebankParser};
use contraforge::http::serve_blocking;

use crate::args::{ServeAnnotationArgs, ServeBaselinesArgs};
use crate::context::Context;
use crate::error::{CliError, CliResult};
use crate::inputs::load_paragraphs;

fn addr(host: &str, port: u16) -> CliResult<SocketAddr> {
    format!("{host}:{port}")
        .parse()
        .map_err(|e| CliError::usage(format!("bad listen address {host}:{port}: {e}")))
}

pub fn annotation(args: &ServeAnnotationArgs, _ctx: &Context) -> CliResult {
    let store = AnnotationStore::open(&args.store, Duration::from_secs(args.lease_secs))?;
    let addr = addr(&args.host, args.port)?;
    eprintln!("annotation service on http://{addr} (store {})", args.store.display());
    serve_blocking(annotation::router(Arc::new(store)), addr)?;
    Ok(())
}

pub fn baselines(args: &ServeBaselinesArgs, ctx: &Context) -> CliResult {
    let mut services = BaselineServices {
        parser: Some(match &args.treebank {
            Some(p) => Arc::new(TreebankParser::load(p)?),
            None => Arc::new(ChunkParser),
        }),
        reader: Some(Arc::new(OverlapReader::default())),
        ..Default::default()
    };
    if let Some(p) = &args.gazetteer {
        services.filler = Some(Arc::new(GazetteerFiller::new(GazetteerTable::load(p)?)));
    }
    if let Some(p) = &args.real {
        let texts = load_paragraphs(p)?;
        services.detector = Some(Arc::new(LookupDetector::new(texts.iter().map(String::as_str))));
    }
    if let Some(p) = &args.corpus {
        let texts = load_paragraphs(p)?;
        services.completer = Some(Arc::new(BigramCompleter::fit(texts.iter().map(String::as_str), ctx.seed)));
    }
    let addr = addr(&args.host, args.port)?;
    eprintln!("baseline backends on http://{addr}");
    serve_blocking(router(services), addr)?;
    Ok(())
}
