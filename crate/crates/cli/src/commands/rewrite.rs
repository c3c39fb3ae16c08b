use contraforge::backend::{BigramCompleter, Completer, ConstituencyParser, Filler};
use contraforge::fakes::{FakeRecord, FakeWriter};
use contraforge::rewrite::{prefix_completion_rewrite, rewrite_paragraph};
use contraforge::squad::paragraph_id;
use contraforge::{seed, Provenance, Result, RewriteConfig};
use rayon::prelude::*;

use crate::args::{Mode, RewriteArgs};
use crate::backends;
use crate::context::Context;
use crate::error::{CliError, CliResult};
use crate::inputs::load_paragraphs;

enum Engine {
    Iterative {
        filler: Box<dyn Filler>,
        parser: Box<dyn ConstituencyParser>,
        config: RewriteConfig,
    },
    Prefix {
        remote: Option<Box<dyn Completer>>,
        bigram: BigramCompleter,
        ratio: f64,
    },
}

impl Engine {
    fn fake(&self, text: &str, pid: &str, index: usize, seed_value: u64) -> Result<FakeRecord> {
        let stream = seed::derive(seed_value, &["rewrite", pid, &index.to_string()]);
        match self {
            Engine::Iterative { filler, parser, config } => {
                let mut rng = seed::rng(stream);
                let r = rewrite_paragraph(text, filler.as_ref(), parser.as_ref(), config, &mut rng)?;
                let k = config.k_iterations;
                let zero_edit = r.step_count() == 0;
                let mut rec = FakeRecord::new(pid, index, r.text, Provenance::ModelFake { k });
                rec.traces = r.traces;
                rec.zero_edit = zero_edit;
                Ok(rec)
            }
            Engine::Prefix { remote, bigram, ratio } => {
                let r = match remote {
                    Some(c) => prefix_completion_rewrite(text, c.as_ref(), *ratio)?,
                    None => {
                        let mut completer = bigram.clone();
                        completer.seed = stream;
                        prefix_completion_rewrite(text, &completer, *ratio)?
                    }
                };
                let mut rec = FakeRecord::new(pid, index, r.text, Provenance::PrefixFake);
                rec.zero_edit = r.zero_edit;
                Ok(rec)
            }
        }
    }
}

pub fn run(args: &RewriteArgs, ctx: &Context) -> CliResult {
    if args.k < 1 {
        return Err(CliError::usage("K must be >= 1"));
    }
    if args.n_fakes < 1 {
        return Err(CliError::usage("--n-fakes must be >= 1"));
    }
    let paragraphs = load_paragraphs(&args.input)?;
    let mut meta = ctx
        .meta("rewrite")
        .flag("input", &args.input)
        .flag("out", &args.out)
        .flag("n_fakes", args.n_fakes);

    let engine = match args.mode {
        Mode::Bartfg => {
            let filler = backends::filler(args.filler.as_deref(), &ctx.endpoints)?;
            let parser = backends::parser(args.parser.as_deref(), &ctx.endpoints)?;
            let config = RewriteConfig {
                mask_token: args.mask_token.clone(),
                seed: ctx.seed,
                ..RewriteConfig::with_k(args.k)
            };
            config.validate()?;
            meta = meta
                .flag("mode", "bartfg")
                .flag("k", args.k)
                .flag("filler", &filler.describe)
                .flag("parser", &parser.describe)
                .flag("mask_token", &config.mask_token);
            Engine::Iterative { filler: filler.backend, parser: parser.backend, config }
        }
        Mode::Prefix => {
            if !(args.prefix_ratio > 0.0 && args.prefix_ratio < 1.0) {
                return Err(CliError::usage("--prefix-ratio must be in (0, 1)"));
            }
            let remote = backends::remote_completer(args.completer.as_deref(), &ctx.endpoints)?;
            let describe = remote.as_ref().map_or("bigram".to_string(), |(_, d)| d.clone());
            meta = meta
                .flag("mode", "prefix")
                .flag("prefix_ratio", args.prefix_ratio)
                .flag("completer", describe);
            Engine::Prefix {
                remote: remote.map(|(c, _)| Box::new(c) as Box<dyn Completer>),
                bigram: BigramCompleter::fit(paragraphs.iter().map(String::as_str), ctx.seed),
                ratio: args.prefix_ratio,
            }
        }
    };

    let results: Vec<Result<Vec<FakeRecord>>> = paragraphs
        .par_iter()
        .map(|text| {
            let pid = paragraph_id(text);
            (0..args.n_fakes).map(|i| engine.fake(text, &pid, i, ctx.seed)).collect()
        })
        .collect();

    let mut writer = FakeWriter::new(super::create(&args.out)?, Some(meta.to_value()))?;
    let (mut written, mut zero_edit, mut failed) = (0usize, 0usize, 0usize);
    let mut first_error = None;
    for (text, result) in paragraphs.iter().zip(results) {
        match result {
            Ok(records) => {
                for r in &records {
                    zero_edit += usize::from(r.zero_edit);
                    writer.write(r)?;
                    written += 1;
                }
            }
            Err(e) => {
                log::warn!("paragraph {} failed: {e}", paragraph_id(text));
                failed += 1;
                first_error.get_or_insert(e);
            }
        }
    }
    writer.finish()?;
    println!(
        "{}",
        serde_json::json!({"paragraphs": paragraphs.len(), "fakes": written, "zero_edit": zero_edit, "failed": failed})
    );
    match first_error {
        None => Ok(()),
        Some(e) => {
            let mut err = CliError::from(e);
            err.message = format!("{failed} of {} paragraphs failed; first error: {}", paragraphs.len(), err.message);
            Err(err)
        }
    }
}
