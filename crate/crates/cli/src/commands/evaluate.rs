use std::io::Write;

use contraforge::eval::{render_table, run_evaluation, run_sweep, EvalConfig, EvalReport, Setting};
use contraforge::squad::read_dataset;
use serde_json::json;

use crate::args::EvaluateArgs;
use crate::backends;
use crate::context::Context;
use crate::error::{CliError, CliResult};

/// Fake counts reported by `--n-fakes-sweep`.
pub const SWEEP: [usize; 5] = [0, 1, 2, 3, 4];

fn io_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::usage(format!("{}: {e}", path.display()))
}

pub fn run(args: &EvaluateArgs, ctx: &Context) -> CliResult {
    let samples = read_dataset(&args.dataset)?;
    let reader = backends::reader(&args.reader, &ctx.endpoints)?;
    let detector = args
        .detector
        .as_deref()
        .map(|d| backends::detector(d, &ctx.endpoints))
        .transpose()?;
    let setting = match &args.setting {
        Some(s) => Setting::parse(s)?,
        None if detector.is_some() => Setting::ContraWithDetector,
        None => Setting::Contra,
    };
    if setting.uses_detector() && detector.is_none() {
        return Err(CliError::usage(format!("setting {} needs --detector", setting.name())));
    }
    if args.n_fakes.is_some() && args.n_fakes_sweep {
        return Err(CliError::usage("--n-fakes and --n-fakes-sweep are exclusive"));
    }
    let config = EvalConfig {
        setting,
        lambda: args.lambda.or(ctx.file.lambda).unwrap_or(0.5),
        n_fakes: args.n_fakes,
        threshold: args.threshold.or(ctx.file.threshold).unwrap_or(0.5),
    };
    config.validate()?;

    let det = detector.as_ref().map(|d| d.backend.as_ref());
    let reports: Vec<EvalReport> = if args.n_fakes_sweep {
        run_sweep(&samples, reader.backend.as_ref(), det, &config, &SWEEP)?
    } else {
        vec![run_evaluation(&samples, reader.backend.as_ref(), det, &config)?]
    };

    let meta = ctx
        .meta("evaluate")
        .flag("dataset", &args.dataset)
        .flag("reader", &reader.describe)
        .flag("detector", detector.as_ref().map(|d| &d.describe))
        .flag("setting", setting.name())
        .flag("lambda", config.lambda)
        .flag("threshold", config.threshold)
        .flag("n_fakes", args.n_fakes)
        .flag("n_fakes_sweep", args.n_fakes_sweep)
        .flag("report", &args.report)
        .flag("per_sample", &args.per_sample)
        .flag("table", &args.table)
        .to_value();
    let table = render_table(&reports);

    let mut out = super::create(&args.report)?;
    serde_json::to_writer_pretty(&mut out, &json!({"meta": meta, "reports": reports}))?;
    out.write_all(b"\n").and_then(|_| out.flush()).map_err(|e| io_err(&args.report, e))?;

    if let Some(path) = &args.per_sample {
        let mut out = super::create(path)?;
        let mut line = |v: serde_json::Value| -> CliResult {
            serde_json::to_writer(&mut out, &v)?;
            out.write_all(b"\n").map_err(|e| io_err(path, e))
        };
        line(json!({"meta": meta}))?;
        for r in &reports {
            for s in &r.per_sample {
                let mut v = serde_json::to_value(s)?;
                v["n_fakes"] = json!(r.n_fakes);
                line(v)?;
            }
        }
        out.flush().map_err(|e| io_err(path, e))?;
    }
    if let Some(path) = &args.table {
        std::fs::write(path, &table).map_err(|e| io_err(path, e))?;
    }
    print!("{table}");

    let errored: usize = reports.iter().map(|r| r.n_errored).sum();
    if errored > 0 {
        return Err(CliError::backend(format!(
            "{errored} sample evaluations failed; see the log for details"
        )));
    }
    Ok(())
}
