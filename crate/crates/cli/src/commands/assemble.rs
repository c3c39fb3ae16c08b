use std::collections::BTreeMap;

use contraforge::fakes::read_fakes;
use contraforge::squad::{assemble_contra, load_squad, sample_random_contexts, DatasetWriter};
use contraforge::{seed, Paragraph};

use crate::args::AssembleArgs;
use crate::context::Context;
use crate::error::{CliError, CliResult};

pub fn run(args: &AssembleArgs, ctx: &Context) -> CliResult {
    if args.fakes.is_none() && !args.random_ctx {
        return Err(CliError::usage("pass --fakes, --random-ctx, or both"));
    }
    let squad = load_squad(&args.real)?;
    let mut fakes: BTreeMap<String, Vec<Paragraph>> = BTreeMap::new();
    let mut skipped = 0usize;
    if let Some(path) = &args.fakes {
        for rec in read_fakes(path)? {
            // A fake identical to its source would be a second copy of the real context.
            if rec.zero_edit {
                skipped += 1;
                continue;
            }
            fakes.entry(rec.paragraph_id.clone()).or_default().push(rec.to_paragraph()?);
        }
    }
    let pool: Vec<Paragraph> = squad.iter().map(|(p, _)| p.clone()).collect();

    let mut meta = ctx
        .meta("assemble")
        .flag("real", &args.real)
        .flag("fakes", &args.fakes)
        .flag("out", &args.out)
        .flag("random_ctx", args.random_ctx);
    if args.random_ctx {
        meta = meta.flag("n_random", args.n_random);
    }
    let mut writer = DatasetWriter::new(super::create(&args.out)?, Some(meta.to_value()))?;
    let (mut samples, mut without_fakes) = (0usize, 0usize);
    for (real, qas) in &squad {
        let mut others: Vec<Paragraph> = fakes
            .get(&real.id)
            .map(|v| v.iter().filter(|f| f.id != real.id).cloned().collect())
            .unwrap_or_default();
        if others.is_empty() && args.fakes.is_some() {
            without_fakes += 1;
        }
        if args.random_ctx {
            let draw = seed::derive(ctx.seed, &["random_ctx", &real.id]);
            others.extend(sample_random_contexts(&pool, args.n_random, &real.id, draw)?);
        }
        for sample in assemble_contra(real, &others, qas, ctx.seed)? {
            writer.write(&sample)?;
            samples += 1;
        }
    }
    writer.finish()?;
    let unmatched = fakes.keys().filter(|id| !pool.iter().any(|p| &p.id == *id)).count();
    if unmatched > 0 {
        log::warn!("{unmatched} fake groups refer to paragraphs not in {}", args.real.display());
    }
    println!(
        "{}",
        serde_json::json!({
            "paragraphs": squad.len(),
            "samples": samples,
            "paragraphs_without_fakes": without_fakes,
            "zero_edit_fakes_skipped": skipped,
        })
    );
    Ok(())
}
