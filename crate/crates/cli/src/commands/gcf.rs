use contraforge::gcf::{build_stream, open_articles, GcfConfig, TrainingWriter};

use crate::args::GcfBuildArgs;
use crate::backends;
use crate::context::Context;
use crate::error::CliResult;

pub fn run(args: &GcfBuildArgs, ctx: &Context) -> CliResult {
    let parser = backends::parser(args.parser.as_deref(), &ctx.endpoints)?;
    let config = GcfConfig {
        mask_token: args.mask_token.clone(),
        max_sentence_tokens: args.max_sentence_tokens,
        ..GcfConfig::default()
    };
    let meta = ctx
        .meta("gcf-build")
        .flag("input", &args.input)
        .flag("out", &args.out)
        .flag("parser", &parser.describe)
        .flag("mask_token", &config.mask_token)
        .flag("max_sentence_tokens", config.max_sentence_tokens);
    let articles = open_articles(&args.input)?;
    let mut writer = TrainingWriter::new(super::create(&args.out)?, config.clone(), Some(meta.to_value()))?;
    let stats = build_stream(articles, parser.backend.as_ref(), &config, ctx.seed, &mut writer)?;
    writer.finish()?;
    println!("{}", serde_json::to_string(&stats)?);
    Ok(())
}
