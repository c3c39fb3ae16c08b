use std::hint::black_box;

use contraforge::annotation::diff_hunks;
use contraforge::eval::{f1, levenshtein};
use contraforge::ptb::parse_bracketed;
use criterion::{criterion_group, criterion_main, Criterion};

const ORIGINAL: &str = "Super Bowl 50 was an American football game to determine the champion of the National Football League for the 2015 season. The Denver Broncos defeated the Carolina Panthers 24 to 10 to earn their third Super Bowl title. The game was played on February 7, 2016, at Levi's Stadium in the San Francisco Bay Area at Santa Clara, California.";
const MODIFIED: &str = "Super Bowl 50 was an American football match to decide the champion of the National Football League for the 2015 season. The Seattle Seahawks defeated the Carolina Panthers 31 to 17 to earn their second title. The match was played on March 3, 2016, in Atlanta.";
const SENTENCE: &str = "The game was played on February 7, 2016, at Levi's Stadium.";
const TREE: &str = "(S (NP (DT The) (NN game)) (VP (VBD was) (VP (VBN played) (PP (IN on) (NP (NNP February) (CD 7) (, ,) (CD 2016))) (, ,) (PP (IN at) (NP (NP (NNP Levi) (POS 's)) (NNP Stadium))))) (. .))";

fn benches(c: &mut Criterion) {
    c.bench_function("levenshtein/paragraph", |b| b.iter(|| levenshtein(black_box(ORIGINAL), black_box(MODIFIED))));
    c.bench_function("diff_hunks/paragraph", |b| b.iter(|| diff_hunks(black_box(ORIGINAL), black_box(MODIFIED))));
    c.bench_function("ptb/parse_bracketed", |b| b.iter(|| parse_bracketed(black_box(TREE), black_box(SENTENCE)).unwrap()));
    let golds = vec!["Denver Broncos".to_string(), "the Broncos".to_string()];
    c.bench_function("f1/two_golds", |b| b.iter(|| f1(black_box("The Denver Broncos team"), black_box(&golds))));
}

criterion_group!(hot_paths, benches);
criterion_main!(hot_paths);
