use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use sumo_core::engine::generate_campaign;
use sumo_core::operators::CATALOG;
use sumo_core::parser::SourceFile;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn fixture_targets() -> Vec<String> {
    CATALOG
        .iter()
        .map(|info| format!("operators/{}.sol", info.id))
        .collect()
}

fn parse_one_file(c: &mut Criterion) {
    let path = fixtures_dir().join("operators/BOR.sol");
    let text = std::fs::read_to_string(path).unwrap();
    c.bench_function("parse BOR fixture", |b| {
        b.iter(|| SourceFile::from_text("operators/BOR.sol", black_box(&text)).unwrap())
    });
}

fn generate_full_catalog(c: &mut Criterion) {
    let dir = fixtures_dir();
    let targets = fixture_targets();
    let enabled: BTreeSet<String> = CATALOG.iter().map(|info| info.id.to_string()).collect();
    c.bench_function("generate over 44 fixtures, all operators", |b| {
        b.iter(|| generate_campaign(black_box(&dir), black_box(&targets), black_box(&enabled)))
    });
}

fn generate_single_operator(c: &mut Criterion) {
    let dir = fixtures_dir();
    let targets = vec!["operators/BOR.sol".to_string()];
    let enabled: BTreeSet<String> = ["BOR".to_string()].into();
    c.bench_function("generate BOR fixture, one operator", |b| {
        b.iter(|| generate_campaign(black_box(&dir), black_box(&targets), black_box(&enabled)))
    });
}

criterion_group!(
    benches,
    parse_one_file,
    generate_full_catalog,
    generate_single_operator
);
criterion_main!(benches);
