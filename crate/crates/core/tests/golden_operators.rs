//! Each operator has a fixture contract and a frozen expected mutant set;
//! generation must reproduce the set exactly: ids, spans, original text and
//! replacement text. Regenerate the frozen files with
//! `SUMO_BLESS=1 cargo test -p sumo-core --test golden_operators -- --ignored`
//! and review the diff before committing.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sumo_core::engine::generate_campaign;
use sumo_core::operators::CATALOG;

#[derive(Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ExpectedMutant {
    id: String,
    start: usize,
    end: usize,
    original: String,
    replacement: String,
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn expected_path(op: &str) -> PathBuf {
    fixtures_dir().join(format!("operators/{op}.expected.json"))
}

fn actual_mutants(op: &str) -> Vec<ExpectedMutant> {
    let enabled: BTreeSet<String> = [op.to_string()].into();
    let target = format!("operators/{op}.sol");
    let plan = generate_campaign(&fixtures_dir(), &[target], &enabled);
    assert!(
        plan.diagnostics.is_empty(),
        "fixture for {op} must parse: {:?}",
        plan.diagnostics
    );
    plan.mutants
        .iter()
        .map(|m| ExpectedMutant {
            id: m.id.clone(),
            start: m.mutation.span.start,
            end: m.mutation.span.end,
            original: m.mutation.original.clone(),
            replacement: m.mutation.replacement.clone(),
        })
        .collect()
}

fn check(op: &str) {
    let path = expected_path(op);
    let text = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing frozen set {}", path.display()));
    let expected: Vec<ExpectedMutant> = serde_json::from_str(&text).expect("frozen set parses");
    assert!(!expected.is_empty(), "{op} fixture must produce mutants");
    assert_eq!(actual_mutants(op), expected, "{op} diverged from its frozen set");
}

macro_rules! golden {
    ($($name:ident => $op:literal),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                check($op);
            }
        )*
    };
}

golden! {
    avr_matches_the_frozen_set => "AVR",
    ccd_matches_the_frozen_set => "CCD",
    dlr_matches_the_frozen_set => "DLR",
    dod_matches_the_frozen_set => "DOD",
    eed_matches_the_frozen_set => "EED",
    ehc_matches_the_frozen_set => "EHC",
    etr_matches_the_frozen_set => "ETR",
    fvr_matches_the_frozen_set => "FVR",
    gvr_matches_the_frozen_set => "GVR",
    mcr_matches_the_frozen_set => "MCR",
    moc_matches_the_frozen_set => "MOC",
    mod_matches_the_frozen_set => "MOD",
    moi_matches_the_frozen_set => "MOI",
    mor_matches_the_frozen_set => "MOR",
    omd_matches_the_frozen_set => "OMD",
    pkd_matches_the_frozen_set => "PKD",
    rsd_matches_the_frozen_set => "RSD",
    rvs_matches_the_frozen_set => "RVS",
    scec_matches_the_frozen_set => "SCEC",
    sfd_matches_the_frozen_set => "SFD",
    sfi_matches_the_frozen_set => "SFI",
    sfr_matches_the_frozen_set => "SFR",
    tor_matches_the_frozen_set => "TOR",
    vur_matches_the_frozen_set => "VUR",
    vvr_matches_the_frozen_set => "VVR",
    acm_matches_the_frozen_set => "ACM",
    aor_matches_the_frozen_set => "AOR",
    bcrd_matches_the_frozen_set => "BCRD",
    blr_matches_the_frozen_set => "BLR",
    bor_matches_the_frozen_set => "BOR",
    cbd_matches_the_frozen_set => "CBD",
    csc_matches_the_frozen_set => "CSC",
    ecs_matches_the_frozen_set => "ECS",
    er_matches_the_frozen_set => "ER",
    hlr_matches_the_frozen_set => "HLR",
    icm_matches_the_frozen_set => "ICM",
    ilr_matches_the_frozen_set => "ILR",
    lsc_matches_the_frozen_set => "LSC",
    olfd_matches_the_frozen_set => "OLFD",
    orfd_matches_the_frozen_set => "ORFD",
    skd_matches_the_frozen_set => "SKD",
    ski_matches_the_frozen_set => "SKI",
    slr_matches_the_frozen_set => "SLR",
    uord_matches_the_frozen_set => "UORD",
}

#[test]
fn the_catalog_and_the_fixture_set_cover_each_other() {
    let dir = fixtures_dir().join("operators");
    let mut fixture_ops: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().into_string().unwrap();
            name.strip_suffix(".sol").map(str::to_string)
        })
        .collect();
    fixture_ops.sort();
    let mut catalog_ops: Vec<String> = CATALOG.iter().map(|o| o.id.to_string()).collect();
    catalog_ops.sort();
    assert_eq!(fixture_ops, catalog_ops);
}

/// Rewrites every frozen set from current generation output. Gated twice so
/// `--include-ignored` runs cannot silently refreeze.
#[test]
#[ignore = "rewrites the frozen expected sets; set SUMO_BLESS=1 to run"]
fn bless_expected_sets() {
    if std::env::var("SUMO_BLESS").is_err() {
        return;
    }
    for info in CATALOG {
        let mutants = actual_mutants(info.id);
        let mut json = serde_json::to_string_pretty(&mutants).unwrap();
        json.push('\n');
        fs::write(expected_path(info.id), json).unwrap();
    }
}

/// Writes every fixture source plus every mutated source to the path in
/// SUMO_DUMP, for batch-checking the frozen sets against an external
/// Solidity compiler.
#[test]
#[ignore = "dumps mutated sources for external compiler checks; set SUMO_DUMP=<path> to run"]
fn dump_mutant_sources() {
    let Ok(out_path) = std::env::var("SUMO_DUMP") else {
        return;
    };
    #[derive(Serialize)]
    struct Entry {
        name: String,
        source: String,
    }
    let mut entries = Vec::new();
    for info in CATALOG {
        let enabled: BTreeSet<String> = [info.id.to_string()].into();
        let target = format!("operators/{}.sol", info.id);
        let plan = generate_campaign(&fixtures_dir(), &[target.clone()], &enabled);
        entries.push(Entry {
            name: format!("{}-original", info.id),
            source: plan.target(&target).unwrap().text.clone(),
        });
        for mutant in &plan.mutants {
            entries.push(Entry {
                name: mutant.id.clone(),
                source: plan.mutant_text(mutant).unwrap(),
            });
        }
    }
    fs::write(out_path, serde_json::to_string(&entries).unwrap()).unwrap();
}
