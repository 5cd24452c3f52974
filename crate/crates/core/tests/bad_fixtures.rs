use std::fs;
use std::path::PathBuf;

use pcgroup::catalog::{all_specs, get_spec};
use pcgroup::{parse, Error, OverlapKind, PcGroup};

fn fixtures(dir: &str) -> Vec<(String, String)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/bad").join(dir);
    let mut out: Vec<_> = fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "pcp"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no fixtures in {}", root.display());
    out
}

#[test]
fn consistency_fixtures_fail_named_overlaps() {
    let expected = [
        ("inconsistent.pcp", OverlapKind::PowerSelf),
        ("jacobi.pcp", OverlapKind::Triple),
        ("power_left.pcp", OverlapKind::PowerLeft),
        ("power_right.pcp", OverlapKind::PowerRight),
    ];
    for (name, text) in fixtures("consistency") {
        let pres = parse(&text).unwrap();
        assert!(pres.validate().is_empty(), "{name} should be well shaped");
        let g = PcGroup::build(&pres, false).unwrap();
        let failures = g.check_consistency();
        assert!(!failures.is_empty(), "{name}");
        for f in &failures {
            assert!(!f.relation.is_empty() && !f.generators.is_empty());
        }
        if let Some((_, kind)) = expected.iter().find(|(n, _)| *n == name) {
            assert_eq!(failures[0].kind, *kind, "{name}");
        }
        match PcGroup::build(&pres, true) {
            Err(Error::Inconsistent(fs)) => assert_eq!(fs, failures),
            other => panic!("{name}: {:?}", other.map(|g| g.order())),
        }
    }
}

#[test]
fn shape_fixtures_fail_validation() {
    for (name, text) in fixtures("shape") {
        let pres = parse(&text).unwrap();
        let diags = pres.validate();
        assert!(!diags.is_empty(), "{name}");
        assert!(diags.iter().all(|d| !d.location.is_empty()));
        assert!(matches!(PcGroup::build(&pres, true), Err(Error::Invalid(_))), "{name}");
    }
}

#[test]
fn parse_fixtures_carry_positions() {
    for (name, text) in fixtures("parse") {
        let e = parse(&text).unwrap_err();
        assert!(e.line >= 1, "{name}: {e}");
    }
}

#[test]
fn catalog_is_consistent() {
    for spec in all_specs() {
        let pres = get_spec(&spec).unwrap();
        assert!(pres.validate().is_empty(), "{spec}");
        let g = PcGroup::build(&pres, false).unwrap();
        assert!(g.check_consistency().is_empty(), "{spec}");
    }
}
