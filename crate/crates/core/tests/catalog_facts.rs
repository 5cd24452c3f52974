use pcgroup::catalog::{self, all_specs};
use pcgroup::oracle::{build_table, cross_validate, oracle_semi_abelian};
use pcgroup::properties::{is_semi_abelian_definitional, is_semi_abelian_pi};
use pcgroup::structure::{group_stats, lower_central_series, omega, agemo};
use pcgroup::{Limits, Mode, PcGroup};

fn small_specs() -> Vec<String> {
    all_specs().into_iter().filter(|s| !s.starts_with("example38")).collect()
}

fn group(spec: &str) -> PcGroup {
    PcGroup::build(&catalog::get_spec(spec).unwrap(), true).unwrap()
}

#[test]
fn documented_facts_hold() {
    let l = Limits::default();
    for spec in small_specs() {
        let Some(f) = catalog::facts(&spec) else { continue };
        let g = group(&spec);
        let s = group_stats(&g, &l).unwrap();
        assert_eq!(
            (s.order, s.class, s.exponent, s.rank, s.metabelian),
            (f.order, f.class, f.exponent, f.rank, f.metabelian),
            "{spec}"
        );
        for (k, want) in f.semi.iter().enumerate() {
            if let Some(want) = want {
                let v = is_semi_abelian_pi(&g, k as u32 + 1, &l).unwrap();
                assert_eq!(v.is_true(), *want, "{spec} i={}", k + 1);
            }
        }
    }
}

#[test]
fn collector_agrees_with_tables() {
    let l = Limits::default();
    for spec in small_specs() {
        let g = group(&spec);
        if g.order() > 729 {
            continue;
        }
        let t = build_table(&g, &l).unwrap();
        let r = cross_validate(&g, &t, 729, 1, 0);
        assert!(r.agrees(), "{spec}: {:?}", r.disagreements);
        let lcs: Vec<u64> = lower_central_series(&g).iter().map(|s| s.order()).collect();
        assert_eq!(lcs, t.lower_central_orders(), "{spec}");
        for i in 1..=2 {
            let (os, osub) = omega(&g, i, &l).unwrap();
            let (as_, asub) = agemo(&g, i, &l).unwrap();
            assert_eq!((os.len() as u64, osub.order(), as_.len() as u64, asub.order()), t.omega_agemo_sizes(i), "{spec} i={i}");
            let table = oracle_semi_abelian(&t, i);
            let def = is_semi_abelian_definitional(&g, i, Mode::Exhaustive, &l).unwrap();
            let pi = is_semi_abelian_pi(&g, i, &l).unwrap();
            assert_eq!(table.holds, def.holds, "{spec} i={i}");
            assert_eq!(def.holds, pi.holds, "{spec} i={i}");
            assert_eq!(table.witness.is_some(), def.witness.is_some());
            if let (Some(a), Some(b)) = (&table.witness, &def.witness) {
                assert_eq!(a.elements, b.elements, "{spec} i={i}: minimal witnesses differ");
            }
        }
    }
}
