use pcgroup::catalog::{all_specs, get_spec};
use pcgroup::identities::{verify_claims, ClaimOptions, ClaimVerdict, Hypothesis};
use pcgroup::oracle::{build_table, CayleyTable};
use pcgroup::{Indexed, Limits, PcGroup};

fn comm(t: &CayleyTable, a: u32, b: u32) -> u32 {
    let ab = t.product(a, b);
    let ba = t.product(b, a);
    t.product(t.inverse(ba), ab)
}

fn commn(t: &CayleyTable, xs: &[u32]) -> u32 {
    xs[1..].iter().fold(xs[0], |acc, &y| comm(t, acc, y))
}

fn pow(t: &CayleyTable, a: u32, k: u32) -> u32 {
    (0..k).fold(0, |acc, _| t.product(acc, a))
}

fn symmetry_holds(t: &CayleyTable) -> bool {
    let n = t.size() as u32;
    (0..n).filter(|&x| pow(t, x, 3) == 0).all(|x| {
        (0..n).all(|a| (0..n).all(|b| t.product(commn(t, &[x, b, a]), commn(t, &[x, a, b])) == 0))
    })
}

fn cube_expansion_holds(t: &CayleyTable) -> bool {
    let n = t.size() as u32;
    (0..n).all(|a| {
        (0..n).all(|b| {
            let ab = t.product(a, b);
            let k = comm(t, ab, b);
            let k2 = t.product(k, k);
            let inner = commn(t, &[ab, b, ab]);
            let conj = t.product(t.product(t.inverse(k2), inner), k2);
            let rhs = [pow(t, ab, 3), pow(t, k, 3), conj, commn(t, &[ab, b, b])]
                .into_iter()
                .fold(0, |acc, y| t.product(acc, y));
            t.product(pow(t, a, 3), pow(t, b, 3)) == rhs
        })
    })
}

#[test]
fn identity_claims_match_table_evaluation() {
    let ids = ["L3.1".to_string(), "L3.4".to_string()];
    for spec in all_specs() {
        let g = PcGroup::build(&get_spec(&spec).unwrap(), true).unwrap();
        if g.order() > 243 || g.prime() != 3 {
            continue;
        }
        let t = build_table(&g, &Limits::default()).unwrap();
        let reports = verify_claims(&g, Some(&ids), &ClaimOptions::default());
        let l31 = &reports[0];
        if l31.hypothesis == Hypothesis::Satisfied {
            assert_eq!(l31.verdict == ClaimVerdict::Holds, symmetry_holds(&t), "{spec}");
        } else {
            assert_eq!(l31.verdict, ClaimVerdict::Vacuous, "{spec}");
        }
        assert_eq!(reports[1].verdict == ClaimVerdict::Holds, cube_expansion_holds(&t), "{spec}");
    }
}

#[test]
fn claims_on_wreath_product_are_vacuous_or_hold() {
    let g = PcGroup::build(&get_spec("c3wrc3").unwrap(), true).unwrap();
    for r in verify_claims(&g, None, &ClaimOptions::default()) {
        assert!(r.error.is_none(), "{}", r.id);
        assert!(r.passed(), "{}: {:?}", r.id, r.verdict);
        if r.id.starts_with("L3") && r.id != "L3.4" {
            assert_eq!(r.verdict, ClaimVerdict::Vacuous, "{}", r.id);
            assert!(r.hypothesis_detail.contains("not semi-3-abelian"));
        }
    }
}
