use pcgroup::catalog::get_spec;
use pcgroup::{parse, Generator, GroupOps, PcGroup, Presentation, Word};
use proptest::prelude::*;

/// Presentations of triangular shape with arbitrary tails; not necessarily consistent.
fn presentation() -> impl Strategy<Value = Presentation> {
    (prop_oneof![Just(2u64), Just(3), Just(5)], 1usize..6).prop_flat_map(|(p, n)| {
        let orders = proptest::collection::vec(1u32..3, n);
        let tails = proptest::collection::vec(proptest::collection::vec((0usize..8, 1i64..30), 0..3), n * n);
        (Just(p), orders, tails).prop_map(move |(p, orders, tails)| {
            let gens =
                orders.iter().enumerate().map(|(i, &k)| Generator { name: format!("g{}", i + 1), order: p.pow(k) }).collect();
            let mut pres = Presentation::new(p, gens);
            let word = |i: usize, raw: &[(usize, i64)]| {
                let mut terms: Vec<(usize, i64)> = raw
                    .iter()
                    .filter(|(k, _)| *k < n - i - 1)
                    .map(|&(k, e)| (i + 1 + k, e))
                    .collect();
                terms.sort();
                terms.dedup_by_key(|t| t.0);
                Word(terms)
            };
            for i in 0..n {
                pres.set_power(i, word(i, &tails[i]));
                for j in i + 1..n {
                    let w = word(j, &tails[i * n + j]);
                    if !w.0.is_empty() {
                        pres.set_commutator(j, i, w);
                    }
                }
            }
            pres
        })
    })
}

const GROUPS: &[&str] = &["heis27", "c3wrc3", "sg243_25", "quaternion8", "heis27xheis27", "example38:n=3"];

fn triples() -> impl Strategy<Value = (usize, Vec<u64>, Vec<u64>, Vec<u64>)> {
    (0..GROUPS.len(), any::<u64>(), any::<u64>(), any::<u64>()).prop_map(|(k, a, b, c)| {
        let g = PcGroup::build(&get_spec(GROUPS[k]).unwrap(), false).unwrap();
        let n = g.order();
        (k, g.unpack(a % n), g.unpack(b % n), g.unpack(c % n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serialization_round_trips(pres in presentation()) {
        prop_assert!(pres.validate().is_empty());
        let text = pres.serialize();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &pres);
        prop_assert_eq!(back.serialize(), text);
    }

    #[test]
    fn group_axioms((k, a, b, c) in triples()) {
        let g = PcGroup::build(&get_spec(GROUPS[k]).unwrap(), false).unwrap();
        let (a, b, c) = (g.element(&a).unwrap(), g.element(&b).unwrap(), g.element(&c).unwrap());
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        prop_assert!(g.is_identity(&g.mul(&a, &g.inv(&a))));
        prop_assert_eq!(g.mul(&g.identity(), &a), a.clone());
        let o = g.order_of(&a);
        prop_assert!(g.is_identity(&g.pow(&a, o as i64)));
        prop_assert_eq!(g.from_index(g.index(&a)), a.clone());
        let w = g.word_of(&b);
        prop_assert_eq!(g.normalize(&w).unwrap(), b);
    }
}
