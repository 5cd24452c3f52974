//! Multiplication-table arithmetic for small groups.
//!
//! The table is filled once by collection and checked to be a group table; every
//! query afterwards is a lookup, so the checks here share no arithmetic with the
//! collector.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collector::PcGroup;
use crate::error::{Error, Result};
use crate::ops::{GroupOps, Indexed};
use crate::properties::{CheckMode, Direction, Truth, Verdict, Witness, WitnessElement, WitnessKind};
use crate::structure::Limits;

#[derive(Debug, Clone)]
pub struct CayleyTable {
    order: usize,
    prime: u64,
    vectors: Vec<Vec<u64>>,
    labels: Vec<String>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

/// Fills the table by collection over all pairs, then validates it.
pub fn build_table(g: &PcGroup, limits: &Limits) -> Result<CayleyTable> {
    if g.order() > limits.oracle_cap {
        return Err(Error::Capacity(format!(
            "multiplication table needs order <= {}, group has order {}",
            limits.oracle_cap,
            g.order()
        )));
    }
    let n = g.order() as usize;
    let vectors: Vec<Vec<u64>> = (0..n as u64).map(|x| g.unpack(x)).collect();
    let labels = vectors.iter().map(|v| g.format(&g.element(v).expect("normal vector"))).collect();
    let mul: Vec<u32> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let va = &vectors[a];
            vectors.iter().map(move |vb| {
                let mut z = va.clone();
                g.mul_raw(&mut z, vb);
                g.pack(&z) as u32
            })
        })
        .collect();
    CayleyTable::from_products(g.prime(), vectors, labels, mul)
}

impl CayleyTable {
    /// Accepts a product table only if it is a Latin square with identity 0.
    pub fn from_products(prime: u64, vectors: Vec<Vec<u64>>, labels: Vec<String>, mul: Vec<u32>) -> Result<Self> {
        let n = vectors.len();
        let bad = |msg: String| Err(Error::Invalid(format!("not a group table: {msg}")));
        if mul.len() != n * n || labels.len() != n {
            return bad("dimensions do not match".into());
        }
        if mul.iter().any(|&x| x as usize >= n) {
            return bad("entry out of range".into());
        }
        for x in 0..n {
            if mul[x] as usize != x || mul[x * n] as usize != x {
                return bad(format!("0 is not an identity at {x}"));
            }
        }
        let latin = (0..n).into_par_iter().all(|r| {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for c in 0..n {
                row[mul[r * n + c] as usize] = true;
                col[mul[c * n + r] as usize] = true;
            }
            row.iter().all(|&b| b) && col.iter().all(|&b| b)
        });
        if !latin {
            return bad("not a Latin square".into());
        }
        let mut inv = vec![0u32; n];
        for (x, slot) in inv.iter_mut().enumerate() {
            *slot = (0..n).find(|&y| mul[x * n + y] == 0).unwrap() as u32;
        }
        Ok(CayleyTable { order: n, prime, vectors, labels, mul, inv })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn product(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inverse(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn power(&self, a: u32, m: i64) -> u32 {
        let base = if m < 0 { self.inverse(a) } else { a };
        let mut acc = 0;
        for _ in 0..m.unsigned_abs() {
            acc = self.product(acc, base);
        }
        acc
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.product(x, a);
            k += 1;
        }
        k
    }

    pub fn vector(&self, a: u32) -> &[u64] {
        &self.vectors[a as usize]
    }

    pub fn label(&self, a: u32) -> &str {
        &self.labels[a as usize]
    }

    /// `x -> x^p` for every element.
    pub fn pth_powers(&self) -> Vec<u32> {
        (0..self.order as u32).map(|x| self.power(x, self.prime as i64)).collect()
    }

    /// Members of the subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut list = vec![0u32];
        let mut k = 0;
        while k < list.len() {
            let x = list[k];
            for &s in gens {
                let y = self.product(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    list.push(y);
                }
            }
            k += 1;
        }
        list.sort_unstable();
        list
    }

    /// Orders of `G = G_1 > G_2 > ... > 1`, with `G_{k+1}` generated by `[G_k, G]`.
    pub fn lower_central_orders(&self) -> Vec<u64> {
        let all: Vec<u32> = (0..self.order as u32).collect();
        let mut current = all.clone();
        let mut out = vec![current.len() as u64];
        while current.len() > 1 {
            let mut comms: Vec<u32> = current
                .iter()
                .flat_map(|&x| all.iter().map(move |&y| (x, y)))
                .map(|(x, y)| self.comm(&x, &y))
                .collect();
            comms.sort_unstable();
            comms.dedup();
            let next = self.closure(&comms);
            if next.len() == current.len() {
                break;
            }
            out.push(next.len() as u64);
            current = next;
        }
        out
    }

    /// `(|Omega_i set|, |<Omega_i set>|, |Agemo_i set|, |<Agemo_i set>|)`.
    pub fn omega_agemo_sizes(&self, i: u32) -> (u64, u64, u64, u64) {
        let q = self.prime.pow(i) as i64;
        let powers: Vec<u32> = (0..self.order as u32).map(|x| self.power(x, q)).collect();
        let omega: Vec<u32> = (0..self.order as u32).filter(|&x| powers[x as usize] == 0).collect();
        let mut agemo = powers.clone();
        agemo.sort_unstable();
        agemo.dedup();
        (
            omega.len() as u64,
            self.closure(&omega).len() as u64,
            agemo.len() as u64,
            self.closure(&agemo).len() as u64,
        )
    }

    fn witness_element(&self, a: u32) -> WitnessElement {
        WitnessElement { exponents: self.vectors[a as usize].clone(), word: self.labels[a as usize].clone() }
    }
}

impl Indexed for CayleyTable {
    fn size(&self) -> u64 {
        self.order as u64
    }

    fn at(&self, index: u64) -> u32 {
        index as u32
    }

    fn vector(&self, a: &u32) -> Vec<u64> {
        self.vectors[*a as usize].clone()
    }
}

impl GroupOps for CayleyTable {
    type Elem = u32;

    fn prime(&self) -> u64 {
        self.prime
    }

    fn identity(&self) -> u32 {
        0
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.product(*a, *b)
    }

    fn inv(&self, a: &u32) -> u32 {
        self.inverse(*a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossReport {
    pub mode: CheckMode,
    pub pairs_checked: u64,
    pub elements_checked: u64,
    pub disagreements: Vec<String>,
}

impl CrossReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares collector and table on products, inverses, powers and element orders.
/// Pairs are exhaustive up to `exhaustive_up_to` elements and sampled above.
pub fn cross_validate(g: &PcGroup, t: &CayleyTable, exhaustive_up_to: u64, seed: u64, samples: u64) -> CrossReport {
    let n = t.order as u64;
    let mut disagreements = Vec::new();
    let mut note = |what: String| {
        if disagreements.len() < 20 {
            disagreements.push(what);
        }
    };
    if n != g.order() {
        note(format!("orders differ: table {n}, group {}", g.order()));
        return CrossReport { mode: CheckMode::Exhaustive, pairs_checked: 0, elements_checked: 0, disagreements };
    }
    let check_pair = |a: u64, b: u64| {
        let mut z = g.unpack(a);
        g.mul_raw(&mut z, &g.unpack(b));
        (g.pack(&z) != t.product(a as u32, b as u32) as u64).then(|| format!("product of {} and {}", t.label(a as u32), t.label(b as u32)))
    };
    let (mode, pairs_checked, bad): (CheckMode, u64, Vec<String>) = if n <= exhaustive_up_to {
        let bad = (0..n as u32)
            .into_par_iter()
            .flat_map_iter(|a| (0..n).filter_map(move |b| check_pair(a as u64, b)))
            .collect();
        (CheckMode::Exhaustive, n * n, bad)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(u64, u64)> = (0..samples).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let bad = pairs.par_iter().filter_map(|&(a, b)| check_pair(a, b)).collect();
        (CheckMode::Sampled { seed, samples }, samples, bad)
    };
    bad.into_iter().for_each(&mut note);
    let p = g.prime() as i64;
    for x in 0..n {
        let v = g.unpack(x);
        let xt = x as u32;
        if g.pack(&g.inv_raw(&v)) != t.inverse(xt) as u64 {
            note(format!("inverse of {}", t.label(xt)));
        }
        for m in [p, p * p, -p, 2] {
            if g.pack(&g.pow_raw(&v, m)) != t.power(xt, m) as u64 {
                note(format!("power {m} of {}", t.label(xt)));
            }
        }
        if g.order_raw(&v) != t.element_order(xt) {
            note(format!("order of {}", t.label(xt)));
        }
    }
    CrossReport { mode, pairs_checked, elements_checked: n, disagreements }
}

/// The semi-`p^i` biconditional over all pairs, by table lookups only.
pub fn oracle_semi_abelian(t: &CayleyTable, i: u32) -> Verdict {
    let start = Instant::now();
    let q = t.prime.pow(i) as i64;
    let pw: Vec<u32> = (0..t.order as u32).map(|x| t.power(x, q)).collect();
    let n = t.order as u32;
    let found = (0..n)
        .into_par_iter()
        .find_map_first(|a| {
            (0..n).find_map(|b| {
                let left = pw[t.product(a, b) as usize] == 0;
                let right = t.product(pw[a as usize], pw[b as usize]) == 0;
                match (left, right) {
                    (true, false) => Some((a, b, Direction::ProductOnly)),
                    (false, true) => Some((a, b, Direction::PowersOnly)),
                    _ => None,
                }
            })
        });
    let mut stats = BTreeMap::new();
    stats.insert("pairs_checked".to_string(), found.map_or(n as u64 * n as u64, |(a, b, _)| a as u64 * n as u64 + b as u64 + 1));
    Verdict {
        property: format!("semi-p^{i}-abelian (table)"),
        holds: Truth::from(found.is_none()),
        mode: CheckMode::Exhaustive,
        witness: found.map(|(a, b, direction)| Witness {
            kind: WitnessKind::Semi { i, direction },
            elements: vec![t.witness_element(a), t.witness_element(b)],
            note: String::new(),
        }),
        stats,
        notes: Vec::new(),
        details: Vec::new(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// `(ab)^p = a^p b^p` over all pairs, by table lookups only.
pub fn oracle_p_abelian(t: &CayleyTable) -> bool {
    let pw = t.pth_powers();
    let n = t.order as u32;
    (0..n)
        .into_par_iter()
        .all(|a| (0..n).all(|b| pw[t.product(a, b) as usize] == t.product(pw[a as usize], pw[b as usize])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse;

    fn build(text: &str) -> PcGroup {
        PcGroup::build(&parse(text).unwrap(), true).unwrap()
    }

    const HEIS: &str = "pgroup p=3\ngen x order 3\ngen y order 3\ngen z order 3\ncomm [y,x] = z\n";

    #[test]
    fn cyclic_three_is_addition() {
        let g = build("pgroup p=3\ngen a order 3\n");
        let t = build_table(&g, &Limits::default()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(t.product(a, b), (a + b) % 3);
            }
        }
    }

    #[test]
    fn heisenberg_agrees() {
        let g = build(HEIS);
        let t = build_table(&g, &Limits::default()).unwrap();
        assert!(cross_validate(&g, &t, 729, 0, 0).agrees());
        assert_eq!(t.lower_central_orders(), vec![27, 3, 1]);
        assert!(oracle_semi_abelian(&t, 1).is_true());
        assert!(oracle_p_abelian(&t));
    }

    #[test]
    fn relabelled_table_is_caught() {
        let g = build(HEIS);
        let t = build_table(&g, &Limits::default()).unwrap();
        // Swapping two labels keeps a valid group table that no longer matches.
        let n = t.order();
        let swap = |x: u32| match x {
            1 => 2,
            2 => 1,
            x => x,
        };
        let mut mul = vec![0u32; n * n];
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                mul[a as usize * n + b as usize] = swap(t.product(swap(a), swap(b)));
            }
        }
        let bad = CayleyTable::from_products(3, t.vectors.clone(), t.labels.clone(), mul.clone()).unwrap();
        assert!(!cross_validate(&g, &bad, 729, 0, 0).agrees());
        mul[n + 1] = mul[n + 2];
        assert!(CayleyTable::from_products(3, t.vectors.clone(), t.labels.clone(), mul).is_err());
    }
}
