//! Subgroups as induced generating sequences.
//!
//! Every element has a refined depth `(d, v)`: `d` is its first nonzero exponent and
//! `v` the `p`-adic valuation of that exponent. An induced sequence holds one element
//! per occupied depth and is closed under `p`-th powers and commutators, so the
//! subgroup has order `p^len` and right-sifting clears the `v`-th `p`-adic digit of
//! `x_d` at every occupied depth. The sifted element is the canonical representative
//! of the left coset `xH`; it is the identity exactly when `x` lies in `H`.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::collector::{Element, PcGroup};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Subgroup {
    group: u64,
    prime: u64,
    igs: Vec<Vec<u64>>,
    depths: Vec<(usize, u32)>,
    /// Inverse mod `p` of the leading unit of each sequence element.
    unit_inv: Vec<u64>,
    /// `neg_pows[j][c]` is `igs[j]^-c` for `c < p`.
    neg_pows: Vec<Vec<Vec<u64>>>,
    members: OnceLock<Arc<Vec<u64>>>,
}

fn pow_u64(p: u64, v: u32) -> u64 {
    p.pow(v)
}

fn valuation(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime and a is a unit.
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

/// Refined depth of a nontrivial vector.
pub(crate) fn depth(x: &[u64], p: u64) -> Option<(usize, u32)> {
    x.iter()
        .position(|&e| e != 0)
        .map(|d| (d, valuation(x[d], p)))
}

impl Subgroup {
    pub fn trivial(g: &PcGroup) -> Subgroup {
        Subgroup {
            group: g.id(),
            prime: g.prime(),
            igs: Vec::new(),
            depths: Vec::new(),
            unit_inv: Vec::new(),
            neg_pows: Vec::new(),
            members: OnceLock::new(),
        }
    }

    /// The whole group, with the pc generators refined to prime steps.
    pub fn whole(g: &PcGroup) -> Subgroup {
        let mut h = Subgroup::trivial(g);
        for i in 0..g.len() {
            let mut x = vec![0; g.len()];
            x[i] = 1;
            for v in 0..g.log_moduli()[i] {
                let y = g.ppow_raw(&x, v);
                h.insert(g, y);
            }
        }
        debug_assert_eq!(h.log_order(), g.log_order());
        h
    }

    /// `<gens>`.
    pub fn generated(g: &PcGroup, gens: &[Vec<u64>]) -> Subgroup {
        let mut h = Subgroup::trivial(g);
        h.extend(g, gens.iter().cloned());
        h
    }

    pub fn from_elements(g: &PcGroup, gens: &[Element]) -> Result<Subgroup> {
        for x in gens {
            if x.group_id() != g.id() {
                return Err(Error::MixedGroups);
            }
        }
        let v: Vec<Vec<u64>> = gens.iter().map(|x| x.exponents().to_vec()).collect();
        Ok(Subgroup::generated(g, &v))
    }

    fn check(&self, g: &PcGroup) {
        assert_eq!(self.group, g.id(), "subgroup used with a different group");
    }

    pub fn group_id(&self) -> u64 {
        self.group
    }

    pub fn log_order(&self) -> u32 {
        self.igs.len() as u32
    }

    pub fn order(&self) -> u64 {
        pow_u64(self.prime, self.log_order())
    }

    pub fn is_trivial(&self) -> bool {
        self.igs.is_empty()
    }

    /// The induced sequence, by increasing depth.
    pub fn igs(&self) -> &[Vec<u64>] {
        &self.igs
    }

    pub fn depths(&self) -> &[(usize, u32)] {
        &self.depths
    }

    /// Right-sifts `x` to the canonical representative of `xH`.
    pub fn canon(&self, g: &PcGroup, x: &mut [u64]) {
        let p = self.prime;
        for (j, &(d, v)) in self.depths.iter().enumerate() {
            let digit = (x[d] / pow_u64(p, v)) % p;
            if digit != 0 {
                let c = (digit * self.unit_inv[j]) % p;
                let t = self.neg_pow(g, j, c);
                g.mul_raw(x, &t);
            }
        }
    }

    fn neg_pow(&self, g: &PcGroup, j: usize, c: u64) -> std::borrow::Cow<'_, [u64]> {
        match self.neg_pows[j].get(c as usize) {
            Some(v) => std::borrow::Cow::Borrowed(v),
            None => std::borrow::Cow::Owned(g.pow_raw(&self.igs[j], -(c as i64))),
        }
    }

    /// Whether the exponent vector has a zero digit at every depth of the sequence,
    /// i.e. is the canonical representative of its coset.
    pub fn is_canonical(&self, x: &[u64]) -> bool {
        let p = self.prime;
        self.depths
            .iter()
            .all(|&(d, v)| (x[d] / pow_u64(p, v)) % p == 0)
    }

    pub fn contains_raw(&self, g: &PcGroup, x: &[u64]) -> bool {
        self.check(g);
        let mut y = x.to_vec();
        self.canon(g, &mut y);
        y.iter().all(|&e| e == 0)
    }

    pub fn contains(&self, g: &PcGroup, x: &Element) -> bool {
        x.group_id() == self.group && self.contains_raw(g, x.exponents())
    }

    pub fn is_subgroup_of(&self, g: &PcGroup, other: &Subgroup) -> bool {
        self.igs.iter().all(|h| other.contains_raw(g, h))
    }

    pub fn same_as(&self, g: &PcGroup, other: &Subgroup) -> bool {
        self.log_order() == other.log_order() && self.is_subgroup_of(g, other)
    }

    fn insert(&mut self, g: &PcGroup, y: Vec<u64>) {
        let p = self.prime;
        let (d, v) = depth(&y, p).expect("inserting identity");
        let pos = self.depths.partition_point(|&dv| dv < (d, v));
        debug_assert!(self.depths.get(pos) != Some(&(d, v)));
        let unit = (y[d] / pow_u64(p, v)) % p;
        let inv_y = g.inv_raw(&y);
        let neg = if p <= 16 {
            let mut v = vec![vec![0; y.len()]];
            for c in 1..p {
                let mut next = v[c as usize - 1].clone();
                g.mul_raw(&mut next, &inv_y);
                v.push(next);
            }
            v
        } else {
            vec![vec![0; y.len()], inv_y]
        };
        self.depths.insert(pos, (d, v));
        self.unit_inv.insert(pos, inv_mod(unit, p));
        self.neg_pows.insert(pos, neg);
        self.igs.insert(pos, y);
        self.members = OnceLock::new();
    }

    /// Adds elements and closes. Returns whether the subgroup grew.
    pub fn extend(&mut self, g: &PcGroup, xs: impl IntoIterator<Item = Vec<u64>>) -> bool {
        self.check(g);
        let before = self.igs.len();
        let mut queue: Vec<Vec<u64>> = Vec::new();
        for x in xs {
            queue.push(x);
            self.drain(g, &mut queue);
        }
        loop {
            // The queue discipline already closes the sequence; this pass certifies it
            // against the final sequence and repairs anything the ordering missed.
            for i in 0..self.igs.len() {
                queue.push(g.pow_raw(&self.igs[i], self.prime as i64));
                for j in i + 1..self.igs.len() {
                    queue.push(g.comm_raw(&self.igs[j], &self.igs[i]));
                }
            }
            let len = self.igs.len();
            self.drain(g, &mut queue);
            if self.igs.len() == len {
                break;
            }
        }
        self.igs.len() > before
    }

    fn drain(&mut self, g: &PcGroup, queue: &mut Vec<Vec<u64>>) {
        while let Some(mut y) = queue.pop() {
            self.canon(g, &mut y);
            if y.iter().all(|&e| e == 0) {
                continue;
            }
            for h in &self.igs {
                queue.push(g.comm_raw(&y, h));
            }
            queue.push(g.pow_raw(&y, self.prime as i64));
            self.insert(g, y);
        }
    }

    /// All members as sorted pc indices; fails when the order exceeds `cap`.
    pub fn members(&self, g: &PcGroup, cap: u64) -> Result<Arc<Vec<u64>>> {
        self.check(g);
        if let Some(m) = self.members.get() {
            return Ok(m.clone());
        }
        if self.order() > cap {
            return Err(Error::Capacity(format!(
                "subgroup of order {} exceeds the enumeration cap {cap}",
                self.order()
            )));
        }
        let m = Arc::new(self.enumerate(g));
        Ok(self.members.get_or_init(|| m).clone())
    }

    fn enumerate(&self, g: &PcGroup) -> Vec<u64> {
        if self.log_order() == g.log_order() {
            return (0..g.order()).collect();
        }
        let n = g.len();
        let mut list: Vec<u64> = vec![0];
        for h in self.igs.iter().rev() {
            let p = self.prime;
            let mut pows = vec![vec![0u64; n]];
            for c in 1..p {
                let mut next = pows[c as usize - 1].clone();
                g.mul_raw(&mut next, h);
                pows.push(next);
            }
            // h_j^e * y, so products read h_1^e_1 ... h_m^e_m.
            let next: Vec<u64> = pows
                .par_iter()
                .flat_map_iter(|hp| {
                    let mut buf = vec![0u64; n];
                    let mut out = Vec::with_capacity(list.len());
                    for &y in &list {
                        g.unpack_into(y, &mut buf);
                        let mut x = hp.clone();
                        g.mul_raw(&mut x, &buf);
                        out.push(g.pack(&x));
                    }
                    out
                })
                .collect();
            list = next;
        }
        list.par_sort_unstable();
        list
    }

    /// Canonical representatives of the left cosets of `self` inside `within`, in
    /// increasing index order.
    pub fn coset_reps_in(&self, g: &PcGroup, within: &Subgroup, cap: u64) -> Result<Vec<u64>> {
        let members = within.members(g, cap)?;
        let n = g.len();
        Ok(members
            .par_chunks(4096)
            .flat_map_iter(|chunk| {
                let mut buf = vec![0u64; n];
                chunk
                    .iter()
                    .copied()
                    .filter(|&x| {
                        g.unpack_into(x, &mut buf);
                        self.is_canonical(&buf)
                    })
                    .collect::<Vec<_>>()
            })
            .collect())
    }

    pub fn igs_elements(&self, g: &PcGroup) -> Vec<Element> {
        self.igs.iter().map(|v| g.element(v).expect("normal vector")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse;

    fn heis() -> PcGroup {
        let p = parse("pgroup p=3\ngen x order 3\ngen y order 3\ngen z order 3\ncomm [y,x] = z\n").unwrap();
        PcGroup::build(&p, true).unwrap()
    }

    #[test]
    fn closure_of_two_generators_is_whole() {
        let g = heis();
        let h = Subgroup::generated(&g, &[vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(h.order(), 27);
        assert_eq!(h.members(&g, 1000).unwrap().len(), 27);
    }

    #[test]
    fn cyclic_subgroup_members() {
        let g = heis();
        let h = Subgroup::generated(&g, &[vec![1, 1, 0]]);
        assert_eq!(h.order(), 3);
        let m = h.members(&g, 100).unwrap();
        let mut expect: Vec<u64> = (0..3)
            .map(|e| g.pack(&g.pow_raw(&[1, 1, 0], e)))
            .collect();
        expect.sort();
        assert_eq!(*m, expect);
        assert!(h.contains_raw(&g, &g.pow_raw(&[1, 1, 0], 2)));
        assert!(!h.contains_raw(&g, &[1, 0, 0]));
    }

    #[test]
    fn coset_reps_partition() {
        let g = heis();
        let whole = Subgroup::whole(&g);
        let h = Subgroup::generated(&g, &[vec![0, 1, 0]]);
        let reps = h.coset_reps_in(&g, &whole, 100).unwrap();
        assert_eq!(reps.len(), 9);
        let mut seen = std::collections::BTreeSet::new();
        for &r in &reps {
            for &k in h.members(&g, 100).unwrap().iter() {
                let mut x = g.unpack(r);
                g.mul_raw(&mut x, &g.unpack(k));
                assert!(seen.insert(g.pack(&x)));
            }
        }
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn mixed_moduli_depths() {
        let p = parse("pgroup p=3\ngen b order 3\ngen a order 9\ncomm [a,b] = a^3\n").unwrap();
        let g = PcGroup::build(&p, true).unwrap();
        let whole = Subgroup::whole(&g);
        assert_eq!(whole.depths(), &[(0, 0), (1, 0), (1, 1)]);
        let h = Subgroup::generated(&g, &[vec![0, 3]]);
        assert_eq!(h.order(), 3);
        assert!(h.contains_raw(&g, &[0, 6]));
        assert!(!h.contains_raw(&g, &[0, 1]));
    }
}
