//! Series, characteristic subgroups and group statistics.

use std::sync::Arc;

use rayon::iter::Either;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collector::{Element, PcGroup};
use crate::error::{Error, Result};
use crate::subgroup::Subgroup;

/// Size guards for enumeration-based work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest group or subgroup that may be enumerated element by element.
    pub enum_cap: u64,
    /// Largest group on which all ordered pairs may be scanned.
    pub pair_cap: u64,
    /// Largest group for which a multiplication table may be built.
    pub oracle_cap: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { enum_cap: 3u64.pow(16), pair_cap: 3u64.pow(7), oracle_cap: 3u64.pow(7) }
    }
}

impl Limits {
    pub fn with_enum_cap(cap: u64) -> Self {
        Limits { enum_cap: cap, ..Limits::default() }
    }
}

pub(crate) fn ensure_enumerable(g: &PcGroup, limits: &Limits) -> Result<()> {
    if g.order() > limits.enum_cap || g.order() > u32::MAX as u64 {
        return Err(Error::Capacity(format!(
            "group of order {} exceeds the enumeration cap {}",
            g.order(),
            limits.enum_cap.min(u32::MAX as u64)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStats {
    pub order: u64,
    pub log_order: u32,
    pub exponent: u64,
    /// `r` with exponent `p^r`.
    pub log_exponent: u32,
    pub class: usize,
    /// Minimal number of generators.
    pub rank: usize,
    pub metabelian: bool,
    /// `log_p |G_i|` for the lower central series `G_1 = G, ..., 1`.
    pub lower_central: Vec<u32>,
    /// `log_p |Z_i|` for the upper central series `Z_0 = 1, ..., G`.
    pub upper_central: Vec<u32>,
}

pub fn closure(g: &PcGroup, gens: &[Element]) -> Result<Subgroup> {
    Subgroup::from_elements(g, gens)
}

/// Closure of `xs` under conjugation by `by`.
pub fn normal_closure(g: &PcGroup, xs: &[Vec<u64>], by: &[Vec<u64>]) -> Subgroup {
    let mut n = Subgroup::generated(g, xs);
    let inverses: Vec<Vec<u64>> = by.iter().map(|y| g.inv_raw(y)).collect();
    loop {
        let mut fresh = Vec::new();
        for h in n.igs() {
            for (y, yi) in by.iter().zip(&inverses) {
                let mut c = yi.clone();
                g.mul_raw(&mut c, h);
                g.mul_raw(&mut c, y);
                if !n.contains_raw(g, &c) {
                    fresh.push(c);
                }
            }
        }
        if fresh.is_empty() {
            return n;
        }
        n.extend(g, fresh);
    }
}

/// `[H, K]`, as the normal closure in `<H, K>` of the commutators of generators.
pub fn commutator_subgroup(g: &PcGroup, h: &Subgroup, k: &Subgroup) -> Subgroup {
    let mut comms = Vec::new();
    for x in h.igs() {
        for y in k.igs() {
            comms.push(g.comm_raw(x, y));
        }
    }
    let by: Vec<Vec<u64>> = h.igs().iter().chain(k.igs()).cloned().collect();
    normal_closure(g, &comms, &by)
}

pub fn pc_generators(g: &PcGroup) -> Vec<Vec<u64>> {
    (0..g.len())
        .map(|i| {
            let mut v = vec![0; g.len()];
            v[i] = 1;
            v
        })
        .collect()
}

pub fn derived_subgroup(g: &PcGroup) -> Subgroup {
    let whole = Subgroup::whole(g);
    commutator_subgroup(g, &whole, &whole)
}

/// `G_1 = G, G_{i+1} = [G_i, G]`, ending with the trivial group.
pub fn lower_central_series(g: &PcGroup) -> Vec<Subgroup> {
    let gens = pc_generators(g);
    let mut series = vec![Subgroup::whole(g)];
    while !series.last().unwrap().is_trivial() {
        let last = series.last().unwrap();
        let mut comms = Vec::new();
        for h in last.igs() {
            for y in &gens {
                comms.push(g.comm_raw(h, y));
            }
        }
        let next = normal_closure(g, &comms, &gens);
        if next.log_order() == last.log_order() {
            // Only reachable for presentations that are not nilpotent, which a
            // consistent pc presentation of a p-group never is.
            break;
        }
        series.push(next);
    }
    series
}

/// Members of `h`, as a parallel iterator over pc indices.
pub(crate) fn member_iter<'a>(
    g: &'a PcGroup,
    h: &'a Subgroup,
    limits: &Limits,
) -> Result<impl IndexedParallelIterator<Item = u64> + 'a> {
    if h.log_order() == g.log_order() {
        ensure_enumerable(g, limits)?;
        Ok(Either::Left((0..g.order() as u32).into_par_iter().map(u64::from)))
    } else {
        let m = h.members(g, limits.enum_cap)?;
        let len = m.len();
        Ok(Either::Right((0..len).into_par_iter().map(move |i| m[i])))
    }
}

/// Canonical representatives of `G / sub`, in index order.
fn whole_coset_reps(g: &PcGroup, sub: &Subgroup, limits: &Limits) -> Result<Vec<u64>> {
    ensure_enumerable(g, limits)?;
    let n = g.len();
    Ok((0..g.order() as u32)
        .into_par_iter()
        .with_min_len(4096)
        .map(u64::from)
        .map_init(|| vec![0u64; n], |buf, x| {
            g.unpack_into(x, buf);
            (x, sub.is_canonical(buf))
        })
        .filter(|&(_, keep)| keep)
        .map(|(x, _)| x)
        .collect())
}

/// `Z_0 = 1, Z_1, ..., Z_c = G`. `x Z_i` is central in `G / Z_i` when conjugation by
/// each element of a generating set fixes the coset.
pub fn center_and_upper_series(g: &PcGroup, limits: &Limits) -> Result<Vec<Subgroup>> {
    ensure_enumerable(g, limits)?;
    let (_, basis) = frattini_with_basis(g);
    let gens: Vec<(Vec<u64>, Vec<u64>)> = basis.iter().map(|y| (y.clone(), g.inv_raw(y))).collect();
    let lcs = lower_central_series(g);
    let class = lcs.len() - 1;
    let n = g.len();
    let mut series = vec![Subgroup::trivial(g)];
    while series.last().unwrap().log_order() < g.log_order() {
        let i = series.len() - 1;
        let z = series.last().unwrap();
        // G_{c-i} <= Z_{i+1}; seeding with it only shrinks the scan, so small groups
        // are scanned in full to keep this independent of the lower series.
        let mut base = z.clone();
        if g.order() / z.order() > 1 << 16 && class > i + 1 {
            base.extend(g, lcs[class - i - 1].igs().iter().cloned());
        }
        let reps = whole_coset_reps(g, &base, limits)?;
        let central: Vec<u64> = reps
            .par_iter()
            .with_min_len(256)
            .map_init(
                || (vec![0u64; n], vec![0u64; n]),
                |(x, c), &r| {
                    g.unpack_into(r, x);
                    let mut cx = x.clone();
                    z.canon(g, &mut cx);
                    for (y, yi) in &gens {
                        c.copy_from_slice(yi);
                        g.mul_raw(c, x);
                        g.mul_raw(c, y);
                        z.canon(g, c);
                        if *c != cx {
                            return None;
                        }
                    }
                    Some(r)
                },
            )
            .flatten()
            .collect();
        let mut next = base;
        next.extend(g, central.iter().map(|&r| g.unpack(r)));
        if next.log_order() == z.log_order() {
            break;
        }
        series.push(next);
    }
    Ok(series)
}

/// The `p`-th power map by pc index, computed once per group.
pub fn power_table(g: &PcGroup, limits: &Limits) -> Result<Arc<Vec<u32>>> {
    if let Some(t) = g.power_cache.get() {
        return Ok(t.clone());
    }
    ensure_enumerable(g, limits)?;
    let n = g.len();
    let p = g.prime();
    let table: Vec<u32> = (0..g.order() as u32)
        .into_par_iter()
        .with_min_len(1024)
        .map_init(|| vec![0u64; n], |buf, x| {
            g.unpack_into(x as u64, buf);
            g.pack(&g.pow_raw(buf, p as i64)) as u32
        })
        .collect();
    Ok(g.power_cache.get_or_init(|| Arc::new(table)).clone())
}

/// Index of `x^(p^i)` by iterating the table.
#[inline]
pub fn ppow_index(table: &[u32], x: u64, i: u32) -> u64 {
    let mut y = x as u32;
    for _ in 0..i {
        if y == 0 {
            break;
        }
        y = table[y as usize];
    }
    y as u64
}

/// The set `{x in H : x^(p^i) = 1}` in index order.
pub fn omega_set_in(g: &PcGroup, h: &Subgroup, i: u32, limits: &Limits) -> Result<Vec<u64>> {
    let table = power_table(g, limits)?;
    Ok(member_iter(g, h, limits)?
        .filter(|&x| ppow_index(&table, x, i) == 0)
        .collect())
}

/// The set `{x^(p^i) : x in H}` in index order.
pub fn agemo_set_in(g: &PcGroup, h: &Subgroup, i: u32, limits: &Limits) -> Result<Vec<u64>> {
    let table = power_table(g, limits)?;
    let words = (g.order() as usize).div_ceil(64);
    let bits = member_iter(g, h, limits)?
        .fold(
            || vec![0u64; words],
            |mut acc, x| {
                let y = ppow_index(&table, x, i) as usize;
                acc[y / 64] |= 1 << (y % 64);
                acc
            },
        )
        .reduce(
            || vec![0u64; words],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x |= y);
                a
            },
        );
    Ok(bits
        .iter()
        .enumerate()
        .flat_map(|(w, &b)| (0..64).filter(move |k| b >> k & 1 == 1).map(move |k| (w * 64 + k) as u64))
        .collect())
}

/// `<set>` for a large set of indices, sifting only the elements not yet inside.
pub fn subgroup_of_set(g: &PcGroup, set: &[u64]) -> Subgroup {
    subgroup_of_set_within(g, set, g.log_order())
}

/// As [`subgroup_of_set`], stopping once the result reaches `p^bound`.
pub fn subgroup_of_set_within(g: &PcGroup, set: &[u64], bound: u32) -> Subgroup {
    let mut h = Subgroup::trivial(g);
    let n = g.len();
    let mut pos = 0;
    loop {
        let found = set[pos..]
            .par_iter()
            .with_min_len(1024)
            .map_init(|| vec![0u64; n], |buf, &x| {
                g.unpack_into(x, buf);
                h.canon(g, buf);
                buf.iter().any(|&e| e != 0)
            })
            .position_first(|outside| outside);
        match found {
            Some(k) => {
                pos += k;
                h.extend(g, [g.unpack(set[pos])]);
                pos += 1;
                if h.log_order() >= bound {
                    return h;
                }
            }
            None => return h,
        }
    }
}

/// `Omega_i` of `h`: the raw set of elements killed by `p^i`-th powers and the
/// subgroup it generates.
pub fn omega_in(g: &PcGroup, h: &Subgroup, i: u32, limits: &Limits) -> Result<(Vec<u64>, Subgroup)> {
    let set = omega_set_in(g, h, i, limits)?;
    let sub = subgroup_of_set_within(g, &set, h.log_order());
    Ok((set, sub))
}

/// `Agemo_i` of `h`: the raw set of `p^i`-th powers and the subgroup it generates.
pub fn agemo_in(g: &PcGroup, h: &Subgroup, i: u32, limits: &Limits) -> Result<(Vec<u64>, Subgroup)> {
    let set = agemo_set_in(g, h, i, limits)?;
    let sub = subgroup_of_set_within(g, &set, h.log_order());
    Ok((set, sub))
}

pub fn omega(g: &PcGroup, i: u32, limits: &Limits) -> Result<(Vec<u64>, Subgroup)> {
    omega_in(g, &Subgroup::whole(g), i, limits)
}

pub fn agemo(g: &PcGroup, i: u32, limits: &Limits) -> Result<(Vec<u64>, Subgroup)> {
    agemo_in(g, &Subgroup::whole(g), i, limits)
}

/// The Frattini subgroup `G' G^p` and pc generators whose images form a basis of
/// `G / Phi(G)`.
pub fn frattini_with_basis(g: &PcGroup) -> (Subgroup, Vec<Vec<u64>>) {
    let derived = derived_subgroup(g);
    let gens = pc_generators(g);
    let mut phi = derived.clone();
    phi.extend(g, gens.iter().map(|x| g.pow_raw(x, g.prime() as i64)));
    let mut span = phi.clone();
    let mut basis = Vec::new();
    for x in gens {
        if !span.contains_raw(g, &x) {
            span.extend(g, [x.clone()]);
            basis.push(x);
        }
    }
    (phi, basis)
}

/// Normalized nonzero vectors of `F_p^d` (first nonzero coordinate 1), in
/// lexicographic order: one per hyperplane.
fn hyperplane_functionals(p: u64, d: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for lead in 0..d {
        let free = d - lead - 1;
        let count = p.pow(free as u32);
        for mut c in 0..count {
            let mut f = vec![0; d];
            f[lead] = 1;
            for k in (lead + 1..d).rev() {
                f[k] = c % p;
                c /= p;
            }
            out.push(f);
        }
    }
    out
}

/// `Phi(G)` and the maximal subgroups, one per hyperplane of `G / Phi(G)`.
pub fn frattini_and_maximals(g: &PcGroup) -> (Subgroup, Vec<Subgroup>) {
    let (phi, basis) = frattini_with_basis(g);
    let p = g.prime();
    let d = basis.len();
    let mut maximals = Vec::new();
    for f in hyperplane_functionals(p, d) {
        let lead = f.iter().position(|&c| c != 0).unwrap();
        let mut m = phi.clone();
        let mut gens = Vec::new();
        for j in 0..d {
            if j == lead {
                continue;
            }
            // e_j - f_j e_lead spans the kernel of f.
            let mut x = basis[j].clone();
            let t = g.pow_raw(&basis[lead], -(f[j] as i64));
            g.mul_raw(&mut x, &t);
            gens.push(x);
        }
        m.extend(g, gens);
        maximals.push(m);
    }
    (phi, maximals)
}

/// Least `p^r` killing every element of `h`, by enumeration.
pub fn exponent_of(g: &PcGroup, h: &Subgroup, limits: &Limits) -> Result<u64> {
    let table = power_table(g, limits)?;
    let r = member_iter(g, h, limits)?
        .map(|x| {
            let mut y = x as u32;
            let mut r = 0u32;
            while y != 0 {
                y = table[y as usize];
                r += 1;
            }
            r
        })
        .max()
        .unwrap_or(0);
    Ok(g.prime().pow(r))
}

pub fn group_stats(g: &PcGroup, limits: &Limits) -> Result<GroupStats> {
    let whole = Subgroup::whole(g);
    let exponent = exponent_of(g, &whole, limits)?;
    let lcs = lower_central_series(g);
    let ucs = center_and_upper_series(g, limits)?;
    let (phi, _) = frattini_with_basis(g);
    let derived = derived_subgroup(g);
    let metabelian = commutator_subgroup(g, &derived, &derived).is_trivial();
    let mut log_exponent = 0;
    while g.prime().pow(log_exponent) < exponent {
        log_exponent += 1;
    }
    Ok(GroupStats {
        order: g.order(),
        log_order: g.log_order(),
        exponent,
        log_exponent,
        class: lcs.len().saturating_sub(1),
        rank: (g.log_order() - phi.log_order()) as usize,
        metabelian,
        lower_central: lcs.iter().map(|s| s.log_order()).collect(),
        upper_central: ucs.iter().map(|s| s.log_order()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse;

    fn build(text: &str) -> PcGroup {
        PcGroup::build(&parse(text).unwrap(), true).unwrap()
    }

    const HEIS: &str = "pgroup p=3\ngen x order 3\ngen y order 3\ngen z order 3\ncomm [y,x] = z\n";
    const C9: &str = "pgroup p=3\ngen a order 9\n";
    const E9: &str = "pgroup p=3\ngen a order 3\ngen b order 3\n";

    #[test]
    fn heisenberg_series() {
        let g = build(HEIS);
        let l = Limits::default();
        let lcs = lower_central_series(&g);
        assert_eq!(lcs.iter().map(|s| s.order()).collect::<Vec<_>>(), vec![27, 3, 1]);
        let ucs = center_and_upper_series(&g, &l).unwrap();
        assert_eq!(ucs.iter().map(|s| s.order()).collect::<Vec<_>>(), vec![1, 3, 27]);
        assert_eq!(derived_subgroup(&g).order(), 3);
        let s = group_stats(&g, &l).unwrap();
        assert_eq!((s.exponent, s.class, s.rank, s.metabelian), (3, 2, 2, true));
    }

    #[test]
    fn cyclic_power_sets() {
        let g = build(C9);
        let l = Limits::default();
        let (set, sub) = omega(&g, 1, &l).unwrap();
        assert_eq!(set, vec![0, 3, 6]);
        assert_eq!(sub.order(), 3);
        let (set, sub) = agemo(&g, 1, &l).unwrap();
        assert_eq!(set, vec![0, 3, 6]);
        assert_eq!(sub.order(), 3);
        let (phi, max) = frattini_and_maximals(&g);
        assert_eq!(phi.order(), 3);
        assert_eq!(max.len(), 1);
        let s = group_stats(&g, &l).unwrap();
        assert_eq!((s.exponent, s.class, s.rank), (9, 1, 1));
    }

    #[test]
    fn elementary_rank_two_maximals() {
        let g = build(E9);
        let (phi, max) = frattini_and_maximals(&g);
        assert!(phi.is_trivial());
        assert_eq!(max.len(), 4);
        for m in &max {
            assert_eq!(m.order(), 3);
        }
        assert_eq!(hyperplane_functionals(3, 2), vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]]);
    }

    #[test]
    fn capacity_guard() {
        let g = build(C9);
        assert!(matches!(power_table(&g, &Limits::with_enum_cap(3)), Err(Error::Capacity(_))));
    }
}
