//! Normal-form arithmetic by collection from the left.
//!
//! The accumulator is an exponent vector `x` spelling `g_0^x_0 ... g_{n-1}^x_{n-1}`.
//! Multiplying it by `g_i` moves `g_i` leftwards past the suffix `x_{i+1..}`, which
//! is replaced by its conjugate under `g_i`. Conjugates `(g_k^s)^{g_i}` are tabulated
//! when the group is built, from the highest index down, so every table entry is
//! produced by the collector restricted to generators already compiled.
//!
//! Generators from `central_from[i]` onwards commute with every generator of index
//! at least `i` according to the relations, so that part of the suffix stays in place.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::GroupOps;
use crate::presentation::{prime_log, Presentation, Word};

/// Largest number of pc generators a group may have.
pub const MAX_GENS: usize = 64;
/// Largest admissible group order.
pub const MAX_ORDER: u64 = 1 << 63;

/// Cap on tabulated conjugates per generator, in words.
const CONJ_TABLE_BUDGET: u64 = 1 << 14;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// A collected word: nonzero `(index, exponent)` pairs in increasing index order.
type NormalWord = Vec<(usize, u64)>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    group: u64,
    exps: Vec<u64>,
}

impl Element {
    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn group_id(&self) -> u64 {
        self.group
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapKind {
    /// `g_k (g_j g_i) = (g_k g_j) g_i` for `k > j > i`.
    Triple,
    /// `(g_j^m) g_i = g_j^(m-1) (g_j g_i)` for `j > i`.
    PowerLeft,
    /// `g_j (g_i^m) = (g_j g_i) g_i^(m-1)` for `j > i`.
    PowerRight,
    /// `g_i (g_i^m) = (g_i^m) g_i`.
    PowerSelf,
}

/// One overlap whose two collections disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapFailure {
    pub kind: OverlapKind,
    /// Generator names, highest index first.
    pub generators: Vec<String>,
    pub relation: String,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

impl fmt::Display for OverlapFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?} != {:?}", self.relation, self.left, self.right)
    }
}

#[derive(Debug, Clone)]
pub struct PcGroup {
    id: u64,
    pres: Presentation,
    prime: u64,
    moduli: Vec<u64>,
    logs: Vec<u32>,
    strides: Vec<u64>,
    order: u64,
    power_nf: Vec<NormalWord>,
    /// `conj[i][e - 1][k - i - 1][s]` is the normal form of `(g_k^s)^(g_i^e)`, for
    /// `k < central_from[i]`. Only `e = 1` is kept when the full table would be large.
    conj: Vec<Vec<Vec<Vec<NormalWord>>>>,
    central_from: Vec<usize>,
    gen_inverse: Vec<Vec<u64>>,
    /// `p`-th power map by pc index, filled on first use.
    pub(crate) power_cache: OnceLock<Arc<Vec<u32>>>,
}

/// Builds the computational group of `pres`. With `checked`, every overlap is
/// collected both ways first and any disagreement is an error.
pub fn build_group(pres: &Presentation, checked: bool) -> Result<PcGroup> {
    PcGroup::build(pres, checked)
}

impl PcGroup {
    pub fn build(pres: &Presentation, checked: bool) -> Result<PcGroup> {
        let diags = pres.validate();
        if !diags.is_empty() {
            let msg: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            return Err(Error::Invalid(msg.join("; ")));
        }
        let n = pres.len();
        if n > MAX_GENS {
            return Err(Error::Capacity(format!("{n} generators (limit {MAX_GENS})")));
        }
        let p = pres.prime;
        let moduli: Vec<u64> = pres.generators.iter().map(|g| g.order).collect();
        let logs: Vec<u32> = moduli.iter().map(|&m| prime_log(m, p).unwrap_or(0)).collect();
        let mut order: u64 = 1;
        for &m in &moduli {
            order = order
                .checked_mul(m)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::Capacity(format!("group order exceeds 2^63")))?;
        }
        let mut strides = vec![1u64; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1];
        }

        let mut touches = vec![vec![false; n]; n];
        for &(j, i) in pres.commutator_tails.keys() {
            touches[j][i] = true;
            touches[i][j] = true;
        }
        let mut central_from = vec![n; n];
        for i in 0..n {
            let mut t = n;
            while t > i + 1 && !(i..n).any(|l| l != t - 1 && touches[t - 1][l]) {
                t -= 1;
            }
            central_from[i] = t;
        }

        let mut g = PcGroup {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            pres: pres.clone(),
            prime: p,
            moduli,
            logs,
            strides,
            order,
            power_nf: vec![Vec::new(); n],
            conj: vec![Vec::new(); n],
            central_from,
            gen_inverse: vec![Vec::new(); n],
            power_cache: OnceLock::new(),
        };
        for i in (0..n).rev() {
            let tail = g.collect_word(&pres.power_tails[i]);
            g.power_nf[i] = to_normal(&tail);
            let t = g.central_from[i];
            let mut images = Vec::new();
            for k in i + 1..t {
                let mut c = g.unit(k);
                if let Some(w) = pres.commutator(k, i) {
                    let tail = g.collect_word(w);
                    g.mul_raw(&mut c, &tail);
                }
                images.push(c);
            }
            let width: u64 = g.moduli[i + 1..t].iter().sum();
            let levels = if (g.moduli[i] - 1).saturating_mul(width) <= CONJ_TABLE_BUDGET {
                g.moduli[i] - 1
            } else {
                1
            };
            let mut tables: Vec<Vec<Vec<NormalWord>>> = Vec::new();
            for level in 1..=levels {
                if level > 1 {
                    images = images.iter().map(|c| g.conj_once(&tables[0], i, c)).collect();
                }
                let row: Vec<Vec<NormalWord>> = images
                    .iter()
                    .zip(i + 1..t)
                    .map(|(c, k)| {
                        let mut acc = vec![0u64; n];
                        let mut pows = vec![Vec::new()];
                        for _ in 1..g.moduli[k] {
                            g.mul_raw(&mut acc, c);
                            pows.push(to_normal(&acc));
                        }
                        pows
                    })
                    .collect();
                tables.push(row);
            }
            g.conj[i] = tables;
            let gi = g.unit(i);
            g.gen_inverse[i] = g.inv_raw(&gi);
        }
        if checked {
            let failures = g.check_consistency();
            if !failures.is_empty() {
                return Err(Error::Inconsistent(failures));
            }
        }
        Ok(g)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Number of pc generators.
    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// `k_i` with relative order `p^k_i`.
    pub fn log_moduli(&self) -> &[u32] {
        &self.logs
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `log_p |G|`.
    pub fn log_order(&self) -> u32 {
        self.logs.iter().sum()
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn name(&self) -> &str {
        self.pres.name().unwrap_or("group")
    }

    pub fn generator_names(&self) -> Vec<&str> {
        self.pres.generators.iter().map(|g| g.name.as_str()).collect()
    }

    // ----- raw exponent-vector arithmetic -----

    fn unit(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.len()];
        v[i] = 1;
        v
    }

    /// Multiplies the accumulator by `g_i^e` with `0 <= e < m_i`.
    fn mul_gen(&self, x: &mut [u64], i: usize, e: u64) {
        if e == 0 {
            return;
        }
        let t = self.central_from[i];
        let m = self.moduli[i];
        if x[i + 1..t].iter().all(|&v| v == 0) {
            let v = x[i] + e;
            x[i] = v % m;
            if v >= m {
                self.mul_word(x, &self.power_nf[i]);
            }
            return;
        }
        let tables = &self.conj[i];
        let (reps, level) = if e as usize <= tables.len() { (1, e) } else { (e, 1) };
        let row = &tables[level as usize - 1];
        let mut saved = [0u64; MAX_GENS];
        for _ in 0..reps {
            for k in i + 1..t {
                saved[k] = std::mem::take(&mut x[k]);
            }
            let v = x[i] + level;
            x[i] = v % m;
            if v >= m {
                self.mul_word(x, &self.power_nf[i]);
            }
            for k in i + 1..t {
                let s = saved[k];
                if s != 0 {
                    self.mul_word(x, &row[k - i - 1][s as usize]);
                }
            }
        }
    }

    /// `c^(g_i)` from the single-step table of `g_i`.
    fn conj_once(&self, row: &[Vec<NormalWord>], i: usize, c: &[u64]) -> Vec<u64> {
        let t = self.central_from[i];
        let mut x = vec![0; self.len()];
        for (k, &s) in c.iter().enumerate() {
            if s == 0 {
                continue;
            }
            if k > i && k < t {
                self.mul_word(&mut x, &row[k - i - 1][s as usize]);
            } else {
                self.mul_gen(&mut x, k, s);
            }
        }
        x
    }

    fn mul_word(&self, x: &mut [u64], w: &[(usize, u64)]) {
        for &(i, e) in w {
            self.mul_gen(x, i, e);
        }
    }

    /// `x <- x * y` for normal exponent vectors.
    pub fn mul_raw(&self, x: &mut [u64], y: &[u64]) {
        for (i, &e) in y.iter().enumerate() {
            if e != 0 {
                self.mul_gen(x, i, e);
            }
        }
    }

    pub fn inv_raw(&self, a: &[u64]) -> Vec<u64> {
        let mut y = a.to_vec();
        let mut r = vec![0; a.len()];
        for i in 0..a.len() {
            if y[i] != 0 {
                let e = self.moduli[i] - y[i];
                r[i] = e;
                self.mul_gen(&mut y, i, e);
            }
        }
        debug_assert!(y.iter().all(|&v| v == 0));
        r
    }

    pub fn pow_raw(&self, a: &[u64], m: i64) -> Vec<u64> {
        let base = if m < 0 { self.inv_raw(a) } else { a.to_vec() };
        self.pow_unsigned(&base, m.unsigned_abs())
    }

    fn pow_unsigned(&self, a: &[u64], mut m: u64) -> Vec<u64> {
        let mut result = vec![0; a.len()];
        let mut base = a.to_vec();
        while m > 0 {
            if m & 1 == 1 {
                self.mul_raw(&mut result, &base);
            }
            m >>= 1;
            if m > 0 {
                let b = base.clone();
                self.mul_raw(&mut base, &b);
            }
        }
        result
    }

    /// `a^(p^i)` by `i` repeated `p`-th powers.
    pub fn ppow_raw(&self, a: &[u64], i: u32) -> Vec<u64> {
        let mut x = a.to_vec();
        for _ in 0..i {
            if x.iter().all(|&v| v == 0) {
                break;
            }
            x = self.pow_unsigned(&x, self.prime);
        }
        x
    }

    pub fn comm_raw(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut ba = b.to_vec();
        self.mul_raw(&mut ba, a);
        let mut r = self.inv_raw(&ba);
        let mut ab = a.to_vec();
        self.mul_raw(&mut ab, b);
        self.mul_raw(&mut r, &ab);
        r
    }

    /// Normal form of a word; negative exponents and exponents beyond the relative
    /// order are allowed.
    fn collect_word(&self, w: &Word) -> Vec<u64> {
        let mut x = vec![0; self.len()];
        for &(i, e) in w.terms() {
            self.mul_power_of_gen(&mut x, i, e);
        }
        x
    }

    fn mul_power_of_gen(&self, x: &mut [u64], i: usize, e: i64) {
        let m = self.moduli[i];
        if e >= 0 {
            let e = e as u64;
            if e >= m {
                let tail: Vec<u64> = self.normal_to_vec(&self.power_nf[i]);
                let t = self.pow_unsigned(&tail, e / m);
                self.mul_raw(x, &t);
            }
            self.mul_gen(x, i, e % m);
        } else {
            let inv = self.pow_unsigned(&self.gen_inverse[i], e.unsigned_abs());
            self.mul_raw(x, &inv);
        }
    }

    fn normal_to_vec(&self, w: &[(usize, u64)]) -> Vec<u64> {
        let mut v = vec![0; self.len()];
        for &(i, e) in w {
            v[i] = e;
        }
        v
    }

    /// Mixed-radix index, `g_0` most significant, so index order is lexicographic
    /// order of exponent vectors.
    pub fn pack(&self, x: &[u64]) -> u64 {
        x.iter().zip(&self.strides).map(|(&e, &s)| e * s).sum()
    }

    pub fn unpack_into(&self, mut idx: u64, out: &mut [u64]) {
        for (i, &s) in self.strides.iter().enumerate() {
            out[i] = idx / s;
            idx %= s;
        }
    }

    pub fn unpack(&self, idx: u64) -> Vec<u64> {
        let mut v = vec![0; self.len()];
        self.unpack_into(idx, &mut v);
        v
    }

    pub fn strides(&self) -> &[u64] {
        &self.strides
    }

    // ----- elements -----

    fn wrap(&self, exps: Vec<u64>) -> Element {
        Element { group: self.id, exps }
    }

    fn check(&self, a: &Element) -> Result<()> {
        if a.group == self.id {
            Ok(())
        } else {
            Err(Error::MixedGroups)
        }
    }

    pub fn identity(&self) -> Element {
        self.wrap(vec![0; self.len()])
    }

    pub fn generator(&self, i: usize) -> Element {
        self.wrap(self.unit(i))
    }

    /// Element with the given exponent vector, which must already be in range.
    pub fn element(&self, exps: &[u64]) -> Result<Element> {
        if exps.len() != self.len() || exps.iter().zip(&self.moduli).any(|(&e, &m)| e >= m) {
            return Err(Error::InvalidArgument(format!("{exps:?} is not a normal exponent vector")));
        }
        Ok(self.wrap(exps.to_vec()))
    }

    pub fn from_index(&self, idx: u64) -> Element {
        self.wrap(self.unpack(idx))
    }

    pub fn index(&self, a: &Element) -> u64 {
        self.pack(&a.exps)
    }

    pub fn normalize(&self, w: &Word) -> Result<Element> {
        if let Some(&(i, _)) = w.terms().iter().find(|&&(i, _)| i >= self.len()) {
            return Err(Error::InvalidArgument(format!("generator index {i} out of range")));
        }
        Ok(self.wrap(self.collect_word(w)))
    }

    /// Parses a word over the generator names, e.g. `a1^2*b`.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let text = text.trim();
        if text == "1" {
            return Ok(self.identity());
        }
        let mut terms = Vec::new();
        for term in text.split('*') {
            let (name, exp) = match term.split_once('^') {
                Some((n, e)) => (
                    n.trim(),
                    e.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad exponent in `{term}`")))?,
                ),
                None => (term.trim(), 1),
            };
            let i = self
                .pres
                .index_of(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown generator `{name}`")))?;
            terms.push((i, exp));
        }
        self.normalize(&Word(terms))
    }

    /// The normal-form word of `a`.
    pub fn word_of(&self, a: &Element) -> Word {
        Word(
            a.exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| (i, e as i64))
                .collect(),
        )
    }

    pub fn format(&self, a: &Element) -> String {
        self.pres.format_word(&self.word_of(a))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        let mut x = a.exps.clone();
        self.mul_raw(&mut x, &b.exps);
        Ok(self.wrap(x))
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.wrap(self.inv_raw(&a.exps)))
    }

    pub fn power(&self, a: &Element, m: i64) -> Result<Element> {
        self.check(a)?;
        Ok(self.wrap(self.pow_raw(&a.exps, m)))
    }

    /// Least `p^k` with `a^(p^k) = 1`.
    pub fn element_order(&self, a: &Element) -> Result<u64> {
        self.check(a)?;
        Ok(self.order_raw(&a.exps))
    }

    pub fn order_raw(&self, a: &[u64]) -> u64 {
        let mut x = a.to_vec();
        let mut o = 1;
        while x.iter().any(|&v| v != 0) {
            x = self.pow_unsigned(&x, self.prime);
            o *= self.prime;
        }
        o
    }

    /// Left-normed commutator `[x1, x2, ..., xk]`.
    pub fn commutator(&self, xs: &[Element]) -> Result<Element> {
        if xs.len() < 2 {
            return Err(Error::InvalidArgument("a commutator needs at least two entries".into()));
        }
        for x in xs {
            self.check(x)?;
        }
        let mut acc = xs[0].exps.clone();
        for x in &xs[1..] {
            acc = self.comm_raw(&acc, &x.exps);
        }
        Ok(self.wrap(acc))
    }

    /// `b^-1 a b`.
    pub fn conjugate(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        let mut x = self.inv_raw(&b.exps);
        self.mul_raw(&mut x, &a.exps);
        self.mul_raw(&mut x, &b.exps);
        Ok(self.wrap(x))
    }

    // ----- consistency -----

    fn letters(&self, seq: &[(usize, u64)]) -> Vec<u64> {
        let mut x = vec![0; self.len()];
        for &(i, e) in seq {
            self.mul_gen(&mut x, i, e);
        }
        x
    }

    /// Collects every overlap both ways; returns the ones that disagree.
    pub fn check_consistency(&self) -> Vec<OverlapFailure> {
        let n = self.len();
        let name = |i: usize| self.pres.generators[i].name.clone();
        let mut out = Vec::new();
        let mut push = |kind, gens: Vec<usize>, relation: String, left: Vec<u64>, right: Vec<u64>| {
            if left != right {
                out.push(OverlapFailure {
                    kind,
                    generators: gens.into_iter().map(name).collect(),
                    relation,
                    left,
                    right,
                });
            }
        };
        let pw = |i: usize| self.normal_to_vec(&self.power_nf[i]);
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let left = self.letters(&[(k, 1), (j, 1), (i, 1)]);
                    let mut right = self.unit(k);
                    let ji = self.letters(&[(j, 1), (i, 1)]);
                    self.mul_raw(&mut right, &ji);
                    let rel = format!("({} {}) {} = {} ({} {})", name(k), name(j), name(i), name(k), name(j), name(i));
                    push(OverlapKind::Triple, vec![k, j, i], rel, left, right);
                }
            }
        }
        for j in 0..n {
            let mj = self.moduli[j];
            for i in 0..j {
                let mut left = pw(j);
                self.mul_gen(&mut left, i, 1);
                let mut right = self.letters(&[(j, mj - 1)]);
                let ji = self.letters(&[(j, 1), (i, 1)]);
                self.mul_raw(&mut right, &ji);
                let rel = format!("({}^{mj}) {} = {}^{} ({} {})", name(j), name(i), name(j), mj - 1, name(j), name(i));
                push(OverlapKind::PowerLeft, vec![j, i], rel, left, right);

                let mi = self.moduli[i];
                let mut left = self.unit(j);
                self.mul_raw(&mut left, &pw(i));
                let mut right = self.letters(&[(j, 1), (i, 1)]);
                self.mul_gen(&mut right, i, mi - 1);
                let rel = format!("{} ({}^{mi}) = ({} {}) {}^{}", name(j), name(i), name(j), name(i), name(i), mi - 1);
                push(OverlapKind::PowerRight, vec![j, i], rel, left, right);
            }
        }
        for i in 0..n {
            let mi = self.moduli[i];
            let mut left = self.unit(i);
            self.mul_raw(&mut left, &pw(i));
            let mut right = pw(i);
            self.mul_gen(&mut right, i, 1);
            let rel = format!("{} ({}^{mi}) = ({}^{mi}) {}", name(i), name(i), name(i), name(i));
            push(OverlapKind::PowerSelf, vec![i], rel, left, right);
        }
        out
    }
}

fn to_normal(x: &[u64]) -> NormalWord {
    x.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (i, e)).collect()
}

impl crate::ops::Indexed for PcGroup {
    fn size(&self) -> u64 {
        self.order
    }

    fn at(&self, index: u64) -> Element {
        self.from_index(index)
    }

    fn vector(&self, a: &Element) -> Vec<u64> {
        a.exps.clone()
    }
}

impl GroupOps for PcGroup {
    type Elem = Element;

    fn prime(&self) -> u64 {
        self.prime
    }

    fn identity(&self) -> Element {
        PcGroup::identity(self)
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        debug_assert!(a.group == self.id && b.group == self.id);
        let mut x = a.exps.clone();
        self.mul_raw(&mut x, &b.exps);
        self.wrap(x)
    }

    fn inv(&self, a: &Element) -> Element {
        self.wrap(self.inv_raw(&a.exps))
    }

    fn pow(&self, a: &Element, m: i64) -> Element {
        self.wrap(self.pow_raw(&a.exps, m))
    }

    fn comm(&self, a: &Element, b: &Element) -> Element {
        self.wrap(self.comm_raw(&a.exps, &b.exps))
    }

    fn is_identity(&self, a: &Element) -> bool {
        a.is_identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse;

    fn group(text: &str) -> PcGroup {
        PcGroup::build(&parse(text).unwrap(), true).unwrap()
    }

    const C9: &str = "pgroup p=3\ngen a order 9\n";
    const HEIS: &str = "pgroup p=3\ngen x order 3\ngen y order 3\ngen z order 3\ncomm [y,x] = z\n";

    #[test]
    fn cyclic_arithmetic() {
        let g = group(C9);
        assert_eq!(g.order(), 9);
        let a11 = g.normalize(&Word::gen(0, 11)).unwrap();
        assert_eq!(a11.exponents(), &[2]);
        let two = g.element(&[2]).unwrap();
        let four = g.multiply(&two, &two).unwrap();
        assert_eq!(four.exponents(), &[4]);
        assert_eq!(g.inverse(&four).unwrap().exponents(), &[5]);
        assert_eq!(g.power(&g.generator(0), 9).unwrap(), g.identity());
        assert_eq!(g.element_order(&g.generator(0)).unwrap(), 9);
        assert_eq!(g.element_order(&g.identity()).unwrap(), 1);
        assert!(g.normalize(&Word::identity()).unwrap().is_identity());
        assert_eq!(g.normalize(&Word::gen(0, -1)).unwrap().exponents(), &[8]);
    }

    #[test]
    fn heisenberg_products() {
        let g = group(HEIS);
        assert_eq!(g.order(), 27);
        let yx = g.normalize(&Word(vec![(1, 1), (0, 1)])).unwrap();
        assert_eq!(yx.exponents(), &[1, 1, 1]);
        let (x, y) = (g.generator(0), g.generator(1));
        assert_eq!(g.commutator(&[y.clone(), x.clone()]).unwrap(), g.generator(2));
        assert!(g.commutator(&[x.clone(), y.clone(), x.clone()]).unwrap().is_identity());
        assert!(g.commutator(&[x.clone(), g.identity()]).unwrap().is_identity());
        assert!(g.commutator(&[x]).is_err());
    }

    #[test]
    fn mixed_groups_rejected() {
        let g = group(C9);
        let h = group(C9);
        assert!(matches!(g.multiply(&g.generator(0), &h.generator(0)), Err(Error::MixedGroups)));
    }

    #[test]
    fn power_tail_in_mixed_form() {
        let g = group("pgroup p=3\ngen b order 3\ngen a order 9\ncomm [a,b] = a^3\n");
        assert_eq!(g.order(), 27);
        let a = g.generator(1);
        let b = g.generator(0);
        assert_eq!(g.element_order(&a).unwrap(), 9);
        assert_eq!(g.commutator(&[a.clone(), b.clone()]).unwrap(), g.power(&a, 3).unwrap());
    }

    #[test]
    fn power_self_overlap_detected() {
        let p = parse("pgroup p=3\ngen g1 order 3\ngen g2 order 3\ngen g3 order 3\npow g1 = g2\ncomm [g2,g1] = g3\n").unwrap();
        let g = PcGroup::build(&p, false).unwrap();
        let f = g.check_consistency();
        assert!(f.iter().any(|f| f.kind == OverlapKind::PowerSelf));
        assert!(matches!(PcGroup::build(&p, true), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn pack_round_trip() {
        let g = group(HEIS);
        for idx in 0..g.order() {
            assert_eq!(g.index(&g.from_index(idx)), idx);
        }
        assert_eq!(g.pack(&[1, 0, 0]), 9);
    }

    #[test]
    fn parse_element_words() {
        let g = group(HEIS);
        assert_eq!(g.parse_element("y*x").unwrap().exponents(), &[1, 1, 1]);
        assert_eq!(g.format(&g.parse_element("y*x").unwrap()), "x*y*z");
        assert!(g.parse_element("q").is_err());
    }
}
