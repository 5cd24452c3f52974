//! Decision procedures for power-structure properties.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collector::PcGroup;
use crate::error::{Error, Result};
use crate::sampling::{self, Mode};
use crate::structure::{
    agemo_in, commutator_subgroup, ensure_enumerable, exponent_of, frattini_and_maximals, omega_in, power_table,
    ppow_index, subgroup_of_set, Limits,
};
use crate::subgroup::Subgroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    Structural,
    Sampled { seed: u64, samples: u64 },
}

impl From<Mode> for CheckMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exhaustive => CheckMode::Exhaustive,
            Mode::Sampled { seed, samples } => CheckMode::Sampled { seed, samples },
        }
    }
}

/// Which side of the biconditional `(ab)^q = 1 <=> a^q b^q = 1` broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `(ab)^q = 1` while `a^q b^q != 1`.
    ProductOnly,
    /// `a^q b^q = 1` while `(ab)^q != 1`.
    PowersOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessElement {
    pub exponents: Vec<u64>,
    pub word: String,
}

impl WitnessElement {
    pub fn new(g: &PcGroup, x: &[u64]) -> Self {
        WitnessElement { exponents: x.to_vec(), word: g.format(&g.element(x).expect("normal vector")) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessKind {
    /// `(ab)^p != a^p b^p`.
    PAbelian,
    /// The semi-`p^i` biconditional fails for `(a, b)`.
    Semi { i: u32, direction: Direction },
    /// `(a^p b^p)^-1 (ab)^p` lies outside `Agemo_1(<a,b>')`.
    Irregular,
    /// The group itself already has the property, so it is not minimal without it.
    GroupPasses { i: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(flatten)]
    pub kind: WitnessKind,
    pub elements: Vec<WitnessElement>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

impl Witness {
    fn pair(g: &PcGroup, kind: WitnessKind, a: &[u64], b: &[u64]) -> Self {
        Witness { kind, elements: vec![WitnessElement::new(g, a), WitnessElement::new(g, b)], note: String::new() }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    pub holds: Truth,
    pub mode: CheckMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub stats: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub details: Vec<Verdict>,
    pub elapsed_ms: u64,
}

impl Verdict {
    fn new(property: impl Into<String>, holds: Truth, mode: CheckMode) -> Self {
        Verdict {
            property: property.into(),
            holds,
            mode,
            witness: None,
            stats: BTreeMap::new(),
            notes: Vec::new(),
            details: Vec::new(),
            elapsed_ms: 0,
        }
    }

    fn stat(mut self, key: &str, v: u64) -> Self {
        self.stats.insert(key.to_string(), v);
        self
    }

    fn timed(mut self, start: Instant) -> Self {
        self.elapsed_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn is_true(&self) -> bool {
        self.holds == Truth::True
    }

    pub fn is_false(&self) -> bool {
        self.holds == Truth::False
    }
}

fn ensure_pairs(g: &PcGroup, limits: &Limits) -> Result<()> {
    if g.order() > limits.pair_cap {
        return Err(Error::Capacity(format!(
            "exhaustive pair scan needs order <= {}, group has order {}",
            limits.pair_cap,
            g.order()
        )));
    }
    Ok(())
}

fn inverse_table(g: &PcGroup) -> Vec<u32> {
    (0..g.order() as u32)
        .into_par_iter()
        .map(|x| g.pack(&g.inv_raw(&g.unpack(x as u64))) as u32)
        .collect()
}

/// Result of a pairwise predicate scan: the first failing pair, and how much was covered.
struct PairScan {
    failure: Option<(Vec<u64>, Vec<u64>)>,
    mode: CheckMode,
    checked: u64,
}

/// Runs `fails(a, b)` over every ordered pair or over a seeded sample.
fn scan_pairs<F>(g: &PcGroup, mode: Mode, limits: &Limits, fails: F) -> Result<PairScan>
where
    F: Fn(&[u64], &[u64]) -> bool + Sync + Send,
{
    let n = g.len();
    let init = || (vec![0u64; n], vec![0u64; n]);
    match mode {
        Mode::Exhaustive => {
            ensure_pairs(g, limits)?;
            let found = sampling::first_failing_pair(g.order(), init, |(x, y), a, b| {
                g.unpack_into(a, x);
                g.unpack_into(b, y);
                fails(x, y)
            });
            let checked = match found {
                Some((a, b)) => a * g.order() + b + 1,
                None => g.order() * g.order(),
            };
            Ok(PairScan { failure: found.map(|(a, b)| (g.unpack(a), g.unpack(b))), mode: mode.into(), checked })
        }
        Mode::Sampled { seed, samples } => {
            let found = sampling::first_failing(seed, samples, &[g.order(), g.order()], init, |(x, y), t| {
                g.unpack_into(t[0], x);
                g.unpack_into(t[1], y);
                fails(x, y)
            });
            let checked = found.as_ref().map_or(samples, |f| f.0 + 1);
            Ok(PairScan {
                failure: found.map(|(_, t)| (g.unpack(t[0]), g.unpack(t[1]))),
                mode: mode.into(),
                checked,
            })
        }
    }
}

fn product(g: &PcGroup, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut z = a.to_vec();
    g.mul_raw(&mut z, b);
    z
}

fn is_one(x: &[u64]) -> bool {
    x.iter().all(|&e| e == 0)
}

/// Which side of the semi-`p^i` biconditional fails for `(a, b)`, by collector arithmetic.
pub fn semi_direction(g: &PcGroup, a: &[u64], b: &[u64], i: u32) -> Option<Direction> {
    let left = is_one(&g.ppow_raw(&product(g, a, b), i));
    let right = is_one(&product(g, &g.ppow_raw(a, i), &g.ppow_raw(b, i)));
    match (left, right) {
        (true, false) => Some(Direction::ProductOnly),
        (false, true) => Some(Direction::PowersOnly),
        _ => None,
    }
}

fn pair_verdict(property: String, scan: PairScan, kind: impl Fn(&[u64], &[u64]) -> WitnessKind, g: &PcGroup) -> Verdict {
    let holds = match (&scan.failure, scan.mode) {
        (Some(_), _) => Truth::False,
        (None, CheckMode::Exhaustive) => Truth::True,
        (None, _) => Truth::Unknown,
    };
    let mut v = Verdict::new(property, holds, scan.mode).stat("pairs_checked", scan.checked);
    if let Some((a, b)) = &scan.failure {
        v.witness = Some(Witness::pair(g, kind(a, b), a, b));
    }
    v
}

/// `(ab)^p = a^p b^p` for all pairs.
pub fn is_p_abelian(g: &PcGroup, mode: Mode, limits: &Limits) -> Result<Verdict> {
    let start = Instant::now();
    let p = g.prime() as i64;
    let scan = scan_pairs(g, mode, limits, |a, b| {
        let lhs = g.pow_raw(&product(g, a, b), p);
        let rhs = product(g, &g.pow_raw(a, p), &g.pow_raw(b, p));
        lhs != rhs
    })?;
    Ok(pair_verdict("p-abelian".into(), scan, |_, _| WitnessKind::PAbelian, g).timed(start))
}

/// The semi-`p^i` biconditional checked pair by pair. Exhaustive mode uses the
/// power and inverse tables; sampled mode uses direct collection.
pub fn is_semi_abelian_definitional(g: &PcGroup, i: u32, mode: Mode, limits: &Limits) -> Result<Verdict> {
    let start = Instant::now();
    let name = format!("semi-p^{i}-abelian (definitional)");
    let scan = match mode {
        Mode::Exhaustive => {
            ensure_pairs(g, limits)?;
            let table = power_table(g, limits)?;
            let inv = inverse_table(g);
            let n = g.len();
            let found = sampling::first_failing_pair(
                g.order(),
                || (vec![0u64; n], vec![0u64; n]),
                |(x, y), a, b| {
                    g.unpack_into(a, x);
                    g.unpack_into(b, y);
                    g.mul_raw(x, y);
                    let left = ppow_index(&table, g.pack(x), i) == 0;
                    // a^q b^q = 1 iff a^q = (b^-1)^q
                    let right = ppow_index(&table, a, i) == ppow_index(&table, inv[b as usize] as u64, i);
                    left != right
                },
            );
            let checked = found.map_or(g.order() * g.order(), |(a, b)| a * g.order() + b + 1);
            PairScan { failure: found.map(|(a, b)| (g.unpack(a), g.unpack(b))), mode: mode.into(), checked }
        }
        Mode::Sampled { .. } => scan_pairs(g, mode, limits, |a, b| semi_direction(g, a, b, i).is_some())?,
    };
    let v = pair_verdict(
        name,
        scan,
        |a, b| WitnessKind::Semi { i, direction: semi_direction(g, a, b, i).expect("failing pair") },
        g,
    );
    Ok(v.timed(start))
}

/// Everything the coset scan of `pi_i : H / Omega_i(H) -> Agemo_i(H)` produces.
pub struct PiScan {
    pub omega_set: Vec<u64>,
    pub kernel: Subgroup,
    pub reps: Vec<u64>,
    /// First `(r, k)` in scan order with `(rk)^q != r^q`.
    pub not_well_defined: Option<(u64, u64)>,
    /// Distinct values of `r^q` over the representatives.
    pub image: Vec<u64>,
    /// First `(g, h)` of representatives with equal `q`-th powers.
    pub not_injective: Option<(u64, u64)>,
}

/// Scans every `rk` with `r` a coset representative of `K = <Omega_i set of H>` in
/// `H` and `k` in `K`: exactly `|H|` power computations.
pub fn pi_scan(g: &PcGroup, h: &Subgroup, i: u32, limits: &Limits) -> Result<PiScan> {
    let table = power_table(g, limits)?;
    let (omega_set, kernel) = omega_in(g, h, i, limits)?;
    let reps = kernel.coset_reps_in(g, h, limits.enum_cap)?;
    let kmem = kernel.members(g, limits.enum_cap)?;
    let nk = kmem.len() as u64;
    let total = reps.len() as u64 * nk;
    let n = g.len();
    let not_well_defined = (0..total as u32)
        .into_par_iter()
        .with_min_len(1024)
        .map_init(
            || (vec![0u64; n], vec![0u64; n]),
            |(x, y), t| {
                let (r, k) = (reps[(t as u64 / nk) as usize], kmem[(t as u64 % nk) as usize]);
                g.unpack_into(r, x);
                g.unpack_into(k, y);
                g.mul_raw(x, y);
                (ppow_index(&table, g.pack(x), i) != ppow_index(&table, r, i)).then_some((r, k))
            },
        )
        .find_map_first(|f| f);
    let powers: Vec<u64> = reps.iter().map(|&r| ppow_index(&table, r, i)).collect();
    let mut first: HashMap<u64, u64> = HashMap::new();
    let mut not_injective = None;
    for (&r, &q) in reps.iter().zip(&powers) {
        match first.get(&q) {
            Some(&s) if not_injective.is_none() => not_injective = Some((s, r)),
            Some(_) => {}
            None => {
                first.insert(q, r);
            }
        }
    }
    let mut image: Vec<u64> = first.into_keys().collect();
    image.sort_unstable();
    Ok(PiScan { omega_set, kernel, reps, not_well_defined, image, not_injective })
}

/// A semi-`p^i` violating pair inside `h`, derived from a failed coset scan.
fn pi_witness(g: &PcGroup, scan: &PiScan, i: u32, limits: &Limits) -> Result<Option<Witness>> {
    let table = power_table(g, limits)?;
    if let Some((r, k)) = scan.not_well_defined {
        if ppow_index(&table, k, i) == 0 {
            // a = rk, b = r^-1: ab is conjugate to k, while a^q b^q = (rk)^q r^-q != 1.
            let (rv, kv) = (g.unpack(r), g.unpack(k));
            let a = product(g, &rv, &kv);
            let b = g.inv_raw(&rv);
            let w = Witness::pair(g, WitnessKind::Semi { i, direction: Direction::ProductOnly }, &a, &b)
                .with_note("pi_i is not well defined");
            return Ok(Some(w));
        }
        // The Omega set is not closed: find x, y in it with xy outside.
        let n = g.len();
        let found = sampling::first_failing_pair_in(&scan.omega_set, || vec![0u64; n], |buf, x, y| {
            g.unpack_into(x, buf);
            g.mul_raw(buf, &g.unpack(y));
            ppow_index(&table, g.pack(buf), i) != 0
        });
        let (x, y) = found.expect("a set generating a larger subgroup is not closed");
        let w = Witness::pair(
            g,
            WitnessKind::Semi { i, direction: Direction::PowersOnly },
            &g.unpack(x),
            &g.unpack(y),
        )
        .with_note("the Omega_i set is not closed under products");
        return Ok(Some(w));
    }
    if let Some((a0, b0)) = scan.not_injective {
        // a0^q = b0^q in distinct cosets: (b0^-1 a0)^q != 1 while b0^-q a0^q = 1.
        let a = g.inv_raw(&g.unpack(b0));
        let b = g.unpack(a0);
        let w = Witness::pair(g, WitnessKind::Semi { i, direction: Direction::PowersOnly }, &a, &b)
            .with_note("pi_i is not injective");
        return Ok(Some(w));
    }
    Ok(None)
}

/// Semi-`p^i`-abelian for the subgroup `h`, via well-definedness and injectivity of
/// `pi_i`.
pub fn semi_pi_in(g: &PcGroup, h: &Subgroup, i: u32, limits: &Limits) -> Result<Verdict> {
    let start = Instant::now();
    let scan = pi_scan(g, h, i, limits)?;
    let well_defined = scan.not_well_defined.is_none();
    let injective = scan.not_injective.is_none();
    let mut v = Verdict::new(format!("semi-p^{i}-abelian (pi)"), (well_defined && injective).into(), CheckMode::Exhaustive)
        .stat("order", h.order())
        .stat("omega_set", scan.omega_set.len() as u64)
        .stat("omega_subgroup", scan.kernel.order())
        .stat("coset_reps", scan.reps.len() as u64)
        .stat("image", scan.image.len() as u64)
        .stat("power_computations", h.order())
        .stat("well_defined", well_defined as u64)
        .stat("injective", injective as u64);
    v.witness = pi_witness(g, &scan, i, limits)?;
    Ok(v.timed(start))
}

pub fn is_semi_abelian_pi(g: &PcGroup, i: u32, limits: &Limits) -> Result<Verdict> {
    ensure_enumerable(g, limits)?;
    semi_pi_in(g, &Subgroup::whole(g), i, limits)
}

/// `r` with `exp(h) = p^r`.
pub fn log_exponent(g: &PcGroup, h: &Subgroup, limits: &Limits) -> Result<u32> {
    let mut e = exponent_of(g, h, limits)?;
    let mut r = 0;
    while e > 1 {
        e /= g.prime();
        r += 1;
    }
    Ok(r)
}

/// Semi-`p^i`-abelian for every `i`; levels `i >= r` with `exp(G) = p^r` hold trivially.
pub fn is_strongly_semi_abelian(g: &PcGroup, limits: &Limits) -> Result<Verdict> {
    let start = Instant::now();
    ensure_enumerable(g, limits)?;
    let r = log_exponent(g, &Subgroup::whole(g), limits)?;
    let mut v = Verdict::new("strongly semi-p-abelian", Truth::True, CheckMode::Exhaustive).stat("log_exponent", r as u64);
    for i in 1..r {
        let d = is_semi_abelian_pi(g, i, limits)?;
        if d.is_false() && v.holds == Truth::True {
            v.holds = Truth::False;
            v.witness = d.witness.clone();
        }
        v.details.push(d);
    }
    v.notes.push(format!("levels i >= {r} hold because the exponent is p^{r}"));
    Ok(v.timed(start))
}

/// Fails `semi_pi(i)` while every maximal subgroup passes it. Checking maximal
/// subgroups suffices because the property passes to subgroups.
pub fn is_inner_semi_abelian(g: &PcGroup, i: u32, limits: &Limits) -> Result<Verdict> {
    let start = Instant::now();
    let whole = is_semi_abelian_pi(g, i, limits)?;
    let mut v = Verdict::new(format!("inner semi-p^{i}-abelian"), Truth::True, CheckMode::Exhaustive);
    if whole.is_true() {
        v.holds = Truth::False;
        v.witness = Some(Witness {
            kind: WitnessKind::GroupPasses { i },
            elements: Vec::new(),
            note: "the group itself is semi-p^i-abelian".into(),
        });
    }
    v.details.push(whole);
    let (_, maximals) = frattini_and_maximals(g);
    v.stats.insert("maximal_subgroups".into(), maximals.len() as u64);
    for (k, m) in maximals.iter().enumerate() {
        let mut d = semi_pi_in(g, m, i, limits)?;
        d.property = format!("maximal subgroup {k}: {}", d.property);
        if d.is_false() && v.holds == Truth::True {
            v.holds = Truth::False;
            v.witness = d.witness.clone().map(|w| w.with_note(format!("inside maximal subgroup {k}")));
        }
        v.details.push(d);
    }
    Ok(v.timed(start))
}

/// `(a^p b^p)^-1 (ab)^p` when it is not the identity.
fn regularity_defect(g: &PcGroup, a: &[u64], b: &[u64]) -> Option<Vec<u64>> {
    let p = g.prime() as i64;
    let ab = g.pow_raw(&product(g, a, b), p);
    let apbp = product(g, &g.pow_raw(a, p), &g.pow_raw(b, p));
    let d = product(g, &g.inv_raw(&apbp), &ab);
    (!is_one(&d)).then_some(d)
}

/// `Agemo_1(<a,b>')`, enumerating the derived subgroup of `<a,b>` by collection.
pub fn agemo_of_pair_derived(g: &PcGroup, a: &[u64], b: &[u64], limits: &Limits) -> Result<Subgroup> {
    let h = Subgroup::generated(g, &[a.to_vec(), b.to_vec()]);
    let d = commutator_subgroup(g, &h, &h);
    let members = d.members(g, limits.enum_cap)?;
    let p = g.prime() as i64;
    let mut powers: Vec<u64> = members.iter().map(|&x| g.pack(&g.pow_raw(&g.unpack(x), p))).collect();
    powers.sort_unstable();
    powers.dedup();
    Ok(subgroup_of_set(g, &powers))
}

/// Regularity at `i = 1`: `(a^p b^p)^-1 (ab)^p` lies in `Agemo_1(<a,b>')` for every pair.
pub fn is_regular(g: &PcGroup, mode: Mode, limits: &Limits) -> Result<Verdict> {
    let start = Instant::now();
    let err = std::sync::Mutex::new(None);
    let scan = scan_pairs(g, mode, limits, |a, b| match regularity_defect(g, a, b) {
        None => false,
        Some(d) => match agemo_of_pair_derived(g, a, b, limits) {
            Ok(m) => !m.contains_raw(g, &d),
            Err(e) => {
                err.lock().unwrap().get_or_insert(e);
                false
            }
        },
    })?;
    if let Some(e) = err.into_inner().unwrap() {
        return Err(e);
    }
    let mut v = pair_verdict("regular".into(), scan, |_, _| WitnessKind::Irregular, g);
    v.notes.push("checked at i = 1 only; higher powers follow for regular p-groups".into());
    Ok(v.timed(start))
}

/// One level `i` of the power structure of a subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerLevel {
    pub i: u32,
    pub omega_set: u64,
    pub omega_subgroup: u64,
    pub agemo_set: u64,
    pub agemo_subgroup: u64,
    /// The set of `p^i`-th powers is a subgroup.
    pub property1: bool,
    /// The set of elements killed by `p^i` is a subgroup.
    pub property2: bool,
    pub pi_well_defined: bool,
    pub pi_injective: bool,
    pub pi_surjective: bool,
    pub pi_bijective: bool,
    /// `|H : Omega_i(H)| = |Agemo_i(H)|`.
    pub index_equality: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupPowerStructure {
    pub label: String,
    pub order: u64,
    pub log_exponent: u32,
    pub levels: Vec<PowerLevel>,
}

impl SubgroupPowerStructure {
    pub fn property1(&self) -> bool {
        self.levels.iter().all(|l| l.property1)
    }
    pub fn property2(&self) -> bool {
        self.levels.iter().all(|l| l.property2)
    }
    pub fn property3(&self) -> bool {
        self.levels.iter().all(|l| l.pi_bijective)
    }
    pub fn index_equality(&self) -> bool {
        self.levels.iter().all(|l| l.index_equality)
    }
    pub fn regular_power_structure(&self) -> bool {
        self.property1() && self.property2() && self.property3()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerStructureReport {
    /// The group first, then its maximal subgroups when requested.
    pub subgroups: Vec<SubgroupPowerStructure>,
    /// P1, P2 and P3 conditions over the listed subgroups only, not over all sections.
    pub p1_local: bool,
    pub p2_local: bool,
    pub p3_local: bool,
    pub scope: String,
}

/// Power structure of `h` for `i = 1..r` where `exp(h) = p^r`.
pub fn power_structure_in(g: &PcGroup, h: &Subgroup, label: &str, limits: &Limits) -> Result<SubgroupPowerStructure> {
    let r = log_exponent(g, h, limits)?;
    let mut levels = Vec::new();
    for i in 1..=r.max(1) {
        let scan = pi_scan(g, h, i, limits)?;
        let (agemo_set, agemo) = agemo_in(g, h, i, limits)?;
        let index = h.order() / scan.kernel.order();
        let pi_well_defined = scan.not_well_defined.is_none();
        let pi_injective = scan.image.len() as u64 == index;
        let pi_surjective = scan.image.len() as u64 == agemo.order();
        levels.push(PowerLevel {
            i,
            omega_set: scan.omega_set.len() as u64,
            omega_subgroup: scan.kernel.order(),
            agemo_set: agemo_set.len() as u64,
            agemo_subgroup: agemo.order(),
            property1: agemo_set.len() as u64 == agemo.order(),
            property2: scan.omega_set.len() as u64 == scan.kernel.order(),
            pi_well_defined,
            pi_injective,
            pi_surjective,
            pi_bijective: pi_well_defined && pi_injective && pi_surjective,
            index_equality: index == agemo.order(),
        });
    }
    Ok(SubgroupPowerStructure { label: label.to_string(), order: h.order(), log_exponent: r, levels })
}

pub fn power_structure_report(g: &PcGroup, include_maximals: bool, limits: &Limits) -> Result<PowerStructureReport> {
    ensure_enumerable(g, limits)?;
    let mut subgroups = vec![power_structure_in(g, &Subgroup::whole(g), "G", limits)?];
    if include_maximals {
        let (_, maximals) = frattini_and_maximals(g);
        for (k, m) in maximals.iter().enumerate() {
            subgroups.push(power_structure_in(g, m, &format!("M{k}"), limits)?);
        }
    }
    Ok(PowerStructureReport {
        p1_local: subgroups.iter().all(|s| s.property1()),
        p2_local: subgroups.iter().all(|s| s.property2()),
        p3_local: subgroups.iter().all(|s| s.index_equality()),
        scope: if include_maximals { "group and maximal subgroups" } else { "group only" }.into(),
        subgroups,
    })
}

/// Re-tests a witness with direct collection, independent of any table.
pub fn reverify(g: &PcGroup, w: &Witness, limits: &Limits) -> Result<bool> {
    let el: Vec<Vec<u64>> = w.elements.iter().map(|e| e.exponents.clone()).collect();
    for (x, e) in el.iter().zip(&w.elements) {
        if g.parse_element(&e.word)? != g.element(x)? {
            return Ok(false);
        }
    }
    Ok(match &w.kind {
        WitnessKind::PAbelian => {
            let p = g.prime() as i64;
            g.pow_raw(&product(g, &el[0], &el[1]), p) != product(g, &g.pow_raw(&el[0], p), &g.pow_raw(&el[1], p))
        }
        WitnessKind::Semi { i, direction } => semi_direction(g, &el[0], &el[1], *i) == Some(*direction),
        WitnessKind::Irregular => match regularity_defect(g, &el[0], &el[1]) {
            None => false,
            Some(d) => !agemo_of_pair_derived(g, &el[0], &el[1], limits)?.contains_raw(g, &d),
        },
        WitnessKind::GroupPasses { i } => is_semi_abelian_pi(g, *i, limits)?.is_true(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse;

    fn build(text: &str) -> PcGroup {
        PcGroup::build(&parse(text).unwrap(), true).unwrap()
    }

    const C9: &str = "pgroup p=3\ngen a order 9\n";
    const WREATH: &str = "pgroup p=3\ngen t order 3\ngen u1 order 3\ngen u2 order 3\ngen u3 order 3\n\
                          comm [u1,t] = u2\ncomm [u2,t] = u3\n";

    #[test]
    fn cyclic_passes_everything() {
        let g = build(C9);
        let l = Limits::default();
        assert!(is_p_abelian(&g, Mode::Exhaustive, &l).unwrap().is_true());
        assert!(is_semi_abelian_pi(&g, 1, &l).unwrap().is_true());
        assert!(is_semi_abelian_definitional(&g, 1, Mode::Exhaustive, &l).unwrap().is_true());
        assert!(is_inner_semi_abelian(&g, 1, &l).unwrap().is_false());
        let rep = power_structure_report(&g, true, &l).unwrap();
        assert!(rep.subgroups[0].regular_power_structure());
    }

    #[test]
    fn wreath_product_fails_semi_three() {
        let g = build(WREATH);
        let l = Limits::default();
        let d = is_semi_abelian_definitional(&g, 1, Mode::Exhaustive, &l).unwrap();
        let pi = is_semi_abelian_pi(&g, 1, &l).unwrap();
        assert!(d.is_false() && pi.is_false());
        assert!(reverify(&g, d.witness.as_ref().unwrap(), &l).unwrap());
        assert!(reverify(&g, pi.witness.as_ref().unwrap(), &l).unwrap());
        let reg = is_regular(&g, Mode::Exhaustive, &l).unwrap();
        assert!(reg.is_false());
        assert!(reverify(&g, reg.witness.as_ref().unwrap(), &l).unwrap());
    }

    #[test]
    fn sampling_never_claims_truth() {
        let g = build(C9);
        let v = is_p_abelian(&g, Mode::sampled(1, 100), &Limits::default()).unwrap();
        assert_eq!(v.holds, Truth::Unknown);
        assert_eq!(v.mode, CheckMode::Sampled { seed: 1, samples: 100 });
    }
}
