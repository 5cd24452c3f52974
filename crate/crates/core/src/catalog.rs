//! Built-in presentations.
//!
//! Entries are addressed as `name` or `name:key=value,...`. Fixed entries ship their
//! `.pcp` text in `catalog/`; parametrized ones are generated.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::{is_prime, parse, Generator, Presentation, Word};

const EXAMPLE38: &str = include_str!("../catalog/example38.pcp");

const FIXED: &[(&str, &str)] = &[
    ("heis27", include_str!("../catalog/heis27.pcp")),
    ("extraspecial27e9", include_str!("../catalog/extraspecial27e9.pcp")),
    ("m27", include_str!("../catalog/m27.pcp")),
    ("c3wrc3", include_str!("../catalog/c3wrc3.pcp")),
    ("burnside3", include_str!("../catalog/burnside3.pcp")),
    ("dihedral8", include_str!("../catalog/dihedral8.pcp")),
    ("quaternion8", include_str!("../catalog/quaternion8.pcp")),
    ("sg81_9", include_str!("../catalog/sg81_9.pcp")),
    ("sg243_3", include_str!("../catalog/sg243_3.pcp")),
    ("sg243_14", include_str!("../catalog/sg243_14.pcp")),
    ("sg243_22", include_str!("../catalog/sg243_22.pcp")),
    ("sg243_25", include_str!("../catalog/sg243_25.pcp")),
    ("sg729_95", include_str!("../catalog/sg729_95.pcp")),
    ("heis27xc3", include_str!("../catalog/heis27xc3.pcp")),
    ("m27xc3", include_str!("../catalog/m27xc3.pcp")),
    ("c3wrc3xc3", include_str!("../catalog/c3wrc3xc3.pcp")),
    ("heis27xheis27", include_str!("../catalog/heis27xheis27.pcp")),
];

/// Products shipped as data, with their factors.
pub const PRODUCTS: &[(&str, &str, &str)] = &[
    ("heis27xc3", "heis27", "cyclic:p=3,k=1"),
    ("m27xc3", "m27", "cyclic:p=3,k=1"),
    ("c3wrc3xc3", "c3wrc3", "cyclic:p=3,k=1"),
    ("heis27xheis27", "heis27", "heis27"),
];

/// Where an expected fact comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Elementary by hand from the presentation.
    Hand,
    /// The SmallGroups library, recomputed offline.
    SmallGroups,
    /// Stated for the example group in the source construction.
    Construction,
    /// Found by this crate and cross-checked against an independent system.
    Computed,
}

/// Facts the test suite recomputes for an entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facts {
    pub order: u64,
    pub class: usize,
    pub exponent: u64,
    pub rank: usize,
    pub metabelian: bool,
    /// Semi-`p^i`-abelian for `i = 1, 2`, when documented.
    pub semi: [Option<bool>; 2],
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    /// Accepted parameters, e.g. `n>=3`.
    pub params: String,
    pub description: String,
}

fn entry(name: &str, params: &str, description: &str) -> CatalogEntry {
    CatalogEntry { name: name.into(), params: params.into(), description: description.into() }
}

pub fn list() -> Vec<CatalogEntry> {
    vec![
        entry("cyclic", "p prime, k>=1", "cyclic group of order p^k on one generator"),
        entry("elementary", "p prime, d>=1", "elementary abelian group of order p^d"),
        entry("heis27", "", "extraspecial 3^(1+2) of exponent 3"),
        entry("extraspecial27e9", "", "extraspecial 3^(1+2) of exponent 9"),
        entry("m27", "", "modular group M27"),
        entry("c3wrc3", "", "wreath product C3 wr C3"),
        entry("burnside", "d in {2,3}", "free exponent-3 group on d generators"),
        entry("burnside3", "", "free exponent-3 group on 3 generators"),
        entry("dihedral8", "", "dihedral group of order 8"),
        entry("quaternion8", "", "quaternion group of order 8"),
        entry("sg81_9", "", "SmallGroup(81,9)"),
        entry("sg243_3", "", "SmallGroup(243,3)"),
        entry("sg243_14", "", "SmallGroup(243,14)"),
        entry("sg243_22", "", "SmallGroup(243,22)"),
        entry("sg243_25", "", "SmallGroup(243,25)"),
        entry("sg729_95", "", "SmallGroup(729,95)"),
        entry("heis27xc3", "", "heis27 x C3"),
        entry("m27xc3", "", "m27 x C3"),
        entry("c3wrc3xc3", "", "c3wrc3 x C3"),
        entry("heis27xheis27", "", "heis27 x heis27"),
        entry("example38", "n>=3 (default 3)", "two-generator 3-group of order 3^(12+n) and class 5"),
    ]
}

/// Splits `name:k=v,...` into the name and its parameters.
pub fn parse_spec(spec: &str) -> Result<(String, BTreeMap<String, u64>)> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("expected key=value, found {kv:?}")))?;
        let v: u64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("{k}: not a non-negative integer: {v:?}")))?;
        params.insert(k.trim().to_string(), v);
    }
    Ok((name.trim().to_string(), params))
}

/// Resolves a spec string such as `example38:n=3`.
pub fn get_spec(spec: &str) -> Result<Presentation> {
    let (name, params) = parse_spec(spec)?;
    get(&name, &params)
}

fn take(params: &BTreeMap<String, u64>, allowed: &[&str]) -> Result<()> {
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParams(format!("unknown parameter {k}")));
    }
    Ok(())
}

fn required(params: &BTreeMap<String, u64>, key: &str) -> Result<u64> {
    params.get(key).copied().ok_or_else(|| Error::InvalidParams(format!("missing parameter {key}")))
}

fn shipped(text: &str) -> Presentation {
    parse(text).expect("shipped catalog text parses")
}

pub fn get(name: &str, params: &BTreeMap<String, u64>) -> Result<Presentation> {
    match name {
        "cyclic" => {
            take(params, &["p", "k"])?;
            cyclic(required(params, "p")?, required(params, "k")? as u32)
        }
        "elementary" => {
            take(params, &["p", "d"])?;
            elementary(required(params, "p")?, required(params, "d")? as usize)
        }
        "burnside" => {
            take(params, &["d"])?;
            match required(params, "d")? {
                2 => {
                    let mut p = shipped(FIXED[0].1);
                    p.metadata.insert("name".into(), "burnside:d=2".into());
                    Ok(p)
                }
                3 => Ok(shipped(FIXED[4].1)),
                d => Err(Error::InvalidParams(format!("burnside: d must be 2 or 3, got {d}"))),
            }
        }
        "example38" => {
            take(params, &["n"])?;
            example38(params.get("n").copied().unwrap_or(3) as u32)
        }
        _ => {
            take(params, &[])?;
            FIXED
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, text)| shipped(text))
                .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidParams(format!("{p} is not prime")));
    }
    Ok(())
}

/// `C_{p^k}` on a single generator.
pub fn cyclic(p: u64, k: u32) -> Result<Presentation> {
    check_prime(p)?;
    let order = p.checked_pow(k).filter(|&o| k >= 1 && o <= 1 << 62);
    let order = order.ok_or_else(|| Error::InvalidParams(format!("cyclic: bad exponent k={k}")))?;
    let mut pres = Presentation::new(p, vec![Generator { name: "a".into(), order }]);
    pres.metadata.insert("name".into(), format!("cyclic:p={p},k={k}"));
    Ok(pres)
}

pub fn elementary(p: u64, d: usize) -> Result<Presentation> {
    check_prime(p)?;
    if d == 0 || d > 40 || p.checked_pow(d as u32).is_none() {
        return Err(Error::InvalidParams(format!("elementary: bad rank d={d}")));
    }
    let gens = (1..=d).map(|i| Generator { name: format!("e{i}"), order: p }).collect();
    let mut pres = Presentation::new(p, gens);
    pres.metadata.insert("name".into(), format!("elementary:p={p},d={d}"));
    Ok(pres)
}

/// The example family: `a1` of order 9, `a2` of order `3^n`, with the completion
/// recorded in the shipped text.
pub fn example38(n: u32) -> Result<Presentation> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("example38 needs n >= 3, got n={n}")));
    }
    if n > 27 {
        return Err(Error::InvalidParams(format!("example38: n={n} overflows 64-bit orders")));
    }
    let mut pres = shipped(EXAMPLE38);
    let a2 = pres.index_of("a2").expect("a2 declared");
    pres.generators[a2].order = 3u64.pow(n);
    pres.metadata.insert("params".into(), format!("n={n}"));
    Ok(pres)
}

/// `A x B`; names of `B` that clash with names of `A` get a `_2` suffix.
pub fn direct_product(a: &Presentation, b: &Presentation, name: &str) -> Result<Presentation> {
    if a.prime != b.prime {
        return Err(Error::InvalidArgument(format!("primes differ: {} and {}", a.prime, b.prime)));
    }
    let off = a.len();
    let mut gens = a.generators.clone();
    for g in &b.generators {
        let mut g = g.clone();
        if a.index_of(&g.name).is_some() {
            g.name.push_str("_2");
        }
        gens.push(g);
    }
    let shift = |w: &Word| Word(w.0.iter().map(|&(g, e)| (g + off, e)).collect());
    let mut pres = Presentation::new(a.prime, gens);
    for (i, w) in a.power_tails.iter().enumerate() {
        pres.set_power(i, w.clone());
    }
    for (i, w) in b.power_tails.iter().enumerate() {
        pres.set_power(i + off, shift(w));
    }
    for (&(j, i), w) in &a.commutator_tails {
        pres.set_commutator(j, i, w.clone());
    }
    for (&(j, i), w) in &b.commutator_tails {
        pres.set_commutator(j + off, i + off, shift(w));
    }
    pres.metadata.insert("name".into(), name.into());
    Ok(pres)
}

/// Documented facts for the fixed entries and for `example38:n=3`.
pub fn facts(name: &str) -> Option<Facts> {
    use Provenance::*;
    let f = |order, class, exponent, rank, metabelian, s1, s2, provenance| Facts {
        order,
        class,
        exponent,
        rank,
        metabelian,
        semi: [s1, s2],
        provenance,
    };
    let t = Some(true);
    let n = Some(false);
    Some(match name {
        "heis27" | "burnside:d=2" => f(27, 2, 3, 2, true, t, t, Hand),
        "extraspecial27e9" => f(27, 2, 9, 2, true, t, t, Hand),
        "m27" => f(27, 2, 9, 2, true, t, t, Hand),
        "c3wrc3" => f(81, 3, 9, 2, true, n, t, SmallGroups),
        "burnside3" => f(2187, 3, 3, 3, true, t, t, Hand),
        "dihedral8" => f(8, 2, 4, 2, true, None, None, Hand),
        "quaternion8" => f(8, 2, 4, 2, true, None, None, Hand),
        "sg81_9" => f(81, 3, 9, 2, true, n, t, SmallGroups),
        "sg243_3" => f(243, 3, 9, 2, true, n, t, SmallGroups),
        "sg243_14" => f(243, 3, 9, 2, true, t, t, SmallGroups),
        "sg243_22" => f(243, 3, 27, 2, true, t, t, SmallGroups),
        "sg243_25" => f(243, 4, 9, 2, true, n, t, SmallGroups),
        "sg729_95" => f(729, 5, 27, 2, true, n, n, SmallGroups),
        "heis27xc3" => f(81, 2, 3, 3, true, t, t, Hand),
        "m27xc3" => f(81, 2, 9, 3, true, t, t, Hand),
        "c3wrc3xc3" => f(243, 3, 9, 3, true, n, t, SmallGroups),
        "heis27xheis27" => f(729, 2, 3, 4, true, t, t, Hand),
        "example38" | "example38:n=3" => f(3u64.pow(15), 5, 27, 2, false, t, n, Construction),
        _ => return None,
    })
}

/// Every catalog spec with a concrete group, small groups first.
pub fn all_specs() -> Vec<String> {
    let mut out: Vec<String> = vec!["cyclic:p=3,k=1".into(), "cyclic:p=3,k=2".into(), "cyclic:p=3,k=3".into()];
    out.push("elementary:p=3,d=2".into());
    out.push("elementary:p=3,d=3".into());
    out.extend(FIXED.iter().map(|(n, _)| n.to_string()));
    out.push("burnside:d=2".into());
    out.push("example38:n=3".into());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_products_match_generated() {
        for (name, a, b) in PRODUCTS {
            let built = direct_product(&get_spec(a).unwrap(), &get_spec(b).unwrap(), name).unwrap();
            assert_eq!(get_spec(name).unwrap(), built, "{name}");
        }
    }

    #[test]
    fn parameters_are_checked() {
        assert!(matches!(get_spec("example38:n=2"), Err(Error::InvalidParams(_))));
        assert!(matches!(get_spec("cyclic:p=4,k=2"), Err(Error::InvalidParams(_))));
        assert!(matches!(get_spec("heis27:n=1"), Err(Error::InvalidParams(_))));
        assert!(matches!(get_spec("nosuch"), Err(Error::UnknownCatalogEntry(_))));
        assert_eq!(get_spec("example38:n=4").unwrap().generators[1].order, 81);
    }

    #[test]
    fn every_entry_validates() {
        for spec in all_specs() {
            let p = get_spec(&spec).unwrap();
            assert!(p.validate().is_empty(), "{spec}: {:?}", p.validate());
        }
    }
}
