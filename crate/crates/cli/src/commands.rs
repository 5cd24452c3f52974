use pcgroup::catalog;
use pcgroup::identities::{verify_claims, ClaimReport, ClaimVerdict};
use pcgroup::oracle::{build_table, cross_validate, oracle_semi_abelian};
use pcgroup::properties::{
    is_inner_semi_abelian, is_p_abelian, is_regular, is_semi_abelian_definitional, is_semi_abelian_pi,
    is_strongly_semi_abelian, power_structure_report, reverify,
};
use pcgroup::structure::{
    agemo, center_and_upper_series, commutator_subgroup, derived_subgroup, frattini_with_basis, group_stats,
    lower_central_series, omega,
};
use pcgroup::{CheckMode, Error, Mode, PcGroup, Truth, Verdict};
use serde_json::json;

use crate::report::{claim_options, limits, load, mode, with_group, Outcome};
use crate::Common;

pub fn truth(t: Truth) -> &'static str {
    match t {
        Truth::True => "true",
        Truth::False => "false",
        Truth::Unknown => "unknown",
    }
}

pub fn mode_label(m: &CheckMode) -> String {
    match m {
        CheckMode::Exhaustive => "exhaustive".into(),
        CheckMode::Structural => "structural".into(),
        CheckMode::Sampled { seed, samples } => format!("sampled(seed={seed}, n={samples})"),
    }
}

fn verdict_line(v: &Verdict) -> String {
    let mut s = format!("{:<40} {:<8} {}", v.property, truth(v.holds), mode_label(&v.mode));
    if let Some(w) = v.witness.as_ref().filter(|w| !w.elements.is_empty()) {
        let words: Vec<&str> = w.elements.iter().map(|e| e.word.as_str()).collect();
        s += &format!("  witness ({})", words.join(", "));
    }
    s
}

fn verdict_label(v: ClaimVerdict) -> &'static str {
    match v {
        ClaimVerdict::Holds => "holds",
        ClaimVerdict::Fails => "FAILS",
        ClaimVerdict::Vacuous => "vacuous",
        ClaimVerdict::Unknown => "unknown",
    }
}

pub fn claim_line(r: &ClaimReport) -> String {
    let mut s = format!("{:<9} {:<8} {:<32}", r.id, verdict_label(r.verdict), mode_label(&r.mode));
    if r.verdict == ClaimVerdict::Vacuous {
        s += &format!(" ({})", r.hypothesis_detail);
    }
    if let Some(w) = &r.witness {
        let parts: Vec<String> = if w.roles.is_empty() {
            w.elements.iter().map(|e| e.word.clone()).collect()
        } else {
            w.roles.iter().zip(&w.elements).map(|(r, e)| format!("{r}={}", e.word)).collect()
        };
        s += &format!(" witness [{}] {}", parts.join(", "), w.note);
    }
    if let Some((code, msg)) = &r.error {
        s += &format!(" error [{code}]: {msg}");
    }
    s.trim_end().to_string()
}

/// Exit status contribution of a claim: 0 when it holds or is vacuous.
pub fn claim_status(r: &ClaimReport) -> u8 {
    match (&r.error, r.verdict) {
        (Some((code, _)), _) if code == "capacity" => 3,
        (Some(_), _) => 2,
        (None, ClaimVerdict::Holds | ClaimVerdict::Vacuous) => 0,
        _ => 1,
    }
}

pub fn validate(c: &Common) -> Outcome {
    let mut out = Outcome::new("validate", c);
    match load(c, None) {
        Err(e) => out.fail(e),
        Ok(l) => {
            let diags = l.pres.validate();
            out.report.input = Some(l.info);
            for d in &diags {
                out.line(format!("{:?} at {}: {}", d.rule, d.location, d.message));
            }
            out.report.data = Some(json!({ "diagnostics": diags }));
            if diags.is_empty() {
                out.line("ok");
            } else {
                out.report.exit_status = 2;
            }
        }
    }
    out
}

pub fn consistency(c: &Common) -> Outcome {
    let mut out = Outcome::new("consistency", c);
    let l = match load(c, None) {
        Ok(l) => l,
        Err(e) => {
            out.fail(e);
            return out;
        }
    };
    out.report.input = Some(l.info);
    let g = match PcGroup::build(&l.pres, false) {
        Ok(g) => g,
        Err(e) => {
            out.fail(e);
            return out;
        }
    };
    let failures = g.check_consistency();
    out.report.data = Some(json!({ "failures": failures }));
    if failures.is_empty() {
        out.line(format!("consistent, order {}^{}", g.prime(), g.log_order()));
    } else {
        out.fail(Error::Inconsistent(failures));
    }
    out
}

fn derived_length(g: &PcGroup) -> usize {
    let mut d = derived_subgroup(g);
    let mut len = 1;
    while !d.is_trivial() {
        d = commutator_subgroup(g, &d, &d);
        len += 1;
    }
    if g.order() == 1 {
        0
    } else {
        len
    }
}

pub fn info(c: &Common) -> Outcome {
    with_group("info", c, None, |out, g| {
        let s = group_stats(g, &limits(c))?;
        let p = g.prime();
        out.line(format!("order     {p}^{}", s.log_order));
        out.line(format!("exponent  {p}^{}", s.log_exponent));
        out.line(format!("class     {}", s.class));
        out.line(format!("rank      {}", s.rank));
        out.line(format!("metabelian {}", s.metabelian));
        let dl = derived_length(g);
        out.line(format!("derived length {dl}"));
        out.report.data = Some(json!({ "derived_length": dl, "generators": g.generator_names() }));
        out.report.group = Some(s);
        Ok(())
    })
}

pub fn series(c: &Common) -> Outcome {
    with_group("series", c, None, |out, g| {
        let l = limits(c);
        let lcs: Vec<u32> = lower_central_series(g).iter().map(|s| s.log_order()).collect();
        let ucs: Vec<u32> = center_and_upper_series(g, &l)?.iter().map(|s| s.log_order()).collect();
        let mut derived = vec![g.log_order()];
        let mut d = derived_subgroup(g);
        loop {
            derived.push(d.log_order());
            if d.is_trivial() {
                break;
            }
            d = commutator_subgroup(g, &d, &d);
        }
        let (phi, basis) = frattini_with_basis(g);
        let stats = group_stats(g, &l)?;
        let mut powers = Vec::new();
        for i in 1..=stats.log_exponent {
            let (oset, osub) = omega(g, i, &l)?;
            let (aset, asub) = agemo(g, i, &l)?;
            out.line(format!(
                "i={i}: |Omega set| = {}, |Omega| = {}, |Agemo set| = {}, |Agemo| = {}",
                oset.len(),
                osub.order(),
                aset.len(),
                asub.order()
            ));
            powers.push(json!({
                "i": i, "omega_set": oset.len(), "omega_log_order": osub.log_order(),
                "agemo_set": aset.len(), "agemo_log_order": asub.log_order(),
            }));
        }
        let p = g.prime();
        let fmt = |v: &[u32], sep| v.iter().map(|k| format!("{p}^{k}")).collect::<Vec<_>>().join(sep);
        out.text.insert(0, format!("lower central  {}", fmt(&lcs, " > ")));
        out.text.insert(1, format!("upper central  {}", fmt(&ucs, " < ")));
        out.text.insert(2, format!("derived        {}", fmt(&derived, " > ")));
        out.text.insert(3, format!("Frattini       {p}^{} (rank {})", phi.log_order(), basis.len()));
        out.report.data = Some(json!({
            "lower_central": lcs, "upper_central": ucs, "derived": derived,
            "frattini_log_order": phi.log_order(), "powers": powers,
        }));
        out.report.group = Some(stats);
        Ok(())
    })
}

enum Prop {
    PAbelian,
    Semi(u32),
    SemiDef(u32),
    Strongly,
    Inner(u32),
    Regular,
    PowerStructure,
}

fn parse_prop(s: &str) -> Result<Prop, Error> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let level = || -> Result<u32, Error> {
        rest.strip_prefix("i=")
            .and_then(|v| v.parse().ok())
            .filter(|&i: &u32| i >= 1)
            .ok_or_else(|| Error::InvalidArgument(format!("{s}: expected {name}:i=K with K >= 1")))
    };
    Ok(match name {
        "p-abelian" => Prop::PAbelian,
        "semi" => Prop::Semi(level()?),
        "semi-def" => Prop::SemiDef(level()?),
        "strongly" => Prop::Strongly,
        "inner" => Prop::Inner(level()?),
        "regular" => Prop::Regular,
        "power-structure" => Prop::PowerStructure,
        _ => return Err(Error::InvalidArgument(format!("unknown property {s}"))),
    })
}

/// Pair scans fall back to sampling on groups too large for exhaustive pairs.
fn pair_mode(c: &Common, g: &PcGroup) -> Mode {
    match mode(c) {
        Mode::Exhaustive if g.order() > limits(c).pair_cap => Mode::sampled(c.seed, c.samples),
        m => m,
    }
}

pub fn props(c: &Common, names: &[String], expect: Option<bool>) -> Outcome {
    let defaults = ["p-abelian", "semi:i=1", "semi:i=2", "strongly", "inner:i=2", "regular"];
    let names: Vec<String> =
        if names.is_empty() { defaults.iter().map(|s| s.to_string()).collect() } else { names.to_vec() };
    with_group("props", c, None, |out, g| {
        let props = names.iter().map(|s| parse_prop(s)).collect::<Result<Vec<_>, _>>()?;
        let l = limits(c);
        for p in props {
            let v = match p {
                Prop::PAbelian => is_p_abelian(g, pair_mode(c, g), &l)?,
                Prop::Semi(i) => is_semi_abelian_pi(g, i, &l)?,
                Prop::SemiDef(i) => is_semi_abelian_definitional(g, i, pair_mode(c, g), &l)?,
                Prop::Strongly => is_strongly_semi_abelian(g, &l)?,
                Prop::Inner(i) => is_inner_semi_abelian(g, i, &l)?,
                Prop::Regular => is_regular(g, pair_mode(c, g), &l)?,
                Prop::PowerStructure => {
                    let r = power_structure_report(g, true, &l)?;
                    for s in &r.subgroups {
                        out.line(format!(
                            "{:<24} P1 {:<5} P2 {:<5} P3 {:<5} index equality {}",
                            s.label,
                            s.property1(),
                            s.property2(),
                            s.property3(),
                            s.index_equality()
                        ));
                    }
                    out.report.data = Some(serde_json::to_value(&r).expect("serializable"));
                    continue;
                }
            };
            out.line(verdict_line(&v));
            if let Some(w) = &v.witness {
                if !w.elements.is_empty() {
                    let ok = reverify(g, w, &l)?;
                    out.line(format!("  witness re-verified by collection: {ok}"));
                    if !ok {
                        out.mark_failed();
                    }
                }
            }
            if let Some(want) = expect {
                if v.holds != Truth::from(want) {
                    out.mark_failed();
                }
            }
            out.report.verdicts.push(v);
        }
        Ok(())
    })
}

pub fn identities(c: &Common, filter: &[String]) -> Outcome {
    with_group("identities", c, None, |out, g| {
        let filter = (!filter.is_empty()).then_some(filter);
        let reports = verify_claims(g, filter, &claim_options(c));
        if reports.is_empty() {
            return Err(Error::InvalidArgument("no claim matches the filter".into()));
        }
        for r in &reports {
            out.line(claim_line(r));
            out.report.exit_status = out.report.exit_status.max(claim_status(r));
        }
        out.report.claims = reports;
        Ok(())
    })
}

fn oracle_one(c: &Common, g: &PcGroup, label: &str) -> Result<(serde_json::Value, bool), Error> {
    let l = limits(c);
    let t = build_table(g, &l)?;
    let exhaustive_up_to = 3u64.pow(6).min(l.oracle_cap);
    let cross = cross_validate(g, &t, exhaustive_up_to, c.seed, c.samples);
    let mut ok = cross.agrees();
    let mut methods = Vec::new();
    for i in 1..=2 {
        let table = oracle_semi_abelian(&t, i).holds;
        let pi = is_semi_abelian_pi(g, i, &l)?.holds;
        ok &= table == pi;
        methods.push(json!({ "i": i, "table": table, "pi": pi }));
    }
    Ok((json!({ "input": label, "cross": cross, "semi": methods, "agrees": ok }), ok))
}

pub fn oracle_check(c: &Common) -> Outcome {
    if c.input.is_some() || c.catalog.is_some() {
        return with_group("oracle-check", c, None, |out, g| {
            let (v, ok) = oracle_one(c, g, "input")?;
            out.line(format!("collector and table agree: {ok}"));
            if !ok {
                for d in v["cross"]["disagreements"].as_array().into_iter().flatten() {
                    out.line(format!("  {d}"));
                }
                out.mark_failed();
            }
            out.report.data = Some(v);
            Ok(())
        });
    }
    let mut out = Outcome::new("oracle-check", c);
    let mut rows = Vec::new();
    for spec in catalog::all_specs() {
        let g = match catalog::get_spec(&spec).and_then(|p| PcGroup::build(&p, true)) {
            Ok(g) => g,
            Err(e) => {
                out.fail(e);
                return out;
            }
        };
        if g.order() > limits(c).oracle_cap {
            continue;
        }
        match oracle_one(c, &g, &spec) {
            Ok((v, ok)) => {
                out.line(format!("{spec:<24} {}", if ok { "agrees" } else { "DISAGREES" }));
                if !ok {
                    out.mark_failed();
                }
                rows.push(v);
            }
            Err(e) => {
                out.fail(e);
                return out;
            }
        }
    }
    out.report.data = Some(json!({ "groups": rows }));
    out
}

pub fn list_catalog(c: &Common) -> Outcome {
    let mut out = Outcome::new("list-catalog", c);
    let mut rows = Vec::new();
    for e in catalog::list() {
        let facts = catalog::facts(&e.name);
        let params = if e.params.is_empty() { String::new() } else { format!(" [{}]", e.params) };
        out.line(format!("{:<18} {}{params}", e.name, e.description));
        rows.push(json!({ "entry": e, "facts": facts }));
    }
    out.report.data = Some(json!({ "entries": rows }));
    out
}
