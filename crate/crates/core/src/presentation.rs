//! Power-commutator presentations and the line-oriented `.pcp` text format.
//!
//! ```text
//! pgroup p=3
//! # @name: m27
//! gen b order 3
//! gen a order 9
//! comm [a,b] = a^3
//! ```
//!
//! Generators are indexed in declaration order. `pow g = w` gives `g^(order of g)`,
//! `comm [x,y] = w` gives the commutator `x^-1 y^-1 x y` with `x` declared after `y`.
//! Relations that are not listed are trivial. A comment of the form `# @key: value`
//! is kept as metadata; every other comment is dropped.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, ParseErrorKind};

/// A word in the generators: `(index, exponent)` pairs read left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(index: usize, exp: i64) -> Self {
        Word(vec![(index, exp)])
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[(usize, i64)] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    /// Relative order `p^k`.
    pub order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub prime: u64,
    pub generators: Vec<Generator>,
    /// `power_tails[i]` is the word equal to `g_i^(order_i)`.
    pub power_tails: Vec<Word>,
    /// Keyed by `(j, i)` with `j > i`; the value is the word equal to `[g_j, g_i]`.
    /// Trivial tails are not stored.
    pub commutator_tails: BTreeMap<(usize, usize), Word>,
    pub metadata: BTreeMap<String, String>,
}

impl Presentation {
    /// Presentation of the given generators with every relation trivial.
    pub fn new(prime: u64, generators: Vec<Generator>) -> Self {
        let n = generators.len();
        Presentation {
            prime,
            generators,
            power_tails: vec![Word::identity(); n],
            commutator_tails: BTreeMap::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn set_power(&mut self, i: usize, tail: Word) {
        self.power_tails[i] = tail;
    }

    /// Sets `[g_j, g_i] = tail`; an identity tail removes the relation.
    pub fn set_commutator(&mut self, j: usize, i: usize, tail: Word) {
        if tail.is_identity() {
            self.commutator_tails.remove(&(j, i));
        } else {
            self.commutator_tails.insert((j, i), tail);
        }
    }

    pub fn commutator(&self, j: usize, i: usize) -> Option<&Word> {
        self.commutator_tails.get(&(j, i))
    }

    pub fn name(&self) -> Option<&str> {
        self.metadata.get("name").map(String::as_str)
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        let mut out = String::new();
        for (k, &(g, e)) in w.0.iter().enumerate() {
            if k > 0 {
                out.push('*');
            }
            let name = self
                .generators
                .get(g)
                .map(|g| g.name.as_str())
                .unwrap_or("?");
            out.push_str(name);
            if e != 1 {
                let _ = write!(out, "^{e}");
            }
        }
        out
    }

    /// Canonical `.pcp` text. Parsing the output yields an equal presentation.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "pgroup p={}", self.prime);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# @{k}: {v}");
        }
        for g in &self.generators {
            let _ = writeln!(out, "gen {} order {}", g.name, g.order);
        }
        for (i, tail) in self.power_tails.iter().enumerate() {
            if !tail.is_identity() {
                let _ = writeln!(
                    out,
                    "pow {} = {}",
                    self.generators[i].name,
                    self.format_word(tail)
                );
            }
        }
        for (&(j, i), tail) in &self.commutator_tails {
            let _ = writeln!(
                out,
                "comm [{},{}] = {}",
                self.generators[j].name,
                self.generators[i].name,
                self.format_word(tail)
            );
        }
        out
    }

    /// Structural diagnostics: prime and orders, unique names, index ranges and the
    /// triangular shape of every tail. Consistency is not checked here.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let p = self.prime;
        let n = self.generators.len();
        if !is_prime(p) {
            out.push(Diagnostic::new(
                Rule::Prime,
                "header",
                format!("{p} is not prime"),
            ));
        }
        let mut seen = HashMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if prime_log(g.order, p).is_none() {
                out.push(Diagnostic::new(
                    Rule::RelativeOrder,
                    format!("gen {}", g.name),
                    format!("order {} is not a positive power of {p}", g.order),
                ));
            }
            if let Some(prev) = seen.insert(g.name.as_str(), i) {
                out.push(Diagnostic::new(
                    Rule::DuplicateName,
                    format!("gen {}", g.name),
                    format!("name also used by generator {}", prev + 1),
                ));
            }
        }
        if self.power_tails.len() != n {
            out.push(Diagnostic::new(
                Rule::IndexRange,
                "pow",
                format!("{} power tails for {n} generators", self.power_tails.len()),
            ));
        }
        let name = |i: usize| {
            self.generators
                .get(i)
                .map(|g| g.name.clone())
                .unwrap_or_else(|| format!("#{i}"))
        };
        for (i, tail) in self.power_tails.iter().enumerate() {
            let loc = format!("pow {}", name(i));
            for &(g, _) in &tail.0 {
                if g >= n {
                    out.push(Diagnostic::new(
                        Rule::IndexRange,
                        loc.clone(),
                        format!("generator index {g} out of range"),
                    ));
                } else if g <= i {
                    out.push(Diagnostic::new(
                        Rule::PowerTailShape,
                        loc.clone(),
                        format!("tail mentions {} which does not come after {}", name(g), name(i)),
                    ));
                }
            }
        }
        for (&(j, i), tail) in &self.commutator_tails {
            let loc = format!("comm [{},{}]", name(j), name(i));
            if j >= n || i >= n {
                out.push(Diagnostic::new(
                    Rule::IndexRange,
                    loc,
                    "generator index out of range".to_string(),
                ));
                continue;
            }
            if j <= i {
                out.push(Diagnostic::new(
                    Rule::CommutatorOrder,
                    loc,
                    "left generator must come after the right one".to_string(),
                ));
                continue;
            }
            for &(g, e) in &tail.0 {
                if g >= n {
                    out.push(Diagnostic::new(
                        Rule::IndexRange,
                        loc.clone(),
                        format!("generator index {g} out of range"),
                    ));
                } else if g <= i {
                    out.push(Diagnostic::new(
                        Rule::CommutatorTailShape,
                        loc.clone(),
                        format!("tail mentions {} which does not come after {}", name(g), name(i)),
                    ));
                } else if g == j && e.rem_euclid(p.max(1) as i64) != 0 {
                    out.push(Diagnostic::new(
                        Rule::SelfReference,
                        loc.clone(),
                        format!(
                            "tail mentions {}^{e}; a generator may only reappear with exponent divisible by {p}",
                            name(j)
                        ),
                    ));
                }
            }
        }
        out
    }
}

/// Parses a `.pcp` document.
pub fn parse(text: &str) -> Result<Presentation, ParseError> {
    let mut prime: Option<u64> = None;
    let mut metadata = BTreeMap::new();
    let mut gens: Vec<Generator> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut relations: Vec<(usize, Relation)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim_start();
        if let Some(rest) = trimmed.strip_prefix("# @") {
            if let Some((k, v)) = rest.split_once(':') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
                continue;
            }
        }
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks = tokenize(content, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor { toks: &toks, pos: 0, line, end_col: content.len() + 1 };
        if prime.is_none() {
            cur.keyword("pgroup")?;
            cur.keyword("p")?;
            cur.expect(Tok::Eq)?;
            let (p, col) = cur.int()?;
            if p <= 0 || !is_prime(p as u64) {
                return Err(ParseError { line, column: col, kind: ParseErrorKind::NotPrime(p.max(0) as u64) });
            }
            prime = Some(p as u64);
            cur.finish()?;
            continue;
        }
        let p = prime.unwrap_or(2);
        let (kw, col) = cur.ident()?;
        match kw.as_str() {
            "gen" => {
                let (name, ncol) = cur.ident()?;
                cur.keyword("order")?;
                let (order, ocol) = cur.int()?;
                cur.finish()?;
                if order <= 0 || prime_log(order as u64, p).is_none() {
                    return Err(ParseError {
                        line,
                        column: ocol,
                        kind: ParseErrorKind::OrderNotPrimePower { order: order.max(0) as u64, prime: p },
                    });
                }
                if index.contains_key(&name) {
                    return Err(ParseError { line, column: ncol, kind: ParseErrorKind::DuplicateGenerator(name) });
                }
                index.insert(name.clone(), gens.len());
                gens.push(Generator { name, order: order as u64 });
            }
            "pow" => {
                let (name, ncol) = cur.ident()?;
                cur.expect(Tok::Eq)?;
                let word = cur.word()?;
                cur.finish()?;
                relations.push((line, Relation::Pow { name: (name, ncol), word }));
            }
            "comm" => {
                cur.expect(Tok::LBracket)?;
                let left = cur.ident()?;
                cur.expect(Tok::Comma)?;
                let right = cur.ident()?;
                cur.expect(Tok::RBracket)?;
                cur.expect(Tok::Eq)?;
                let word = cur.word()?;
                cur.finish()?;
                relations.push((line, Relation::Comm { left, right, word }));
            }
            other => {
                return Err(ParseError {
                    line,
                    column: col,
                    kind: ParseErrorKind::Syntax(format!("expected `gen`, `pow` or `comm`, found `{other}`")),
                })
            }
        }
    }

    let prime = prime.ok_or(ParseError {
        line: 1,
        column: 1,
        kind: ParseErrorKind::Syntax("missing `pgroup p=...` header".into()),
    })?;
    let mut pres = Presentation::new(prime, gens);
    pres.metadata = metadata;
    let resolve = |line: usize, (name, column): &(String, usize)| {
        index.get(name).copied().ok_or_else(|| ParseError {
            line,
            column: *column,
            kind: ParseErrorKind::UnknownGenerator(name.clone()),
        })
    };
    let resolve_word = |line: usize, w: &[((String, usize), i64)]| -> Result<Word, ParseError> {
        w.iter()
            .map(|(n, e)| Ok((resolve(line, n)?, *e)))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    };
    let mut pow_seen = vec![false; pres.len()];
    for (line, rel) in &relations {
        match rel {
            Relation::Pow { name, word } => {
                let i = resolve(*line, name)?;
                if std::mem::replace(&mut pow_seen[i], true) {
                    return Err(ParseError {
                        line: *line,
                        column: name.1,
                        kind: ParseErrorKind::DuplicateRelation(format!("pow {}", name.0)),
                    });
                }
                pres.power_tails[i] = resolve_word(*line, word)?;
            }
            Relation::Comm { left, right, word } => {
                let j = resolve(*line, left)?;
                let i = resolve(*line, right)?;
                if j <= i {
                    return Err(ParseError {
                        line: *line,
                        column: left.1,
                        kind: ParseErrorKind::CommutatorOrder { left: left.0.clone(), right: right.0.clone() },
                    });
                }
                let w = resolve_word(*line, word)?;
                if pres.commutator_tails.contains_key(&(j, i)) {
                    return Err(ParseError {
                        line: *line,
                        column: left.1,
                        kind: ParseErrorKind::DuplicateRelation(format!("comm [{},{}]", left.0, right.0)),
                    });
                }
                pres.set_commutator(j, i, w);
            }
        }
    }
    Ok(pres)
}

impl std::str::FromStr for Presentation {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Prime,
    RelativeOrder,
    DuplicateName,
    IndexRange,
    CommutatorOrder,
    PowerTailShape,
    CommutatorTailShape,
    SelfReference,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub rule: Rule,
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    fn new(rule: Rule, location: impl Into<String>, message: String) -> Self {
        Diagnostic { rule, location: location.into(), message }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({:?})", self.location, self.message, self.rule)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `k` with `p^k == n` and `k >= 1`.
pub(crate) fn prime_log(n: u64, p: u64) -> Option<u32> {
    if p < 2 || n < p {
        return None;
    }
    let mut k = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some(k)
}

enum Relation {
    Pow { name: (String, usize), word: Vec<((String, usize), i64)> },
    Comm { left: (String, usize), right: (String, usize), word: Vec<((String, usize), i64)> },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Eq,
    LBracket,
    RBracket,
    Comma,
    Star,
    Caret,
}

fn tokenize(s: &str, line: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '=' => Some(Tok::Eq),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c.is_ascii_digit() || c == '-' {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v = s[start..i].parse::<i64>().map_err(|_| ParseError {
                line,
                column: col,
                kind: ParseErrorKind::Syntax(format!("bad integer `{}`", &s[start..i])),
            })?;
            out.push((Tok::Int(v), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(s[start..i].to_string()), col));
        } else {
            return Err(ParseError {
                line,
                column: col,
                kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
            });
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor<'_> {
    fn err(&self, msg: String) -> ParseError {
        let column = self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col);
        ParseError { line: self.line, column, kind: ParseErrorKind::Syntax(msg) }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), col)) => {
                self.pos += 1;
                Ok((s.clone(), *col))
            }
            _ => Err(self.err("expected a name".into())),
        }
    }

    fn int(&mut self) -> Result<(i64, usize), ParseError> {
        match self.toks.get(self.pos) {
            Some((Tok::Int(v), col)) => {
                self.pos += 1;
                Ok((*v, *col))
            }
            _ => Err(self.err("expected an integer".into())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{kw}`"))),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {t:?}")))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input".into()))
        }
    }

    fn word(&mut self) -> Result<Vec<((String, usize), i64)>, ParseError> {
        if let Some(Tok::Int(1)) = self.peek() {
            self.pos += 1;
            return Ok(Vec::new());
        }
        let mut terms = Vec::new();
        loop {
            let name = self.ident()?;
            let mut exp = 1;
            if self.peek() == Some(&Tok::Caret) {
                self.pos += 1;
                exp = self.int()?.0;
            }
            terms.push((name, exp));
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C9: &str = "pgroup p=3\ngen a order 9\n";

    #[test]
    fn parses_minimal_cyclic() {
        let p = parse(C9).unwrap();
        assert_eq!(p.prime, 3);
        assert_eq!(p.generators, vec![Generator { name: "a".into(), order: 9 }]);
        assert!(p.power_tails[0].is_identity());
        assert!(p.commutator_tails.is_empty());
        assert!(p.validate().is_empty());
    }

    #[test]
    fn unknown_generator_in_relation() {
        let err = parse("pgroup p=3\ngen a order 3\ngen b order 3\ncomm [b,a] = q\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownGenerator("q".into()));
        assert_eq!((err.line, err.column), (4, 14));
    }

    #[test]
    fn duplicate_generator() {
        let err = parse("pgroup p=3\ngen a order 3\ngen a order 9\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateGenerator("a".into()));
    }

    #[test]
    fn order_must_be_power_of_prime() {
        let err = parse("pgroup p=3\ngen a order 6\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::OrderNotPrimePower { order: 6, prime: 3 });
        assert!(matches!(
            parse("pgroup p=3\ngen a order 1\n").unwrap_err().kind,
            ParseErrorKind::OrderNotPrimePower { .. }
        ));
        assert_eq!(parse("pgroup p=4\n").unwrap_err().kind, ParseErrorKind::NotPrime(4));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("pgroup p=3\ngen a order 3\npow a = a^\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(err.line, 3);
        let err = parse("gen a order 3\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 1));
        let err = parse("pgroup p=3\ngen a order 3 ?\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 15));
    }

    #[test]
    fn commutator_left_must_be_later() {
        let err = parse("pgroup p=3\ngen a order 3\ngen b order 3\ncomm [a,b] = 1\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::CommutatorOrder { .. }));
    }

    #[test]
    fn relations_sorted_on_output() {
        let text = "pgroup p=3\ngen x order 3\ngen y order 3\ngen z order 3\ngen w order 3\n\
                    comm [w,y] = 1\ncomm [z,y] = w\ncomm [y,x] = z^-1*w\ncomm [z,x] = w^2\n";
        let p = parse(text).unwrap();
        let out = p.serialize();
        let comm_lines: Vec<&str> = out.lines().filter(|l| l.starts_with("comm")).collect();
        assert_eq!(comm_lines, vec!["comm [y,x] = z^-1*w", "comm [z,x] = w^2", "comm [z,y] = w"]);
        assert_eq!(parse(&out).unwrap(), p);
    }

    #[test]
    fn metadata_and_comments() {
        let text = "# leading comment\npgroup p=3 # trailing\n# @name: c9\ngen a order 9\n";
        let p = parse(text).unwrap();
        assert_eq!(p.name(), Some("c9"));
        assert_eq!(p.serialize(), "pgroup p=3\n# @name: c9\ngen a order 9\n");
    }

    #[test]
    fn validate_shape_rules() {
        let mut p = parse("pgroup p=3\ngen g1 order 3\ngen g2 order 3\ngen g3 order 3\n").unwrap();
        p.set_commutator(2, 0, Word::gen(1, 1));
        assert!(p.validate().is_empty());
        p.set_commutator(2, 0, Word::gen(2, 1));
        let d = p.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, Rule::SelfReference);
        assert_eq!(d[0].location, "comm [g3,g1]");
        p.set_commutator(2, 0, Word::gen(0, 1));
        assert_eq!(p.validate()[0].rule, Rule::CommutatorTailShape);
        p.set_commutator(2, 0, Word::identity());
        p.set_power(1, Word::gen(1, 1));
        assert_eq!(p.validate()[0].rule, Rule::PowerTailShape);
    }

    #[test]
    fn self_reference_allowed_with_p_multiple() {
        let p = parse("pgroup p=3\ngen b order 3\ngen a order 9\ncomm [a,b] = a^3\n").unwrap();
        assert!(p.validate().is_empty());
    }
}
