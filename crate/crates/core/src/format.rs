//! Plain-text file formats and a loader that resolves file or `@builtin`
//! references.
//!
//! * Table file: `N s_1 … s_N`, then `N` rows of `N` symbol names. A group
//!   file is a table file followed by `identity <symbol>`.
//! * Rule file: `N ℓ r`, an optional `symbols s_1 … s_N` line, then either
//!   `quasigroup <ref>`, `linear <matrix ref>` (the rule `M·a0 + a1` on
//!   `F_p^dim`) or one `t_0 … t_{ℓ+r} -> out` line per neighbourhood.
//! * Matrix file: `p N`, then `N` rows of `N` residues.
//! * Measure file: `key=value` lines, `kind` first.
//!
//! Lines starting with `#` and blank lines are ignored. References starting
//! with `@` name built-ins, e.g. `@d7`, `@cyclic:5`, `@ledrappier:5:2:3`,
//! `@vector:7:4`, `@cyclic:2+quaternion` (a direct product), and the matrices
//! `@f7` and `@identity:p:n`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{word_count, Alphabet, Symbol};
use crate::automaton::{AutomatonError, LocalRule, Qgca, MAX_TABLE_ENTRIES};
use crate::builtins;
use crate::eca::{self, EcaError, MatrixFp};
use crate::group::{GroupError, GroupTable};
use crate::measure::{example11, format_rational, parse_rational, CylinderMeasure, MeasureError, Prob};
use crate::quasigroup::{validate_latin, Quasigroup, QuasigroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Reference(String),
    #[error(transparent)]
    Quasigroup(#[from] QuasigroupError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Eca(#[from] EcaError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(line: usize, tok: &str) -> Result<usize, FormatError> {
    tok.parse().map_err(|_| syntax(line, format!("expected a non-negative integer, got `{tok}`")))
}

/// A parsed but unvalidated table file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableText {
    pub alphabet: Alphabet,
    pub rows: Vec<Vec<Symbol>>,
    pub identity: Option<Symbol>,
}

impl TableText {
    pub fn validate(self) -> Result<Quasigroup, QuasigroupError> {
        validate_latin(&self.rows, self.alphabet)
    }
}

pub fn parse_table_text(text: &str) -> Result<TableText, FormatError> {
    let mut lines = content_lines(text);
    let (l0, header) = lines.next().ok_or_else(|| syntax(1, "empty table file"))?;
    let mut toks = header.split_whitespace();
    let n = parse_usize(l0, toks.next().unwrap())?;
    let names: Vec<&str> = toks.collect();
    if names.len() != n {
        return Err(syntax(l0, format!("header declares {n} symbols but lists {}", names.len())));
    }
    let alphabet = Alphabet::new(names).map_err(|e| syntax(l0, e.to_string()))?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (l, row) = lines.next().ok_or_else(|| syntax(l0 + i + 1, format!("missing row {i}")))?;
        let row = alphabet.parse_word(row).map_err(|e| syntax(l, e.to_string()))?;
        if row.len() != n {
            return Err(syntax(l, format!("row has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }
    let mut identity = None;
    for (l, extra) in lines {
        match extra.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["identity", name] if identity.is_none() => {
                identity = Some(alphabet.lookup(name).map_err(|e| syntax(l, e.to_string()))?);
            }
            _ => return Err(syntax(l, format!("unexpected line `{extra}`"))),
        }
    }
    Ok(TableText { alphabet, rows, identity })
}

pub fn parse_table(text: &str) -> Result<Quasigroup, FormatError> {
    Ok(parse_table_text(text)?.validate()?)
}

pub fn print_table(q: &Quasigroup) -> String {
    let a = q.alphabet();
    let mut out = format!("{} {}\n", q.order(), a.names().join(" "));
    for r in 0..q.order() as Symbol {
        out.push_str(&a.format_word(q.row(r)));
        out.push('\n');
    }
    out
}

pub fn parse_group(text: &str) -> Result<GroupTable, FormatError> {
    let t = parse_table_text(text)?;
    let identity = t.identity;
    let q = t.validate()?;
    Ok(match identity {
        Some(e) => GroupTable::with_identity(q, e)?,
        None => GroupTable::new(q)?,
    })
}

pub fn print_group(g: &GroupTable) -> String {
    let mut out = print_table(g.quasigroup());
    out.push_str(&format!("identity {}\n", g.alphabet().name(g.identity())));
    out
}

pub fn parse_matrix(text: &str) -> Result<MatrixFp, FormatError> {
    let mut lines = content_lines(text);
    let (l0, header) = lines.next().ok_or_else(|| syntax(1, "empty matrix file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let [p, n] = head.as_slice() else {
        return Err(syntax(l0, "header must be `p N`"));
    };
    let (p, n) = (parse_usize(l0, p)? as u64, parse_usize(l0, n)?);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (l, row) = lines.next().ok_or_else(|| syntax(l0 + i + 1, format!("missing row {i}")))?;
        let row: Vec<u64> = row
            .split_whitespace()
            .map(|t| parse_usize(l, t).map(|x| x as u64))
            .collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err(syntax(l, format!("row has {} entries, expected {n}", row.len())));
        }
        if let Some(x) = row.iter().find(|&&x| x >= p) {
            return Err(syntax(l, format!("entry {x} is not a residue mod {p}")));
        }
        rows.push(row);
    }
    if let Some((l, extra)) = lines.next() {
        return Err(syntax(l, format!("unexpected line `{extra}`")));
    }
    Ok(MatrixFp::new(p, rows)?)
}

pub fn print_matrix(m: &MatrixFp) -> String {
    format!("{} {}\n{m}", m.modulus(), m.dim())
}

pub fn print_rule(rule: &LocalRule) -> String {
    let a = rule.alphabet();
    let n = rule.alphabet_size();
    let mut out = format!("{} {} {}\n", n, rule.left_radius(), rule.right_radius());
    out.push_str(&format!("symbols {}\n", a.names().join(" ")));
    let mut tuple = vec![0; rule.arity()];
    for (i, &y) in rule.table().iter().enumerate() {
        crate::alphabet::word_at(n, rule.arity(), i as u64, &mut tuple);
        out.push_str(&format!("{} -> {}\n", a.format_word(&tuple), a.name(y)));
    }
    out
}

/// Body of a rule file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleBody {
    Quasigroup(String),
    Linear(String),
    /// `(line, neighbourhood, output)` by symbol name.
    Tuples(Vec<(usize, Vec<String>, String)>),
}

/// A rule file as written, before references are resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleFile {
    pub n: usize,
    pub left: usize,
    pub right: usize,
    pub symbols: Option<Vec<String>>,
    pub body: RuleBody,
}

impl RuleFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut lines = content_lines(text).peekable();
        let (l0, header) = lines.next().ok_or_else(|| syntax(1, "empty rule file"))?;
        let head: Vec<usize> =
            header.split_whitespace().map(|t| parse_usize(l0, t)).collect::<Result<_, _>>()?;
        let [n, left, right] = head.as_slice() else {
            return Err(syntax(l0, "header must be `N l r`"));
        };
        let mut symbols = None;
        if let Some((l, rest)) = lines.peek().and_then(|&(l, s)| s.strip_prefix("symbols ").map(|r| (l, r))) {
            let names: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if names.len() != *n {
                return Err(syntax(l, format!("expected {n} symbols, got {}", names.len())));
            }
            symbols = Some(names);
            lines.next();
        }
        let directive = lines.peek().and_then(|&(_, s)| {
            let (d, r) = s.split_once(char::is_whitespace)?;
            match d {
                "quasigroup" => Some(RuleBody::Quasigroup(r.trim().to_string())),
                "linear" => Some(RuleBody::Linear(r.trim().to_string())),
                _ => None,
            }
        });
        let body = match directive {
            Some(body) => {
                lines.next();
                if let Some((l, extra)) = lines.next() {
                    return Err(syntax(l, format!("unexpected line `{extra}`")));
                }
                body
            }
            None => RuleBody::Tuples(
                lines
                    .map(|(l, line)| {
                        let (lhs, rhs) =
                            line.split_once("->").ok_or_else(|| syntax(l, "expected `t_0 … t_k -> out`"))?;
                        Ok((l, lhs.split_whitespace().map(String::from).collect(), rhs.trim().to_string()))
                    })
                    .collect::<Result<_, FormatError>>()?,
            ),
        };
        Ok(Self { n: *n, left: *left, right: *right, symbols, body })
    }

    pub fn print(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.left, self.right);
        if let Some(names) = &self.symbols {
            out.push_str(&format!("symbols {}\n", names.join(" ")));
        }
        match &self.body {
            RuleBody::Quasigroup(r) => out.push_str(&format!("quasigroup {r}\n")),
            RuleBody::Linear(r) => out.push_str(&format!("linear {r}\n")),
            RuleBody::Tuples(t) => {
                for (_, tuple, y) in t {
                    out.push_str(&format!("{} -> {y}\n", tuple.join(" ")));
                }
            }
        }
        out
    }
}

/// A measure file: ordered `key=value` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSpec {
    pub entries: Vec<(String, String)>,
}

const MEASURE_KEYS: [&str; 14] = [
    "kind", "alphabet", "size", "symbols", "weights", "initial", "transition", "period_word", "left",
    "right", "base", "rule", "group", "comment",
];

impl MeasureSpec {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (l, line) in content_lines(text) {
            let (k, v) = line.split_once('=').ok_or_else(|| syntax(l, "expected key=value"))?;
            let (k, v) = (k.trim(), v.trim());
            if !MEASURE_KEYS.contains(&k) {
                return Err(syntax(l, format!("unknown key `{k}`")));
            }
            if entries.iter().any(|(x, _)| x == k) {
                return Err(syntax(l, format!("duplicate key `{k}`")));
            }
            entries.push((k.to_string(), v.to_string()));
        }
        if entries.first().map(|(k, _)| k.as_str()) != Some("kind") {
            return Err(syntax(1, "the first key must be `kind`"));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn need(&self, key: &str) -> Result<&str, FormatError> {
        self.get(key).ok_or_else(|| FormatError::Reference(format!("measure needs `{key}=`")))
    }

    pub fn print(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

fn parse_weights(text: &str) -> Result<Vec<Prob>, FormatError> {
    text.split_whitespace()
        .map(|t| parse_rational(t).ok_or_else(|| FormatError::Reference(format!("bad rational `{t}`"))))
        .collect()
}

pub fn format_weights(w: &[Prob]) -> String {
    w.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

/// Resolves references either on disk or in an in-memory file set.
#[derive(Debug, Clone, Default)]
pub struct Loader {
    files: Option<Arc<HashMap<PathBuf, String>>>,
}

impl Loader {
    pub fn filesystem() -> Self {
        Self { files: None }
    }

    /// Files keyed by relative path; references resolve against their keys.
    pub fn in_memory(files: HashMap<PathBuf, String>) -> Self {
        Self { files: Some(Arc::new(files)) }
    }

    /// Reads a file; relative references resolve against `base`.
    pub fn read(&self, reference: &str, base: &Path) -> Result<(String, PathBuf), FormatError> {
        let path = base.join(reference);
        let text = match &self.files {
            Some(files) => files.get(&path).cloned().ok_or_else(|| FormatError::Io {
                path: path.display().to_string(),
                message: "no such fixture".into(),
            }),
            None => std::fs::read_to_string(&path)
                .map_err(|e| FormatError::Io { path: path.display().to_string(), message: e.to_string() }),
        }?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((text, dir))
    }

    /// Table or group file, or a built-in; returns the declared identity if any.
    pub fn table(&self, reference: &str, base: &Path) -> Result<TableText, FormatError> {
        if let Some(spec) = reference.strip_prefix('@') {
            let q = builtin_quasigroup(spec)?;
            return Ok(TableText { alphabet: q.alphabet().clone(), rows: q.rows(), identity: None });
        }
        parse_table_text(&self.read(reference, base)?.0)
    }

    pub fn quasigroup(&self, reference: &str, base: &Path) -> Result<Quasigroup, FormatError> {
        Ok(self.table(reference, base)?.validate()?)
    }

    pub fn group(&self, reference: &str, base: &Path) -> Result<GroupTable, FormatError> {
        let t = self.table(reference, base)?;
        let identity = t.identity;
        let q = t.validate()?;
        Ok(match identity {
            Some(e) => GroupTable::with_identity(q, e)?,
            None => GroupTable::new(q)?,
        })
    }

    pub fn matrix(&self, reference: &str, base: &Path) -> Result<MatrixFp, FormatError> {
        if let Some(spec) = reference.strip_prefix('@') {
            let (name, params) = split_builtin(spec)?;
            return match (name, params.as_slice()) {
                ("f7", []) => Ok(eca::f7_example_matrix()),
                ("identity", [p, n]) => Ok(MatrixFp::identity(*p as u64, *n)?),
                _ => Err(FormatError::Reference(format!("unknown matrix built-in `{spec}`"))),
            };
        }
        parse_matrix(&self.read(reference, base)?.0)
    }

    pub fn rule(&self, reference: &str, base: &Path) -> Result<LocalRule, FormatError> {
        if reference.starts_with('@') {
            return Ok(LocalRule::from_quasigroup(&self.quasigroup(reference, base)?));
        }
        let (text, dir) = self.read(reference, base)?;
        self.parse_rule(&text, &dir)
    }

    pub fn parse_rule(&self, text: &str, base: &Path) -> Result<LocalRule, FormatError> {
        self.build_rule(&RuleFile::parse(text)?, base)
    }

    pub fn build_rule(&self, file: &RuleFile, base: &Path) -> Result<LocalRule, FormatError> {
        let RuleFile { n, left, right, .. } = *file;
        let declared = match &file.symbols {
            Some(names) => Some(Alphabet::new(names.clone()).map_err(|e| syntax(2, e.to_string()))?),
            None => None,
        };
        let derived = |rule: LocalRule| -> Result<LocalRule, FormatError> {
            if (n, left, right) != (rule.alphabet_size(), 0, 1) {
                return Err(syntax(1, format!("header must read `{} 0 1`", rule.alphabet_size())));
            }
            if declared.as_ref().is_some_and(|a| a != rule.alphabet()) {
                return Err(syntax(2, "symbols line disagrees with the referenced table"));
            }
            Ok(rule)
        };
        let tuples = match &file.body {
            RuleBody::Quasigroup(r) => return derived(LocalRule::from_quasigroup(&self.quasigroup(r, base)?)),
            RuleBody::Linear(r) => return derived(eca::linear_rule(&self.matrix(r, base)?)?.1.rule().clone()),
            RuleBody::Tuples(t) => t,
        };
        let alphabet = declared.unwrap_or_else(|| Alphabet::numeric(n));
        let arity = left + right + 1;
        let size = word_count(n, arity)
            .filter(|&s| s <= MAX_TABLE_ENTRIES)
            .ok_or(AutomatonError::TableTooLarge((n as u128).saturating_pow(arity as u32)))?;
        let mut table: Vec<Option<Symbol>> = vec![None; size as usize];
        for (l, tuple, out) in tuples {
            let l = *l;
            let tuple = alphabet.parse_word(&tuple.join(" ")).map_err(|e| syntax(l, e.to_string()))?;
            if tuple.len() != arity {
                return Err(syntax(l, format!("neighbourhood needs {arity} symbols")));
            }
            let out = alphabet.lookup(out).map_err(|e| syntax(l, e.to_string()))?;
            let idx = tuple.iter().fold(0usize, |acc, &s| acc * n + s as usize);
            if table[idx].replace(out).is_some() {
                return Err(syntax(l, "neighbourhood listed twice"));
            }
        }
        let table: Vec<Symbol> = table
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                x.ok_or_else(|| {
                    let mut t = vec![0; arity];
                    crate::alphabet::word_at(n, arity, i as u64, &mut t);
                    syntax(1, format!("neighbourhood `{}` has no output", alphabet.format_word(&t)))
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(LocalRule::new(alphabet, left, right, table)?)
    }

    pub fn qgca(&self, reference: &str, base: &Path) -> Result<Qgca, FormatError> {
        Ok(Qgca::new(self.rule(reference, base)?)?)
    }

    pub fn measure(&self, reference: &str, base: &Path) -> Result<CylinderMeasure, FormatError> {
        let (text, dir) = self.read(reference, base)?;
        self.build_measure(&MeasureSpec::parse(&text)?, &dir)
    }

    fn measure_alphabet(&self, spec: &MeasureSpec, base: &Path) -> Result<Alphabet, FormatError> {
        match (spec.get("alphabet"), spec.get("size"), spec.get("symbols")) {
            (Some(r), None, None) => Ok(self.table(r, base)?.alphabet),
            (None, Some(n), None) => n
                .parse()
                .map(Alphabet::numeric)
                .map_err(|_| FormatError::Reference(format!("bad size `{n}`"))),
            (None, None, Some(s)) => {
                Alphabet::new(s.split_whitespace()).map_err(|e| FormatError::Reference(e.to_string()))
            }
            _ => Err(FormatError::Reference("give exactly one of alphabet=, size=, symbols=".into())),
        }
    }

    pub fn build_measure(&self, spec: &MeasureSpec, base: &Path) -> Result<CylinderMeasure, FormatError> {
        let kind = spec.need("kind")?;
        Ok(match kind {
            "uniform" => CylinderMeasure::uniform(self.measure_alphabet(spec, base)?),
            "bernoulli" => {
                let a = self.measure_alphabet(spec, base)?;
                CylinderMeasure::bernoulli(a, parse_weights(spec.need("weights")?)?)?
            }
            "markov" => {
                let a = self.measure_alphabet(spec, base)?;
                let initial = parse_weights(spec.need("initial")?)?;
                let transition =
                    spec.need("transition")?.split(';').map(parse_weights).collect::<Result<_, _>>()?;
                CylinderMeasure::markov(a, initial, transition)?
            }
            "orbit" => {
                let a = self.measure_alphabet(spec, base)?;
                let w = a
                    .parse_word(spec.need("period_word")?)
                    .map_err(|e| FormatError::Reference(e.to_string()))?;
                CylinderMeasure::orbit(a, w)?
            }
            "product" => {
                let l = self.measure(spec.need("left")?, base)?;
                let r = self.measure(spec.need("right")?, base)?;
                CylinderMeasure::product(Arc::new(l), Arc::new(r))
            }
            "pushforward_ca" => {
                let m = self.measure(spec.need("base")?, base)?;
                let rule = self.qgca(spec.need("rule")?, base)?;
                CylinderMeasure::pushforward_ca(Arc::new(m), Arc::new(rule))?
            }
            "pushforward_shift" => {
                CylinderMeasure::pushforward_shift(Arc::new(self.measure(spec.need("base")?, base)?))
            }
            "example11" => example11(&self.group(spec.get("group").unwrap_or("@cyclic:2"), base)?),
            other => return Err(FormatError::Reference(format!("unknown measure kind `{other}`"))),
        })
    }
}

fn split_builtin(spec: &str) -> Result<(&str, Vec<usize>), FormatError> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let params = parts
        .map(|t| t.parse().map_err(|_| FormatError::Reference(format!("bad parameter `{t}` in `@{spec}`"))))
        .collect::<Result<_, _>>()?;
    Ok((name, params))
}

/// `name:p1:p2+name2…`, factors combined as a direct product.
pub fn builtin_quasigroup(spec: &str) -> Result<Quasigroup, FormatError> {
    let mut acc: Option<Quasigroup> = None;
    for factor in spec.split('+') {
        let (name, params) = split_builtin(factor)?;
        let q = builtins::builtin(name, &params)?;
        acc = Some(match acc {
            None => q,
            Some(prev) => builtins::product(&prev, &q),
        });
    }
    acc.ok_or_else(|| FormatError::Reference("empty built-in reference".into()))
}
