//! Finite quasigroups stored as validated Latin squares.
//!
//! A [`Quasigroup`] owns its [`Alphabet`] and a dense `N×N` table; entry
//! `(a, b)` is `a * b`. All computation is index based.

use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Symbol};

/// Largest order accepted by the subset-based enumerators (one `u64` mask).
pub const MAX_ENUM_ORDER: usize = 64;
/// Largest order accepted by the exhaustive `2^N` subset oracle.
pub const MAX_EXHAUSTIVE_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuasigroupError {
    #[error("row {row} repeats a symbol at columns {col1} and {col2}")]
    DuplicateInRow { row: usize, col1: usize, col2: usize },
    #[error("column {col} repeats a symbol at rows {row1} and {row2}")]
    DuplicateInColumn { col: usize, row1: usize, row2: usize },
    #[error("entry ({row}, {col}) is out of range")]
    BadEntry { row: usize, col: usize },
    #[error("table must be {n}x{n}")]
    Shape { n: usize },
    #[error("order {n} exceeds the enumeration bound {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("unknown builtin `{0}`")]
    UnknownName(String),
    #[error("bad parameters for builtin `{name}`: {reason}")]
    BadParams { name: String, reason: String },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Quasigroup {
    alphabet: Alphabet,
    table: Vec<Symbol>,
}

impl std::fmt::Debug for Quasigroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Quasigroup")
            .field("order", &self.order())
            .field("symbols", &self.alphabet)
            .finish()
    }
}

/// Checks the Latin-square property and builds a [`Quasigroup`].
///
/// Rows are scanned before columns; the first offending row (or column)
/// is reported with the two positions holding the repeated symbol.
pub fn validate_latin(
    rows: &[Vec<Symbol>],
    alphabet: Alphabet,
) -> Result<Quasigroup, QuasigroupError> {
    let n = alphabet.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(QuasigroupError::Shape { n });
    }
    for (r, row) in rows.iter().enumerate() {
        if let Some(c) = row.iter().position(|&v| v as usize >= n) {
            return Err(QuasigroupError::BadEntry { row: r, col: c });
        }
    }
    let mut seen = vec![usize::MAX; n];
    for (r, row) in rows.iter().enumerate() {
        seen.fill(usize::MAX);
        for (c, &v) in row.iter().enumerate() {
            let prev = seen[v as usize];
            if prev != usize::MAX {
                return Err(QuasigroupError::DuplicateInRow { row: r, col1: prev, col2: c });
            }
            seen[v as usize] = c;
        }
    }
    for c in 0..n {
        seen.fill(usize::MAX);
        for (r, row) in rows.iter().enumerate() {
            let v = row[c] as usize;
            if seen[v] != usize::MAX {
                return Err(QuasigroupError::DuplicateInColumn { col: c, row1: seen[v], row2: r });
            }
            seen[v] = r;
        }
    }
    Ok(Quasigroup { alphabet, table: rows.concat() })
}

impl Quasigroup {
    /// Builds a quasigroup from an operation, validating the result.
    pub fn from_fn(
        alphabet: Alphabet,
        op: impl Fn(Symbol, Symbol) -> Symbol,
    ) -> Result<Self, QuasigroupError> {
        let n = alphabet.len() as Symbol;
        let rows: Vec<Vec<Symbol>> = (0..n).map(|a| (0..n).map(|b| op(a, b)).collect()).collect();
        validate_latin(&rows, alphabet)
    }

    pub fn order(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        self.table[a as usize * self.order() + b as usize]
    }

    pub fn row(&self, a: Symbol) -> &[Symbol] {
        let n = self.order();
        &self.table[a as usize * n..(a as usize + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<Symbol>> {
        self.table.chunks(self.order()).map(<[Symbol]>::to_vec).collect()
    }

    /// Same table under a new set of names.
    pub fn renamed(&self, alphabet: Alphabet) -> Result<Self, QuasigroupError> {
        if alphabet.len() != self.order() {
            return Err(QuasigroupError::Shape { n: self.order() });
        }
        Ok(Self { alphabet, table: self.table.clone() })
    }

    /// `a ∗̂ b`: the unique `c` with `a * c = b`.
    pub fn dual(&self) -> Quasigroup {
        let n = self.order();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for c in 0..n {
                let b = self.table[a * n + c] as usize;
                table[a * n + b] = c as Symbol;
            }
        }
        Quasigroup { alphabet: self.alphabet.clone(), table }
    }

    /// A triple `(a, b, c)` with `(a*b)*c != a*(b*c)`, if any.
    ///
    /// Small tables are scanned exhaustively. Large ones use Light's test:
    /// the set of middle elements `b` satisfying the law for all `a, c` is
    /// closed under `*`, so checking a generating set suffices.
    pub fn associativity_witness(&self) -> Option<(Symbol, Symbol, Symbol)> {
        let n = self.order() as Symbol;
        let middles: Vec<Symbol> =
            if n <= 128 { (0..n).collect() } else { self.generating_set() };
        for &b in &middles {
            for a in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_associative(&self) -> bool {
        self.associativity_witness().is_none()
    }

    /// Two-sided identity, if one exists.
    pub fn identity(&self) -> Option<Symbol> {
        let n = self.order() as Symbol;
        (0..n).find(|&e| (0..n).all(|a| self.mul(e, a) == a && self.mul(a, e) == a))
    }

    /// Greedy generating set: smallest symbol not yet generated, repeatedly.
    pub fn generating_set(&self) -> Vec<Symbol> {
        let n = self.order();
        let mut inside = vec![false; n];
        let mut members: Vec<Symbol> = Vec::new();
        let mut gens = Vec::new();
        while let Some(g) = inside.iter().position(|&x| !x) {
            gens.push(g as Symbol);
            let mut queue = vec![g as Symbol];
            inside[g] = true;
            while let Some(x) = queue.pop() {
                members.push(x);
                for i in 0..members.len() {
                    let y = members[i];
                    for z in [self.mul(x, y), self.mul(y, x)] {
                        if !inside[z as usize] {
                            inside[z as usize] = true;
                            queue.push(z);
                        }
                    }
                }
            }
        }
        gens
    }

    /// Smallest subset containing `seed` that is closed under `*`.
    pub fn closure(&self, seed: u64) -> u64 {
        assert!(self.order() <= MAX_ENUM_ORDER);
        let mut set = seed;
        loop {
            let mut next = set;
            for a in bits(set) {
                for b in bits(set) {
                    next |= 1 << self.mul(a, b);
                }
            }
            if next == set {
                return set;
            }
            set = next;
        }
    }

    pub fn is_closed(&self, set: u64) -> bool {
        bits(set).all(|a| bits(set).all(|b| set >> self.mul(a, b) & 1 == 1))
    }

    /// All nonempty subsets closed under `*`, in lexicographic member order.
    ///
    /// Closures of every seed of size at most two are swept under pairwise
    /// union-closure until no new set appears. Singletons `{a}` with `a*a = a`
    /// and the whole set count as trivial and are reported only when
    /// `include_trivial` is set.
    pub fn subquasigroups(
        &self,
        include_trivial: bool,
    ) -> Result<Vec<SubquasigroupSet>, QuasigroupError> {
        let n = self.order();
        if n > MAX_ENUM_ORDER {
            return Err(QuasigroupError::OrderTooLarge { n, max: MAX_ENUM_ORDER });
        }
        let seeds = (0..n).flat_map(|a| (a..n).map(move |b| (1u64 << a) | (1u64 << b)));
        let family = union_closure_sweep(seeds.map(|s| self.closure(s)), |s| self.closure(s));
        Ok(finish(family, n, include_trivial))
    }

    /// Exhaustive `2^N` scan; the oracle for [`Quasigroup::subquasigroups`].
    pub fn subquasigroups_exhaustive(
        &self,
        include_trivial: bool,
    ) -> Result<Vec<SubquasigroupSet>, QuasigroupError> {
        let n = self.order();
        if n > MAX_EXHAUSTIVE_ORDER {
            return Err(QuasigroupError::OrderTooLarge { n, max: MAX_EXHAUSTIVE_ORDER });
        }
        let family = (1u64..1 << n).filter(|&s| self.is_closed(s));
        Ok(finish(family, n, include_trivial))
    }
}

/// Closes a family of sets under `close(x | y)` until a fixed point.
pub(crate) fn union_closure_sweep(
    seeds: impl IntoIterator<Item = u64>,
    close: impl Fn(u64) -> u64,
) -> std::collections::BTreeSet<u64> {
    let mut all: std::collections::BTreeSet<u64> = seeds.into_iter().collect();
    let mut queue: Vec<u64> = all.iter().copied().collect();
    while let Some(x) = queue.pop() {
        let snapshot: Vec<u64> = all.iter().copied().collect();
        for y in snapshot {
            if x | y == x || x | y == y {
                continue;
            }
            let z = close(x | y);
            if all.insert(z) {
                queue.push(z);
            }
        }
    }
    all
}

fn finish(
    family: impl IntoIterator<Item = u64>,
    n: usize,
    include_trivial: bool,
) -> Vec<SubquasigroupSet> {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out: Vec<SubquasigroupSet> = family
        .into_iter()
        .filter(|&s| include_trivial || (s.count_ones() > 1 && s != full))
        .map(SubquasigroupSet::from_mask)
        .collect();
    out.sort();
    out.dedup();
    out
}

pub(crate) fn bits(mut set: u64) -> impl Iterator<Item = Symbol> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let i = set.trailing_zeros();
            set &= set - 1;
            Some(i)
        }
    })
}

/// Sorted member list of a closed subset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubquasigroupSet {
    pub members: Vec<Symbol>,
}

impl SubquasigroupSet {
    pub fn from_mask(mask: u64) -> Self {
        Self { members: bits(mask).collect() }
    }

    pub fn mask(&self) -> u64 {
        self.members.iter().fold(0, |m, &s| m | 1 << s)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
