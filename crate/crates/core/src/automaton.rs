//! Cellular automaton rules on one-sided finite words.
//!
//! A [`LocalRule`] is a dense lookup table over the neighbourhood
//! `[-ℓ..r]`. Words are one-sided: stepping a word of length `n` yields the
//! `n - ℓ - r` outputs whose neighbourhoods lie inside the word, indexed from 0.
//!
//! [`Qgca`] wraps a bipermutative nearest-neighbour rule (`ℓ = 0, r = 1`)
//! together with its two division tables, which drive preimage solving,
//! the toggle map and the conjugacy `Ξ`.

use std::collections::HashMap;

use thiserror::Error;

use crate::alphabet::{Alphabet, Symbol};
use crate::quasigroup::{validate_latin, Quasigroup, QuasigroupError};

/// Cap on the number of entries in a rule table.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 24;
/// Cap on the number of periodic words explored by [`LocalRule::orbit_period`].
pub const MAX_ORBIT_STATES: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("rule table would need {0} entries (cap {MAX_TABLE_ENTRIES})")]
    TableTooLarge(u128),
    #[error("rule table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("table entry {index} is out of range")]
    BadEntry { index: usize },
    #[error("word of length {len} is too short (need at least {need})")]
    WordTooShort { len: usize, need: usize },
    #[error("symbol {symbol} at position {pos} is outside the alphabet")]
    BadSymbol { pos: usize, symbol: Symbol },
    #[error("rule is not a nearest-neighbour (ℓ=0, r=1) rule")]
    NotRnnca,
    #[error("rule is not bipermutative")]
    NotBipermutative,
    #[error("block recoding needs ℓ + r >= 1")]
    ZeroRadius,
    #[error("{0} periodic words exceed the orbit bound")]
    PeriodTooLarge(u128),
    #[error("period word must be nonempty")]
    EmptyPeriod,
}

#[derive(Clone, PartialEq, Eq)]
pub struct LocalRule {
    alphabet: Alphabet,
    left: usize,
    right: usize,
    table: Vec<Symbol>,
}

impl std::fmt::Debug for LocalRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalRule")
            .field("alphabet_size", &self.alphabet_size())
            .field("left", &self.left)
            .field("right", &self.right)
            .finish()
    }
}

fn table_len(n: usize, arity: usize) -> Result<usize, AutomatonError> {
    let len = (n as u128).pow(arity as u32);
    if len > MAX_TABLE_ENTRIES as u128 {
        return Err(AutomatonError::TableTooLarge(len));
    }
    Ok(len as usize)
}

impl LocalRule {
    /// Table indexed by the neighbourhood read as a base-`N` number,
    /// leftmost cell most significant.
    pub fn new(
        alphabet: Alphabet,
        left: usize,
        right: usize,
        table: Vec<Symbol>,
    ) -> Result<Self, AutomatonError> {
        let n = alphabet.len();
        let expected = table_len(n, left + right + 1)?;
        if table.len() != expected {
            return Err(AutomatonError::TableSize { expected, got: table.len() });
        }
        if let Some(index) = table.iter().position(|&v| v as usize >= n) {
            return Err(AutomatonError::BadEntry { index });
        }
        Ok(Self { alphabet, left, right, table })
    }

    pub fn from_fn(
        alphabet: Alphabet,
        left: usize,
        right: usize,
        f: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self, AutomatonError> {
        let n = alphabet.len();
        let arity = left + right + 1;
        let len = table_len(n, arity)?;
        let mut tuple = vec![0; arity];
        let table = (0..len as u64)
            .map(|i| {
                crate::alphabet::word_at(n, arity, i, &mut tuple);
                f(&tuple)
            })
            .collect();
        Self::new(alphabet, left, right, table)
    }

    /// Nearest-neighbour rule `φ(a, b) = a * b`.
    pub fn from_quasigroup(q: &Quasigroup) -> Self {
        let n = q.order() as Symbol;
        let table = (0..n).flat_map(|a| (0..n).map(move |b| q.mul(a, b))).collect();
        Self { alphabet: q.alphabet().clone(), left: 0, right: 1, table }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn left_radius(&self) -> usize {
        self.left
    }

    pub fn right_radius(&self) -> usize {
        self.right
    }

    pub fn arity(&self) -> usize {
        self.left + self.right + 1
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    pub fn is_rnnca(&self) -> bool {
        self.left == 0 && self.right == 1
    }

    pub fn apply(&self, neighbourhood: &[Symbol]) -> Symbol {
        debug_assert_eq!(neighbourhood.len(), self.arity());
        let n = self.alphabet_size();
        let idx = neighbourhood.iter().fold(0usize, |acc, &s| acc * n + s as usize);
        self.table[idx]
    }

    #[inline]
    pub fn apply2(&self, a: Symbol, b: Symbol) -> Symbol {
        self.table[a as usize * self.alphabet_size() + b as usize]
    }

    /// True iff `b ↦ φ(a, b)` is a bijection for every fixed prefix `a`.
    pub fn is_right_permutative(&self) -> bool {
        let n = self.alphabet_size();
        let mut seen = vec![false; n];
        self.table.chunks(n).all(|section| {
            seen.fill(false);
            section.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
        })
    }

    /// True iff `a ↦ φ(a, b)` is a bijection for every fixed suffix `b`.
    pub fn is_left_permutative(&self) -> bool {
        let n = self.alphabet_size();
        let stride = self.table.len() / n;
        let mut seen = vec![false; n];
        (0..stride).all(|suffix| {
            seen.fill(false);
            (0..n).all(|a| {
                let v = self.table[a * stride + suffix] as usize;
                !std::mem::replace(&mut seen[v], true)
            })
        })
    }

    pub fn is_bipermutative(&self) -> bool {
        self.is_left_permutative() && self.is_right_permutative()
    }

    /// The table of a nearest-neighbour rule as a quasigroup, if it is Latin.
    pub fn as_quasigroup(&self) -> Result<Quasigroup, AutomatonError> {
        if !self.is_rnnca() {
            return Err(AutomatonError::NotRnnca);
        }
        let rows: Vec<Vec<Symbol>> =
            self.table.chunks(self.alphabet_size()).map(<[Symbol]>::to_vec).collect();
        validate_latin(&rows, self.alphabet.clone()).map_err(|e| match e {
            QuasigroupError::DuplicateInRow { .. } | QuasigroupError::DuplicateInColumn { .. } => {
                AutomatonError::NotBipermutative
            }
            _ => AutomatonError::BadEntry { index: 0 },
        })
    }

    fn check_word(&self, w: &[Symbol]) -> Result<(), AutomatonError> {
        let n = self.alphabet_size() as Symbol;
        match w.iter().position(|&s| s >= n) {
            Some(pos) => Err(AutomatonError::BadSymbol { pos, symbol: w[pos] }),
            None => Ok(()),
        }
    }

    /// One step on a finite word: output `i` is `φ(w_i, …, w_{i+ℓ+r})`.
    pub fn step(&self, w: &[Symbol]) -> Result<Vec<Symbol>, AutomatonError> {
        self.check_word(w)?;
        let span = self.left + self.right;
        if w.len() < span + 1 {
            return Err(AutomatonError::WordTooShort { len: w.len(), need: span + 1 });
        }
        Ok(self.step_unchecked(w))
    }

    pub(crate) fn step_unchecked(&self, w: &[Symbol]) -> Vec<Symbol> {
        if self.is_rnnca() {
            w.windows(2).map(|p| self.apply2(p[0], p[1])).collect()
        } else {
            w.windows(self.arity()).map(|nb| self.apply(nb)).collect()
        }
    }

    /// Preperiod and period of the spatially periodic point `w^∞`.
    ///
    /// Stepping a `P`-periodic point gives a `P`-periodic point, so the
    /// orbit lives in the finite set of length-`P` cyclic words.
    pub fn orbit_period(&self, period_word: &[Symbol]) -> Result<(usize, usize), AutomatonError> {
        if !self.is_rnnca() {
            return Err(AutomatonError::NotRnnca);
        }
        self.check_word(period_word)?;
        let p = period_word.len();
        if p == 0 {
            return Err(AutomatonError::EmptyPeriod);
        }
        let states = (self.alphabet_size() as u128).pow(p.min(128) as u32);
        if states > MAX_ORBIT_STATES as u128 {
            return Err(AutomatonError::PeriodTooLarge(states));
        }
        let mut seen: HashMap<Vec<Symbol>, usize> = HashMap::new();
        let mut cur = period_word.to_vec();
        for t in 0.. {
            if let Some(&t0) = seen.get(&cur) {
                return Ok((t0, t - t0));
            }
            let next = (0..p).map(|i| self.apply2(cur[i], cur[(i + 1) % p])).collect();
            seen.insert(std::mem::replace(&mut cur, next), t);
        }
        unreachable!()
    }

    /// Conjugates the rule to a nearest-neighbour rule over blocks of
    /// `k = ℓ + r` symbols (non-overlapping, block `j` = `a_{jk..jk+k}`).
    pub fn recode_block(&self) -> Result<BlockRecoding, AutomatonError> {
        let k = self.left + self.right;
        if k == 0 {
            return Err(AutomatonError::ZeroRadius);
        }
        let n = self.alphabet_size();
        if k == 1 && self.is_rnnca() {
            return Ok(BlockRecoding { gamma: self.clone(), block_len: 1, base: n });
        }
        let big = (n as u128).pow(k as u32);
        if big * big > MAX_TABLE_ENTRIES as u128 {
            return Err(AutomatonError::TableTooLarge(big * big));
        }
        let big = big as usize;
        let names = (0..big).map(|b| {
            let mut digits = vec![0; k];
            crate::alphabet::word_at(n, k, b as u64, &mut digits);
            self.alphabet.format_word(&digits).replace(' ', ".")
        });
        let block_alphabet = Alphabet::new(names).map_err(|_| AutomatonError::NotRnnca)?;
        let mut pair = vec![0; 2 * k];
        let mut table = Vec::with_capacity(big * big);
        for i in 0..(big * big) as u64 {
            crate::alphabet::word_at(n, 2 * k, i, &mut pair);
            let out = self.step_unchecked(&pair);
            table.push(out.iter().fold(0, |acc, &s| acc * n as Symbol + s));
        }
        let gamma = LocalRule { alphabet: block_alphabet, left: 0, right: 1, table };
        Ok(BlockRecoding { gamma, block_len: k, base: n })
    }
}

/// Result of [`LocalRule::recode_block`].
#[derive(Debug, Clone)]
pub struct BlockRecoding {
    pub gamma: LocalRule,
    pub block_len: usize,
    base: usize,
}

impl BlockRecoding {
    /// Packs complete blocks; a trailing partial block is dropped.
    pub fn encode(&self, w: &[Symbol]) -> Vec<Symbol> {
        w.chunks_exact(self.block_len)
            .map(|c| c.iter().fold(0, |acc, &s| acc * self.base as Symbol + s))
            .collect()
    }

    pub fn decode(&self, blocks: &[Symbol]) -> Vec<Symbol> {
        let mut out = vec![0; blocks.len() * self.block_len];
        for (chunk, &b) in out.chunks_exact_mut(self.block_len).zip(blocks) {
            crate::alphabet::word_at(self.base, self.block_len, b as u64, chunk);
        }
        out
    }
}

/// A bipermutative nearest-neighbour rule (a quasigroup CA).
#[derive(Debug, Clone)]
pub struct Qgca {
    rule: LocalRule,
    /// `rdiv[a·N + w]` = the `x` with `φ(a, x) = w`.
    rdiv: Vec<Symbol>,
    /// `ldiv[w·N + b]` = the `x` with `φ(x, b) = w`.
    ldiv: Vec<Symbol>,
}

impl Qgca {
    pub fn new(rule: LocalRule) -> Result<Self, AutomatonError> {
        if !rule.is_rnnca() {
            return Err(AutomatonError::NotRnnca);
        }
        if !rule.is_bipermutative() {
            return Err(AutomatonError::NotBipermutative);
        }
        let n = rule.alphabet_size();
        let mut rdiv = vec![0; n * n];
        let mut ldiv = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let w = rule.table[a * n + b] as usize;
                rdiv[a * n + w] = b as Symbol;
                ldiv[w * n + b] = a as Symbol;
            }
        }
        Ok(Self { rule, rdiv, ldiv })
    }

    pub fn from_quasigroup(q: &Quasigroup) -> Self {
        Self::new(LocalRule::from_quasigroup(q)).expect("Latin tables are bipermutative")
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    pub fn alphabet_size(&self) -> usize {
        self.rule.alphabet_size()
    }

    #[inline]
    pub fn apply(&self, a: Symbol, b: Symbol) -> Symbol {
        self.rule.apply2(a, b)
    }

    /// The unique `x` with `φ(a, x) = w`.
    #[inline]
    pub fn right_div(&self, a: Symbol, w: Symbol) -> Symbol {
        self.rdiv[a as usize * self.alphabet_size() + w as usize]
    }

    /// The unique `x` with `φ(x, b) = w`.
    #[inline]
    pub fn left_div(&self, w: Symbol, b: Symbol) -> Symbol {
        self.ldiv[w as usize * self.alphabet_size() + b as usize]
    }

    pub fn step(&self, w: &[Symbol]) -> Result<Vec<Symbol>, AutomatonError> {
        self.rule.step(w)
    }

    /// The `N` preimages of `w`, entry `b` being the one starting with `b`.
    pub fn fiber_preimages(&self, w: &[Symbol]) -> Result<Vec<Vec<Symbol>>, AutomatonError> {
        self.rule.check_word(w)?;
        Ok((0..self.alphabet_size() as Symbol).map(|b| self.preimage_from(b, w)).collect())
    }

    /// The preimage of `w` with first symbol `b`, by right cancellation.
    pub fn preimage_from(&self, b: Symbol, w: &[Symbol]) -> Vec<Symbol> {
        let mut x = Vec::with_capacity(w.len() + 1);
        x.push(b);
        for &wi in w {
            let last = *x.last().unwrap();
            x.push(self.right_div(last, wi));
        }
        x
    }

    /// The fiber companion of `x` whose first symbol is `x_0 + 1 (mod N)`.
    pub fn tau(&self, x: &[Symbol]) -> Result<Vec<Symbol>, AutomatonError> {
        if x.len() < 2 {
            return Err(AutomatonError::WordTooShort { len: x.len(), need: 2 });
        }
        let image = self.step(x)?;
        let next = (x[0] + 1) % self.alphabet_size() as Symbol;
        Ok(self.preimage_from(next, &image))
    }

    /// `Ξ(a)_t = (Φ^t a)_0` for `t < |a|`.
    pub fn xi(&self, a: &[Symbol]) -> Result<Vec<Symbol>, AutomatonError> {
        self.rule.check_word(a)?;
        let mut row = a.to_vec();
        let mut out = Vec::with_capacity(a.len());
        while let Some(&first) = row.first() {
            out.push(first);
            row = self.rule.step_unchecked(&row);
        }
        Ok(out)
    }

    /// The unique `a` with `Ξ(a) = b`.
    ///
    /// Antidiagonal `k` of the space-time triangle is filled from `b_k` down
    /// to row 0 by right cancellation; `diag[t]` holds `(Φ^t a)_{k-t}`.
    pub fn xi_inverse(&self, b: &[Symbol]) -> Result<Vec<Symbol>, AutomatonError> {
        self.rule.check_word(b)?;
        let mut diag: Vec<Symbol> = Vec::with_capacity(b.len());
        let mut out = Vec::with_capacity(b.len());
        for (k, &bk) in b.iter().enumerate() {
            let mut next = vec![0; k + 1];
            next[k] = bk;
            for t in (0..k).rev() {
                next[t] = self.right_div(diag[t], next[t + 1]);
            }
            out.push(next[0]);
            diag = next;
        }
        Ok(out)
    }

    /// Rule of the dual quasigroup: `φ̂(a, b)` is the `c` with `φ(a, c) = b`.
    pub fn dual(&self) -> Qgca {
        let rule = LocalRule {
            alphabet: self.rule.alphabet.clone(),
            left: 0,
            right: 1,
            table: self.rdiv.clone(),
        };
        Qgca::new(rule).expect("dual of a quasigroup rule is bipermutative")
    }

    pub fn orbit_period(&self, period_word: &[Symbol]) -> Result<(usize, usize), AutomatonError> {
        self.rule.orbit_period(period_word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn xor() -> Qgca {
        Qgca::from_quasigroup(&builtins::cyclic(2).unwrap())
    }

    fn quaternion() -> (Quasigroup, Qgca) {
        let q = builtins::quaternion();
        let ca = Qgca::from_quasigroup(&q);
        (q, ca)
    }

    #[test]
    fn xor_step() {
        assert_eq!(xor().step(&[0, 1, 1, 0]).unwrap(), vec![1, 0, 1]);
        assert_eq!(
            xor().step(&[1]).unwrap_err(),
            AutomatonError::WordTooShort { len: 1, need: 2 }
        );
    }

    #[test]
    fn quaternion_step_rotates_ijk() {
        let (q, ca) = quaternion();
        let w = q.alphabet().parse_word("i j k i j k").unwrap();
        let out = ca.step(&w).unwrap();
        assert_eq!(q.alphabet().format_word(&out), "k i j k i");
    }

    #[test]
    fn idempotent_constant_word_is_fixed() {
        let d7 = builtins::d7();
        let ca = Qgca::from_quasigroup(&d7);
        let a1 = d7.alphabet().lookup("a1").unwrap();
        assert_eq!(d7.mul(a1, a1), a1);
        assert_eq!(ca.step(&[a1; 5]).unwrap(), vec![a1; 4]);
    }

    #[test]
    fn permutativity() {
        let led = LocalRule::from_quasigroup(&builtins::ledrappier(5, 2, 3).unwrap());
        assert!(led.is_left_permutative() && led.is_right_permutative());
        let proj = LocalRule::from_fn(Alphabet::numeric(2), 0, 1, |t| t[0]).unwrap();
        assert!(proj.is_left_permutative());
        assert!(!proj.is_right_permutative());
        assert!(matches!(proj.as_quasigroup(), Err(AutomatonError::NotBipermutative)));
        assert!(matches!(Qgca::new(proj), Err(AutomatonError::NotBipermutative)));
    }

    #[test]
    fn orbit_periods() {
        let (q, ca) = quaternion();
        let p = q.alphabet().parse_word("i j k").unwrap();
        assert_eq!(ca.orbit_period(&p).unwrap(), (0, 3));
        assert_eq!(xor().orbit_period(&[0]).unwrap(), (0, 1));
        // 01 -> 11 -> 00 -> 00 by direct iteration
        assert_eq!(xor().orbit_period(&[0, 1]).unwrap(), (2, 1));
        let too_long = vec![0; 30];
        assert!(matches!(ca.orbit_period(&too_long), Err(AutomatonError::PeriodTooLarge(_))));
    }

    #[test]
    fn xor_fiber_and_tau() {
        let ca = xor();
        assert_eq!(ca.fiber_preimages(&[1, 0]).unwrap(), vec![vec![0, 1, 1], vec![1, 0, 0]]);
        assert_eq!(ca.tau(&[0, 1, 1]).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn group_fiber_of_single_letter() {
        let (q, ca) = quaternion();
        let e = q.identity().unwrap();
        for g in 0..8 {
            let fiber = ca.fiber_preimages(&[g]).unwrap();
            for b in 0..8 {
                let inv = (0..8).find(|&x| q.mul(b, x) == e).unwrap();
                assert_eq!(fiber[b as usize], vec![b, q.mul(inv, g)]);
            }
        }
    }

    #[test]
    fn tau_cycles_through_the_fiber() {
        let ca = Qgca::from_quasigroup(&builtins::d7());
        let x = vec![0, 3, 6, 2, 5];
        let mut y = x.clone();
        for _ in 0..7 {
            y = ca.tau(&y).unwrap();
            assert_eq!(ca.step(&y).unwrap(), ca.step(&x).unwrap());
        }
        assert_eq!(y, x);
    }

    #[test]
    fn xi_examples() {
        let ca = xor();
        assert_eq!(ca.xi(&[0, 1, 1, 0]).unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(ca.xi(&[]).unwrap(), Vec::<Symbol>::new());
        assert_eq!(ca.xi_inverse(&[1]).unwrap(), vec![1]);
    }

    #[test]
    fn xor_xi_inverse_matches_brute_force() {
        let ca = xor();
        let target = vec![0, 1, 1, 0];
        let mut hits = Vec::new();
        for i in 0..16u64 {
            let mut w = vec![0; 4];
            crate::alphabet::word_at(2, 4, i, &mut w);
            if ca.xi(&w).unwrap() == target {
                hits.push(w);
            }
        }
        assert_eq!(hits.len(), 1);
        assert_eq!(ca.xi_inverse(&target).unwrap(), hits[0]);
    }

    #[test]
    fn xi_of_identity_prefix_telescopes() {
        let (q, ca) = quaternion();
        let e = q.identity().unwrap();
        let a = vec![2, 4, 7, 1, 3];
        let b = ca.xi(&a).unwrap();
        let mut word = vec![e];
        word.extend(&a);
        let got = ca.xi(&word).unwrap();
        let mut running = e;
        let mut expect = vec![e];
        for &bi in &b {
            running = q.mul(running, bi);
            expect.push(running);
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn dual_rule_of_group_is_inverse_times() {
        let (q, ca) = quaternion();
        let e = q.identity().unwrap();
        let dual = ca.dual();
        for a in 0..8 {
            let inv = (0..8).find(|&x| q.mul(a, x) == e).unwrap();
            for b in 0..8 {
                assert_eq!(dual.apply(a, b), q.mul(inv, b));
            }
        }
        assert_eq!(dual.dual().rule(), ca.rule());
    }

    #[test]
    fn recode_radius_one_each_side() {
        let rule = LocalRule::from_fn(Alphabet::numeric(2), 1, 1, |t| t[0] ^ t[2]).unwrap();
        let rec = rule.recode_block().unwrap();
        assert_eq!(rec.gamma.alphabet_size(), 4);
        assert!(rec.gamma.is_rnnca());
        let w = vec![0, 1, 1, 0, 1, 0, 0, 1];
        let lhs = rec.encode(&rule.step(&w).unwrap());
        let rhs = rec.gamma.step(&rec.encode(&w)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(rec.decode(&rec.encode(&w)), w);
        assert!(rule.is_bipermutative() && rec.gamma.is_bipermutative());
    }

    #[test]
    fn recode_of_nearest_neighbour_rule_is_identity() {
        let rule = LocalRule::from_quasigroup(&builtins::d7());
        let rec = rule.recode_block().unwrap();
        assert_eq!(rec.gamma, rule);
        assert_eq!(rec.encode(&[3, 1, 4]), vec![3, 1, 4]);
    }

    #[test]
    fn recode_rejects_radius_zero() {
        let rule = LocalRule::from_fn(Alphabet::numeric(3), 0, 0, |t| t[0]).unwrap();
        assert_eq!(rule.recode_block().unwrap_err(), AutomatonError::ZeroRadius);
    }
}
