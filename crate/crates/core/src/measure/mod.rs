//! Exact cylinder measures on one-sided sequence space.
//!
//! A [`CylinderMeasure`] is an immutable evaluator tree. `eval(w)` is the
//! probability of the cylinder fixing coordinates `0..|w|` to `w`, as an
//! exact rational.

mod analysis;
mod log2;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::alphabet::{word_count, Alphabet, Symbol};
use crate::automaton::{AutomatonError, Qgca};
use crate::group::GroupError;

pub use analysis::{
    block_entropy, block_entropy_exact, conditional_dist, coset_measure_check,
    entropy_increments_exact, entropy_rate_profile, example11, example11_group, example11_rule,
    fiber_spectrum, invariance_report, support_alphabet, CosetFailure, CosetReport, FiberReport,
    FiberRow, InvarianceReport, SupportReport, Transform,
};
pub use log2::Log2Form;

/// Exact probability.
pub type Prob = BigRational;

/// Largest number of words any depth sweep will enumerate.
pub const MAX_WORDS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("alphabet size mismatch: expected {expected}, got {got}")]
    AlphabetMismatch { expected: usize, got: usize },
    #[error("symbol {symbol} at position {pos} is outside the alphabet")]
    BadSymbol { pos: usize, symbol: Symbol },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("conditioning word has zero mass")]
    ZeroMassCondition,
    #[error("{words} words at depth {depth} exceed the enumeration bound {MAX_WORDS}")]
    DepthTooLarge { depth: usize, words: u128 },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone)]
pub enum MeasureKind {
    Uniform,
    Bernoulli(Vec<Prob>),
    Markov { initial: Vec<Prob>, transition: Vec<Vec<Prob>> },
    /// Uniform on the shift orbit of the periodic point `period^∞`.
    Orbit(Vec<Symbol>),
    /// Symbol `x` pairs with `(x / |right|, x % |right|)`.
    Product(Arc<CylinderMeasure>, Arc<CylinderMeasure>),
    PushforwardCa { base: Arc<CylinderMeasure>, rule: Arc<Qgca> },
    PushforwardShift(Arc<CylinderMeasure>),
}

#[derive(Debug, Clone)]
pub struct CylinderMeasure {
    alphabet: Alphabet,
    kind: MeasureKind,
}

fn check_distribution(what: &str, weights: &[Prob], n: usize) -> Result<(), MeasureError> {
    if weights.len() != n {
        return Err(MeasureError::InvalidParams(format!(
            "{what}: expected {n} weights, got {}",
            weights.len()
        )));
    }
    if weights.iter().any(Signed::is_negative) {
        return Err(MeasureError::InvalidParams(format!("{what}: negative weight")));
    }
    let total: Prob = weights.iter().sum();
    if !total.is_one() {
        return Err(MeasureError::InvalidParams(format!("{what}: weights sum to {total}")));
    }
    Ok(())
}

impl CylinderMeasure {
    pub fn uniform(alphabet: Alphabet) -> Self {
        Self { alphabet, kind: MeasureKind::Uniform }
    }

    pub fn bernoulli(alphabet: Alphabet, weights: Vec<Prob>) -> Result<Self, MeasureError> {
        check_distribution("bernoulli", &weights, alphabet.len())?;
        Ok(Self { alphabet, kind: MeasureKind::Bernoulli(weights) })
    }

    pub fn markov(
        alphabet: Alphabet,
        initial: Vec<Prob>,
        transition: Vec<Vec<Prob>>,
    ) -> Result<Self, MeasureError> {
        let n = alphabet.len();
        check_distribution("initial", &initial, n)?;
        if transition.len() != n {
            return Err(MeasureError::InvalidParams(format!("transition needs {n} rows")));
        }
        for row in &transition {
            check_distribution("transition row", row, n)?;
        }
        Ok(Self { alphabet, kind: MeasureKind::Markov { initial, transition } })
    }

    pub fn orbit(alphabet: Alphabet, period: Vec<Symbol>) -> Result<Self, MeasureError> {
        if period.is_empty() {
            return Err(MeasureError::InvalidParams("empty period word".into()));
        }
        check_symbols(&period, alphabet.len())?;
        Ok(Self { alphabet, kind: MeasureKind::Orbit(period) })
    }

    pub fn product(left: Arc<CylinderMeasure>, right: Arc<CylinderMeasure>) -> Self {
        let alphabet = Alphabet::product(&left.alphabet, &right.alphabet);
        Self { alphabet, kind: MeasureKind::Product(left, right) }
    }

    /// `Φ(μ)`: `eval(w) = Σ_b μ(preimage of w starting with b)`.
    pub fn pushforward_ca(base: Arc<CylinderMeasure>, rule: Arc<Qgca>) -> Result<Self, MeasureError> {
        if rule.alphabet_size() != base.alphabet.len() {
            return Err(MeasureError::AlphabetMismatch {
                expected: base.alphabet.len(),
                got: rule.alphabet_size(),
            });
        }
        let alphabet = base.alphabet.clone();
        Ok(Self { alphabet, kind: MeasureKind::PushforwardCa { base, rule } })
    }

    /// `σ(μ)`: `eval(w) = Σ_b μ(b·w)`.
    pub fn pushforward_shift(base: Arc<CylinderMeasure>) -> Self {
        let alphabet = base.alphabet.clone();
        Self { alphabet, kind: MeasureKind::PushforwardShift(base) }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Probability of the cylinder `[w]` at coordinate 0.
    pub fn eval(&self, w: &[Symbol]) -> Result<Prob, MeasureError> {
        check_symbols(w, self.alphabet_size())?;
        Ok(self.eval_unchecked(w))
    }

    pub(crate) fn eval_unchecked(&self, w: &[Symbol]) -> Prob {
        if w.is_empty() {
            return Prob::one();
        }
        match &self.kind {
            MeasureKind::Uniform => {
                let n = BigInt::from(self.alphabet_size());
                Prob::new(BigInt::one(), num_traits::pow(n, w.len()))
            }
            MeasureKind::Bernoulli(weights) => {
                w.iter().fold(Prob::one(), |acc, &s| acc * &weights[s as usize])
            }
            MeasureKind::Markov { initial, transition } => {
                let start = initial[w[0] as usize].clone();
                w.windows(2).fold(start, |acc, p| acc * &transition[p[0] as usize][p[1] as usize])
            }
            MeasureKind::Orbit(period) => {
                let p = period.len();
                let hits = (0..p)
                    .filter(|&s| w.iter().enumerate().all(|(i, &x)| period[(s + i) % p] == x))
                    .count();
                Prob::new(BigInt::from(hits), BigInt::from(p))
            }
            MeasureKind::Product(left, right) => {
                let m = right.alphabet_size() as Symbol;
                let lw: Vec<Symbol> = w.iter().map(|&x| x / m).collect();
                let rw: Vec<Symbol> = w.iter().map(|&x| x % m).collect();
                if left.is_null(&lw) || right.is_null(&rw) {
                    return Prob::zero();
                }
                left.eval_unchecked(&lw) * right.eval_unchecked(&rw)
            }
            MeasureKind::PushforwardCa { base, rule } => {
                let mut total = Prob::zero();
                for b in 0..self.alphabet_size() as Symbol {
                    let x = rule.preimage_from(b, w);
                    if !base.is_null(&x) {
                        total += base.eval_unchecked(&x);
                    }
                }
                total
            }
            MeasureKind::PushforwardShift(base) => {
                let mut ext = Vec::with_capacity(w.len() + 1);
                ext.push(0);
                ext.extend_from_slice(w);
                (0..self.alphabet_size() as Symbol)
                    .map(|b| {
                        ext[0] = b;
                        base.eval_unchecked(&ext)
                    })
                    .sum()
            }
        }
    }
}

impl CylinderMeasure {
    /// Cheap sufficient test for `eval(w) = 0` that avoids big-number work.
    /// May return `false` for some null cylinders.
    pub(crate) fn is_null(&self, w: &[Symbol]) -> bool {
        match &self.kind {
            MeasureKind::Uniform => false,
            MeasureKind::Bernoulli(weights) => w.iter().any(|&s| weights[s as usize].is_zero()),
            MeasureKind::Markov { initial, transition } => {
                w.first().is_some_and(|&s| initial[s as usize].is_zero())
                    || w.windows(2).any(|p| transition[p[0] as usize][p[1] as usize].is_zero())
            }
            MeasureKind::Orbit(period) => {
                let p = period.len();
                !w.is_empty()
                    && (0..p).all(|s| w.iter().enumerate().any(|(i, &x)| period[(s + i) % p] != x))
            }
            MeasureKind::Product(left, right) => {
                let m = right.alphabet_size() as Symbol;
                let lw: Vec<Symbol> = w.iter().map(|&x| x / m).collect();
                let rw: Vec<Symbol> = w.iter().map(|&x| x % m).collect();
                left.is_null(&lw) || right.is_null(&rw)
            }
            MeasureKind::PushforwardCa { .. } | MeasureKind::PushforwardShift(_) => false,
        }
    }
}

fn check_symbols(w: &[Symbol], n: usize) -> Result<(), MeasureError> {
    match w.iter().position(|&s| s as usize >= n) {
        Some(pos) => Err(MeasureError::BadSymbol { pos, symbol: w[pos] }),
        None => Ok(()),
    }
}

/// `n^depth` if within [`MAX_WORDS`].
pub(crate) fn checked_words(n: usize, depth: usize) -> Result<u64, MeasureError> {
    match word_count(n, depth) {
        Some(c) if c <= MAX_WORDS => Ok(c),
        _ => Err(MeasureError::DepthTooLarge {
            depth,
            words: (n as u128).checked_pow(depth as u32).unwrap_or(u128::MAX),
        }),
    }
}

/// Parses `p/q` or an integer.
pub fn parse_rational(text: &str) -> Option<Prob> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Prob::new(p.trim().parse().ok()?, q))
        }
        None => Some(Prob::from_integer(text.parse().ok()?)),
    }
}

/// Prints `p/q`, always with a denominator.
pub fn format_rational(q: &Prob) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn r(n: i64, d: i64) -> Prob {
        Prob::new(n.into(), d.into())
    }

    #[test]
    fn uniform_cylinders() {
        let m = CylinderMeasure::uniform(Alphabet::numeric(7));
        assert_eq!(m.eval(&[1, 2, 3]).unwrap(), r(1, 343));
        assert_eq!(m.eval(&[]).unwrap(), r(1, 1));
        assert_eq!(m.eval(&[7]).unwrap_err(), MeasureError::BadSymbol { pos: 0, symbol: 7 });
    }

    #[test]
    fn bernoulli_half() {
        let m = CylinderMeasure::bernoulli(Alphabet::numeric(2), vec![r(1, 2), r(1, 2)]).unwrap();
        assert_eq!(m.eval(&[0, 1, 0]).unwrap(), r(1, 8));
        assert!(CylinderMeasure::bernoulli(Alphabet::numeric(2), vec![r(1, 2), r(1, 3)]).is_err());
    }

    #[test]
    fn orbit_prefix_counting() {
        let q = builtins::quaternion();
        let p = q.alphabet().parse_word("i j k").unwrap();
        let m = CylinderMeasure::orbit(q.alphabet().clone(), p).unwrap();
        let w = q.alphabet().parse_word("i j").unwrap();
        assert_eq!(m.eval(&w).unwrap(), r(1, 3));
        let w = q.alphabet().parse_word("i k").unwrap();
        assert_eq!(m.eval(&w).unwrap(), r(0, 1));
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("3/6"), Some(r(1, 2)));
        assert_eq!(parse_rational(" 2 "), Some(r(2, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&r(0, 5)), "0/1");
        assert_eq!(format_rational(&r(4, 2)), "2/1");
    }
}
