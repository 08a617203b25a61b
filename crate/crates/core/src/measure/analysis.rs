//! Depth sweeps over cylinder measures: invariance, entropy, conditionals,
//! coset structure and fiber spectra.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{checked_words, check_symbols, CylinderMeasure, Log2Form, MeasureError, Prob};
use crate::alphabet::{word_at, Symbol};
use crate::automaton::Qgca;
use crate::builtins;
use crate::group::{GroupError, GroupTable};

#[derive(Debug, Clone)]
pub enum Transform {
    Shift,
    Ca(Arc<Qgca>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub depth: usize,
    pub max_abs_deviation: Prob,
    pub worst_word: Vec<Symbol>,
}

fn par_words<T, F>(n: usize, depth: usize, count: u64, f: F) -> impl IndexedParallelIterator<Item = T>
where
    T: Send,
    F: Fn(&[Symbol]) -> T + Sync + Send,
{
    (0..count as usize).into_par_iter().map_init(
        move || vec![0; depth],
        move |buf, i| {
            word_at(n, depth, i as u64, buf);
            f(buf)
        },
    )
}

/// Exact `max_w |T(μ)(w) − μ(w)|` over all words of length `depth`.
pub fn invariance_report(
    m: &Arc<CylinderMeasure>,
    transform: &Transform,
    depth: usize,
) -> Result<InvarianceReport, MeasureError> {
    let n = m.alphabet_size();
    let count = checked_words(n, depth)?;
    let pushed = match transform {
        Transform::Shift => CylinderMeasure::pushforward_shift(m.clone()),
        Transform::Ca(rule) => CylinderMeasure::pushforward_ca(m.clone(), rule.clone())?,
    };
    let (dev, idx) = par_words(n, depth, count, |w| (pushed.eval_unchecked(w) - m.eval_unchecked(w)).abs())
        .enumerate()
        .map(|(i, d)| (d, i))
        .reduce(
            || (Prob::zero(), usize::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let mut worst_word = vec![0; depth];
    word_at(n, depth, idx.min(count as usize - 1) as u64, &mut worst_word);
    Ok(InvarianceReport { depth, max_abs_deviation: dev, worst_word })
}

/// Exact block entropy `H_n = −Σ_{|w|=n} μ(w) log₂ μ(w)`.
///
/// Words are grouped by their exact probability so the logarithm of each
/// distinct value is taken once, symbolically.
pub fn block_entropy_exact(m: &CylinderMeasure, depth: usize) -> Result<Log2Form, MeasureError> {
    let n = m.alphabet_size();
    let count = checked_words(n, depth)?;
    let histogram = par_words(n, depth, count, |w| m.eval_unchecked(w))
        .fold(BTreeMap::<Prob, u64>::new, |mut acc, p| {
            if p.is_positive() {
                *acc.entry(p).or_default() += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (p, c) in b {
                *a.entry(p).or_default() += c;
            }
            a
        });
    let mut raw = Vec::new();
    for (p, c) in histogram {
        let weight = &p * BigRational::from_integer(BigInt::from(c));
        for (atom, coeff) in Log2Form::log2_of(&p).terms() {
            raw.push((atom.clone(), -(coeff * &weight)));
        }
    }
    Ok(Log2Form::from_terms(raw))
}

pub fn block_entropy(m: &CylinderMeasure, depth: usize) -> Result<f64, MeasureError> {
    Ok(block_entropy_exact(m, depth)?.to_f64())
}

/// `H_{k+1} − H_k` for `k = 1..n_max−1`, exactly.
pub fn entropy_increments_exact(
    m: &CylinderMeasure,
    n_max: usize,
) -> Result<Vec<Log2Form>, MeasureError> {
    checked_words(m.alphabet_size(), n_max)?;
    let h: Vec<Log2Form> =
        (1..=n_max).map(|k| block_entropy_exact(m, k)).collect::<Result<_, _>>()?;
    Ok(h.windows(2).map(|p| &p[1] - &p[0]).collect())
}

pub fn entropy_rate_profile(m: &CylinderMeasure, n_max: usize) -> Result<Vec<f64>, MeasureError> {
    Ok(entropy_increments_exact(m, n_max)?.iter().map(Log2Form::to_f64).collect())
}

/// `μ[x_0 = b | x_1..x_n = a]` for every `b`.
///
/// The denominator is the tail mass `Σ_b μ(b·a)`, which equals `μ(a)` for
/// shift-invariant measures.
pub fn conditional_dist(m: &CylinderMeasure, a: &[Symbol]) -> Result<Vec<Prob>, MeasureError> {
    check_symbols(a, m.alphabet_size())?;
    conditional_unchecked(m, a).ok_or(MeasureError::ZeroMassCondition)
}

fn conditional_unchecked(m: &CylinderMeasure, a: &[Symbol]) -> Option<Vec<Prob>> {
    let mut ext = Vec::with_capacity(a.len() + 1);
    ext.push(0);
    ext.extend_from_slice(a);
    let masses: Vec<Prob> = (0..m.alphabet_size() as Symbol)
        .map(|b| {
            ext[0] = b;
            m.eval_unchecked(&ext)
        })
        .collect();
    let total: Prob = masses.iter().sum();
    if total.is_zero() {
        return None;
    }
    Some(masses.into_iter().map(|x| x / &total).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosetFailure {
    pub word: Vec<Symbol>,
    pub dist: Vec<Prob>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosetReport {
    pub depth: usize,
    pub subgroup: Vec<Symbol>,
    pub words_checked: usize,
    pub pass: bool,
    pub first_failure: Option<CosetFailure>,
    /// Shift-invariance deviation at the same depth.
    pub shift_deviation: Prob,
}

/// Checks that every conditional `μ_a` above the mass floor is uniform on a
/// right coset `C·x`.
pub fn coset_measure_check(
    m: &Arc<CylinderMeasure>,
    g: &GroupTable,
    subgroup: &[Symbol],
    depth: usize,
    mass_floor: &Prob,
) -> Result<CosetReport, MeasureError> {
    let n = m.alphabet_size();
    if g.order() != n {
        return Err(MeasureError::AlphabetMismatch { expected: n, got: g.order() });
    }
    let mut c = subgroup.to_vec();
    c.sort_unstable();
    c.dedup();
    if !g.is_subgroup(&c) {
        return Err(GroupError::NotASubgroup(c).into());
    }
    let count = checked_words(n, depth + 1)? / n as u64;
    let shift_deviation = invariance_report(m, &Transform::Shift, depth)?.max_abs_deviation;
    let share = Prob::new(BigInt::one(), BigInt::from(c.len()));

    let outcomes: Vec<Option<Result<(), CosetFailure>>> = par_words(n, depth, count, |a| {
        let mut ext = vec![0; a.len() + 1];
        ext[1..].copy_from_slice(a);
        let masses: Vec<Prob> = (0..n as Symbol)
            .map(|b| {
                ext[0] = b;
                m.eval_unchecked(&ext)
            })
            .collect();
        let total: Prob = masses.iter().sum();
        if total.is_zero() || &total < mass_floor {
            return None;
        }
        let dist: Vec<Prob> = masses.into_iter().map(|x| x / &total).collect();
        let support: Vec<Symbol> =
            (0..n as Symbol).filter(|&b| dist[b as usize].is_positive()).collect();
        let coset = g.right_coset(&c, support[0]);
        let fail = |reason: String| Err(CosetFailure { word: a.to_vec(), dist: dist.clone(), reason });
        if support != coset {
            return Some(fail(format!("support {support:?} is not the coset {coset:?}")));
        }
        if let Some(&b) = support.iter().find(|&&b| dist[b as usize] != share) {
            return Some(fail(format!("weight of {b} is {}, not {share}", dist[b as usize])));
        }
        Some(Ok(()))
    })
    .collect();

    let words_checked = outcomes.iter().filter(|o| o.is_some()).count();
    let first_failure = outcomes.into_iter().flatten().find_map(Result::err);
    Ok(CosetReport {
        depth,
        subgroup: c,
        words_checked,
        pass: first_failure.is_none(),
        first_failure,
        shift_deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberRow {
    pub word: Vec<Symbol>,
    pub total_mass: Prob,
    pub support_count: usize,
    pub weights: Vec<Prob>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberReport {
    pub depth: usize,
    pub rows: Vec<FiberRow>,
    /// Most frequent support size (smallest on ties); 0 when no row qualifies.
    pub k_estimate: usize,
    /// Common value of every positive weight, if there is one.
    pub eta_constant: Option<Prob>,
    /// `|log₂ K − (H_{n+1} − H_n)|`.
    pub entropy_check: f64,
    pub entropy_gap: Log2Form,
    /// `Φ`-invariance deviation at this depth.
    pub invariance_deviation: Prob,
}

/// Conditional weights of `μ` on each fiber `Φ⁻¹(w)`, `|w| = depth`.
pub fn fiber_spectrum(
    m: &Arc<CylinderMeasure>,
    rule: &Arc<Qgca>,
    depth: usize,
    mass_floor: &Prob,
) -> Result<FiberReport, MeasureError> {
    let n = m.alphabet_size();
    if rule.alphabet_size() != n {
        return Err(MeasureError::AlphabetMismatch { expected: n, got: rule.alphabet_size() });
    }
    let count = checked_words(n, depth + 1)? / n as u64;
    let invariance_deviation =
        invariance_report(m, &Transform::Ca(rule.clone()), depth)?.max_abs_deviation;

    let rows: Vec<FiberRow> = par_words(n, depth, count, |w| {
        let masses: Vec<Prob> = (0..n as Symbol)
            .map(|b| m.eval_unchecked(&rule.preimage_from(b, w)))
            .collect();
        let total: Prob = masses.iter().sum();
        if total.is_zero() || &total < mass_floor {
            return None;
        }
        let weights: Vec<Prob> = masses.into_iter().map(|x| x / &total).collect();
        let support_count = weights.iter().filter(|x| x.is_positive()).count();
        Some(FiberRow { word: w.to_vec(), total_mass: total, support_count, weights })
    })
    .flatten()
    .collect();

    let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
    for row in &rows {
        *tally.entry(row.support_count).or_default() += 1;
    }
    let k_estimate = tally
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map_or(0, |(&k, _)| k);

    let mut positive = rows.iter().flat_map(|r| r.weights.iter().filter(|x| x.is_positive()));
    let eta_constant = match positive.next() {
        Some(first) if positive.all(|x| x == first) => Some(first.clone()),
        _ => None,
    };

    let (entropy_gap, entropy_check) = if k_estimate == 0 {
        (Log2Form::zero(), f64::NAN)
    } else {
        let h0 = block_entropy_exact(m, depth)?;
        let h1 = block_entropy_exact(m, depth + 1)?;
        let log_k = Log2Form::log2_int(&k_estimate.into());
        let gap = &log_k - &(&h1 - &h0);
        let check = gap.to_f64().abs();
        (gap, check)
    };

    Ok(FiberReport {
        depth,
        rows,
        k_estimate,
        eta_constant,
        entropy_check,
        entropy_gap,
        invariance_deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    pub symbols: Vec<Symbol>,
    pub full_shift_over_support: bool,
    /// First zero-mass word over the support symbols, if any.
    pub zero_mass_word: Option<Vec<Symbol>>,
}

/// Symbols of positive mass, and whether every word of length `depth`
/// over them has positive mass.
pub fn support_alphabet(m: &CylinderMeasure, depth: usize) -> Result<SupportReport, MeasureError> {
    let symbols: Vec<Symbol> = (0..m.alphabet_size() as Symbol)
        .filter(|&b| m.eval_unchecked(&[b]).is_positive())
        .collect();
    let k = symbols.len();
    let count = checked_words(k, depth)?;
    let zero_mass_word = par_words(k, depth, count, |digits| {
        let w: Vec<Symbol> = digits.iter().map(|&d| symbols[d as usize]).collect();
        if m.eval_unchecked(&w).is_zero() {
            Some(w)
        } else {
            None
        }
    })
    .find_first(Option::is_some)
    .flatten();
    Ok(SupportReport { symbols, full_shift_over_support: zero_mass_word.is_none(), zero_mass_word })
}

/// `C × Q` with `C` major: symbol `(c, q)` has index `c·8 + q`.
pub fn example11_group(c: &GroupTable) -> GroupTable {
    GroupTable::new(builtins::product(c.quasigroup(), &builtins::quaternion()))
        .expect("product of groups is a group")
}

/// Nearest-neighbour multiplication on `C × Q`.
pub fn example11_rule(c: &GroupTable) -> Qgca {
    Qgca::from_quasigroup(example11_group(c).quasigroup())
}

/// Uniform Bernoulli on `C` times the orbit measure of `[i,j,k]^∞` on `Q`.
pub fn example11(c: &GroupTable) -> CylinderMeasure {
    let q = builtins::quaternion();
    let left = Arc::new(CylinderMeasure::uniform(c.alphabet().clone()));
    let period = q.alphabet().parse_word("i j k").expect("quaternion names");
    let right = Arc::new(CylinderMeasure::orbit(q.alphabet().clone(), period).expect("valid period"));
    CylinderMeasure::product(left, right)
}
