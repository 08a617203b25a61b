use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact real of the form `Σ cᵢ·log₂(aᵢ)` with rational `cᵢ` and integer `aᵢ > 1`.
///
/// After normalization the atoms are pairwise coprime, hence multiplicatively
/// independent, so a form is zero exactly when every coefficient is zero.
#[derive(Clone, Default)]
pub struct Log2Form {
    terms: BTreeMap<BigUint, BigRational>,
}

impl Log2Form {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `log₂(a)` for a positive integer.
    pub fn log2_int(a: &BigUint) -> Self {
        Self::from_terms(vec![(a.clone(), BigRational::one())])
    }

    /// `log₂(q)` for a positive rational.
    pub fn log2_of(q: &BigRational) -> Self {
        assert!(q.is_positive(), "log of a non-positive rational");
        let num = q.numer().magnitude().clone();
        let den = q.denom().magnitude().clone();
        Self::from_terms(vec![(num, BigRational::one()), (den, -BigRational::one())])
    }

    /// The integer `k = k·log₂ 2`.
    pub fn integer(k: i64) -> Self {
        Self::from_terms(vec![(BigUint::from(2u32), BigRational::from_integer(k.into()))])
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(a, x)| (a.clone(), x * c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c.to_f64().unwrap_or(f64::NAN) * log2_big(a))
            .sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &BigRational)> {
        self.terms.iter()
    }

    /// Sums raw terms and refines the atoms to a pairwise coprime base.
    pub fn from_terms(raw: Vec<(BigUint, BigRational)>) -> Self {
        let mut atoms: Vec<(BigUint, BigRational)> =
            raw.into_iter().filter(|(a, c)| !a.is_one() && !c.is_zero()).collect();
        'refine: loop {
            for i in 0..atoms.len() {
                for j in i + 1..atoms.len() {
                    let g = atoms[i].0.gcd(&atoms[j].0);
                    if g.is_one() {
                        continue;
                    }
                    let (aj, cj) = atoms.swap_remove(j);
                    let (ai, ci) = atoms.swap_remove(i);
                    if ai == aj {
                        atoms.push((ai, ci + cj));
                    } else {
                        let (qi, qj) = (&ai / &g, &aj / &g);
                        atoms.push((g, &ci + &cj));
                        atoms.push((qi, ci));
                        atoms.push((qj, cj));
                    }
                    atoms.retain(|(a, c)| !a.is_one() && !c.is_zero());
                    continue 'refine;
                }
            }
            break;
        }
        Self { terms: atoms.into_iter().collect() }
    }
}

fn log2_big(a: &BigUint) -> f64 {
    let bits = a.bits();
    if bits <= 1000 {
        a.to_f64().unwrap().log2()
    } else {
        let shift = bits - 64;
        (a >> shift).to_f64().unwrap().log2() + shift as f64
    }
}

impl Add for &Log2Form {
    type Output = Log2Form;
    fn add(self, rhs: &Log2Form) -> Log2Form {
        Log2Form::from_terms(
            self.terms.iter().chain(rhs.terms.iter()).map(|(a, c)| (a.clone(), c.clone())).collect(),
        )
    }
}

impl Neg for &Log2Form {
    type Output = Log2Form;
    fn neg(self) -> Log2Form {
        Log2Form { terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect() }
    }
}

impl Sub for &Log2Form {
    type Output = Log2Form;
    fn sub(self, rhs: &Log2Form) -> Log2Form {
        self + &(-rhs)
    }
}

impl PartialEq for Log2Form {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl fmt::Debug for Log2Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Log2Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| match (a == &BigUint::from(2u32), c.is_one()) {
                (true, _) => format!("{c}"),
                (false, true) => format!("log2({a})"),
                (false, false) => format!("{c}*log2({a})"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
