use std::fmt;

/// Polynomial over `F_p`, coefficients stored low degree first with no
/// trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "zero has no inverse");
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

impl Poly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in &mut coeffs {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        Self { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    /// The monomial `x`.
    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    /// `x − a`.
    pub fn linear(p: u64, a: u64) -> Self {
        Self::new(p, vec![(p - a % p) % p, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `deg 0 = None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.leading(), self.p))
    }

    pub fn scale(&self, c: u64) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|&x| x * (c % self.p)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(self.p, (0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|&c| self.p - c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % self.p;
            }
        }
        Self::new(self.p, out)
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = inv_mod(d.leading(), self.p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = rem[top] * lead_inv % self.p;
            let shift = top - dd;
            quot[shift] = c;
            for (i, &dc) in d.coeffs.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + self.p - c * dc % self.p) % self.p;
            }
            while rem.last() == Some(&0) {
                rem.pop();
            }
        }
        (Self::new(self.p, quot), Self::new(self.p, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor (`gcd(0, 0) = 0`).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic least common multiple.
    pub fn lcm(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        self.mul(other).div_rem(&self.gcd(other)).0.monic()
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let mut base = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % self.p)
    }

    /// Roots in `F_p`, ascending.
    pub fn roots(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }
}

impl fmt::Display for Poly {
    /// Prints with residues in `[0, p)`, highest degree first, e.g. `x^2 + 6*x + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}*x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod {})", self.p)
    }
}
