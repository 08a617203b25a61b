use std::collections::BTreeSet;
use std::fmt;

use super::poly::{inv_mod, Poly};
use super::EcaError;

/// Largest `p^N` for which invariant subspaces are enumerated.
pub const MAX_SUBSPACE_SPACE: u64 = 1 << 20;
/// Largest `p^N` for the exhaustive subspace oracle.
pub const MAX_EXHAUSTIVE_SPACE: u64 = 1 << 14;
/// Largest number of invariant subspaces collected before giving up.
pub const MAX_SUBSPACES: usize = 1 << 16;

pub type Vector = Vec<u64>;

/// Subspace of `F_p^N` as a reduced row echelon basis.
pub type Subspace = Vec<Vector>;

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Square matrix over `F_p`, acting on column vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixFp {
    p: u64,
    n: usize,
    entries: Vec<u64>,
}

impl MatrixFp {
    pub fn new(p: u64, rows: Vec<Vec<u64>>) -> Result<Self, EcaError> {
        if !is_prime(p) {
            return Err(EcaError::NotPrime(p));
        }
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(EcaError::Shape(n));
        }
        let entries = rows.into_iter().flatten().map(|x| x % p).collect();
        Ok(Self { p, n, entries })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self, EcaError> {
        Self::new(p, (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect())
    }

    /// Companion matrix of a monic `f`: ones below the diagonal and
    /// `−f_0, …, −f_{r−1}` down the last column.
    pub fn companion(f: &Poly) -> Result<Self, EcaError> {
        let p = f.modulus();
        let r = match f.degree() {
            Some(r) if r > 0 => r,
            _ => return Err(EcaError::Shape(0)),
        };
        let f = f.monic();
        let mut rows = vec![vec![0; r]; r];
        for i in 1..r {
            rows[i][i - 1] = 1;
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row[r - 1] = (p - f.coeffs()[i]) % p;
        }
        Self::new(p, rows)
    }

    /// Block-diagonal matrix of companion blocks.
    pub fn block_companion(blocks: &[Poly]) -> Result<Self, EcaError> {
        let p = blocks.first().ok_or(EcaError::Shape(0))?.modulus();
        let n: usize = blocks.iter().filter_map(Poly::degree).sum();
        let mut rows = vec![vec![0; n]; n];
        let mut at = 0;
        for b in blocks {
            let c = Self::companion(b)?;
            for i in 0..c.n {
                for j in 0..c.n {
                    rows[at + i][at + j] = c.get(i, j);
                }
            }
            at += c.n;
        }
        Self::new(p, rows)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.n).map(<[u64]>::to_vec).collect()
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        Self { p, n: self.n, entries: self.entries.iter().map(|&x| (p - x) % p).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] = (entries[i * n + j] + a * other.get(k, j)) % self.p;
                }
            }
        }
        Self { p: self.p, n, entries }
    }

    pub fn apply(&self, v: &[u64]) -> Vector {
        (0..self.n)
            .map(|i| (0..self.n).fold(0, |acc, j| (acc + self.get(i, j) * v[j]) % self.p))
            .collect()
    }

    /// `f(M)·v` by Horner's rule.
    pub fn apply_poly(&self, f: &Poly, v: &[u64]) -> Vector {
        let mut acc = vec![0; self.n];
        for &c in f.coeffs().iter().rev() {
            acc = self.apply(&acc);
            for (a, &x) in acc.iter_mut().zip(v) {
                *a = (*a + c * x) % self.p;
            }
        }
        acc
    }

    /// Characteristic polynomial `det(xI − M)` via reduction to Hessenberg form.
    pub fn char_poly(&self) -> Poly {
        let (p, n) = (self.p, self.n);
        let mut h = self.rows();
        for k in 0..n.saturating_sub(2) {
            let Some(piv) = (k + 1..n).find(|&i| h[i][k] != 0) else { continue };
            if piv != k + 1 {
                h.swap(piv, k + 1);
                for row in h.iter_mut() {
                    row.swap(piv, k + 1);
                }
            }
            let inv = inv_mod(h[k + 1][k], p);
            for j in k + 2..n {
                let u = h[j][k] * inv % p;
                if u == 0 {
                    continue;
                }
                for c in 0..n {
                    h[j][c] = (h[j][c] + p - u * h[k + 1][c] % p) % p;
                }
                for row in h.iter_mut() {
                    row[k + 1] = (row[k + 1] + u * row[j]) % p;
                }
            }
        }
        // chars[m] = det(xI − H[..m, ..m])
        let mut chars = vec![Poly::one(p)];
        for m in 0..n {
            let mut next = Poly::linear(p, h[m][m]).mul(&chars[m]);
            let mut sub = 1u64;
            for i in (0..m).rev() {
                sub = sub * h[i + 1][i] % p;
                let term = chars[i].scale(sub * h[i][m] % p);
                next = next.sub(&term);
            }
            chars.push(next);
        }
        chars.pop().unwrap()
    }

    /// Minimal polynomial of `v` under `M`, from the first linear dependency
    /// among `v, Mv, M²v, …`.
    pub fn vector_min_poly(&self, v: &[u64]) -> Poly {
        let p = self.p;
        let mut basis: Vec<(Vector, usize, Vec<u64>)> = Vec::new();
        let mut power = v.to_vec();
        for d in 0..=self.n {
            let mut w = power.clone();
            let mut coef = vec![0; d + 1];
            coef[d] = 1;
            for (r, piv, c) in &basis {
                if w[*piv] == 0 {
                    continue;
                }
                let f = w[*piv] * inv_mod(r[*piv], p) % p;
                for (x, &y) in w.iter_mut().zip(r) {
                    *x = (*x + p - f * y % p) % p;
                }
                for (x, &y) in coef.iter_mut().zip(c) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
            match w.iter().position(|&x| x != 0) {
                None => return Poly::new(p, coef),
                Some(piv) => basis.push((w, piv, coef)),
            }
            power = self.apply(&power);
        }
        unreachable!("more than N independent Krylov vectors")
    }

    /// `(char, min)`; the minimal polynomial is the lcm of the minimal
    /// polynomials of the standard basis vectors.
    pub fn char_min_poly(&self) -> (Poly, Poly) {
        let char = self.char_poly();
        let min = (0..self.n).fold(Poly::one(self.p), |acc, i| acc.lcm(&self.vector_min_poly(&unit(self.n, i))));
        assert!(min.divides(&char), "minimal polynomial must divide the characteristic polynomial");
        (char, min)
    }

    /// A vector whose minimal polynomial equals the minimal polynomial of `M`.
    pub fn maximal_vector(&self) -> (Vector, Poly) {
        let mut v = unit(self.n, 0);
        let mut f = self.vector_min_poly(&v);
        for i in 1..self.n {
            let w = unit(self.n, i);
            let g = self.vector_min_poly(&w);
            if g.divides(&f) {
                continue;
            }
            // lcm(f, g) = f1·g1 with f1 | f, g1 | g coprime; g1 keeps every
            // prime power of g that exceeds the one in f.
            let t = g.div_rem(&f.gcd(&g)).0;
            let g1 = g.gcd(&t.pow_mod(g.degree().unwrap() as u64, &g));
            let l = f.lcm(&g);
            let f1 = l.div_rem(&g1).0;
            let v1 = self.apply_poly(&f.div_rem(&f1).0, &v);
            let w1 = self.apply_poly(&g.div_rem(&g1).0, &w);
            v = v1.iter().zip(&w1).map(|(a, b)| (a + b) % self.p).collect();
            f = self.vector_min_poly(&v);
            assert_eq!(f, l, "combined vector must have order lcm(f, g)");
        }
        (v, f)
    }

    /// Rational canonical form by repeated maximal-vector deflation.
    pub fn rcf(&self) -> Rcf {
        let mut blocks = Vec::new();
        let mut m = self.clone();
        loop {
            let (v, f) = m.maximal_vector();
            let d = f.degree().unwrap();
            blocks.push(f);
            if d == m.n {
                break;
            }
            m = m.quotient_by_cyclic(&v, d);
        }
        let product = blocks.iter().fold(Poly::one(self.p), |acc, b| acc.mul(b));
        assert_eq!(product, self.char_poly(), "invariant factors must multiply to the characteristic polynomial");
        let simple = blocks.len() == 1;
        Rcf { blocks, simple }
    }

    /// Matrix of the induced map on `V / span{v, Mv, …, M^{d−1}v}`.
    fn quotient_by_cyclic(&self, v: &[u64], d: usize) -> Self {
        let (p, n) = (self.p, self.n);
        let mut cols: Vec<Vector> = Vec::with_capacity(n);
        let mut x = v.to_vec();
        for _ in 0..d {
            cols.push(x.clone());
            x = self.apply(&x);
        }
        for i in 0..n {
            let e = unit(n, i);
            let mut trial = cols.clone();
            trial.push(e.clone());
            if rref(p, &trial).len() == trial.len() {
                cols = trial;
            }
        }
        let b = Self::new(p, (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect()).unwrap();
        let c = b.inverse().expect("basis is independent").mul(self).mul(&b);
        let rows = (d..n).map(|i| (d..n).map(|j| c.get(i, j)).collect()).collect();
        Self::new(p, rows).unwrap()
    }

    pub fn inverse(&self) -> Option<Self> {
        let (p, n) = (self.p, self.n);
        let mut a: Vec<Vec<u64>> = self
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.extend((0..n).map(|j| u64::from(i == j)));
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&i| a[i][col] != 0)?;
            a.swap(col, piv);
            let inv = inv_mod(a[col][col], p);
            for x in a[col].iter_mut() {
                *x = *x * inv % p;
            }
            for i in 0..n {
                if i != col && a[i][col] != 0 {
                    let f = a[i][col];
                    for j in 0..2 * n {
                        a[i][j] = (a[i][j] + p - f * a[col][j] % p) % p;
                    }
                }
            }
        }
        Self::new(p, a.into_iter().map(|r| r[n..].to_vec()).collect()).ok()
    }

    fn check_space(&self, max: u64) -> Result<(), EcaError> {
        match self.p.checked_pow(self.n as u32) {
            Some(s) if s <= max => Ok(()),
            _ => Err(EcaError::SpaceTooLarge { p: self.p, n: self.n, max }),
        }
    }

    pub fn is_invariant(&self, u: &Subspace) -> bool {
        u.iter().all(|b| {
            let mut trial = u.clone();
            trial.push(self.apply(b));
            rref(self.p, &trial).len() == u.len()
        })
    }

    pub fn cyclic_span(&self, v: &[u64]) -> Subspace {
        let d = self.vector_min_poly(v).degree().unwrap_or(0);
        let mut vecs = Vec::with_capacity(d);
        let mut x = v.to_vec();
        for _ in 0..d {
            vecs.push(x.clone());
            x = self.apply(&x);
        }
        rref(self.p, &vecs)
    }

    /// Nonzero proper `M`-invariant subspaces, sorted by dimension then basis.
    ///
    /// Every invariant subspace is a sum of cyclic subspaces, so closing the
    /// cyclic spans of all projective points under sums finds them all.
    pub fn invariant_subspaces(&self) -> Result<Vec<Subspace>, EcaError> {
        self.check_space(MAX_SUBSPACE_SPACE)?;
        let (p, n) = (self.p, self.n);
        let mut family: BTreeSet<Subspace> = BTreeSet::new();
        let mut queue: Vec<Subspace> = Vec::new();
        for v in projective_points(p, n) {
            let s = self.cyclic_span(&v);
            if family.insert(s.clone()) {
                queue.push(s);
            }
        }
        let mut seen: Vec<Subspace> = Vec::new();
        while let Some(s) = queue.pop() {
            for t in &seen {
                let mut both = s.clone();
                both.extend(t.iter().cloned());
                let sum = rref(p, &both);
                if family.insert(sum.clone()) {
                    queue.push(sum);
                    if family.len() > MAX_SUBSPACES {
                        return Err(EcaError::TooManySubspaces(MAX_SUBSPACES));
                    }
                }
            }
            seen.push(s);
        }
        Ok(sort_subspaces(family.into_iter().filter(|s| s.len() < n)))
    }

    /// Tests every subspace in reduced row echelon form; the oracle for
    /// [`MatrixFp::invariant_subspaces`].
    pub fn invariant_subspaces_exhaustive(&self) -> Result<Vec<Subspace>, EcaError> {
        self.check_space(MAX_EXHAUSTIVE_SPACE)?;
        let mut out = Vec::new();
        for k in 1..self.n {
            for s in all_subspaces(self.p, self.n, k) {
                if self.is_invariant(&s) {
                    out.push(s);
                }
            }
        }
        Ok(sort_subspaces(out))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rcf {
    /// Invariant factors, minimal polynomial first; each divides the one before.
    pub blocks: Vec<Poly>,
    pub simple: bool,
}

fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn sort_subspaces(it: impl IntoIterator<Item = Subspace>) -> Vec<Subspace> {
    let mut out: Vec<Subspace> = it.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Reduced row echelon basis of the span, rows with leading 1.
pub fn rref(p: u64, vectors: &[Vector]) -> Subspace {
    let Some(n) = vectors.first().map(Vec::len) else { return Vec::new() };
    let mut rows: Vec<Vector> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = inv_mod(rows[rank][col], p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let f = rows[i][col];
                for j in 0..n {
                    rows[i][j] = (rows[i][j] + p - f * rows[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Vectors whose first nonzero coordinate is 1.
fn projective_points(p: u64, n: usize) -> impl Iterator<Item = Vector> {
    (0..n).flat_map(move |lead| {
        let tail = n - lead - 1;
        (0..p.pow(tail as u32)).map(move |mut k| {
            let mut v = vec![0; n];
            v[lead] = 1;
            for x in v[lead + 1..].iter_mut().rev() {
                *x = k % p;
                k /= p;
            }
            v
        })
    })
}

/// Every `k`-dimensional subspace of `F_p^n`, each as its unique RREF basis.
fn all_subspaces(p: u64, n: usize, k: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let pv = &pivots;
                (pv[i] + 1..n).filter(move |j| !pv.contains(j)).map(move |j| (i, j))
            })
            .collect();
        for mut fill in 0..p.pow(free.len() as u32) {
            let mut rows = vec![vec![0; n]; k];
            for (i, &pc) in pivots.iter().enumerate() {
                rows[i][pc] = 1;
            }
            for &(i, j) in &free {
                rows[i][j] = fill % p;
                fill /= p;
            }
            out.push(rows);
        }
        // next combination
        let Some(i) = (0..k).rev().find(|&i| pivots[i] < n - k + i) else { break };
        pivots[i] += 1;
        for j in i + 1..k {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
    out
}

impl fmt::Display for MatrixFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MatrixFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixFp(p={}, {:?})", self.p, self.rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, rows: &[&[u64]]) -> MatrixFp {
        MatrixFp::new(p, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// `det(xI − M)` by cofactor expansion over polynomial entries.
    fn det_char(a: &MatrixFp) -> Poly {
        let p = a.modulus();
        let n = a.dim();
        let entry = |i: usize, j: usize| {
            let c = Poly::new(p, vec![(p - a.get(i, j)) % p]);
            if i == j {
                c.add(&Poly::x(p))
            } else {
                c
            }
        };
        fn det(p: u64, cells: &[Vec<Poly>]) -> Poly {
            if cells.is_empty() {
                return Poly::one(p);
            }
            let mut acc = Poly::zero(p);
            for j in 0..cells.len() {
                let minor: Vec<Vec<Poly>> = cells[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = cells[0][j].mul(&det(p, &minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
        let cells: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| entry(i, j)).collect()).collect();
        det(p, &cells)
    }

    #[test]
    fn hessenberg_matches_cofactor_expansion() {
        let cases = [
            m(7, &[&[0, 0, 0, 1], &[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]]),
            m(5, &[&[1, 2, 3], &[4, 0, 1], &[2, 2, 2]]),
            m(3, &[&[0, 1, 0, 2], &[0, 0, 1, 0], &[2, 0, 0, 1], &[1, 1, 1, 1]]),
            m(2, &[&[1, 1], &[0, 1]]),
        ];
        for a in &cases {
            assert_eq!(a.char_poly(), det_char(a), "{a:?}");
        }
    }

    #[test]
    fn identity_over_f2() {
        let id = MatrixFp::identity(2, 2).unwrap();
        let (c, mn) = id.char_min_poly();
        let x1 = Poly::linear(2, 1);
        assert_eq!(c, x1.mul(&x1));
        assert_eq!(mn, x1);
        assert_eq!(id.rcf(), Rcf { blocks: vec![x1.clone(), x1], simple: false });
        assert_eq!(id.invariant_subspaces().unwrap().len(), 3);
    }

    #[test]
    fn companion_roundtrip() {
        let f = Poly::new(5, vec![2, 0, 3, 1, 1]);
        let c = MatrixFp::companion(&f).unwrap();
        let (ch, mn) = c.char_min_poly();
        assert_eq!(ch, f);
        assert_eq!(mn, f);
        assert!(c.rcf().simple);
    }

    #[test]
    fn inverse_is_two_sided() {
        let a = m(7, &[&[0, 0, 0, 1], &[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]]);
        let b = a.inverse().unwrap();
        assert_eq!(a.mul(&b), MatrixFp::identity(7, 4).unwrap());
        assert!(m(3, &[&[1, 2], &[2, 1]]).inverse().is_none());
    }

    #[test]
    fn subspace_counts() {
        // Gaussian binomials: F_2^3 has 7 lines and 7 planes; F_3^2 has 4 lines.
        assert_eq!(all_subspaces(2, 3, 1).len(), 7);
        assert_eq!(all_subspaces(2, 3, 2).len(), 7);
        assert_eq!(all_subspaces(3, 2, 1).len(), 4);
        assert_eq!(projective_points(3, 2).count(), 4);
    }

    #[test]
    fn irreducible_companion_has_no_subspaces() {
        let f = Poly::new(2, vec![1, 1, 1]);
        let c = MatrixFp::companion(&f).unwrap();
        assert!(c.invariant_subspaces().unwrap().is_empty());
        assert!(c.invariant_subspaces_exhaustive().unwrap().is_empty());
    }

    #[test]
    fn rejects_non_primes() {
        assert_eq!(MatrixFp::new(4, vec![vec![1]]), Err(EcaError::NotPrime(4)));
        assert!(is_prime(7) && !is_prime(1) && !is_prime(9));
    }
}
