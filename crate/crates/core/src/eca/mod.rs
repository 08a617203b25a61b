//! Endomorphic CA on product group shifts and linear algebra over `F_p`.

mod matrix;
mod poly;

use thiserror::Error;

pub use matrix::{is_prime, rref, MatrixFp, Rcf, Subspace, Vector};
pub use matrix::{MAX_EXHAUSTIVE_SPACE, MAX_SUBSPACES, MAX_SUBSPACE_SPACE};
pub use poly::Poly;

use crate::alphabet::Symbol;
use crate::automaton::{AutomatonError, LocalRule, Qgca};
use crate::builtins;
use crate::group::{GroupError, GroupTable};
use crate::quasigroup::MAX_ENUM_ORDER;

/// Orders up to this bound get the full `N⁴` homomorphism scan.
pub const EXHAUSTIVE_ENDO_ORDER: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EcaError {
    #[error("rule alphabet has {rule} symbols but the group has {group}")]
    SizeMismatch { rule: usize, group: usize },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("rule is not affine: φ({0},{1}) != φ({0},e) + φ(e,{1})")]
    NotAffine(Symbol, Symbol),
    #[error("{which} is not an endomorphism: fails at ({a}, {b})")]
    NotEndomorphism { which: &'static str, a: Symbol, b: Symbol },
    #[error("rule is not a group endomorphism: φ(a·a', b·b') != φ(a,b)·φ(a',b') at {0:?}")]
    NotEndomorphicCa([Symbol; 4]),
    #[error("kernel word starting at {0} is not purely periodic")]
    AperiodicKernelWord(Symbol),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix must be square and nonempty (got {0} rows)")]
    Shape(usize),
    #[error("F_{p}^{n} exceeds the enumeration bound {max}")]
    SpaceTooLarge { p: u64, n: usize, max: u64 },
    #[error("more than {0} invariant subspaces")]
    TooManySubspaces(usize),
    #[error("group is not an elementary abelian p-group in vector encoding")]
    NotLinear,
    #[error("map is not linear on the vector encoding")]
    NonlinearMap,
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn check_size(rule: &LocalRule, g: &GroupTable) -> Result<(), EcaError> {
    if !rule.is_rnnca() {
        return Err(AutomatonError::NotRnnca.into());
    }
    if rule.alphabet_size() != g.order() {
        return Err(EcaError::SizeMismatch { rule: rule.alphabet_size(), group: g.order() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineDecomposition {
    /// `φ0(a) = φ(a, e)`.
    pub phi0: Vec<Symbol>,
    /// `φ1(b) = φ(e, b)`.
    pub phi1: Vec<Symbol>,
    pub phi0_automorphism: bool,
    pub phi1_automorphism: bool,
    /// Equals `phi0_automorphism && phi1_automorphism`; checked against the table.
    pub bipermutative: bool,
}

fn is_bijection(f: &[Symbol]) -> bool {
    let mut seen = vec![false; f.len()];
    f.iter().all(|&x| !std::mem::replace(&mut seen[x as usize], true))
}

/// Splits `φ(a, b) = φ0(a) + φ1(b)` over an abelian group.
pub fn decompose_affine(rule: &LocalRule, g: &GroupTable) -> Result<AffineDecomposition, EcaError> {
    check_size(rule, g)?;
    if !g.is_abelian() {
        return Err(EcaError::NotAbelian);
    }
    let n = g.order() as Symbol;
    let e = g.identity();
    let phi0: Vec<Symbol> = (0..n).map(|a| rule.apply2(a, e)).collect();
    let phi1: Vec<Symbol> = (0..n).map(|b| rule.apply2(e, b)).collect();
    for a in 0..n {
        for b in 0..n {
            if rule.apply2(a, b) != g.mul(phi0[a as usize], phi1[b as usize]) {
                return Err(EcaError::NotAffine(a, b));
            }
        }
    }
    for (which, f) in [("phi0", &phi0), ("phi1", &phi1)] {
        for a in 0..n {
            for b in 0..n {
                if f[g.mul(a, b) as usize] != g.mul(f[a as usize], f[b as usize]) {
                    return Err(EcaError::NotEndomorphism { which, a, b });
                }
            }
        }
    }
    let phi0_automorphism = is_bijection(&phi0);
    let phi1_automorphism = is_bijection(&phi1);
    let bipermutative = phi0_automorphism && phi1_automorphism;
    assert_eq!(bipermutative, rule.is_bipermutative(), "affine rule permutativity mismatch");
    Ok(AffineDecomposition { phi0, phi1, phi0_automorphism, phi1_automorphism, bipermutative })
}

/// Checks that `φ: A × A → A` is a group homomorphism.
///
/// Orders up to [`EXHAUSTIVE_ENDO_ORDER`] are scanned over all quadruples.
/// Larger groups check `φ(x·s) = φ(x)·φ(s)` for every `x ∈ A×A` and every
/// `s` in a generating set of `A×A`, which implies the full law.
pub fn check_endomorphic(rule: &LocalRule, g: &GroupTable) -> Result<(), EcaError> {
    check_size(rule, g)?;
    endo_scan(rule, g, g.order() <= EXHAUSTIVE_ENDO_ORDER)
}

fn endo_scan(rule: &LocalRule, g: &GroupTable, exhaustive: bool) -> Result<(), EcaError> {
    let n = g.order() as Symbol;
    let phi = |a, b| rule.apply2(a, b);
    let pairs: Vec<(Symbol, Symbol)> = if exhaustive {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        let e = g.identity();
        let gens = g.quasigroup().generating_set();
        gens.iter().flat_map(|&s| [(s, e), (e, s)]).collect()
    };
    for a in 0..n {
        for b in 0..n {
            let ab = phi(a, b);
            for &(a2, b2) in &pairs {
                if phi(g.mul(a, a2), g.mul(b, b2)) != g.mul(ab, phi(a2, b2)) {
                    return Err(EcaError::NotEndomorphicCa([a, b, a2, b2]));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelReport {
    /// `zeta[a]`: one period of the kernel configuration with `k_0 = a`.
    pub zeta: Vec<Vec<Symbol>>,
    /// `rho(a) = zeta[a]_1`, so that shifting `zeta[a]` gives `zeta[rho(a)]`.
    pub rho: Vec<Symbol>,
    pub periods: Vec<usize>,
}

/// Kernel of a bipermutative ECA: each `k` with `φ(k_i, k_{i+1}) = e` is
/// determined by `k_0` and built by right cancellation.
pub fn kernel(rule: &Qgca, g: &GroupTable) -> Result<KernelReport, EcaError> {
    check_endomorphic(rule.rule(), g)?;
    let n = g.order();
    let e = g.identity();
    let mut zeta = Vec::with_capacity(n);
    for a in 0..n as Symbol {
        let mut word = vec![a];
        let mut seen = vec![false; n];
        seen[a as usize] = true;
        loop {
            let next = rule.right_div(*word.last().unwrap(), e);
            if seen[next as usize] {
                if next != a {
                    return Err(EcaError::AperiodicKernelWord(a));
                }
                break;
            }
            seen[next as usize] = true;
            word.push(next);
        }
        zeta.push(word);
    }
    let rho: Vec<Symbol> = zeta.iter().map(|w| w[1 % w.len()]).collect();
    let periods: Vec<usize> = zeta.iter().map(Vec::len).collect();
    for (a, w) in zeta.iter().enumerate() {
        let target = &zeta[rho[a] as usize];
        let shifted = w.iter().cycle().skip(1).take(w.len());
        assert!(
            target.len() == w.len() && shifted.eq(target.iter()),
            "shifting a kernel word must give the kernel word of rho(a)"
        );
    }
    assert_eq!(rho[e as usize], e, "rho must fix the identity");
    Ok(KernelReport { zeta, rho, periods })
}

/// `−φ1⁻¹ ∘ φ0` from an affine decomposition of a bipermutative rule.
pub fn affine_rho(d: &AffineDecomposition, g: &GroupTable) -> Option<Vec<Symbol>> {
    if !d.bipermutative {
        return None;
    }
    let mut phi1_inv = vec![0; d.phi1.len()];
    for (b, &y) in d.phi1.iter().enumerate() {
        phi1_inv[y as usize] = b as Symbol;
    }
    Some(d.phi0.iter().map(|&x| g.inv(phi1_inv[x as usize])).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport {
    /// Cycles of `rho` on `A \ {e}`, each starting at its least element.
    pub orbits: Vec<Vec<Symbol>>,
    pub single_orbit: bool,
}

pub fn rho_orbits(rho: &[Symbol], g: &GroupTable) -> Result<OrbitReport, EcaError> {
    g.check_rho(rho)?;
    let mut done = vec![false; rho.len()];
    done[g.identity() as usize] = true;
    let mut orbits = Vec::new();
    for start in 0..rho.len() {
        if done[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !done[x] {
            done[x] = true;
            cycle.push(x as Symbol);
            x = rho[x] as usize;
        }
        orbits.push(cycle);
    }
    let single_orbit = orbits.len() == 1;
    Ok(OrbitReport { orbits, single_orbit })
}

/// `(p, dim)` when `g` is the additive group of `F_p^dim` in the encoding
/// of [`builtins::vector_space`].
pub fn linear_structure(g: &GroupTable) -> Option<(u64, usize)> {
    let n = g.order();
    for p in 2..=n {
        if n % p != 0 || !is_prime(p as u64) {
            continue;
        }
        let mut dim = 0;
        let mut m = n;
        while m % p == 0 {
            m /= p;
            dim += 1;
        }
        if m != 1 {
            return None;
        }
        let v = builtins::vector_space(p, dim).ok()?;
        return (v.rows() == g.quasigroup().rows()).then_some((p as u64, dim));
    }
    None
}

/// Matrix of a linear permutation of `F_p^dim` in vector encoding; the map
/// is verified to be linear on every vector.
pub fn permutation_matrix(p: u64, dim: usize, map: &[Symbol]) -> Result<MatrixFp, EcaError> {
    let pu = p as usize;
    let cols: Vec<Vec<u32>> = (0..dim)
        .map(|j| {
            let mut unit = vec![0; dim];
            unit[j] = 1;
            builtins::vector_coords(pu, dim, map[builtins::vector_index(pu, &unit) as usize])
        })
        .collect();
    let rows = (0..dim).map(|i| cols.iter().map(|c| u64::from(c[i])).collect()).collect();
    let m = MatrixFp::new(p, rows)?;
    for (x, &y) in map.iter().enumerate() {
        let v: Vec<u64> = builtins::vector_coords(pu, dim, x as Symbol).into_iter().map(u64::from).collect();
        let image: Vec<u32> = m.apply(&v).into_iter().map(|c| c as u32).collect();
        if builtins::vector_index(pu, &image) != y {
            return Err(EcaError::NonlinearMap);
        }
    }
    Ok(m)
}

/// The rule `φ(a0, a1) = M·a0 + a1` on `F_p^dim`.
pub fn linear_rule(m: &MatrixFp) -> Result<(GroupTable, Qgca), EcaError> {
    let (p, dim) = (m.modulus() as usize, m.dim());
    let q = builtins::vector_space(p, dim)
        .map_err(|_| EcaError::SpaceTooLarge { p: p as u64, n: dim, max: 1 << 16 })?;
    let g = GroupTable::new(q)?;
    let rule = LocalRule::from_fn(g.alphabet().clone(), 0, 1, |t| {
        let a0: Vec<u64> = builtins::vector_coords(p, dim, t[0]).into_iter().map(u64::from).collect();
        let a1 = builtins::vector_coords(p, dim, t[1]);
        let sum: Vec<u32> =
            m.apply(&a0).iter().zip(&a1).map(|(&x, &y)| ((x + u64::from(y)) % p as u64) as u32).collect();
        builtins::vector_index(p, &sum)
    })?;
    Ok((g, Qgca::new(rule)?))
}

/// The 4×4 matrix over `F_7` with ones below the diagonal and in the last column.
pub fn f7_example_matrix() -> MatrixFp {
    MatrixFp::new(7, vec![vec![0, 0, 0, 1], vec![1, 0, 0, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]])
        .expect("valid matrix")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Agree,
    Disagree,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Agree => "AGREE",
            Verdict::Disagree => "DISAGREE",
        })
    }
}

fn verdict(left: bool, right: bool) -> Verdict {
    if left == right {
        Verdict::Agree
    } else {
        Verdict::Disagree
    }
}

/// Single `ρ`-orbit versus absence of nontrivial proper `ρ`-invariant subgroups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitAudit {
    pub orbits: OrbitReport,
    pub no_invariant_subgroup: bool,
    /// A nontrivial proper invariant subgroup, if one exists.
    pub witness_subgroup: Option<Vec<Symbol>>,
    pub verdict: Verdict,
}

/// Single companion block versus absence of nontrivial proper invariant subspaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcfAudit {
    pub matrix: MatrixFp,
    pub char_poly: Poly,
    pub min_poly: Poly,
    pub rcf: Rcf,
    /// Roots of the characteristic polynomial in `F_p`.
    pub eigenvalues: Vec<u64>,
    pub invariant_subspace_count: usize,
    pub witness_subspace: Option<Subspace>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub rho: Vec<Symbol>,
    pub orbit: OrbitAudit,
    /// Present when the group is a vector space over a prime field.
    pub rcf: Option<RcfAudit>,
}

/// Computes both sides of each equivalence independently and compares them.
pub fn lemma_audit(g: &GroupTable, rule: &Qgca) -> Result<AuditReport, EcaError> {
    let kr = kernel(rule, g)?;
    let orbits = rho_orbits(&kr.rho, g)?;
    let linear = linear_structure(g);
    let rcf = match linear {
        Some((p, dim)) => Some(rcf_audit(permutation_matrix(p, dim, &kr.rho)?)?),
        None => None,
    };

    let n = g.order();
    let witness_subgroup = if n <= MAX_ENUM_ORDER {
        g.invariant_subgroups(&kr.rho)?.into_iter().find(|s| s.len() > 1 && s.len() < n)
    } else {
        // Subgroups of an elementary abelian group are its subspaces.
        let (p, dim) = linear.ok_or(GroupError::OrderTooLarge { n, max: MAX_ENUM_ORDER })?;
        rcf.as_ref()
            .expect("linear groups carry an RCF audit")
            .witness_subspace
            .as_ref()
            .map(|basis| span_members(p, dim, basis))
    };
    let no_invariant_subgroup = witness_subgroup.is_none();
    let verdict = verdict(orbits.single_orbit, no_invariant_subgroup);
    Ok(AuditReport {
        rho: kr.rho,
        orbit: OrbitAudit { orbits, no_invariant_subgroup, witness_subgroup, verdict },
        rcf,
    })
}

pub fn rcf_audit(m: MatrixFp) -> Result<RcfAudit, EcaError> {
    let (char_poly, min_poly) = m.char_min_poly();
    let rcf = m.rcf();
    let subspaces = m.invariant_subspaces()?;
    let eigenvalues = char_poly.roots();
    let verdict = verdict(rcf.simple, subspaces.is_empty());
    Ok(RcfAudit {
        witness_subspace: subspaces.first().cloned(),
        invariant_subspace_count: subspaces.len(),
        matrix: m,
        char_poly,
        min_poly,
        rcf,
        eigenvalues,
        verdict,
    })
}

/// Group elements of the span of `basis`, sorted.
fn span_members(p: u64, dim: usize, basis: &Subspace) -> Vec<Symbol> {
    let mut out = Vec::new();
    for mut k in 0..p.pow(basis.len() as u32) {
        let mut v = vec![0u64; dim];
        for b in basis {
            let c = k % p;
            k /= p;
            for (x, &y) in v.iter_mut().zip(b) {
                *x = (*x + c * y) % p;
            }
        }
        let coords: Vec<u32> = v.into_iter().map(|x| x as u32).collect();
        out.push(builtins::vector_index(p as usize, &coords));
    }
    out.sort_unstable();
    out
}
