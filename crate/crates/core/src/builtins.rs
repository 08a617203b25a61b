//! Built-in quasigroups and groups used as fixtures.

use num_integer::Integer;

use crate::alphabet::{Alphabet, Symbol};
use crate::quasigroup::{validate_latin, Quasigroup, QuasigroupError};

/// The seven-element non-associative quasigroup with subquasigroups
/// `{a1,a2}` and `{b1,b2}`.
pub fn d7() -> Quasigroup {
    const NAMES: [&str; 7] = ["a1", "a2", "b1", "b2", "c1", "c2", "c3"];
    const ROWS: [[&str; 7]; 7] = [
        ["a1", "a2", "c1", "c2", "b2", "b1", "c3"],
        ["a2", "a1", "c2", "c1", "b1", "c3", "b2"],
        ["c1", "c3", "b1", "b2", "c2", "a1", "a2"],
        ["c3", "c1", "b2", "b1", "a1", "a2", "c2"],
        ["b1", "b2", "c3", "a1", "a2", "c2", "c1"],
        ["b2", "c2", "a1", "a2", "c3", "c1", "b1"],
        ["c2", "b1", "a2", "c3", "c1", "b2", "a1"],
    ];
    let alphabet = Alphabet::new(NAMES).unwrap();
    let rows: Vec<Vec<Symbol>> = ROWS
        .iter()
        .map(|r| r.iter().map(|s| alphabet.lookup(s).unwrap()).collect())
        .collect();
    validate_latin(&rows, alphabet).expect("D7 table is Latin")
}

pub fn cyclic(n: usize) -> Result<Quasigroup, QuasigroupError> {
    if n == 0 {
        return Err(bad("cyclic", "order must be positive"));
    }
    Quasigroup::from_fn(Alphabet::numeric(n), |a, b| (a + b) % n as Symbol)
}

/// `a * b = c0·a + c1·b (mod p)`.
pub fn ledrappier(p: usize, c0: usize, c1: usize) -> Result<Quasigroup, QuasigroupError> {
    if p < 2 {
        return Err(bad("ledrappier", "modulus must be at least 2"));
    }
    if c0.gcd(&p) != 1 || c1.gcd(&p) != 1 {
        return Err(bad("ledrappier", "coefficients must be units mod p"));
    }
    let (p, c0, c1) = (p as u64, c0 as u64 % p as u64, c1 as u64 % p as u64);
    Quasigroup::from_fn(Alphabet::numeric(p as usize), |a, b| {
        ((c0 * a as u64 + c1 * b as u64) % p) as Symbol
    })
}

/// Quaternion group `{±1, ±i, ±j, ±k}`; index `2·unit + sign`.
pub fn quaternion() -> Quasigroup {
    let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
    // unit product table over 1,i,j,k as (unit, negated)
    const UNIT: [[(u32, u32); 4]; 4] = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ];
    Quasigroup::from_fn(Alphabet::new(names).unwrap(), |a, b| {
        let (ua, sa) = (a / 2, a % 2);
        let (ub, sb) = (b / 2, b % 2);
        let (u, s) = UNIT[ua as usize][ub as usize];
        2 * u + (s + sa + sb) % 2
    })
    .expect("quaternion table is Latin")
}

/// The nonabelian group of order 21: `(a, b)·(c, d) = (a + 2^b·c mod 7, b + d mod 3)`.
pub fn nonabelian21() -> Quasigroup {
    let names = (0..7).flat_map(|a| (0..3).map(move |b| format!("{a}:{b}")));
    let pow2 = [1u32, 2, 4];
    Quasigroup::from_fn(Alphabet::new(names).unwrap(), |x, y| {
        let (a, b) = (x / 3, x % 3);
        let (c, d) = (y / 3, y % 3);
        ((a + pow2[b as usize] * c) % 7) * 3 + (b + d) % 3
    })
    .expect("semidirect product table is Latin")
}

/// Direct product; symbol `(x, y)` has index `x·|right| + y` and name `x,y`.
pub fn product(left: &Quasigroup, right: &Quasigroup) -> Quasigroup {
    let m = right.order() as Symbol;
    Quasigroup::from_fn(Alphabet::product(left.alphabet(), right.alphabet()), |a, b| {
        left.mul(a / m, b / m) * m + right.mul(a % m, b % m)
    })
    .expect("product of Latin squares is Latin")
}

/// Additive group of `(Z/p)^dim`; see [`vector_index`] for the encoding.
pub fn vector_space(p: usize, dim: usize) -> Result<Quasigroup, QuasigroupError> {
    if p < 2 || dim == 0 {
        return Err(bad("vector", "need p >= 2 and dim >= 1"));
    }
    let n = p.checked_pow(dim as u32).filter(|&n| n <= 1 << 16).ok_or_else(|| {
        bad("vector", "p^dim exceeds 65536")
    })?;
    let names = (0..n).map(|i| {
        vector_coords(p, dim, i as Symbol)
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(".")
    });
    Quasigroup::from_fn(Alphabet::new(names)?, |a, b| {
        let x = vector_coords(p, dim, a);
        let y = vector_coords(p, dim, b);
        let sum: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % p as u32).collect();
        vector_index(p, &sum)
    })
}

/// Coordinates `(v_0, …, v_{dim-1})` of a symbol, `index = Σ v_i p^i`.
pub fn vector_coords(p: usize, dim: usize, mut index: Symbol) -> Vec<u32> {
    let mut out = Vec::with_capacity(dim);
    for _ in 0..dim {
        out.push(index % p as u32);
        index /= p as u32;
    }
    out
}

pub fn vector_index(p: usize, coords: &[u32]) -> Symbol {
    coords.iter().rev().fold(0, |acc, &c| acc * p as u32 + c)
}

/// Looks up a built-in by name.
///
/// Recognized: `d7`, `quaternion`, `nonabelian21`, `cyclic n`,
/// `ledrappier p c0 c1`, `vector p dim`.
pub fn builtin(name: &str, params: &[usize]) -> Result<Quasigroup, QuasigroupError> {
    let want = |k: usize| {
        if params.len() == k {
            Ok(())
        } else {
            Err(bad(name, &format!("expected {k} parameters, got {}", params.len())))
        }
    };
    match name.to_ascii_lowercase().as_str() {
        "d7" => want(0).map(|_| d7()),
        "quaternion" => want(0).map(|_| quaternion()),
        "nonabelian21" => want(0).map(|_| nonabelian21()),
        "cyclic" => want(1).and_then(|_| cyclic(params[0])),
        "ledrappier" => want(3).and_then(|_| ledrappier(params[0], params[1], params[2])),
        "vector" => want(2).and_then(|_| vector_space(params[0], params[1])),
        _ => Err(QuasigroupError::UnknownName(name.to_string())),
    }
}

fn bad(name: &str, reason: &str) -> QuasigroupError {
    QuasigroupError::BadParams { name: name.to_string(), reason: reason.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledrappier_two_one_one_is_xor() {
        let q = builtin("ledrappier", &[2, 1, 1]).unwrap();
        assert_eq!(q.rows(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn ledrappier_rejects_zero_coefficient() {
        assert!(matches!(ledrappier(5, 0, 1), Err(QuasigroupError::BadParams { .. })));
        assert!(matches!(ledrappier(4, 2, 1), Err(QuasigroupError::BadParams { .. })));
    }

    #[test]
    fn quaternion_relations() {
        let q = quaternion();
        let s = |x: &str| q.alphabet().lookup(x).unwrap();
        assert_eq!(q.mul(s("i"), s("j")), s("k"));
        assert_eq!(q.mul(s("j"), s("i")), s("-k"));
        assert_eq!(q.mul(s("j"), s("k")), s("i"));
        assert_eq!(q.mul(s("k"), s("i")), s("j"));
        for u in ["i", "j", "k", "-1"] {
            assert_eq!(q.mul(s(u), s(u)), s(if u == "-1" { "1" } else { "-1" }));
        }
        assert_eq!(q.identity(), Some(s("1")));
    }

    #[test]
    fn nonabelian21_is_a_nonabelian_group() {
        let g = nonabelian21();
        assert!(g.is_associative());
        assert!(g.identity().is_some());
        let commutes = (0..21).all(|a| (0..21).all(|b| g.mul(a, b) == g.mul(b, a)));
        assert!(!commutes);
    }

    #[test]
    fn vector_encoding_round_trips() {
        let v = vector_space(7, 2).unwrap();
        assert_eq!(v.alphabet().name(vector_index(7, &[3, 5])), "3.5");
        assert_eq!(vector_coords(7, 2, vector_index(7, &[3, 5])), vec![3, 5]);
        assert!(v.is_associative());
    }

    #[test]
    fn unknown_builtin() {
        assert_eq!(builtin("nope", &[]), Err(QuasigroupError::UnknownName("nope".into())));
        assert!(matches!(builtin("cyclic", &[]), Err(QuasigroupError::BadParams { .. })));
    }
}
