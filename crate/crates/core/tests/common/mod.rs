#![allow(dead_code)]

use qgca::{validate_latin, Alphabet, Quasigroup, Symbol};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random Latin square by shuffled backtracking.
pub fn random_latin(n: usize, rng: &mut impl Rng) -> Quasigroup {
    fn go(rows: &mut Vec<Vec<Symbol>>, cell: usize, n: usize, rng: &mut impl Rng) -> bool {
        if cell == n * n {
            return true;
        }
        let (r, c) = (cell / n, cell % n);
        let mut options: Vec<Symbol> = (0..n as Symbol).collect();
        options.shuffle(rng);
        for s in options {
            if rows[r][..c].contains(&s) || rows[..r].iter().any(|row| row[c] == s) {
                continue;
            }
            rows[r][c] = s;
            if go(rows, cell + 1, n, rng) {
                return true;
            }
        }
        false
    }
    let mut rows = vec![vec![0; n]; n];
    assert!(go(&mut rows, 0, n, rng));
    validate_latin(&rows, Alphabet::numeric(n)).unwrap()
}

pub fn random_word(n: usize, len: usize, rng: &mut impl Rng) -> Vec<Symbol> {
    (0..len).map(|_| rng.gen_range(0..n) as Symbol).collect()
}

/// Every word of length `len` over `n` symbols, lexicographic.
pub fn all_words(n: usize, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n as Symbol).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

/// One nearest-neighbour step `x_i ↦ x_i * x_{i+1}` straight from the table.
pub fn nn_step(q: &Quasigroup, w: &[Symbol]) -> Vec<Symbol> {
    w.windows(2).map(|p| q.mul(p[0], p[1])).collect()
}

/// Zeroth column of the space-time triangle of `w`.
pub fn xi_oracle(q: &Quasigroup, w: &[Symbol]) -> Vec<Symbol> {
    let mut row = w.to_vec();
    let mut out = Vec::new();
    while !row.is_empty() {
        out.push(row[0]);
        row = nn_step(q, &row);
    }
    out
}
