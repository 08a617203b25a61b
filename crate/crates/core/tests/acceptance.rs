//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use qgca::builtins;
use qgca::eca::{
    affine_rho, decompose_affine, f7_example_matrix, kernel, lemma_audit, linear_rule, permutation_matrix,
    MatrixFp, Poly, Verdict,
};
use qgca::measure::{
    block_entropy_exact, coset_measure_check, example11, example11_group, example11_rule, fiber_spectrum,
    invariance_report, support_alphabet, Log2Form, Transform,
};
use qgca::{Alphabet, CylinderMeasure, GroupTable, Prob, Qgca, Quasigroup, Symbol};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{all_words, nn_step, random_latin, random_word, xi_oracle};

fn frac(n: i64, d: i64) -> Prob {
    BigRational::new(n.into(), d.into())
}

fn group(q: Quasigroup) -> GroupTable {
    GroupTable::new(q).unwrap()
}

/// Subquasigroups of size 2..N-1 by testing closure of every subset.
fn subsets_oracle(q: &Quasigroup) -> Vec<Vec<Symbol>> {
    let n = q.order();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        let members: Vec<Symbol> = (0..n as Symbol).filter(|&s| mask >> s & 1 == 1).collect();
        if members.len() < 2 {
            continue;
        }
        if members.iter().all(|&a| members.iter().all(|&b| members.contains(&q.mul(a, b)))) {
            out.push(members);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

fn criterion_1() -> (bool, String) {
    let q = builtins::d7();
    let a = q.alphabet();
    let found: Vec<Vec<Symbol>> = q.subquasigroups(false).unwrap().into_iter().map(|s| s.members).collect();
    let mut sorted = found.clone();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let oracle = subsets_oracle(&q);
    let expect = |x: &str, y: &str| vec![a.lookup(x).unwrap(), a.lookup(y).unwrap()];
    let named = found.contains(&expect("a1", "a2")) && found.contains(&expect("b1", "b2"));
    let ok = q.order() == 7 && sorted == oracle && named;
    (ok, format!("found={} oracle={} named_pairs={named}", found.len(), oracle.len()))
}

fn criterion_2() -> (bool, String) {
    let q = builtins::quaternion();
    let a = q.alphabet();
    let [i, j, k] = ["i", "j", "k"].map(|s| a.lookup(s).unwrap());
    let products = q.mul(i, j) == k && q.mul(j, k) == i && q.mul(k, i) == j;
    let cyclic_step = |w: &[Symbol]| {
        let mut wrapped = w.to_vec();
        wrapped.push(w[0]);
        nn_step(&q, &wrapped)
    };
    let p = vec![i, j, k];
    let p1 = cyclic_step(&p);
    let p3 = cyclic_step(&cyclic_step(&p1));
    let first_return = (1..=3).find(|&t| (0..t).fold(p.clone(), |w, _| cyclic_step(&w)) == p);
    let lib = Qgca::from_quasigroup(&q).orbit_period(&p).unwrap();
    let ok = products && p1 == vec![k, i, j] && p3 == p && first_return == Some(3) && lib == (0, 3);
    (ok, format!("step=[{}] return_time={first_return:?} library={lib:?}", a.format_word(&p1)))
}

/// Counts preimages directly: the uniform measure is preserved at length `d`
/// iff every word of length `d` has exactly `N` preimages.
fn preimage_counts_uniform(q: &Quasigroup, d: usize) -> bool {
    let n = q.order();
    let mut counts = std::collections::HashMap::new();
    for x in all_words(n, d + 1) {
        *counts.entry(nn_step(q, &x)).or_insert(0usize) += 1;
    }
    counts.len() == n.pow(d as u32) && counts.values().all(|&c| c == n)
}

fn criterion_3(rng: &mut StdRng) -> (bool, String) {
    let mut rules = vec![builtins::d7(), builtins::quaternion()];
    rules.extend((0..25).map(|_| {
        let n = rng.gen_range(2..=5);
        random_latin(n, rng)
    }));
    let mut worst = Prob::zero();
    let mut oracle_ok = true;
    for q in &rules {
        let m = Arc::new(CylinderMeasure::uniform(q.alphabet().clone()));
        let t = Transform::Ca(Arc::new(Qgca::from_quasigroup(q)));
        for d in 1..=5 {
            worst = worst.max(invariance_report(&m, &t, d).unwrap().max_abs_deviation);
        }
        oracle_ok &= (1..=3).all(|d| preimage_counts_uniform(q, d));
    }
    (worst.is_zero() && oracle_ok, format!("rules={} max_dev={worst} preimage_oracle={oracle_ok}", rules.len()))
}

/// `μ(w) = 2^-n · [q-part is a window of (ijk)^∞] / 3` for `C = Z/2`.
fn example11_closed_form(w: &[Symbol], ijk: &[Symbol; 3]) -> Prob {
    let qs: Vec<Symbol> = w.iter().map(|&s| s % 8).collect();
    let windows = (0..3).filter(|&o| qs.iter().enumerate().all(|(t, &x)| x == ijk[(o + t) % 3])).count();
    frac(windows as i64, 3) / Prob::from_integer(num_bigint::BigInt::from(2).pow(w.len() as u32))
}

fn criterion_4() -> (bool, String) {
    let c = group(builtins::cyclic(2).unwrap());
    let m = Arc::new(example11(&c));
    let g = example11_group(&c);
    let ca = Arc::new(example11_rule(&c));
    let qa = builtins::quaternion();
    let ijk = ["i", "j", "k"].map(|s| qa.alphabet().lookup(s).unwrap());

    let closed_form = (1..=3).all(|d| all_words(16, d).iter().all(|w| m.eval(w).unwrap() == example11_closed_form(w, &ijk)));
    let shift = invariance_report(&m, &Transform::Shift, 4).unwrap().max_abs_deviation;
    let phi = invariance_report(&m, &Transform::Ca(ca.clone()), 4).unwrap().max_abs_deviation;

    // H_n = n + log2 3, so each increment is exactly log2|C| = 1.
    let log3 = Log2Form::log2_int(&3u32.into());
    let entropy_ok = (1..=5).all(|n| block_entropy_exact(&m, n).unwrap() == &Log2Form::integer(n as i64) + &log3);

    let subgroup: Vec<Symbol> = vec![0, 8];
    let coset = coset_measure_check(&m, &g, &subgroup, 4, &Prob::zero()).unwrap();
    let fibers = fiber_spectrum(&m, &ca, 4, &Prob::zero()).unwrap();
    let half = frac(1, 2);
    let fiber_ok = fibers.k_estimate == 2
        && fibers.eta_constant == Some(half.clone())
        && fibers.entropy_gap.is_zero()
        && fibers.rows.iter().all(|r| r.weights.iter().all(|w| w.is_zero() || *w == half));
    let support = support_alphabet(&m, 4).unwrap();
    let support_set: BTreeSet<Symbol> = support.symbols.iter().copied().collect();
    let no_sub = g.quasigroup().subquasigroups(true).unwrap().iter().all(|s| {
        s.members.iter().copied().collect::<BTreeSet<_>>() != support_set
    });
    let ok = closed_form
        && shift.is_zero()
        && phi.is_zero()
        && entropy_ok
        && coset.pass
        && fiber_ok
        && !support.full_shift_over_support
        && no_sub;
    (
        ok,
        format!(
            "closed_form={closed_form} dev_shift={shift} dev_ca={phi} entropy={entropy_ok} coset={} K={} fibers={fiber_ok} support={}/{no_sub}",
            coset.pass, fibers.k_estimate, support.full_shift_over_support
        ),
    )
}

fn criterion_5(rng: &mut StdRng) -> (bool, String) {
    let mut ok = true;
    for q in [builtins::d7(), builtins::quaternion()] {
        let ca = Qgca::from_quasigroup(&q);
        let dual = ca.dual();
        let dq = q.dual();
        for _ in 0..200 {
            let len = rng.gen_range(2..=12);
            let w = random_word(q.order(), len, rng);
            let x = ca.xi(&w).unwrap();
            ok &= x == xi_oracle(&q, &w);
            ok &= ca.xi(&ca.step(&w).unwrap()).unwrap() == x[1..];
            ok &= ca.xi_inverse(&x).unwrap() == w;
            ok &= ca.xi(&w[1..]).unwrap() == nn_step(&dq, &x);
            ok &= dual.step(&x).unwrap() == nn_step(&dq, &x);
            ok &= xi_oracle(&dq, &x) == w;
        }
    }
    (ok, "words=400 alphabets=D7,Q".into())
}

fn criterion_6() -> (bool, String) {
    let m = f7_example_matrix();
    let (g, ca) = linear_rule(&m).unwrap();
    let d = decompose_affine(ca.rule(), &g).unwrap();
    let decomposed = permutation_matrix(7, 4, &d.phi0).unwrap() == m
        && permutation_matrix(7, 4, &d.phi1).unwrap() == MatrixFp::identity(7, 4).unwrap();
    let k = kernel(&ca, &g).unwrap();
    let neg = m.neg();
    let neg_map: Vec<Symbol> = (0..2401u32)
        .map(|s| {
            let v: Vec<u64> = builtins::vector_coords(7, 4, s).into_iter().map(u64::from).collect();
            let coords: Vec<u32> = neg.apply(&v).into_iter().map(|x| x as u32).collect();
            builtins::vector_index(7, &coords)
        })
        .collect();
    let rho_ok = k.rho == neg_map && affine_rho(&d, &g).as_ref() == Some(&neg_map);
    let rcf = neg.rcf();
    let char_m = m.char_poly() == Poly::new(7, vec![6, 6, 6, 6, 1]);
    let char_neg = neg.char_poly() == Poly::new(7, vec![6, 1, 6, 1, 1]);
    let roots: Vec<u64> = (0..7).filter(|&x| Poly::new(7, vec![6, 1, 6, 1, 1]).eval(x) == 0).collect();
    let audit = lemma_audit(&g, &ca).unwrap();
    let rcf_audit = audit.rcf.as_ref().unwrap();
    let ok = decomposed && rho_ok && rcf.blocks.len() == 1 && rcf.simple && char_m && char_neg;
    (
        ok,
        format!(
            "decompose={decomposed} rho=-M:{rho_ok} rcf_blocks={} simple={} roots(-M)={roots:?} invariant_subspaces={} audit(orbit)={} audit(rcf)={}",
            rcf.blocks.len(),
            rcf.simple,
            rcf_audit.invariant_subspace_count,
            audit.orbit.verdict,
            rcf_audit.verdict
        ),
    )
}

/// Largest proper subgroup order by closing every pair of generators.
fn largest_proper_subgroup(g: &GroupTable) -> usize {
    let n = g.order();
    let mut best = 1;
    for a in 0..n as Symbol {
        for b in a..n as Symbol {
            let mut members: BTreeSet<Symbol> = [g.identity(), a, b].into();
            loop {
                let next: BTreeSet<Symbol> =
                    members.iter().flat_map(|&x| members.iter().map(move |&y| (x, y))).map(|(x, y)| g.mul(x, y)).collect();
                if next.is_subset(&members) {
                    break;
                }
                members.extend(next);
            }
            if members.len() < n {
                best = best.max(members.len());
            }
        }
    }
    best
}

fn criterion_7() -> (bool, String) {
    let g21 = group(builtins::nonabelian21());
    let h = g21.h_max().unwrap();
    let oracle = (largest_proper_subgroup(&g21) as f64).log2();
    let close = (h - 2.807354922057604).abs() < 1e-12 && (h - oracle).abs() < 1e-12;
    let primes_zero = [2, 3, 5, 7, 11, 13].iter().all(|&p| group(builtins::cyclic(p).unwrap()).h_max().unwrap() == 0.0);
    (close && primes_zero, format!("h_max(G21)={h:.12} oracle={oracle:.12} cyclic_primes_zero={primes_zero}"))
}

fn criterion_8(rng: &mut StdRng) -> (bool, String) {
    let mut ok = true;
    for _ in 0..50 {
        let n = rng.gen_range(2..=6);
        let q = random_latin(n, rng);
        let ca = Qgca::from_quasigroup(&q);
        for _ in 0..100 {
            let len = rng.gen_range(1..=8);
            let w = random_word(n, len, rng);
            let fiber = ca.fiber_preimages(&w).unwrap();
            let distinct: BTreeSet<&Vec<Symbol>> = fiber.iter().collect();
            ok &= distinct.len() == n && fiber.iter().all(|x| nn_step(&q, x) == w);
            if len <= 3 {
                let brute: BTreeSet<Vec<Symbol>> = all_words(n, len + 1).into_iter().filter(|x| nn_step(&q, x) == w).collect();
                ok &= brute == fiber.iter().cloned().collect();
            }
            let x = &fiber[rng.gen_range(0..n)];
            ok &= (0..n).try_fold(x.clone(), |y, _| ca.tau(&y)).unwrap() == *x;
        }
        let m = Arc::new(CylinderMeasure::uniform(Alphabet::numeric(n)));
        let spec = fiber_spectrum(&m, &Arc::new(ca), 2, &Prob::zero()).unwrap();
        let w = frac(1, n as i64);
        ok &= spec.rows.iter().all(|r| r.support_count == n && r.weights.iter().all(|x| *x == w));
        ok &= spec.k_estimate == n && spec.entropy_gap.is_zero();
    }
    (ok, "rules=50 words_per_rule=100".into())
}

fn criterion_9() -> (bool, String) {
    let z3 = group(builtins::cyclic(3).unwrap());
    let rule = qgca::LocalRule::from_fn(z3.alphabet().clone(), 0, 1, |t| (t[1] + 3 - t[0]) % 3).unwrap();
    let ca = Qgca::new(rule).unwrap();
    let audit = lemma_audit(&z3, &ca).unwrap();
    let orbits = &audit.orbit.orbits.orbits;
    let z3_ok = audit.rho == vec![0, 1, 2]
        && audit.orbit.verdict == Verdict::Disagree
        && *orbits == vec![vec![1], vec![2]]
        && audit.orbit.no_invariant_subgroup;

    let id = MatrixFp::identity(2, 2).unwrap();
    let rcf = id.rcf();
    let x1 = Poly::linear(2, 1);
    let closure = id.invariant_subspaces().unwrap();
    let exhaustive = id.invariant_subspaces_exhaustive().unwrap();
    // Over F_2^2 each of the three nonzero vectors spans its own line.
    let lines: BTreeSet<Vec<u64>> = [vec![0, 1], vec![1, 0], vec![1, 1]].into();
    let found: BTreeSet<Vec<u64>> = closure.iter().filter(|s| s.len() == 1).map(|s| s[0].clone()).collect();
    let id_ok = rcf.blocks == vec![x1.clone(), x1] && !rcf.simple && closure.len() == 3 && closure == exhaustive && found == lines;
    (z3_ok && id_ok, format!("z3: verdict={} orbits={orbits:?}; id(F_2^2): blocks={} lines={}", audit.orbit.verdict, rcf.blocks.len(), closure.len()))
}

fn main() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let criteria: Vec<(u32, Duration, Box<dyn FnOnce(&mut StdRng) -> (bool, String)>)> = vec![
        (1, Duration::from_secs(1), Box::new(|_| criterion_1())),
        (2, Duration::from_secs(1), Box::new(|_| criterion_2())),
        (3, Duration::from_secs(30), Box::new(criterion_3)),
        (4, Duration::from_secs(120), Box::new(|_| criterion_4())),
        (5, Duration::from_secs(10), Box::new(criterion_5)),
        (6, Duration::from_secs(60), Box::new(|_| criterion_6())),
        (7, Duration::from_secs(10), Box::new(|_| criterion_7())),
        (8, Duration::from_secs(60), Box::new(criterion_8)),
        (9, Duration::from_secs(10), Box::new(|_| criterion_9())),
    ];
    let mut failed = Vec::new();
    for (id, limit, run) in criteria {
        let start = Instant::now();
        let (ok, detail) = run(&mut rng);
        let elapsed = start.elapsed();
        let pass = ok && elapsed < limit;
        println!(
            "criterion {id}: {} [{:.2}s, limit {}s] {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
