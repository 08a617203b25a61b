mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use qgca::{builtins, Alphabet, LocalRule, Qgca, Quasigroup, Symbol};
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{all_words, nn_step, random_latin, xi_oracle};

/// A random quasigroup of order 2..=6 and a word over it.
fn latin_and_word(max_len: usize) -> impl Strategy<Value = (Quasigroup, Vec<Symbol>)> {
    (any::<u64>(), 2usize..=6).prop_flat_map(move |(seed, n)| {
        let q = random_latin(n, &mut StdRng::seed_from_u64(seed));
        (Just(q), prop::collection::vec(0..n as Symbol, 2..=max_len))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dual_is_an_involution((q, _w) in latin_and_word(2)) {
        prop_assert_eq!(q.dual().dual(), q.clone());
        let ca = Qgca::from_quasigroup(&q);
        let back = ca.dual().dual();
        prop_assert_eq!(back.rule(), ca.rule());
        for a in 0..q.order() as Symbol {
            for b in 0..q.order() as Symbol {
                prop_assert_eq!(q.mul(a, q.dual().mul(a, b)), b);
            }
        }
    }

    #[test]
    fn xi_conjugates_step_to_shift_and_shift_to_dual((q, w) in latin_and_word(12)) {
        let ca = Qgca::from_quasigroup(&q);
        let x = ca.xi(&w).unwrap();
        prop_assert_eq!(&x, &xi_oracle(&q, &w));
        prop_assert_eq!(&ca.xi(&ca.step(&w).unwrap()).unwrap()[..], &x[1..]);
        prop_assert_eq!(ca.xi(&w[1..]).unwrap(), ca.dual().step(&x).unwrap());
        prop_assert_eq!(&ca.xi_inverse(&x).unwrap(), &w);
        prop_assert_eq!(&ca.dual().xi(&x).unwrap(), &w);
    }

    #[test]
    fn fibers_have_n_preimages((q, w) in latin_and_word(10)) {
        let ca = Qgca::from_quasigroup(&q);
        let fiber = ca.fiber_preimages(&w).unwrap();
        let distinct: BTreeSet<_> = fiber.iter().collect();
        prop_assert_eq!(distinct.len(), q.order());
        for (b, x) in fiber.iter().enumerate() {
            prop_assert_eq!(x[0], b as Symbol);
            prop_assert_eq!(&nn_step(&q, x), &w);
        }
    }

    #[test]
    fn toggle_cycles_through_the_fiber((q, w) in latin_and_word(10)) {
        let ca = Qgca::from_quasigroup(&q);
        let n = q.order();
        let mut x = w.clone();
        let mut seen = BTreeSet::new();
        for _ in 0..n {
            prop_assert_eq!(ca.step(&x).unwrap(), ca.step(&w).unwrap());
            seen.insert(x.clone());
            x = ca.tau(&x).unwrap();
        }
        prop_assert_eq!(x, w);
        prop_assert_eq!(seen.len(), n);
    }

    #[test]
    fn block_recoding_commutes_with_step(seed in any::<u64>(), len in 2usize..6, biperm in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        // φ(a,b,c) = L(L'(a,b), c) is bijective in a and in c.
        let table = if biperm {
            let (l, l2) = (random_latin(3, &mut rng), random_latin(3, &mut rng));
            all_words(3, 3).iter().map(|t| l.mul(l2.mul(t[0], t[1]), t[2])).collect()
        } else {
            common::random_word(3, 27, &mut rng)
        };
        let rule = LocalRule::new(Alphabet::numeric(3), 1, 1, table).unwrap();
        let r = rule.recode_block().unwrap();
        prop_assert_eq!(r.block_len, 2);
        prop_assert_eq!(r.gamma.is_bipermutative(), rule.is_bipermutative());
        prop_assert!(!biperm || rule.is_bipermutative());
        let w = common::random_word(3, 2 * len, &mut rng);
        let blocks = r.encode(&w);
        prop_assert_eq!(&r.decode(&blocks), &w);
        prop_assert_eq!(r.decode(&r.gamma.step(&blocks).unwrap()), rule.step(&w).unwrap());
    }
}

#[test]
fn fiber_matches_brute_force_on_small_words() {
    for q in [builtins::d7(), builtins::quaternion(), builtins::cyclic(5).unwrap()] {
        let ca = Qgca::from_quasigroup(&q);
        let n = q.order();
        for w in all_words(n, 2) {
            let brute: BTreeSet<Vec<Symbol>> = all_words(n, 3).into_iter().filter(|x| nn_step(&q, x) == w).collect();
            let fiber: BTreeSet<Vec<Symbol>> = ca.fiber_preimages(&w).unwrap().into_iter().collect();
            assert_eq!(fiber, brute);
        }
    }
}

#[test]
fn subquasigroup_sweep_matches_subsets_on_random_squares() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let n = 2 + (rand::Rng::gen_range(&mut rng, 0..6));
        let q = random_latin(n, &mut rng);
        assert_eq!(q.subquasigroups(true).unwrap(), q.subquasigroups_exhaustive(true).unwrap());
    }
    let big = builtins::product(&builtins::quaternion(), &builtins::cyclic(2).unwrap());
    assert_eq!(big.subquasigroups(false).unwrap(), big.subquasigroups_exhaustive(false).unwrap());
}
