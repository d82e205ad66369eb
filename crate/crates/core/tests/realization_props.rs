//! Realizations along random mutation walks, checked against floating-point
//! oracles: an SVD rank count and explicit vectors reflected in R^n.

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use qmut::series::{self, Family};
use qmut::tables::CLASSES;
use qmut::{
    check_admissible, check_compatibility, explore, gram_corank, initial_realization, mutate_realization, ExploreBudget, Quiver,
    Realization,
};
use std::sync::OnceLock;

/// A member with an initial realization from each of the 17 classes and six series classes.
fn seeds() -> &'static [Quiver] {
    static SEEDS: OnceLock<Vec<Quiver>> = OnceLock::new();
    SEEDS.get_or_init(|| {
        let mut v: Vec<Quiver> = CLASSES.iter().map(|e| e.quiver()).collect();
        for f in Family::ALL {
            for n in [3, 5] {
                v.push(series::realize_standard_form(&series::seed(f, n).unwrap()).unwrap());
            }
        }
        v.iter()
            .map(|q| {
                let class = explore(q, &ExploreBudget::default(), false).unwrap();
                class.members.into_iter().find(|m| initial_realization(m).is_ok()).unwrap()
            })
            .collect()
    })
}

fn float_gram(r: &Realization) -> DMatrix<f64> {
    let n = r.rank();
    DMatrix::from_fn(n, n, |i, j| r.get(i, j).approx())
}

fn svd_corank(g: &DMatrix<f64>) -> usize {
    g.clone().svd(false, false).singular_values.iter().filter(|s| s.abs() < 1e-8).count()
}

/// Columns v_i with v_i·v_j = g[i][j]; needs a positive semidefinite g.
fn vectors(g: &DMatrix<f64>) -> DMatrix<f64> {
    let e = SymmetricEigen::new(g.clone());
    assert!(e.eigenvalues.iter().all(|&l| l > -1e-9), "not semidefinite: {}", e.eigenvalues);
    let sqrt = DMatrix::from_diagonal(&e.eigenvalues.map(|l| l.max(0.0).sqrt()));
    sqrt * e.eigenvectors.transpose()
}

/// Partial reflection at k: v_j ↦ v_j − (v_j·v_k) v_k for every arrow j → k, and v_k ↦ −v_k.
fn reflect_vectors(v: &DMatrix<f64>, q: &Quiver, k: usize) -> DMatrix<f64> {
    let mut out = v.clone();
    let vk = v.column(k).clone_owned();
    for j in 0..q.rank() {
        if j != k && q.sign(j, k) > 0 {
            let dot = v.column(j).dot(&vk);
            out.set_column(j, &(v.column(j) - dot * &vk));
        }
    }
    out.set_column(k, &(-vk));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn walks_preserve_corank_and_match_oracles(start in 0usize..23, steps in proptest::collection::vec(0usize..6, 1..25)) {
        let seeds = seeds();
        let q0 = &seeds[start % seeds.len()];
        let mut q = q0.clone();
        let mut r = initial_realization(&q).unwrap();
        let corank = gram_corank(&r);
        let mut v = vectors(&float_gram(&r));
        for s in steps {
            let k = s % q.rank();
            let r2 = mutate_realization(&r, &q, k).unwrap();
            v = reflect_vectors(&v, &q, k);
            q = q.mutate(k).unwrap();
            r = r2;
            prop_assert!(check_compatibility(&r, &q));
            prop_assert!(check_admissible(&r, &q));
            prop_assert_eq!(gram_corank(&r), corank);
            let g = float_gram(&r);
            prop_assert_eq!(svd_corank(&g), corank);
            let from_vectors = v.transpose() * &v;
            prop_assert!((from_vectors - &g).amax() < 1e-8);
        }
    }

    #[test]
    fn double_reflection_is_a_sign_change(start in 0usize..23, k in 0usize..6) {
        let seeds = seeds();
        let q = &seeds[start % seeds.len()];
        let k = k % q.rank();
        let r = initial_realization(q).unwrap();
        let back = mutate_realization(&mutate_realization(&r, q, k).unwrap(), &q.mutate(k).unwrap(), k).unwrap();
        let mut eps = vec![1i8; q.rank()];
        eps[k] = -1;
        // the neighbours of k end up reflected by s_k either way, and v_k negated
        prop_assert_eq!(back, r.sign_conjugate(&eps));
    }
}

#[test]
fn coranks_of_the_seed_realizations() {
    for e in CLASSES.iter() {
        let r = initial_realization(&e.quiver()).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        let g = float_gram(&r);
        assert_eq!(svd_corank(&g), gram_corank(&r), "{}", e.name);
    }
}
