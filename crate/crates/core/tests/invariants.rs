use jacobi_scatter::block::{self, BlockSequence};
use jacobi_scatter::coefficients::{random_instance, RandomSpec};
use jacobi_scatter::jost::{build_series_data, jost_recursion, jost_series, tail_bound, Species, Window};
use jacobi_scatter::spectrum::{eigenvalue_bounds, promote_vector_solution, wronskian_scan};
use jacobi_scatter::tol;
use jacobi_scatter::wronskian::{
    adjoint_conjugate_solution, alpha_beta, fundamental_solve, green_identity_residual, reconstruction_residual,
    wronskian_constant,
};
use jacobi_scatter::{CoefficientData, Complex64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, dim: usize) -> CoefficientData {
    random_instance(&RandomSpec { dim, ..Default::default() }, seed)
}

fn random_block(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn solution_from(c: &CoefficientData, z: Complex64, lo: i64, hi: i64, v0: DMatrix<Complex64>, v1: DMatrix<Complex64>) -> BlockSequence {
    let lambda = z + z.inv();
    let mut blocks = vec![v0, v1];
    for n in lo + 1..hi {
        let k = (n - lo) as usize;
        let rhs = (block::scaled_identity(c.dim(), lambda) - c.b(n)) * &blocks[k] - c.a(n - 1) * &blocks[k - 1];
        blocks.push(c.a_inv(n) * rhs);
    }
    BlockSequence::new(lo, blocks)
}

fn on_circle(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wronskian_of_solutions_is_constant(seed in 0u64..10_000, dim in 1usize..=3, r in 0.3f64..1.0, theta in 0.1f64..3.0) {
        let c = instance(seed, dim);
        let z = Complex64::from_polar(r, theta);
        let w = Window::default_for(&c);
        for s in [Species::Plus, Species::Minus] {
            let left = adjoint_conjugate_solution(&c, s, z, w).unwrap();
            let right = jost_recursion(&c, s.other(), z, w).unwrap();
            prop_assert!(wronskian_constant(&c, &left, &right).is_ok());
        }
    }

    #[test]
    fn green_identity_for_arbitrary_sequences(seed in 0u64..10_000, dim in 1usize..=3) {
        let c = instance(seed, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = (c.n_min() - 4, c.n_max() + 4);
        let u = BlockSequence::from_fn(lo, hi, |_| random_block(&mut rng, dim));
        let v = BlockSequence::from_fn(lo, hi, |_| random_block(&mut rng, dim));
        prop_assert!(green_identity_residual(&c, &u, &v, lo + 2, hi - 2).unwrap() < 1e-12);
    }

    #[test]
    fn recursion_matches_series(seed in 0u64..10_000, dim in 1usize..=3, r in 0.2f64..=1.0, theta in 0.0f64..std::f64::consts::TAU) {
        let c = instance(seed, dim);
        let w = Window::default_for(&c);
        let series = build_series_data(&c, w).unwrap();
        let z = Complex64::from_polar(r, theta);
        for s in [Species::Plus, Species::Minus] {
            let rec = jost_recursion(&c, s, z, w).unwrap();
            let ser = jost_series(&series, s, z, w).unwrap();
            prop_assert!(rec.max_diff(&ser) <= 1e-9 * rec.max_norm().max(1.0));
        }
    }

    #[test]
    fn fundamental_solve_reconstructs(seed in 0u64..10_000, dim in 1usize..=3, theta in 0.2f64..2.9) {
        let c = instance(seed, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let z = on_circle(theta);
        let (lo, hi) = (c.n_min() - 3, c.n_max() + 3);
        let v = solution_from(&c, z, lo, hi, random_block(&mut rng, dim), random_block(&mut rng, dim));
        for basis in [Species::Plus, Species::Minus] {
            let (p, q) = fundamental_solve(&c, z, &v, basis).unwrap();
            let res = reconstruction_residual(&c, z, &v, basis, &p, &q).unwrap();
            prop_assert!(res <= 1e-9 * v.max_norm().max(1.0), "residual {res}");
        }
    }

    #[test]
    fn connection_adjoint_relations(seed in 0u64..10_000, dim in 1usize..=3, r in 0.5f64..=1.0, theta in 0.2f64..2.9) {
        let c = instance(seed, dim);
        let z = Complex64::from_polar(r, theta);
        let ab = alpha_beta(&c, z).unwrap();
        let conj = alpha_beta(&c, z.conj()).unwrap();
        let conj_inv = alpha_beta(&c, z.conj().inv()).unwrap();
        for s in [Species::Plus, Species::Minus] {
            let scale = block::norm(ab.alpha(s)).max(1.0);
            prop_assert!(block::norm(&(ab.alpha(s).adjoint() - conj.alpha(s.other()))) <= 1e-9 * scale);
            prop_assert!(block::norm(&(ab.beta(s).adjoint() + conj_inv.beta(s.other()))) <= 1e-9 * scale);
        }
    }

    #[test]
    fn tail_bound_dominates_kernel_tail(seed in 0u64..10_000, dim in 1usize..=2, cut in 0usize..6) {
        let c = instance(seed, dim);
        let w = Window::default_for(&c);
        let series = build_series_data(&c, w).unwrap();
        for n in c.n_min()..=c.n_max() {
            let actual: f64 = (cut + 1..=series.k_degree(n)).map(|m| block::norm(series.k(n, m))).sum();
            prop_assert!(tail_bound(&c, n, cut) >= actual);
        }
    }

    #[test]
    fn product_bound_holds(seed in 0u64..10_000, dim in 1usize..=2, radius in 0.3f64..0.97) {
        let c = instance(seed, dim);
        let report = wronskian_scan(&c, 600, tol::REFINE_REL).within(radius);
        let b = eigenvalue_bounds(&c, radius, radius / 2.0, &report).unwrap();
        prop_assert!(b.holds);
        prop_assert!(b.count_lhs <= b.count_rhs);
    }

    #[test]
    fn promotion_round_trip(seed in 0u64..10_000, dim in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = DVector::from_fn(dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0)));
        let u: Vec<DVector<Complex64>> =
            (0..5).map(|_| DVector::from_fn(dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.0))).collect();
        let p = promote_vector_solution(-2, &u, &v).unwrap();
        for (k, un) in u.iter().enumerate() {
            prop_assert!((p.get(k as i64 - 2).unwrap() * &v - un).norm() < 1e-12 * un.norm().max(1.0));
        }
    }

    #[test]
    fn instance_json_round_trip(seed in 0u64..10_000, dim in 1usize..=3) {
        let c = instance(seed, dim);
        let back = CoefficientData::from_json(&c.to_json()).unwrap();
        for n in c.perturbation_range() {
            prop_assert_eq!(c.a(n), back.a(n));
            prop_assert_eq!(c.b(n), back.b(n));
        }
    }
}
