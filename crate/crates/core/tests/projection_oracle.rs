mod common;

use common::{objective, oracle_minimizer as descent_minimizer, oracle_projection, sup_dist};
use mbl::simplex::{oracle_minimizer, project, MirrorMap, RegularizedObjective, TruncatedSimplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn projection_matches_generic_descent_on_four_arms() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let domain = TruncatedSimplex::new(4, 0.05).unwrap();
    for alpha in [0.0, 0.3, 0.5, 1.0] {
        let map = MirrorMap::new(alpha).unwrap();
        for _ in 0..25 {
            let z: Vec<f64> = (0..4).map(|_| rng.gen_range(1e-3..=1.0)).collect();
            let ours = project(map, &z, &domain).unwrap();
            let reference = oracle_projection(alpha, &z, 0.05);
            let d = sup_dist(&ours, &reference);
            assert!(d < 1e-6, "alpha={alpha} z={z:?}: {d:e}");
        }
    }
}

#[test]
fn minimizer_beats_random_points_and_matches_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (lambda, eps) = (0.05, 0.02);
    let domain = TruncatedSimplex::new(4, eps).unwrap();
    for _ in 0..5 {
        let mu: Vec<f64> = (0..4).map(|_| rng.gen()).collect();
        let obj = RegularizedObjective::new(mu.clone(), lambda, eps).unwrap();
        let x = oracle_minimizer(&obj, &domain).unwrap();
        let fx = objective(&mu, lambda, eps, &x);
        for _ in 0..10_000 {
            let w: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = w.iter().sum();
            let y: Vec<f64> = w.iter().map(|v| eps + (1.0 - 4.0 * eps) * v / s).collect();
            assert!(fx <= objective(&mu, lambda, eps, &y) + 1e-15);
        }
        let reference = descent_minimizer(&mu, lambda, eps);
        assert!(sup_dist(&x, &reference) < 1e-6, "{x:?} vs {reference:?}");
    }
}

#[test]
fn singleton_domain_projects_to_uniform() {
    let domain = TruncatedSimplex::new(4, 0.25).unwrap();
    let p = project(MirrorMap::new(0.3).unwrap(), &[0.9, 0.01, 0.5, 0.2], &domain).unwrap();
    assert_eq!(p.as_slice(), &[0.25; 4]);
}
