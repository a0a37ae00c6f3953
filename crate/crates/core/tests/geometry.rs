use mla_core::harness::checks::{all_maps, random_interior};
use mla_core::harness::random_quadratic;
use mla_core::{MapKind, MirrorMap, Potential, Stream};
use proptest::prelude::*;
use rand::Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense Hessian assembled from the analytic formulas, independent of the
/// factor code.
fn dense_hessian(map: &MirrorMap, x: &[f64]) -> Vec<Vec<f64>> {
    let d = x.len();
    let mut h = vec![vec![0.0; d]; d];
    match map.kind() {
        MapKind::Euclidean => (0..d).for_each(|i| h[i][i] = 1.0),
        MapKind::BoxLogBarrier => (0..d).for_each(|i| {
            let t = x[i];
            h[i][i] = 2.0 * (1.0 + t * t) / (1.0 - t * t).powi(2);
        }),
        MapKind::SimplexBarrier | MapKind::WeightedSimplexBarrier(_) => {
            let a = match map.kind() {
                MapKind::WeightedSimplexBarrier(w) => w.clone(),
                _ => vec![1.0; d + 1],
            };
            let s = 1.0 - x.iter().sum::<f64>();
            for i in 0..d {
                for j in 0..d {
                    h[i][j] = a[0] / (s * s) + if i == j { a[i + 1] / (x[i] * x[i]) } else { 0.0 };
                }
            }
        }
    }
    h
}

fn quad(h: &[Vec<f64>], u: &[f64]) -> f64 {
    h.iter().zip(u).map(|(row, ui)| ui * dot(row, u)).sum()
}

fn map_strategy() -> impl Strategy<Value = (usize, u64)> {
    (0usize..4, any::<u64>())
}

fn pick(idx: usize, seed: u64, d: usize) -> (MirrorMap, Stream) {
    let mut rng = Stream::new(seed);
    let map = all_maps(d, &mut rng).swap_remove(idx);
    (map, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_round_trip((idx, seed) in map_strategy(), d in 1usize..12) {
        let (map, mut rng) = pick(idx, seed, d);
        for _ in 0..16 {
            let x = random_interior(&map, &mut rng);
            let back = map.dual_grad(&map.grad(&x).unwrap()).unwrap();
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn bregman_is_nonnegative_and_vanishes_on_diagonal((idx, seed) in map_strategy(), d in 1usize..12) {
        let (map, mut rng) = pick(idx, seed, d);
        for _ in 0..16 {
            let x = random_interior(&map, &mut rng);
            let y = random_interior(&map, &mut rng);
            prop_assert!(map.bregman(&x, &y).unwrap() >= 0.0);
            prop_assert!(map.bregman(&x, &x).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn factor_reproduces_hessian((idx, seed) in map_strategy(), d in 1usize..12) {
        let (map, mut rng) = pick(idx, seed, d);
        let x = random_interior(&map, &mut rng);
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ct = map.hessian_factor(&x).unwrap().apply_transpose(&u);
        let exact = quad(&dense_hessian(&map, &x), &u);
        prop_assert!((dot(&ct, &ct) - exact).abs() <= 1e-10 * exact);
        prop_assert!((map.hessian_quad_form(&x, &u).unwrap() - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn bregman_is_locally_quadratic((idx, seed) in map_strategy(), d in 1usize..8) {
        let (map, mut rng) = pick(idx, seed, d);
        let x = random_interior(&map, &mut rng);
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let q = map.hessian_quad_form(&x, &u).unwrap();
        // Keep the perturbation within a tenth of the local unit ball.
        let base = 0.1 / q.sqrt();
        let ratio = |h: f64| {
            let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + h * b).collect();
            map.bregman(&y, &x).unwrap() / (0.5 * h * h * q)
        };
        let (r1, r2) = (ratio(base * 1e-2), ratio(base * 1e-3));
        // The error is first order in h: shrinking h tenfold shrinks it tenfold.
        prop_assert!((r2 - 1.0).abs() <= 2e-3, "r2 = {}", r2);
        prop_assert!((r2 - 1.0).abs() <= 0.2 * (r1 - 1.0).abs() + 1e-6, "r1 = {}, r2 = {}", r1, r2);
    }
}

#[test]
fn self_concordance_sweep() {
    let mut rng = Stream::new(42);
    for map in [
        MirrorMap::box_log_barrier(4),
        MirrorMap::simplex_barrier(4),
        MirrorMap::simplex_barrier(2),
        MirrorMap::weighted_simplex_barrier(vec![2.0; 5]).unwrap(),
    ] {
        let m = map.self_concordance();
        for _ in 0..100 {
            let x = random_interior(&map, &mut rng);
            let u: Vec<f64> = (0..map.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = map.hessian_quad_form(&x, &u).unwrap().sqrt();
            // Keep the finite-difference stencil inside the domain.
            let u: Vec<f64> = u.iter().map(|v| v / norm).collect();
            let r = map.check_self_concordance(&x, &u, 1e-5).unwrap();
            assert!(r >= -1e-4 * (2.0 * m).max(1.0), "{} residual {r} at {x:?}", map.name());
        }
    }
}

#[test]
fn box_self_concordance_known_value() {
    let r = MirrorMap::box_log_barrier(1).check_self_concordance(&[0.0], &[1.0], 1e-4).unwrap();
    assert!((r - 2.0 * 2f64.powf(1.5)).abs() < 1e-6, "{r}");
}

#[test]
fn quadratic_relative_convexity_conditions_agree() {
    // Hessian ordering and Bregman gap bound with β = 1, for |A_ij| ≤ 1.
    let d = 6;
    let v = random_quadratic(d, 3).unwrap();
    let Potential::Quadratic(q) = &v else { unreachable!() };
    let a = q.matrix();
    let map = MirrorMap::simplex_barrier(d);
    let mut rng = Stream::new(9);
    for _ in 0..1000 {
        let x = random_interior(&map, &mut rng);
        let y = random_interior(&map, &mut rng);
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let au: f64 = (0..d).map(|i| u[i] * (0..d).map(|j| a[(i, j)] * u[j]).sum::<f64>()).sum();
        let l1: f64 = u.iter().map(|t| t.abs()).sum();
        assert!(au <= l1 * l1 + 1e-12);
        assert!(au <= map.hessian_quad_form(&x, &u).unwrap() + 1e-12);

        let gx = v.grad(&x).unwrap();
        let diff: Vec<f64> = y.iter().zip(&x).map(|(s, t)| s - t).collect();
        let gap = v.value(&y).unwrap() - v.value(&x).unwrap() - dot(&gx, &diff);
        assert!(gap <= map.bregman(&y, &x).unwrap() + 1e-12);
    }
}

#[test]
fn points_outside_the_domain_are_rejected() {
    let simplex = MirrorMap::simplex_barrier(2);
    assert!(simplex.grad(&[0.5, 0.5]).is_err());
    assert!(simplex.grad(&[-0.1, 0.5]).is_err());
    let cube = MirrorMap::box_log_barrier(2);
    assert!(cube.grad(&[1.0, 0.0]).is_err());
    assert!(cube.bregman(&[0.0, 0.0], &[0.0, -1.0]).is_err());
}
