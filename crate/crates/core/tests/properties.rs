use proptest::prelude::*;

use nnmf_game::baselines::{mu_step, pg_step, random_init};
use nnmf_game::eigengame::{eigen_gradient, exact_pca, riemannian_project};
use nnmf_game::game::{argmax, self_game_jmax, self_game_jmin, GameConfig, GameEngine, Schedule};
use nnmf_game::harness::{mean_sd, step_variance};
use nnmf_game::{clamp_nonneg, matmul, rand_uniform, reconstruction_error, Mat, Rng};

fn mat(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = Mat> {
    prop::collection::vec(lo..hi, rows * cols).prop_map(move |v| Mat::from_vec(rows, cols, v).unwrap())
}

fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..8, 2usize..8, 1usize..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matmul_is_associative(a in mat(3, 4, -1.0, 1.0), b in mat(4, 2, -1.0, 1.0), c in mat(2, 5, -1.0, 1.0)) {
        let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
        let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
        for (x, y) in left.as_slice().iter().zip(right.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn clamp_is_idempotent_and_nonnegative(m in mat(4, 3, -2.0, 2.0)) {
        let once = clamp_nonneg(&m);
        prop_assert!(once.as_slice().iter().all(|&v| v >= 0.0));
        let twice = clamp_nonneg(&once);
        prop_assert_eq!(twice.as_slice(), once.as_slice());
    }

    #[test]
    fn text_format_round_trips(m in mat(3, 4, -1e6, 1e6)) {
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let back = Mat::read_text(buf.as_slice()).unwrap();
        prop_assert_eq!(back.as_slice(), m.as_slice());
    }

    #[test]
    fn mu_step_keeps_factors_nonnegative_and_error_nonincreasing(seed in any::<u64>(), (i, j, k) in dims()) {
        let mut rng = Rng::new(seed);
        let x = rand_uniform(&mut rng, i, j, 0.0, 1.0).unwrap();
        let (w, h) = random_init(&mut rng, i, j, k).unwrap();
        let before = reconstruction_error(&x, &w, &h).unwrap();
        let (w1, h1) = mu_step(&x, &w, &h, 1e-12).unwrap();
        prop_assert!(w1.as_slice().iter().chain(h1.as_slice()).all(|&v| v >= 0.0));
        prop_assert!(reconstruction_error(&x, &w1, &h1).unwrap() <= before + 1e-10);
    }

    #[test]
    fn pg_step_stays_nonnegative(seed in any::<u64>(), (i, j, k) in dims(), eta in 1e-4f64..0.1) {
        let mut rng = Rng::new(seed);
        let x = rand_uniform(&mut rng, i, j, 0.0, 1.0).unwrap();
        let (w, h) = random_init(&mut rng, i, j, k).unwrap();
        let (w1, h1) = pg_step(&x, &w, &h, eta).unwrap();
        prop_assert!(w1.as_slice().iter().chain(h1.as_slice()).all(|&v| v >= 0.0));
    }

    #[test]
    fn jacobi_and_gauss_seidel_rounds_stay_nonnegative(seed in any::<u64>(), (i, j, k) in dims(), gs in any::<bool>()) {
        let mut rng = Rng::new(seed);
        let x = rand_uniform(&mut rng, i, j, 0.0, 1.0).unwrap();
        let (w, h) = random_init(&mut rng, i, j, k).unwrap();
        let schedule = if gs { Schedule::GaussSeidel } else { Schedule::Jacobi };
        let mut engine = GameEngine::new(&x, &w, &h, GameConfig { eta: 0.05, schedule, ..Default::default() }).unwrap();
        for _ in 0..5 {
            engine.step().unwrap();
        }
        prop_assert!(engine.w().as_slice().iter().chain(engine.h().as_slice()).all(|&v| v >= 0.0));
    }

    #[test]
    fn self_games_never_grow_entries(v in prop::collection::vec(0.0f64..10.0, 1..12), shrink in 0.0f64..1.0) {
        let top = argmax(&v).unwrap();
        let mx = self_game_jmax(&v, shrink);
        let mn = self_game_jmin(&v, shrink);
        prop_assert!(mx.iter().zip(&v).all(|(a, b)| a <= b));
        prop_assert!(mn.iter().zip(&v).all(|(a, b)| a <= b));
        prop_assert_eq!(mx[top], v[top]);
        prop_assert!(mn.iter().zip(&v).filter(|(a, b)| a != b).count() <= 1);
    }

    #[test]
    fn riemannian_gradient_is_tangent(x in mat(8, 4, -1.0, 1.0), raw in prop::collection::vec(-1.0f64..1.0, 4)) {
        let n = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let v: Vec<f64> = raw.iter().map(|a| a / n).collect();
        let g = eigen_gradient(&x, &v, &[]).unwrap();
        let r = riemannian_project(&g, &v);
        let along: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!(along.abs() <= 1e-12);
    }

    #[test]
    fn pca_ratios_are_ordered_and_bounded(x in mat(12, 5, -1.0, 1.0), k in 1usize..=5) {
        let pca = exact_pca(&x, k).unwrap();
        let r = &pca.explained_variance_ratio;
        prop_assert!(r.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(r.iter().sum::<f64>() <= 1.0 + 1e-12);
        let gram = matmul(&pca.components, &pca.components.transpose()).unwrap();
        for a in 0..k {
            for b in 0..k {
                let expect = if a == b { 1.0 } else { 0.0 };
                prop_assert!((gram[(a, b)] - expect).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn population_sd_matches_definition(v in prop::collection::vec(-5.0f64..5.0, 1..20)) {
        let (m, sd) = mean_sd(&v);
        let n = v.len() as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        prop_assert!(sd >= 0.0);
        prop_assert!((sd - var.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn step_variance_ignores_constant_velocity(start in prop::collection::vec(-1.0f64..1.0, 3),
                                               vel in prop::collection::vec(-1.0f64..1.0, 3),
                                               steps in 2usize..20) {
        let pts: Vec<Vec<f64>> = (0..steps)
            .map(|t| start.iter().zip(&vel).map(|(s, v)| s + t as f64 * v).collect())
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        prop_assert!(step_variance(&refs) <= 1e-20);
    }
}
