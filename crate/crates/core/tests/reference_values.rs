//! Single-step and closed-form values compared against 50-digit evaluations
//! of the same formulas.

use pgames_core::dynamics::{
    extra_mwu_joint_step, max_step_size, omwu_joint_step, OmwuState,
};
use pgames_core::equilibrium::{solve_zero_sum, verify_equilibrium, DEFAULT_TOL};
use pgames_core::{JointState, PayoffMatrix, PeriodicGame};

fn mat(rows: &[&[f64]]) -> PayoffMatrix {
    PayoffMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "got {got:?}, want {want:?}");
    }
}

#[test]
fn omwu_first_step_on_alternating_game() {
    let game = PeriodicGame::new(vec![
        mat(&[&[0.0, -1.0], &[-1.0, 0.0]]),
        mat(&[&[0.0, 1.0], &[1.0, 0.0]]),
    ])
    .unwrap();
    let x0 = JointState::from_probs(&[0.45, 0.55], &[0.45, 0.55]).unwrap();
    let next = omwu_joint_step(&game, 0, &OmwuState::from(x0.clone()), 0.01).unwrap();
    assert_close(
        next.current.x1.probs(),
        &[0.449_257_611_915_003_729_669_110_716_330_694_576_95, 0.550_742_388_084_996_270_330_889_283_669_305_423_05],
        1e-15,
    );
    assert_close(
        next.current.x2.probs(),
        &[0.450_742_610_834_667_157_616_975_331_401_993_073_74, 0.549_257_389_165_332_842_383_024_668_598_006_926_26],
        1e-15,
    );
    assert_eq!(next.previous, x0);
}

#[test]
fn extra_mwu_step_on_anti_diagonal_game() {
    let a = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let s = JointState::from_probs(&[0.5, 0.5], &[0.4, 0.6]).unwrap();
    let (half, next) = extra_mwu_joint_step(&a, &s, 0.1).unwrap();
    let half_x1 = [0.504_999_833_339_999_730_169_664_459_854_419_748_76, 0.495_000_166_660_000_269_830_335_540_145_580_251_24];
    assert_close(half.x1.probs(), &half_x1, 1e-15);
    assert_close(half.x2.probs(), &[0.4, 0.6], 1e-15);
    assert_close(next.x1.probs(), &half_x1, 1e-15);
    assert_close(
        next.x2.probs(),
        &[0.400_240_015_981_118_079_506_568_288_137_420_409_26, 0.599_759_984_018_881_920_493_431_711_862_579_590_74],
        1e-15,
    );
}

#[test]
fn step_size_bound_of_four_matrix_schedule() {
    // Singular values: the two cyclic matrices have norm sqrt(3); the others 5 and 3.
    let game = PeriodicGame::new(vec![
        mat(&[&[0.0, -1.0, 1.0], &[1.0, 0.0, -1.0], &[-1.0, 1.0, 0.0]]),
        mat(&[&[0.0, 1.0, -1.0], &[-1.0, 0.0, 1.0], &[1.0, -1.0, 0.0]]),
        mat(&[&[1.0, -3.0, 2.0], &[-2.0, 1.0, 1.0], &[1.0, 2.0, -3.0]]),
        mat(&[&[1.0, -2.0, 1.0], &[-2.0, 1.0, 1.0], &[1.0, 1.0, -2.0]]),
    ])
    .unwrap();
    let norms: Vec<f64> = game.matrices().iter().map(PayoffMatrix::spectral_norm).collect();
    assert_close(&norms, &[3f64.sqrt(), 3f64.sqrt(), 5.0, 3.0], 1e-12);
    assert!((max_step_size(&game) - 0.2).abs() < 1e-13);
}

#[test]
fn step_size_bound_of_two_matrix_schedule() {
    let game = PeriodicGame::new(vec![
        mat(&[&[0.0, 0.75, 0.25], &[1.5, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
        mat(&[&[0.0, 0.25, 0.75], &[1.5, 0.0, 0.0], &[0.0, 1.0, 0.0]]),
    ])
    .unwrap();
    for a in game.matrices() {
        assert!((a.spectral_norm() - 1.5).abs() < 1e-12);
    }
    assert!((max_step_size(&game) - 1.0 / 1.5).abs() < 1e-12);
}

#[test]
fn hand_solved_three_by_three_equilibrium() {
    let a = mat(&[&[0.0, 0.25, 0.75], &[1.5, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
    let r = solve_zero_sum(&a, DEFAULT_TOL).unwrap();
    assert_close(r.x_star.probs(), &[0.5, 0.25, 0.25], 1e-12);
    assert_close(r.y_star.probs(), &[0.25, 0.375, 0.375], 1e-12);
    assert!((r.value - 0.375).abs() < 1e-12);
    assert!(r.fully_mixed);
    assert_eq!(verify_equilibrium(&a, &r.x_star, &r.y_star, DEFAULT_TOL).unwrap(), (true, 0.0));
}
