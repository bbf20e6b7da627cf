//! Exact equilibria of small zero-sum games.
//!
//! The solver first tries the fully mixed linear system and falls back to
//! enumerating equal-size support pairs, smallest supports first and
//! lexicographically within a size, accepting the first candidate whose
//! best-response gap is within tolerance.

use crate::error::{Error, Result};
use crate::game::{PayoffMatrix, PeriodicGame};
use crate::linalg::solve;
use crate::simplex::Simplex;
use crate::state::JointState;

/// Default tolerance on the best-response gap.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest number of pure strategies per player the solver accepts.
pub const MAX_SOLVER_DIM: usize = 6;

/// Components of a solved strategy within this of zero are snapped to zero.
const SNAP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub x_star: Simplex,
    pub y_star: Simplex,
    /// `x*ᵀ A y*`.
    pub value: f64,
    /// Largest gain from a pure deviation by either player.
    pub gap: f64,
    pub fully_mixed: bool,
}

impl EquilibriumResult {
    fn new(a: &PayoffMatrix, x_star: Simplex, y_star: Simplex) -> Self {
        let (value, gap) = value_and_gap(a, &x_star, &y_star);
        let fully_mixed = x_star.probs().iter().chain(y_star.probs()).all(|p| *p > 0.0);
        Self {
            x_star,
            y_star,
            value,
            gap,
            fully_mixed,
        }
    }

    pub fn joint_state(&self) -> JointState {
        JointState::new(self.x_star.clone(), self.y_star.clone())
    }
}

fn value_and_gap(a: &PayoffMatrix, x: &Simplex, y: &Simplex) -> (f64, f64) {
    let ay = a.mul_vec(y.probs());
    let atx = a.tr_mul_vec(x.probs());
    let v: f64 = x.probs().iter().zip(&ay).map(|(p, q)| p * q).sum();
    let best_row = ay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best_col = atx.iter().copied().fold(f64::INFINITY, f64::min);
    let gap = (best_row - v).max(v - best_col).max(0.0);
    (v, gap)
}

/// Best-response gap `max(max_i (Ay)_i − v, v − min_j (Aᵀx)_j, 0)` with
/// `v = xᵀAy`; `ok` iff the gap is at most `tol`.
pub fn verify_equilibrium(a: &PayoffMatrix, x: &Simplex, y: &Simplex, tol: f64) -> Result<(bool, f64)> {
    Error::check_dim(a.rows(), x.dim())?;
    Error::check_dim(a.cols(), y.dim())?;
    let (_, gap) = value_and_gap(a, x, y);
    Ok((gap <= tol, gap))
}

/// Solves `[M, −1; 1ᵀ, 0] [w; v] = [0; 1]` for a square `k × k` block `M`
/// given as a closure, returning the weights when they are non-negative.
fn solve_indifference(k: usize, entry: impl Fn(usize, usize) -> f64) -> Option<Vec<f64>> {
    let dim = k + 1;
    let mut sys = vec![0.0; dim * dim];
    for r in 0..k {
        for c in 0..k {
            sys[r * dim + c] = entry(r, c);
        }
        sys[r * dim + k] = -1.0;
        sys[k * dim + r] = 1.0;
    }
    let mut rhs = vec![0.0; dim];
    rhs[k] = 1.0;
    let sol = solve(&sys, &rhs)?;
    let mut w = sol[..k].to_vec();
    if w.iter().any(|v| !v.is_finite() || *v < -SNAP) {
        return None;
    }
    w.iter_mut().for_each(|v| *v = v.max(0.0));
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return None;
    }
    w.iter_mut().for_each(|v| *v /= total);
    Some(w)
}

/// Largest denominator considered when snapping weights to rationals.
const MAX_DENOMINATOR: i64 = 10_000;

/// Best rational approximation `p/q` with `q ≤ MAX_DENOMINATOR`, by continued
/// fractions, if it lies within `1e-12` of `w ∈ [0, 1]`.
fn nearby_rational(w: f64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut x = w;
    for _ in 0..64 {
        let a = x.floor();
        if a > MAX_DENOMINATOR as f64 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > MAX_DENOMINATOR {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (w - h1 as f64 / k1 as f64).abs() <= 1e-12 {
            return Some((h1, k1));
        }
        let frac = x - a as f64;
        if frac <= 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Replaces the weights by small-denominator rationals when every weight is
/// within `1e-12` of one and the rationals sum to exactly 1. Linear solves of
/// games with simple rational entries then return their exact equilibria.
fn snap_to_rationals(w: &[f64]) -> Option<Vec<f64>> {
    let fracs: Vec<(i64, i64)> = w.iter().map(|v| nearby_rational(*v)).collect::<Option<_>>()?;
    let mut lcm = 1i64;
    for (_, q) in &fracs {
        lcm = lcm / gcd(lcm, *q) * q;
        if lcm > 1 << 40 {
            return None;
        }
    }
    let total: i64 = fracs.iter().map(|(p, q)| p * (lcm / q)).sum();
    (total == lcm).then(|| fracs.iter().map(|(p, q)| *p as f64 / *q as f64).collect())
}

fn embed(len: usize, support: &[usize], w: &[f64]) -> Result<Simplex> {
    let mut full = vec![0.0; len];
    for (i, v) in support.iter().zip(w) {
        full[*i] = *v;
    }
    Simplex::from_probs(&full)
}

fn try_supports(a: &PayoffMatrix, rows: &[usize], cols: &[usize], tol: f64) -> Result<Option<EquilibriumResult>> {
    let k = rows.len();
    let Some(y) = solve_indifference(k, |r, c| a.get(rows[r], cols[c])) else {
        return Ok(None);
    };
    let Some(x) = solve_indifference(k, |r, c| a.get(rows[c], cols[r])) else {
        return Ok(None);
    };
    let mut result = EquilibriumResult::new(a, embed(a.rows(), rows, &x)?, embed(a.cols(), cols, &y)?);
    if let (Some(xs), Some(ys)) = (snap_to_rationals(&x), snap_to_rationals(&y)) {
        let snapped = EquilibriumResult::new(a, embed(a.rows(), rows, &xs)?, embed(a.cols(), cols, &ys)?);
        if snapped.gap <= result.gap {
            result = snapped;
        }
    }
    Ok((result.gap <= tol).then_some(result))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// An equilibrium of the zero-sum game `A` (rows maximise).
pub fn solve_zero_sum(a: &PayoffMatrix, tol: f64) -> Result<EquilibriumResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let (m, n) = (a.rows(), a.cols());
    if m > MAX_SOLVER_DIM || n > MAX_SOLVER_DIM {
        return Err(Error::invalid(format!(
            "solver supports at most {MAX_SOLVER_DIM} strategies per player, got {m}x{n}"
        )));
    }
    if m == n {
        let all: Vec<usize> = (0..m).collect();
        if let Some(r) = try_supports(a, &all, &all, tol)? {
            return Ok(r);
        }
    }
    for k in 1..=m.min(n) {
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                if let Some(r) = try_supports(a, &rows, &cols, tol)? {
                    return Ok(r);
                }
            }
        }
    }
    Err(Error::Numerical(
        "support enumeration found no equilibrium within tolerance".into(),
    ))
}

/// Solves the first matrix and returns the result if it is an equilibrium of
/// every matrix in the schedule. The reported gap is the largest over the
/// schedule.
pub fn common_equilibrium(game: &PeriodicGame, tol: f64) -> Result<Option<EquilibriumResult>> {
    let mut result = solve_zero_sum(&game.matrices()[0], tol)?;
    for a in &game.matrices()[1..] {
        let (ok, gap) = verify_equilibrium(a, &result.x_star, &result.y_star, tol)?;
        if !ok {
            return Ok(None);
        }
        result.gap = result.gap.max(gap);
    }
    Ok(Some(result))
}

/// `A = B − 1(x*ᵀB) − (By*)1ᵀ + (x*ᵀBy*)11ᵀ`, for which `A y* = 0` and
/// `x*ᵀ A = 0`, so `(x*, y*)` is an equilibrium of value zero.
pub fn generate_common_equilibrium_game(x_star: &Simplex, y_star: &Simplex, b: &PayoffMatrix) -> Result<PayoffMatrix> {
    Error::check_dim(b.rows(), x_star.dim())?;
    Error::check_dim(b.cols(), y_star.dim())?;
    if x_star.min_prob() <= 0.0 || y_star.min_prob() <= 0.0 {
        return Err(Error::invalid("prescribed equilibrium must be fully mixed"));
    }
    let col_avg = b.tr_mul_vec(x_star.probs());
    let row_avg = b.mul_vec(y_star.probs());
    let total: f64 = x_star.probs().iter().zip(&row_avg).map(|(p, r)| p * r).sum();
    let mut data = Vec::with_capacity(b.rows() * b.cols());
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            data.push(b.get(i, j) - col_avg[j] - row_avg[i] + total);
        }
    }
    PayoffMatrix::from_flat(b.rows(), b.cols(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> PayoffMatrix {
        PayoffMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn s(p: &[f64]) -> Simplex {
        Simplex::from_probs(p).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn anti_diagonal_game() {
        let r = solve_zero_sum(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), DEFAULT_TOL).unwrap();
        assert!(close(r.x_star.probs(), &[0.5, 0.5], 1e-15));
        assert!(close(r.y_star.probs(), &[0.5, 0.5], 1e-15));
        assert!((r.value - 0.5).abs() < 1e-15);
        assert!(r.fully_mixed);
    }

    #[test]
    fn rock_paper_scissors() {
        let a = m(&[&[0.0, -1.0, 1.0], &[1.0, 0.0, -1.0], &[-1.0, 1.0, 0.0]]);
        let r = solve_zero_sum(&a, DEFAULT_TOL).unwrap();
        let third = [1.0 / 3.0; 3];
        assert!(close(r.x_star.probs(), &third, 1e-12));
        assert!(close(r.y_star.probs(), &third, 1e-12));
        assert!(r.value.abs() < 1e-12);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn saddle_point_found_by_enumeration() {
        // Pure saddle at (row 1, column 0): value 2.
        let a = m(&[&[1.0, 5.0], &[2.0, 3.0]]);
        let r = solve_zero_sum(&a, DEFAULT_TOL).unwrap();
        assert_eq!(r.x_star.probs(), &[0.0, 1.0]);
        assert_eq!(r.y_star.probs(), &[1.0, 0.0]);
        assert_eq!(r.value, 2.0);
        assert!(!r.fully_mixed);
    }

    #[test]
    fn rectangular_game() {
        // Row player mixes (1/2, 1/2) against columns 0 and 1; column 2 is dominated.
        let a = m(&[&[1.0, -1.0, 3.0], &[-1.0, 1.0, 3.0]]);
        let r = solve_zero_sum(&a, DEFAULT_TOL).unwrap();
        assert!(close(r.x_star.probs(), &[0.5, 0.5], 1e-14));
        assert!(close(r.y_star.probs(), &[0.5, 0.5, 0.0], 1e-14));
        assert!(r.gap <= DEFAULT_TOL);
    }

    #[test]
    fn zero_game_takes_first_pure_pair() {
        let r = solve_zero_sum(&PayoffMatrix::zeros(3, 2).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.x_star.probs(), &[1.0, 0.0, 0.0]);
        assert_eq!(r.y_star.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn verifier_on_pure_deviations() {
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(verify_equilibrium(&a, &s(&[0.5, 0.5]), &s(&[0.5, 0.5]), 1e-12).unwrap(), (true, 0.0));
        // Rows cannot improve on 1/2, but the column player gains 1/2 by playing column 0.
        assert_eq!(verify_equilibrium(&a, &s(&[1.0, 0.0]), &s(&[0.5, 0.5]), 1e-12).unwrap(), (false, 0.5));
        assert_eq!(verify_equilibrium(&a, &s(&[1.0, 0.0]), &s(&[1.0, 0.0]), 1e-12).unwrap(), (false, 1.0));
        assert!(verify_equilibrium(&a, &s(&[0.2, 0.3, 0.5]), &s(&[0.5, 0.5]), 1e-12).is_err());
    }

    #[test]
    fn rational_snapping() {
        assert_eq!(nearby_rational(0.375), Some((3, 8)));
        assert_eq!(nearby_rational(1.0 / 3.0 + 1e-16), Some((1, 3)));
        assert_eq!(nearby_rational(0.0), Some((0, 1)));
        assert_eq!(nearby_rational(1.0), Some((1, 1)));
        assert_eq!(nearby_rational(std::f64::consts::FRAC_1_PI), None);
        let third = 1.0 / 3.0;
        assert_eq!(snap_to_rationals(&[third + 1e-16, third, third - 1e-16]), Some(vec![third; 3]));
        // Rationals that do not sum to one are left alone.
        assert_eq!(snap_to_rationals(&[0.3, 0.3]), None);
        assert_eq!(snap_to_rationals(&[0.5, std::f64::consts::FRAC_1_PI]), None);
    }

    #[test]
    fn lexicographic_subsets() {
        assert_eq!(
            subsets(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn generator_zero_seed_gives_zero_game() {
        let b = PayoffMatrix::zeros(2, 3).unwrap();
        let a = generate_common_equilibrium_game(&s(&[0.4, 0.6]), &s(&[0.2, 0.3, 0.5]), &b).unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn generator_on_identity_seed() {
        let b = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let h = s(&[0.5, 0.5]);
        let a = generate_common_equilibrium_game(&h, &h, &b).unwrap();
        assert_eq!(a.to_rows(), vec![vec![0.5, -0.5], vec![-0.5, 0.5]]);
        assert_eq!(verify_equilibrium(&a, &h, &h, 1e-12).unwrap(), (true, 0.0));
    }

    #[test]
    fn generator_rejects_boundary_points() {
        let b = PayoffMatrix::zeros(2, 2).unwrap();
        assert!(generate_common_equilibrium_game(&s(&[1.0, 0.0]), &s(&[0.5, 0.5]), &b).is_err());
    }

    #[test]
    fn common_equilibrium_of_alternating_game() {
        let g = PeriodicGame::new(vec![
            m(&[&[0.0, -1.0], &[-1.0, 0.0]]),
            m(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ])
        .unwrap();
        let r = common_equilibrium(&g, DEFAULT_TOL).unwrap().unwrap();
        assert!(r.fully_mixed);
        assert!(close(r.joint_state().concat_probs().as_slice(), &[0.5; 4], 1e-15));
    }

    #[test]
    fn no_common_equilibrium() {
        let g = PeriodicGame::new(vec![
            m(&[&[0.0, 1.0], &[1.0, 0.0]]),
            m(&[&[2.0, 0.0], &[0.0, 1.0]]),
        ])
        .unwrap();
        assert!(common_equilibrium(&g, DEFAULT_TOL).unwrap().is_none());
    }
}
