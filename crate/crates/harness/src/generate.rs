//! Seeded periodic schedules that share a prescribed interior equilibrium.

use pgames_core::equilibrium::generate_common_equilibrium_game;
use pgames_core::simplex::normalize_log_weights;
use pgames_core::{JointState, PayoffMatrix, PeriodicGame, Simplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// A generated schedule together with the equilibrium all its phases share.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedGame {
    pub game: PeriodicGame,
    pub equilibrium: JointState,
}

fn interior(rng: &mut ChaCha8Rng, k: usize) -> Result<Simplex> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Ok(normalize_log_weights(&w)?)
}

/// Draws `x*`, `y*` with log-weights uniform in `[-1, 1)` and `period` seed
/// matrices with entries uniform in `[-1, 1)`, then projects each seed so
/// that `(x*, y*)` is an equilibrium of value zero.
pub fn generate_common_schedule(seed: u64, rows: usize, cols: usize, period: usize) -> Result<GeneratedGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = interior(&mut rng, rows)?;
    let y = interior(&mut rng, cols)?;
    let mut mats = Vec::with_capacity(period);
    for _ in 0..period {
        let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = PayoffMatrix::from_flat(rows, cols, data)?;
        mats.push(generate_common_equilibrium_game(&x, &y, &b)?);
    }
    Ok(GeneratedGame {
        game: PeriodicGame::new(mats)?,
        equilibrium: JointState::new(x, y),
    })
}
