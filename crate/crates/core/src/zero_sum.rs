//! Two-player zero-sum games solved by fictitious play.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{argmax_lowest, MixedStrategy, NormalFormGame};

/// Matrix game where entry `(r, c)` is the row player's payoff and the column
/// player receives its negation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ZeroSumGame {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl ZeroSumGame {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(GameError::invalid("zero-sum matrix must be non-empty"));
        }
        if matrix.iter().any(|r| r.len() != cols) {
            return Err(GameError::invalid("zero-sum matrix rows differ in length"));
        }
        let entries: Vec<f64> = matrix.into_iter().flatten().collect();
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(GameError::invalid("zero-sum matrix has non-finite entries"));
        }
        crate::game::profile_count(&[rows, cols])?;
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.cols + c]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.cols)
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// Expand into a two-player normal-form game with `u_2 = -u_1`.
    pub fn to_normal_form(&self) -> NormalFormGame {
        NormalFormGame::from_fn(vec![self.rows, self.cols], |p| {
            let v = self.get(p[0], p[1]);
            vec![v, -v]
        })
        .expect("shape validated at construction")
    }
}

impl TryFrom<Vec<Vec<f64>>> for ZeroSumGame {
    type Error = GameError;

    fn try_from(m: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(m)
    }
}

impl From<ZeroSumGame> for Vec<Vec<f64>> {
    fn from(g: ZeroSumGame) -> Self {
        g.matrix()
    }
}

/// Result of a converged fictitious-play run.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumSolution {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub row_strategy: MixedStrategy,
    pub col_strategy: MixedStrategy,
    pub iterations: usize,
}

/// Simultaneous fictitious play. Each step both players add one play of a
/// best response to the opponent's empirical frequencies.
#[derive(Debug, Clone)]
pub struct FictitiousPlay<'a> {
    game: &'a ZeroSumGame,
    row_counts: Vec<f64>,
    col_counts: Vec<f64>,
    // A * col_counts
    row_payoffs: Vec<f64>,
    // row_counts^T * A
    col_payoffs: Vec<f64>,
    iterations: usize,
}

impl<'a> FictitiousPlay<'a> {
    pub fn new(game: &'a ZeroSumGame) -> Self {
        Self {
            game,
            row_counts: vec![0.0; game.rows],
            col_counts: vec![0.0; game.cols],
            row_payoffs: vec![0.0; game.rows],
            col_payoffs: vec![0.0; game.cols],
            iterations: 0,
        }
    }

    pub fn step(&mut self) {
        let r = argmax_lowest(&self.row_payoffs).expect("non-empty");
        let neg: Vec<f64> = self.col_payoffs.iter().map(|v| -v).collect();
        let c = argmax_lowest(&neg).expect("non-empty");
        self.row_counts[r] += 1.0;
        self.col_counts[c] += 1.0;
        for (i, p) in self.row_payoffs.iter_mut().enumerate() {
            *p += self.game.get(i, c);
        }
        for (j, p) in self.col_payoffs.iter_mut().enumerate() {
            *p += self.game.get(r, j);
        }
        self.iterations += 1;
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `(lower, upper)` bounds on the game value from the empirical mixtures.
    /// Undefined before the first step.
    pub fn bounds(&self) -> (f64, f64) {
        let t = self.iterations as f64;
        let upper = self
            .row_payoffs
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
            / t;
        let lower = self
            .col_payoffs
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v))
            / t;
        (lower, upper)
    }

    pub fn row_strategy(&self) -> MixedStrategy {
        MixedStrategy::from_counts(&self.row_counts).expect("at least one step taken")
    }

    pub fn col_strategy(&self) -> MixedStrategy {
        MixedStrategy::from_counts(&self.col_counts).expect("at least one step taken")
    }
}

/// Solve a zero-sum game by fictitious play until the value bounds are within
/// `tol`. Returns [`GameError::NotConverged`] with the final bounds when
/// `max_iter` is exhausted first.
pub fn solve_zero_sum(game: &ZeroSumGame, tol: f64, max_iter: usize) -> Result<ZeroSumSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(GameError::invalid(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(GameError::invalid("max_iter must be at least 1"));
    }
    let mut fp = FictitiousPlay::new(game);
    loop {
        fp.step();
        let (lower, upper) = fp.bounds();
        if upper - lower < tol {
            return Ok(ZeroSumSolution {
                value: 0.5 * (lower + upper),
                lower,
                upper,
                row_strategy: fp.row_strategy(),
                col_strategy: fp.col_strategy(),
                iterations: fp.iterations(),
            });
        }
        if fp.iterations() >= max_iter {
            return Err(GameError::NotConverged {
                lower,
                upper,
                iterations: fp.iterations(),
            });
        }
    }
}
