//! Deterministic game-theory engine: normal-form equilibria, zero-sum
//! minimax, Stackelberg commitment, language-label payoff offsets, repeated
//! Bayesian moderation, sabotage-adjusted coalitions and tabular multi-agent
//! Q-learning, plus the scenario runner behind the `agentgame` CLI.

pub mod belief;
pub mod coalition;
pub mod config;
pub mod csv_out;
pub mod error;
pub mod game;
pub mod lang;
pub mod marl;
pub mod repeated;
pub mod run;
pub mod stackelberg;
pub mod zero_sum;

pub use error::{GameError, RunError};
pub use game::{
    best_response, expected_utility, is_epsilon_nash, MixedStrategy, NormalFormGame,
    StrategyProfile,
};
pub use repeated::discounted_sum;
pub use stackelberg::{solve_stackelberg, StackelbergSolution};
pub use zero_sum::{solve_zero_sum, ZeroSumGame, ZeroSumSolution};
