//! Scenario execution: dispatch a loaded config to its solver, write the CSV
//! outputs and collect a summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::belief::{action_frequencies, simulate_moderation, ModerationScenario};
use crate::coalition::{best_coalition, coalition_table, core_contains, shapley, Allocation};
use crate::config::{
    CoalitionPayload, EnvSetup, ModerationPayload, NormalFormPayload, Payload, QLearningPayload,
    ScenarioConfig, StackelbergPayload, ZeroSumPayload,
};
use crate::csv_out::{self, emit_csv, format_real, Cell};
use crate::error::{GameError, RunError};
use crate::game::{
    best_response, deviation_gains, expected_utility, pure_nash_equilibria, StrategyProfile,
};
use crate::lang::{augment_game, split_augmented};
use crate::marl::{train, MatrixGameEnv, ModerationEnv, TabularEnvironment, TrainingOutcome};
use crate::stackelberg::solve_stackelberg;
use crate::zero_sum::solve_zero_sum;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory used when neither the caller nor the config names one.
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone)]
pub struct RunReport {
    /// The resolved scenario; loading `config.to_toml()` reproduces the run.
    pub config: ScenarioConfig,
    /// Ordered `(quantity, value)` pairs.
    pub summary: Vec<(String, String)>,
    pub outputs: Vec<PathBuf>,
    pub duration: Duration,
    pub version: &'static str,
}

impl RunReport {
    /// Two-column plain-text table.
    pub fn render(&self) -> String {
        let width = self
            .summary
            .iter()
            .map(|(k, _)| k.len())
            .max()
            .unwrap_or(0)
            .max(8);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "agentgame {} | {}",
            self.version,
            self.config.kind().as_str()
        );
        let _ = writeln!(out, "{:-<w$}", "", w = width + 32);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        let _ = writeln!(out, "{:-<w$}", "", w = width + 32);
        let _ = writeln!(
            out,
            "{:<width$}  {:.3} s",
            "duration",
            self.duration.as_secs_f64()
        );
        for p in &self.outputs {
            let _ = writeln!(out, "{:<width$}  {}", "wrote", p.display());
        }
        out
    }
}

struct Outcome {
    summary: Vec<(String, String)>,
    outputs: Vec<PathBuf>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            summary: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.summary.push((key.into(), value.into()));
    }

    fn csv(
        &mut self,
        dir: &Path,
        name: &str,
        spec: &csv_out::ColumnSpec,
        rows: &[Vec<Cell>],
    ) -> Result<(), RunError> {
        let p = dir.join(name);
        emit_csv(rows, spec, &p)?;
        self.outputs.push(p);
        Ok(())
    }
}

fn config_error(field: String, message: String) -> RunError {
    RunError::Game(GameError::Config(format!("{field}: {message}")))
}

fn fmt_vec(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| format_real(x)).collect();
    format!("[{}]", parts.join(", "))
}

/// Execute a scenario. Outputs go to `out_dir`, else the config's `output`,
/// else [`DEFAULT_OUT_DIR`].
pub fn run(config: &ScenarioConfig, out_dir: Option<&Path>) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    std::fs::create_dir_all(&dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut out = match &config.payload {
        Payload::NormalForm(p) => run_normal_form(p, &dir)?,
        Payload::ZeroSum(p) => run_zero_sum(p, &dir)?,
        Payload::Stackelberg(p) => run_stackelberg(p, &dir)?,
        Payload::Moderation(p) => run_moderation(p, config.seed, &dir)?,
        Payload::Coalition(p) => run_coalition(p, &dir)?,
        Payload::Qlearning(p) => run_qlearning(p, config.seed, &dir)?,
    };
    let resolved = dir.join("resolved.toml");
    std::fs::write(&resolved, config.to_toml()).map_err(|source| RunError::Io {
        path: resolved.clone(),
        source,
    })?;
    out.outputs.push(resolved);
    let mut report = RunReport {
        config: config.clone(),
        summary: out.summary,
        outputs: out.outputs,
        duration: start.elapsed(),
        version: VERSION,
    };
    let summary_path = dir.join("summary.txt");
    report.outputs.push(summary_path.clone());
    std::fs::write(&summary_path, report.render()).map_err(|source| RunError::Io {
        path: summary_path,
        source,
    })?;
    Ok(report)
}

fn run_normal_form(p: &NormalFormPayload, dir: &Path) -> Result<Outcome, RunError> {
    let setup = p
        .build("normal_form")
        .map_err(|e| config_error(e.field, e.message))?;
    let (game, label_counts, label_names) = match &setup.labels {
        None => (setup.game.clone(), vec![1; setup.game.num_players()], None),
        Some(t) => (
            augment_game(&setup.game, t)?,
            t.space().label_counts(),
            Some(t.space().clone()),
        ),
    };
    let mut out = Outcome::new();
    out.note("players", game.num_players().to_string());
    out.note("pure profiles", game.num_profiles().to_string());

    let equilibria = pure_nash_equilibria(&game, p.epsilon)?;
    let mut rows = Vec::new();
    for (k, profile) in game.profiles().enumerate() {
        let sp = StrategyProfile::pure(&game, &profile)?;
        let gains = deviation_gains(&game, &sp)?;
        let is_nash = gains.iter().all(|&g| g <= p.epsilon);
        let payoffs = game.payoffs_at(&profile)?;
        for (player, &idx) in profile.iter().enumerate() {
            let (action, label) = split_augmented(idx, label_counts[player]);
            let label = label_names
                .as_ref()
                .map_or("none", |s| s.labels(player)[label].as_str());
            rows.push(vec![
                Cell::from(k),
                player.into(),
                action.into(),
                label.into(),
                payoffs[player].into(),
                gains[player].into(),
                is_nash.into(),
            ]);
        }
    }
    out.csv(dir, "pure_profiles.csv", &csv_out::PURE_PROFILES, &rows)?;
    let describe = |profile: &[usize]| -> String {
        let parts: Vec<String> = profile
            .iter()
            .enumerate()
            .map(|(player, &idx)| {
                let (a, l) = split_augmented(idx, label_counts[player]);
                match &label_names {
                    None => a.to_string(),
                    Some(s) => format!("{a}:{}", s.labels(player)[l]),
                }
            })
            .collect();
        format!("({})", parts.join(", "))
    };
    out.note(
        format!("pure {}-Nash equilibria", format_real(p.epsilon)),
        if equilibria.is_empty() {
            "none".to_string()
        } else {
            equilibria
                .iter()
                .map(|e| describe(e))
                .collect::<Vec<_>>()
                .join(" ")
        },
    );

    if let Some(strategies) = &setup.profile {
        let sp = StrategyProfile::new(strategies.clone());
        let gains = deviation_gains(&game, &sp)?;
        let mut rows = Vec::new();
        for (player, &gain) in gains.iter().enumerate() {
            let eu = expected_utility(&game, &sp, player)?;
            let (br, brv) = best_response(&game, &sp, player)?;
            rows.push(vec![
                Cell::from(player),
                eu.into(),
                br.into(),
                brv.into(),
                gain.into(),
            ]);
            out.note(
                format!("player {player} expected utility"),
                format!(
                    "{} (best response {br} worth {})",
                    format_real(eu),
                    format_real(brv)
                ),
            );
        }
        let worst = gains.iter().fold(0.0f64, |m, &g| m.max(g));
        out.note(
            "profile is epsilon-Nash",
            format!(
                "{} (max deviation gain {})",
                worst <= p.epsilon,
                format_real(worst)
            ),
        );
        out.csv(dir, "profile.csv", &csv_out::PROFILE_ANALYSIS, &rows)?;
    }
    Ok(out)
}

fn strategy_rows(strategies: &[&[f64]]) -> Vec<Vec<Cell>> {
    strategies
        .iter()
        .enumerate()
        .flat_map(|(player, probs)| {
            probs
                .iter()
                .enumerate()
                .map(move |(a, &p)| vec![Cell::from(player), a.into(), p.into()])
        })
        .collect()
}

fn run_zero_sum(p: &ZeroSumPayload, dir: &Path) -> Result<Outcome, RunError> {
    let game = p
        .build("zero_sum")
        .map_err(|e| config_error(e.field, e.message))?;
    let sol = solve_zero_sum(&game, p.tol, p.max_iter)?;
    let mut out = Outcome::new();
    // avoid printing a negative zero
    let shown = if sol.value.abs() < 5e-5 {
        0.0
    } else {
        sol.value
    };
    out.note("value", format!("{shown:.4} ± {}", format_real(p.tol)));
    out.note(
        "bounds",
        format!("[{}, {}]", format_real(sol.lower), format_real(sol.upper)),
    );
    out.note("iterations", sol.iterations.to_string());
    out.note("row strategy", fmt_vec(sol.row_strategy.probs()));
    out.note("column strategy", fmt_vec(sol.col_strategy.probs()));
    let rows = strategy_rows(&[sol.row_strategy.probs(), sol.col_strategy.probs()]);
    out.csv(dir, "strategies.csv", &csv_out::STRATEGIES, &rows)?;
    Ok(out)
}

fn run_stackelberg(p: &StackelbergPayload, dir: &Path) -> Result<Outcome, RunError> {
    let game = p
        .build("stackelberg")
        .map_err(|e| config_error(e.field, e.message))?;
    let sol = solve_stackelberg(&game, p.grid_resolution)?;
    let mut out = Outcome::new();
    out.note("leader value", format_real(sol.leader_value));
    out.note("follower value", format_real(sol.follower_value));
    out.note("leader commitment", fmt_vec(sol.leader_strategy.probs()));
    out.note("follower action", sol.follower_action.to_string());
    let follower: Vec<f64> = (0..game.action_counts()[1])
        .map(|a| if a == sol.follower_action { 1.0 } else { 0.0 })
        .collect();
    let rows = strategy_rows(&[sol.leader_strategy.probs(), &follower]);
    out.csv(dir, "strategies.csv", &csv_out::STRATEGIES, &rows)?;
    Ok(out)
}

struct ModerationResult {
    summary: Vec<(String, String)>,
    outputs: Vec<PathBuf>,
}

fn moderation_entry(
    scenario: &ModerationScenario,
    window: usize,
    dir: &Path,
    suffix: &str,
    label: &str,
) -> Result<ModerationResult, RunError> {
    let trace = simulate_moderation(scenario)?;
    let freqs = action_frequencies(&trace, window)?;
    let trace_rows: Vec<Vec<Cell>> = trace
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.round),
                r.user_type.as_str().into(),
                r.suspicious.into(),
                r.belief_post.into(),
                r.action.as_str().into(),
                r.moderator_payoff.into(),
                r.user_payoff.into(),
            ]
        })
        .collect();
    let freq_rows: Vec<Vec<Cell>> = freqs
        .iter()
        .map(|f| {
            vec![
                Cell::from(f.round),
                f.refuse.into(),
                f.filter.into(),
                f.allow.into(),
            ]
        })
        .collect();
    let mut out = Outcome::new();
    out.csv(
        dir,
        &format!("trace{suffix}.csv"),
        &csv_out::MODERATION_TRACE,
        &trace_rows,
    )?;
    out.csv(
        dir,
        &format!("frequencies{suffix}.csv"),
        &csv_out::FREQUENCY_SERIES,
        &freq_rows,
    )?;
    let overall = trace.overall_frequencies();
    let last = freqs.last().expect("window never exceeds the trace");
    let mean_payoff = trace.moderator_payoffs().iter().sum::<f64>() / trace.len() as f64;
    out.note(format!("{label}arrival_p"), format_real(scenario.arrival_p));
    out.note(
        format!("{label}overall refuse/filter/allow"),
        format!("{:.4} / {:.4} / {:.4}", overall[0], overall[1], overall[2]),
    );
    out.note(
        format!("{label}final bucket refuse/filter/allow"),
        format!(
            "{:.4} / {:.4} / {:.4}",
            last.refuse, last.filter, last.allow
        ),
    );
    out.note(
        format!("{label}mean moderator payoff"),
        format!("{mean_payoff:.4}"),
    );
    Ok(ModerationResult {
        summary: out.summary,
        outputs: out.outputs,
    })
}

fn run_moderation(p: &ModerationPayload, seed: u64, dir: &Path) -> Result<Outcome, RunError> {
    let scenarios = p
        .build("moderation", seed)
        .map_err(|e| config_error(e.field, e.message))?;
    let mut out = Outcome::new();
    out.note("rounds", p.rounds.to_string());
    if scenarios.len() == 1 {
        let r = moderation_entry(&scenarios[0], p.window, dir, "", "")?;
        out.summary.extend(r.summary);
        out.outputs.extend(r.outputs);
        return Ok(out);
    }
    // sweep entries are independent; results are merged in entry order
    let results: Vec<Result<ModerationResult, RunError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .enumerate()
            .map(|(i, s)| {
                scope.spawn(move || {
                    moderation_entry(s, p.window, dir, &format!("_{i}"), &format!("[{i}] "))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    for r in results {
        let r = r?;
        out.summary.extend(r.summary);
        out.outputs.extend(r.outputs);
    }
    Ok(out)
}

fn run_coalition(p: &CoalitionPayload, dir: &Path) -> Result<Outcome, RunError> {
    let setup = p
        .build("coalition")
        .map_err(|e| config_error(e.field, e.message))?;
    let sab = setup.sabotage.as_ref();
    let mut out = Outcome::new();
    let table = coalition_table(&setup.cf, sab);
    let rows: Vec<Vec<Cell>> = table
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.coalition.bits()),
                r.coalition.size().into(),
                r.v.into(),
                r.c.into(),
                r.v_tilde.into(),
            ]
        })
        .collect();
    out.csv(dir, "coalitions.csv", &csv_out::COALITION_TABLE, &rows)?;
    let phi = shapley(&setup.cf, sab);
    let rows: Vec<Vec<Cell>> = phi
        .0
        .iter()
        .enumerate()
        .map(|(i, &x)| vec![Cell::from(i + 1), x.into()])
        .collect();
    out.csv(dir, "allocation.csv", &csv_out::ALLOCATION, &rows)?;

    if let Some(a) = setup.effective_alpha {
        out.note("sabotage fraction after trust decay", format_real(a));
    }
    let grand = setup.cf.grand();
    out.note(
        format!("grand coalition {grand}"),
        format_real(table[grand.bits() as usize].v_tilde),
    );
    let (best, v) = best_coalition(&setup.cf, sab);
    out.note(
        "best coalition",
        format!("{best} with value {}", format_real(v)),
    );
    out.note("shapley", fmt_vec(&phi.0));
    let (name, alloc) = match &setup.allocation {
        Some(x) => ("given allocation", Allocation(x.clone())),
        None => ("shapley allocation", phi),
    };
    let check = core_contains(&setup.cf, sab, &alloc)?;
    let verdict = match check.blocking {
        _ if check.in_core => "in core".to_string(),
        Some(s) => format!(
            "not in core; blocked by {s} (deficit {}){}",
            format_real(check.deficit),
            if check.efficient {
                ""
            } else {
                "; not efficient"
            }
        ),
        None => "not in core; not efficient".to_string(),
    };
    out.note(name, verdict);
    Ok(out)
}

fn run_qlearning(p: &QLearningPayload, seed: u64, dir: &Path) -> Result<Outcome, RunError> {
    let (cfg, env) = p
        .build("qlearning", seed)
        .map_err(|e| config_error(e.field, e.message))?;
    let mut env: Box<dyn TabularEnvironment> = match env {
        EnvSetup::Moderation(s, b) => Box::new(ModerationEnv::new(s, b)?),
        EnvSetup::Matrix(g, h) => Box::new(MatrixGameEnv::new(g, h)?),
        EnvSetup::Table(t) => Box::new(t),
    };
    let TrainingOutcome { tables, curve } = train(env.as_mut(), &cfg)?;
    let mut out = Outcome::new();
    let rows: Vec<Vec<Cell>> = curve
        .iter()
        .map(|r| vec![Cell::from(r.episode), r.reward_sum.into(), r.epsilon.into()])
        .collect();
    out.csv(dir, "learning_curve.csv", &csv_out::LEARNING_CURVE, &rows)?;
    let mut rows = Vec::new();
    for (agent, q) in tables.iter().enumerate() {
        for s in 0..q.states() {
            let g = q.greedy_action(s);
            for a in 0..q.actions() {
                rows.push(vec![
                    Cell::from(agent),
                    s.into(),
                    a.into(),
                    q.get(s, a).into(),
                    (a == g).into(),
                ]);
            }
        }
    }
    out.csv(dir, "policy.csv", &csv_out::GREEDY_POLICY, &rows)?;

    let tail = curve.len().min(1000);
    let mean = curve[curve.len() - tail..]
        .iter()
        .map(|r| r.reward_sum)
        .sum::<f64>()
        / tail as f64;
    out.note("episodes", cfg.episodes.to_string());
    out.note(
        format!("mean reward, last {tail} episodes"),
        format!("{mean:.4}"),
    );
    out.note(
        "final epsilon",
        format_real(curve.last().map_or(0.0, |r| r.epsilon)),
    );
    out.note(
        "truncated episodes",
        curve.iter().filter(|r| r.truncated).count().to_string(),
    );
    for (agent, q) in tables.iter().enumerate() {
        let policy: Vec<String> = (0..q.states())
            .map(|s| q.greedy_action(s).to_string())
            .collect();
        out.note(
            format!("agent {agent} greedy policy"),
            format!("[{}]", policy.join(", ")),
        );
    }
    Ok(out)
}
