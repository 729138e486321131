//! C ABI over the `agentgame` engine.
//!
//! Every fallible function returns an [`AgStatus`]; results are written
//! through caller-provided out-pointers only on success. After a failure,
//! [`ag_last_error_message`] describes the error on the calling thread.
//! Normal-form games are passed around as opaque [`AgGame`] handles that the
//! caller releases with [`ag_game_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use agentgame::belief::{bayes_update, BeliefState, SignalModel};
use agentgame::coalition::{shapley, CharacteristicFunction, MAX_AGENTS};
use agentgame::config::load_config;
use agentgame::run::run;
use agentgame::{
    best_response, expected_utility, is_epsilon_nash, solve_zero_sum, GameError, MixedStrategy,
    NormalFormGame, RunError, StrategyProfile, ZeroSumGame,
};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeLimit = 3,
    NotConverged = 4,
    InfeasibleResolution = 5,
    DegenerateLikelihood = 6,
    ConfigError = 7,
    IoError = 8,
    Panic = 9,
}

/// Opaque normal-form game.
pub struct AgGame {
    game: NormalFormGame,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn game_status(e: &GameError) -> AgStatus {
    match e {
        GameError::InvalidInput(_) => AgStatus::InvalidArgument,
        GameError::Size(_) => AgStatus::SizeLimit,
        GameError::NotConverged { .. } => AgStatus::NotConverged,
        GameError::InfeasibleResolution(_) => AgStatus::InfeasibleResolution,
        GameError::DegenerateLikelihood => AgStatus::DegenerateLikelihood,
        GameError::Config(_) => AgStatus::ConfigError,
    }
}

fn run_status(e: &RunError) -> AgStatus {
    match e {
        RunError::Parse { .. } | RunError::Field { .. } => AgStatus::ConfigError,
        RunError::Io { .. } | RunError::Csv { .. } => AgStatus::IoError,
        RunError::Game(g) => game_status(g),
    }
}

struct Failure(AgStatus, String);

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        Failure(game_status(&e), e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure(run_status(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AgStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(AgStatus::InvalidArgument, msg.into())
}

/// Run `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AgStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `ptr` must be null or valid for `len` writes.
unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

/// # Safety
/// `ptr` must be null or point to a live handle.
unsafe fn game_ref<'a>(ptr: *const AgGame) -> Result<&'a NormalFormGame, Failure> {
    ptr.as_ref().map(|g| &g.game).ok_or_else(|| null("game"))
}

fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: checked non-null; the caller guarantees validity.
    unsafe { out.write(value) };
    Ok(())
}

/// Split a concatenated probability buffer into one strategy per player.
fn profile_from(game: &NormalFormGame, probs: &[f64]) -> Result<StrategyProfile, Failure> {
    let total: usize = game.action_counts().iter().sum();
    if probs.len() != total {
        return Err(invalid(format!(
            "strategy buffer has {} entries, expected {total}",
            probs.len()
        )));
    }
    let mut offset = 0;
    let mut strategies = Vec::with_capacity(game.num_players());
    for &k in game.action_counts() {
        strategies.push(MixedStrategy::new(probs[offset..offset + k].to_vec())?);
        offset += k;
    }
    Ok(StrategyProfile::new(strategies))
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ag_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ag_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains NUL"),
        };
    VERSION.as_ptr()
}

/// Create a game from `num_players` action counts and a row-major payoff
/// tensor of `num_profiles * num_players` entries.
///
/// # Safety
/// `action_counts` must be valid for `num_players` reads, `payoffs` for
/// `payoffs_len` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn ag_game_new(
    num_players: usize,
    action_counts: *const usize,
    payoffs: *const f64,
    payoffs_len: usize,
    out: *mut *mut AgGame,
) -> AgStatus {
    guard(|| {
        let counts = slice(action_counts, num_players, "action_counts")?;
        let payoffs = slice(payoffs, payoffs_len, "payoffs")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let game = NormalFormGame::new(counts.to_vec(), payoffs.to_vec())?;
        write_out(out, Box::into_raw(Box::new(AgGame { game })), "out")
    })
}

/// Release a game handle. Null is ignored.
///
/// # Safety
/// `game` must be null or a handle from [`ag_game_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ag_game_free(game: *mut AgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of players, or 0 for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ag_game_num_players(game: *const AgGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.num_players())
}

/// Expected payoff of `player` under a mixed profile given as the
/// concatenation of every player's probability vector.
///
/// # Safety
/// `game` must be a live handle, `strategies` valid for `strategies_len`
/// reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn ag_expected_utility(
    game: *const AgGame,
    strategies: *const f64,
    strategies_len: usize,
    player: usize,
    out: *mut f64,
) -> AgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let profile = profile_from(g, slice(strategies, strategies_len, "strategies")?)?;
        write_out(out, expected_utility(g, &profile, player)?, "out")
    })
}

/// Pure best response of `player` (lowest index on ties) and its value.
///
/// # Safety
/// As for [`ag_expected_utility`]; `out_action` and `out_value` must be valid
/// for one write each.
#[no_mangle]
pub unsafe extern "C" fn ag_best_response(
    game: *const AgGame,
    strategies: *const f64,
    strategies_len: usize,
    player: usize,
    out_action: *mut usize,
    out_value: *mut f64,
) -> AgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let profile = profile_from(g, slice(strategies, strategies_len, "strategies")?)?;
        let (a, v) = best_response(g, &profile, player)?;
        if out_action.is_null() || out_value.is_null() {
            return Err(null("out_action/out_value"));
        }
        write_out(out_action, a, "out_action")?;
        write_out(out_value, v, "out_value")
    })
}

/// Whether no player can gain more than `epsilon` by deviating.
///
/// # Safety
/// As for [`ag_expected_utility`].
#[no_mangle]
pub unsafe extern "C" fn ag_is_epsilon_nash(
    game: *const AgGame,
    strategies: *const f64,
    strategies_len: usize,
    epsilon: f64,
    out: *mut bool,
) -> AgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let profile = profile_from(g, slice(strategies, strategies_len, "strategies")?)?;
        write_out(out, is_epsilon_nash(g, &profile, epsilon)?, "out")
    })
}

/// Result of [`ag_solve_zero_sum`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AgZeroSumResult {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

/// Solve a zero-sum matrix game (row player maximizes) by fictitious play.
/// `matrix` is row-major. On success the strategies are written to
/// `out_row` (`rows` entries) and `out_col` (`cols` entries). On
/// `AG_STATUS_NOT_CONVERGED` only `out` is written and carries the bounds
/// reached.
///
/// # Safety
/// `matrix` must be valid for `rows * cols` reads, `out` for one write and
/// the strategy buffers for their lengths.
#[no_mangle]
pub unsafe extern "C" fn ag_solve_zero_sum(
    rows: usize,
    cols: usize,
    matrix: *const f64,
    tol: f64,
    max_iter: usize,
    out: *mut AgZeroSumResult,
    out_row: *mut f64,
    out_col: *mut f64,
) -> AgStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure(AgStatus::SizeLimit, "matrix size overflows".into()))?;
        let flat = slice(matrix, len, "matrix")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = flat.chunks(cols.max(1)).map(<[f64]>::to_vec).collect();
        let game = ZeroSumGame::new(m)?;
        match solve_zero_sum(&game, tol, max_iter) {
            Ok(sol) => {
                let r = slice_mut(out_row, rows, "out_row")?;
                let c = slice_mut(out_col, cols, "out_col")?;
                r.copy_from_slice(sol.row_strategy.probs());
                c.copy_from_slice(sol.col_strategy.probs());
                let res = AgZeroSumResult {
                    value: sol.value,
                    lower: sol.lower,
                    upper: sol.upper,
                    iterations: sol.iterations,
                };
                write_out(out, res, "out")
            }
            Err(
                e @ GameError::NotConverged {
                    lower,
                    upper,
                    iterations,
                },
            ) => {
                let res = AgZeroSumResult {
                    value: 0.5 * (lower + upper),
                    lower,
                    upper,
                    iterations,
                };
                write_out(out, res, "out")?;
                Err(e.into())
            }
            Err(e) => Err(e.into()),
        }
    })
}

/// Posterior probability of an adversarial user after one signal.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ag_bayes_update(
    beta: f64,
    suspicious: bool,
    q_adv: f64,
    q_leg: f64,
    out: *mut f64,
) -> AgStatus {
    guard(|| {
        let model = SignalModel::new(q_adv, q_leg)?;
        let post = bayes_update(BeliefState::new(beta)?, suspicious, &model)?;
        write_out(out, post.value(), "out")
    })
}

/// Shapley value of an `n`-agent game given by `values[mask]` for every
/// subset bitmask (bit `i` is agent `i`). Writes `n` entries to `out`.
///
/// # Safety
/// `values` must be valid for `2^n` reads and `out` for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn ag_shapley(n: usize, values: *const f64, out: *mut f64) -> AgStatus {
    guard(|| {
        if n == 0 || n > MAX_AGENTS {
            return Err(Failure(
                AgStatus::SizeLimit,
                format!("agent count must lie in 1..={MAX_AGENTS}, got {n}"),
            ));
        }
        let table = slice(values, 1usize << n, "values")?;
        let cf = CharacteristicFunction::from_table(n, table.to_vec())?;
        let phi = shapley(&cf, None);
        slice_mut(out, n, "out")?.copy_from_slice(&phi.0);
        Ok(())
    })
}

/// Load the scenario file at `config_path` and run it, writing outputs to
/// `out_dir` (or the scenario's own output directory when null).
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_dir` must be null or
/// NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ag_run_config(
    config_path: *const c_char,
    out_dir: *const c_char,
) -> AgStatus {
    guard(|| {
        if config_path.is_null() {
            return Err(null("config_path"));
        }
        let cfg = CStr::from_ptr(config_path)
            .to_str()
            .map_err(|_| invalid("config_path is not UTF-8"))?;
        let dir = if out_dir.is_null() {
            None
        } else {
            Some(
                CStr::from_ptr(out_dir)
                    .to_str()
                    .map_err(|_| invalid("out_dir is not UTF-8"))?,
            )
        };
        let scenario = load_config(Path::new(cfg))?;
        run(&scenario, dir.map(Path::new))?;
        Ok(())
    })
}
