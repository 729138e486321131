use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use agentgame_ffi::*;

fn last_error() -> String {
    let p = ag_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

/// Prisoner's dilemma with action 0 = cooperate.
fn prisoners_dilemma() -> *mut AgGame {
    let counts = [2usize, 2];
    let payoffs = [3.0, 3.0, 0.0, 5.0, 5.0, 0.0, 1.0, 1.0];
    let mut game = ptr::null_mut();
    let st = unsafe {
        ag_game_new(
            2,
            counts.as_ptr(),
            payoffs.as_ptr(),
            payoffs.len(),
            &mut game,
        )
    };
    assert_eq!(st, AgStatus::Ok);
    assert!(!game.is_null());
    game
}

#[test]
fn game_queries() {
    let g = prisoners_dilemma();
    unsafe {
        assert_eq!(ag_game_num_players(g), 2);
        let defect = [0.0, 1.0, 0.0, 1.0];
        let coop = [1.0, 0.0, 1.0, 0.0];
        let mut u = 0.0;
        assert_eq!(
            ag_expected_utility(g, coop.as_ptr(), 4, 0, &mut u),
            AgStatus::Ok
        );
        assert_eq!(u, 3.0);
        let (mut a, mut v) = (9usize, 0.0);
        assert_eq!(
            ag_best_response(g, coop.as_ptr(), 4, 1, &mut a, &mut v),
            AgStatus::Ok
        );
        assert_eq!((a, v), (1, 5.0));
        let mut nash = false;
        assert_eq!(
            ag_is_epsilon_nash(g, defect.as_ptr(), 4, 0.0, &mut nash),
            AgStatus::Ok
        );
        assert!(nash);
        assert_eq!(
            ag_is_epsilon_nash(g, coop.as_ptr(), 4, 0.0, &mut nash),
            AgStatus::Ok
        );
        assert!(!nash);
        ag_game_free(g);
    }
}

#[test]
fn errors_are_reported() {
    let g = prisoners_dilemma();
    unsafe {
        let bad = [0.7, 0.7, 1.0, 0.0];
        let mut u = 0.0;
        assert_eq!(
            ag_expected_utility(g, bad.as_ptr(), 4, 0, &mut u),
            AgStatus::InvalidArgument
        );
        assert!(!last_error().is_empty());
        let ok = [1.0, 0.0, 1.0, 0.0];
        assert_eq!(
            ag_expected_utility(g, ok.as_ptr(), 3, 0, &mut u),
            AgStatus::InvalidArgument
        );
        assert_eq!(
            ag_expected_utility(ptr::null(), ok.as_ptr(), 4, 0, &mut u),
            AgStatus::NullPointer
        );
        assert_eq!(
            ag_expected_utility(g, ok.as_ptr(), 4, 0, ptr::null_mut()),
            AgStatus::NullPointer
        );
        assert_eq!(
            ag_expected_utility(g, ok.as_ptr(), 4, 5, &mut u),
            AgStatus::InvalidArgument
        );
        assert_eq!(
            ag_expected_utility(g, ok.as_ptr(), 4, 0, &mut u),
            AgStatus::Ok
        );
        assert!(ag_last_error_message().is_null());
        ag_game_free(g);
        ag_game_free(ptr::null_mut());
    }
    let counts = [2usize, 2];
    let payoffs = [1.0; 3];
    let mut g = ptr::null_mut();
    let st = unsafe { ag_game_new(2, counts.as_ptr(), payoffs.as_ptr(), 3, &mut g) };
    assert_eq!(st, AgStatus::InvalidArgument);
    assert!(g.is_null());
}

#[test]
fn zero_sum_and_non_convergence() {
    let m = [2.0, -1.0, -1.0, 1.0];
    let mut res = AgZeroSumResult::default();
    let (mut row, mut col) = ([0.0; 2], [0.0; 2]);
    let st = unsafe {
        ag_solve_zero_sum(
            2,
            2,
            m.as_ptr(),
            1e-3,
            10_000_000,
            &mut res,
            row.as_mut_ptr(),
            col.as_mut_ptr(),
        )
    };
    assert_eq!(st, AgStatus::Ok);
    assert!((res.value - 0.2).abs() < 1e-2);
    assert!(res.lower <= 0.2 + 1e-12 && 0.2 <= res.upper + 1e-12);
    assert!((row[0] - 0.4).abs() < 5e-2);

    let pennies = [1.0, -1.0, -1.0, 1.0];
    let st = unsafe {
        ag_solve_zero_sum(
            2,
            2,
            pennies.as_ptr(),
            1e-9,
            10,
            &mut res,
            row.as_mut_ptr(),
            col.as_mut_ptr(),
        )
    };
    assert_eq!(st, AgStatus::NotConverged);
    assert_eq!(res.iterations, 10);
    assert!(res.lower <= 0.0 && res.upper >= 0.0);
}

#[test]
fn bayes_and_shapley() {
    let mut post = 0.0;
    assert_eq!(
        unsafe { ag_bayes_update(0.2, true, 0.7, 0.2, &mut post) },
        AgStatus::Ok
    );
    assert!((post - 0.14 / 0.3).abs() < 1e-12);
    assert_eq!(
        unsafe { ag_bayes_update(0.2, true, 0.0, 0.0, &mut post) },
        AgStatus::DegenerateLikelihood
    );

    // three agents, pair weight 5: symmetric, each gets 15 / 3 = 5
    let values: Vec<f64> = (0u32..8)
        .map(|m| {
            let k = f64::from(m.count_ones());
            5.0 * k * (k - 1.0) / 2.0
        })
        .collect();
    let mut phi = [0.0; 3];
    assert_eq!(
        unsafe { ag_shapley(3, values.as_ptr(), phi.as_mut_ptr()) },
        AgStatus::Ok
    );
    for x in phi {
        assert!((x - 5.0).abs() < 1e-12);
    }
    assert_eq!(
        unsafe { ag_shapley(21, values.as_ptr(), phi.as_mut_ptr()) },
        AgStatus::SizeLimit
    );
}

#[test]
fn run_config_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zs.toml");
    std::fs::write(
        &cfg,
        "kind = \"zero_sum\"\nseed = 1\n[zero_sum]\nmatrix = [[1, -1], [-1, 1]]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let c_cfg = CString::new(cfg.to_str().unwrap()).unwrap();
    let c_out = CString::new(out.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { ag_run_config(c_cfg.as_ptr(), c_out.as_ptr()) },
        AgStatus::Ok
    );
    assert!(out.join("strategies.csv").exists());

    std::fs::write(&cfg, "kind = \"zero_sum\"\n").unwrap();
    assert_eq!(
        unsafe { ag_run_config(c_cfg.as_ptr(), c_out.as_ptr()) },
        AgStatus::ConfigError
    );
    assert!(last_error().contains("seed required"));
    assert_eq!(
        unsafe { ag_run_config(ptr::null(), ptr::null()) },
        AgStatus::NullPointer
    );
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ag_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/agentgame.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "ag_game_new",
        "ag_game_free",
        "ag_solve_zero_sum",
        "ag_shapley",
        "ag_run_config",
        "AG_STATUS_NOT_CONVERGED",
    ] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    // compile-check the header when a C compiler is available
    if let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(&header)
        .status()
    {
        assert!(status.success());
    }
}
