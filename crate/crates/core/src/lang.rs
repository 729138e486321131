//! Language-based payoff offsets.
//!
//! Every player attaches a label to its action. A player's total payoff is the
//! base game payoff plus an offset looked up from the full label profile;
//! unlisted profiles contribute exactly zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::NormalFormGame;

/// Finite label vocabulary for each player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<String>>", into = "Vec<Vec<String>>")]
pub struct LabelSpace {
    labels: Vec<Vec<String>>,
}

impl LabelSpace {
    pub fn new(labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(GameError::invalid("label space needs at least one player"));
        }
        for (player, set) in labels.iter().enumerate() {
            if set.is_empty() {
                return Err(GameError::invalid(format!("player {player} has no labels")));
            }
            for (i, l) in set.iter().enumerate() {
                if set[..i].contains(l) {
                    return Err(GameError::invalid(format!(
                        "player {player} lists label `{l}` twice"
                    )));
                }
            }
        }
        Ok(Self { labels })
    }

    /// One `"none"` label per player.
    pub fn unlabeled(num_players: usize) -> Self {
        Self {
            labels: vec![vec!["none".to_string()]; num_players],
        }
    }

    pub fn num_players(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self, player: usize) -> &[String] {
        &self.labels[player]
    }

    pub fn label_counts(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn index_of(&self, player: usize, label: &str) -> Result<usize> {
        let set = self
            .labels
            .get(player)
            .ok_or_else(|| GameError::invalid(format!("player {player} has no label set")))?;
        set.iter().position(|l| l == label).ok_or_else(|| {
            GameError::invalid(format!("unknown label `{label}` for player {player}"))
        })
    }

    /// Resolve a full label profile to label indices.
    pub fn resolve<S: AsRef<str>>(&self, profile: &[S]) -> Result<Vec<usize>> {
        if profile.len() != self.num_players() {
            return Err(GameError::invalid(format!(
                "label profile has {} entries, expected {}",
                profile.len(),
                self.num_players()
            )));
        }
        profile
            .iter()
            .enumerate()
            .map(|(p, l)| self.index_of(p, l.as_ref()))
            .collect()
    }
}

impl TryFrom<Vec<Vec<String>>> for LabelSpace {
    type Error = GameError;

    fn try_from(v: Vec<Vec<String>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LabelSpace> for Vec<Vec<String>> {
    fn from(s: LabelSpace) -> Self {
        s.labels
    }
}

/// Serialized form of a single offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffsetEntry {
    pub player: usize,
    pub labels: Vec<String>,
    pub offset: f64,
}

/// The offset functions `f_i` over full label profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelOffsetTable {
    space: LabelSpace,
    offsets: BTreeMap<(usize, Vec<usize>), f64>,
}

impl LabelOffsetTable {
    pub fn new(space: LabelSpace) -> Self {
        Self {
            space,
            offsets: BTreeMap::new(),
        }
    }

    pub fn from_entries(space: LabelSpace, entries: &[OffsetEntry]) -> Result<Self> {
        let mut table = Self::new(space);
        for e in entries {
            let key = table.key(e.player, &e.labels)?;
            if table.offsets.contains_key(&key) {
                return Err(GameError::invalid(format!(
                    "duplicate offset for player {} at labels {:?}",
                    e.player, e.labels
                )));
            }
            table.insert_key(key, e.offset)?;
        }
        Ok(table)
    }

    fn key<S: AsRef<str>>(&self, player: usize, labels: &[S]) -> Result<(usize, Vec<usize>)> {
        if player >= self.space.num_players() {
            return Err(GameError::invalid(format!(
                "offset player {player} out of range"
            )));
        }
        Ok((player, self.space.resolve(labels)?))
    }

    fn insert_key(&mut self, key: (usize, Vec<usize>), offset: f64) -> Result<()> {
        if !offset.is_finite() {
            return Err(GameError::invalid("label offsets must be finite"));
        }
        self.offsets.insert(key, offset);
        Ok(())
    }

    pub fn set<S: AsRef<str>>(&mut self, player: usize, labels: &[S], offset: f64) -> Result<()> {
        let key = self.key(player, labels)?;
        self.insert_key(key, offset)
    }

    pub fn space(&self) -> &LabelSpace {
        &self.space
    }

    /// Offset for `player` at a label profile given by name.
    pub fn offset<S: AsRef<str>>(&self, player: usize, labels: &[S]) -> Result<f64> {
        let key = self.key(player, labels)?;
        Ok(self.offsets.get(&key).copied().unwrap_or(0.0))
    }

    /// Offset at a label profile given by index. Indices are not validated.
    pub fn offset_at(&self, player: usize, label_indices: &[usize]) -> f64 {
        self.offsets
            .get(&(player, label_indices.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn entries(&self) -> Vec<OffsetEntry> {
        self.offsets
            .iter()
            .map(|((player, idx), &offset)| OffsetEntry {
                player: *player,
                labels: idx
                    .iter()
                    .enumerate()
                    .map(|(p, &i)| self.space.labels(p)[i].clone())
                    .collect(),
                offset,
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Base payoff plus label offset for one player at a pure action profile.
pub fn total_payoff<S: AsRef<str>>(
    game: &NormalFormGame,
    table: &LabelOffsetTable,
    actions: &[usize],
    labels: &[S],
    player: usize,
) -> Result<f64> {
    check_players(game, table)?;
    let base = game.payoff(actions, player)?;
    Ok(base + table.offset(player, labels)?)
}

fn check_players(game: &NormalFormGame, table: &LabelOffsetTable) -> Result<()> {
    if game.num_players() != table.space().num_players() {
        return Err(GameError::invalid(format!(
            "game has {} players, label space has {}",
            game.num_players(),
            table.space().num_players()
        )));
    }
    Ok(())
}

/// Index of `(action, label)` in the augmented action set of a player with
/// `num_labels` labels.
pub fn augmented_index(action: usize, label: usize, num_labels: usize) -> usize {
    action * num_labels + label
}

/// Inverse of [`augmented_index`].
pub fn split_augmented(index: usize, num_labels: usize) -> (usize, usize) {
    (index / num_labels, index % num_labels)
}

/// Expand a labeled game into an ordinary normal-form game whose action set
/// for player `i` is `actions_i × labels_i`.
pub fn augment_game(game: &NormalFormGame, table: &LabelOffsetTable) -> Result<NormalFormGame> {
    check_players(game, table)?;
    let label_counts = table.space().label_counts();
    let counts: Vec<usize> = game
        .action_counts()
        .iter()
        .zip(&label_counts)
        .map(|(&a, &l)| a.checked_mul(l))
        .collect::<Option<_>>()
        .ok_or_else(|| GameError::Size("augmented action set overflows".into()))?;
    let n = game.num_players();
    let mut actions = vec![0; n];
    let mut labels = vec![0; n];
    NormalFormGame::from_fn(counts, |profile| {
        for (p, &idx) in profile.iter().enumerate() {
            let (a, l) = split_augmented(idx, label_counts[p]);
            actions[p] = a;
            labels[p] = l;
        }
        let base = game.payoffs_at(&actions).expect("valid base profile");
        (0..n)
            .map(|p| base[p] + table.offset_at(p, &labels))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{pure_nash_equilibria, ProfileIter};
    use proptest::prelude::*;

    fn space(v: &[&[&str]]) -> LabelSpace {
        LabelSpace::new(
            v.iter()
                .map(|s| s.iter().map(|x| x.to_string()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn apology_offsets_refusal() {
        // moderator (0) actions Refuse/Filter/Allow vs legitimate user (1)
        let game = NormalFormGame::from_fn(vec![3, 1], |p| match p[0] {
            0 => vec![2.0, 0.0],
            1 => vec![1.0, 2.0],
            _ => vec![3.0, 5.0],
        })
        .unwrap();
        let mut t = LabelOffsetTable::new(space(&[&["none", "apology"], &["none"]]));
        t.set(1, &["apology", "none"], 1.0).unwrap();
        assert_eq!(
            total_payoff(&game, &t, &[0, 0], &["apology", "none"], 1).unwrap(),
            1.0
        );
        assert_eq!(
            total_payoff(&game, &t, &[0, 0], &["none", "none"], 1).unwrap(),
            0.0
        );
    }

    #[test]
    fn empty_table_is_base_game() {
        let game = NormalFormGame::from_fn(vec![2, 2], |p| vec![p[0] as f64, p[1] as f64]).unwrap();
        let t = LabelOffsetTable::new(LabelSpace::unlabeled(2));
        for p in game.profiles() {
            for pl in 0..2 {
                assert_eq!(
                    total_payoff(&game, &t, &p, &["none", "none"], pl).unwrap(),
                    game.payoff(&p, pl).unwrap()
                );
            }
        }
    }

    #[test]
    fn two_sided_label_lookup() {
        let game = NormalFormGame::from_fn(vec![1, 1], |_| vec![3.0, 1.0]).unwrap();
        let mut t = LabelOffsetTable::new(space(&[
            &["urgent", "cooperative"],
            &["fair", "manipulative"],
        ]));
        t.set(0, &["urgent", "fair"], 2.0).unwrap();
        assert_eq!(
            total_payoff(&game, &t, &[0, 0], &["urgent", "fair"], 0).unwrap(),
            5.0
        );
        assert_eq!(t.offset(0, &["urgent", "manipulative"]).unwrap(), 0.0);
    }

    #[test]
    fn unknown_label_rejected() {
        let game = NormalFormGame::from_fn(vec![1, 1], |_| vec![0.0, 0.0]).unwrap();
        let t = LabelOffsetTable::new(LabelSpace::unlabeled(2));
        assert!(matches!(
            total_payoff(&game, &t, &[0, 0], &["none", "sarcastic"], 0),
            Err(GameError::InvalidInput(_))
        ));
        let mut t = t;
        assert!(t.set(0, &["nope", "none"], 1.0).is_err());
        assert!(LabelSpace::new(vec![vec![]]).is_err());
        assert!(LabelSpace::new(vec![vec!["a".into(), "a".into()]]).is_err());
    }

    #[test]
    fn augmented_shape() {
        let game = NormalFormGame::from_fn(vec![2, 2], |_| vec![0.0, 0.0]).unwrap();
        let t = LabelOffsetTable::new(space(&[&["a", "b"], &["c", "d"]]));
        let aug = augment_game(&game, &t).unwrap();
        assert_eq!(aug.action_counts(), &[4, 4]);
        assert_eq!(aug.payoff_tensor().len(), 2 * 16);
    }

    #[test]
    fn zero_offsets_constant_across_labels() {
        let game =
            NormalFormGame::from_fn(vec![2, 2], |p| vec![p[0] as f64 - p[1] as f64, 1.0]).unwrap();
        let t = LabelOffsetTable::new(space(&[&["a", "b"], &["c", "d"]]));
        let aug = augment_game(&game, &t).unwrap();
        for p in aug.profiles() {
            let (a0, _) = split_augmented(p[0], 2);
            let (a1, _) = split_augmented(p[1], 2);
            assert_eq!(
                aug.payoffs_at(&p).unwrap(),
                game.payoffs_at(&[a0, a1]).unwrap()
            );
        }
    }

    #[test]
    fn dominant_label_always_played() {
        // label "polite" gives player 0 +10 regardless of anything else
        let game = NormalFormGame::bimatrix(
            &[vec![3.0, 0.0], vec![5.0, 1.0]],
            &[vec![3.0, 5.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let mut t = LabelOffsetTable::new(space(&[&["blunt", "polite"], &["x", "y"]]));
        for other in ["x", "y"] {
            t.set(0, &["polite", other], 10.0).unwrap();
        }
        let aug = augment_game(&game, &t).unwrap();
        let eqs = pure_nash_equilibria(&aug, 0.0).unwrap();
        assert!(!eqs.is_empty());
        // brute-force: every pure equilibrium uses label 1 for player 0
        for eq in eqs {
            assert_eq!(split_augmented(eq[0], 2).1, 1);
        }
    }

    #[test]
    fn zero_offset_projection_preserves_pure_nash() {
        let games = [
            NormalFormGame::bimatrix(
                &[vec![3.0, 0.0], vec![5.0, 1.0]],
                &[vec![3.0, 5.0], vec![0.0, 1.0]],
            )
            .unwrap(),
            NormalFormGame::bimatrix(
                &[vec![2.0, 0.0], vec![0.0, 1.0]],
                &[vec![1.0, 0.0], vec![0.0, 2.0]],
            )
            .unwrap(),
            NormalFormGame::bimatrix(
                &[vec![1.0, -1.0], vec![-1.0, 1.0]],
                &[vec![-1.0, 1.0], vec![1.0, -1.0]],
            )
            .unwrap(),
        ];
        let t = LabelOffsetTable::new(space(&[&["a", "b"], &["c", "d"]]));
        for g in games {
            let base = pure_nash_equilibria(&g, 0.0).unwrap();
            let aug = augment_game(&g, &t).unwrap();
            for p in ProfileIter::new(aug.action_counts()) {
                let actions = [split_augmented(p[0], 2).0, split_augmented(p[1], 2).0];
                let aug_prof = crate::game::StrategyProfile::pure(&aug, &p).unwrap();
                let is_ne = crate::game::is_epsilon_nash(&aug, &aug_prof, 0.0).unwrap();
                assert_eq!(is_ne, base.contains(&actions.to_vec()));
            }
        }
    }

    fn labeled_game() -> impl Strategy<Value = (NormalFormGame, LabelOffsetTable)> {
        (
            proptest::collection::vec(-5i32..=5, 2 * 3 * 2),
            proptest::collection::vec(-3i32..=3, 2 * 2 * 3),
        )
            .prop_map(|(payoffs, offs)| {
                let g =
                    NormalFormGame::new(vec![2, 3], payoffs.into_iter().map(f64::from).collect())
                        .unwrap();
                let mut t = LabelOffsetTable::new(space(&[&["p", "q"], &["r", "s", "u"]]));
                let mut k = 0;
                for player in 0..2 {
                    for l0 in ["p", "q"] {
                        for l1 in ["r", "s", "u"] {
                            if offs[k] != 0 {
                                t.set(player, &[l0, l1], f64::from(offs[k]) * 0.5).unwrap();
                            }
                            k += 1;
                        }
                    }
                }
                (g, t)
            })
    }

    proptest! {
        #[test]
        fn augmented_reads_total_payoff_exactly((g, t) in labeled_game()) {
            let aug = augment_game(&g, &t).unwrap();
            for p in aug.profiles() {
                let (a0, l0) = split_augmented(p[0], 2);
                let (a1, l1) = split_augmented(p[1], 3);
                let names = [t.space().labels(0)[l0].clone(), t.space().labels(1)[l1].clone()];
                for player in 0..2 {
                    let direct = total_payoff(&g, &t, &[a0, a1], &names, player).unwrap();
                    prop_assert_eq!(aug.payoffs_at(&p).unwrap()[player].to_bits(), direct.to_bits());
                }
            }
        }

        #[test]
        fn label_difference_independent_of_actions((g, t) in labeled_game()) {
            let lp = [["p", "r"], ["q", "u"]];
            for player in 0..2 {
                let diffs: Vec<f64> = g.profiles().map(|a| {
                    total_payoff(&g, &t, &a, &lp[0], player).unwrap()
                        - total_payoff(&g, &t, &a, &lp[1], player).unwrap()
                }).collect();
                for d in &diffs {
                    prop_assert!((d - diffs[0]).abs() < 1e-12);
                }
            }
        }
    }
}
