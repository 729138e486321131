//! Cooperative games with sabotage.
//!
//! Coalitions are bitmasks over at most [`MAX_AGENTS`] agents; bit `i` is agent
//! `i` (0-based). Human-facing output numbers agents from 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

pub const MAX_AGENTS: usize = 20;

/// Tolerance for efficiency, blocking and value ties.
pub const COALITION_TOL: f64 = 1e-9;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct Coalition(pub u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn grand(n: usize) -> Self {
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn from_members(members: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &m in members {
            if m >= MAX_AGENTS {
                return Err(GameError::invalid(format!("agent index {m} too large")));
            }
            bits |= 1 << m;
        }
        Ok(Coalition(bits))
    }

    /// Build from 1-based agent numbers.
    pub fn from_agents(agents: &[usize]) -> Result<Self> {
        if agents.contains(&0) {
            return Err(GameError::invalid("agents are numbered from 1"));
        }
        Self::from_members(&agents.iter().map(|a| a - 1).collect::<Vec<_>>())
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, agent: usize) -> bool {
        agent < 32 && self.0 & (1 << agent) != 0
    }

    pub fn with(self, agent: usize) -> Self {
        Coalition(self.0 | (1 << agent))
    }

    pub fn overlaps(self, other: Coalition) -> bool {
        self.0 & other.0 != 0
    }

    /// 0-based members in increasing order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.0 & (1 << i) != 0)
    }

    /// Order by size, then lexicographically by sorted member list.
    pub fn canonical_cmp(self, other: Coalition) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.members().cmp(other.members()))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", m + 1)?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValueForm {
    /// `values[mask]` for every subset.
    Explicit(Vec<f64>),
    /// Weight earned by each cooperating pair.
    PairwiseSynergy(f64),
}

/// The baseline value `v(S)` of every coalition.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFunction {
    n: usize,
    form: ValueForm,
}

fn check_agents(n: usize) -> Result<()> {
    if n == 0 {
        return Err(GameError::invalid(
            "a cooperative game needs at least one agent",
        ));
    }
    if n > MAX_AGENTS {
        return Err(GameError::Size(format!(
            "{n} agents exceeds the exact-enumeration limit of {MAX_AGENTS}; \
             sampling-based estimates are not supported"
        )));
    }
    Ok(())
}

impl CharacteristicFunction {
    pub fn pairwise(n: usize, weight: f64) -> Result<Self> {
        check_agents(n)?;
        if !weight.is_finite() {
            return Err(GameError::invalid("pair weight must be finite"));
        }
        Ok(Self {
            n,
            form: ValueForm::PairwiseSynergy(weight),
        })
    }

    /// Explicit table; subsets that are not listed are worth 0.
    pub fn explicit(n: usize, values: &BTreeMap<Coalition, f64>) -> Result<Self> {
        check_agents(n)?;
        let grand = Coalition::grand(n);
        let mut table = vec![0.0; 1 << n];
        for (&s, &v) in values {
            if s.0 & !grand.0 != 0 {
                return Err(GameError::invalid(format!(
                    "coalition {s} references an agent beyond {n}"
                )));
            }
            if !v.is_finite() {
                return Err(GameError::invalid(format!("value of {s} is not finite")));
            }
            if s == Coalition::EMPTY && v != 0.0 {
                return Err(GameError::invalid("the empty coalition must be worth 0"));
            }
            table[s.0 as usize] = v;
        }
        Ok(Self {
            n,
            form: ValueForm::Explicit(table),
        })
    }

    /// Explicit table from a full `2^n` vector indexed by bitmask.
    pub fn from_table(n: usize, table: Vec<f64>) -> Result<Self> {
        check_agents(n)?;
        if table.len() != 1 << n {
            return Err(GameError::invalid(format!(
                "value table has {} entries, expected {}",
                table.len(),
                1usize << n
            )));
        }
        if table[0] != 0.0 {
            return Err(GameError::invalid("the empty coalition must be worth 0"));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(GameError::invalid("coalition values must be finite"));
        }
        Ok(Self {
            n,
            form: ValueForm::Explicit(table),
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> &ValueForm {
        &self.form
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.n)
    }

    fn check(&self, s: Coalition) -> Result<()> {
        if s.0 & !self.grand().0 != 0 {
            return Err(GameError::invalid(format!(
                "coalition {s} references an agent beyond {}",
                self.n
            )));
        }
        Ok(())
    }

    fn base_unchecked(&self, s: Coalition) -> f64 {
        match &self.form {
            ValueForm::Explicit(t) => t[s.0 as usize],
            ValueForm::PairwiseSynergy(w) => {
                let k = s.size() as f64;
                w * k * (k - 1.0) / 2.0
            }
        }
    }

    /// Baseline value `v(S)`.
    pub fn base(&self, s: Coalition) -> Result<f64> {
        self.check(s)?;
        Ok(self.base_unchecked(s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SabotageMode {
    /// `c(S) = alpha * v(S)` whenever `S` contains a malicious agent.
    Fractional(f64),
    /// Explicit costs; unlisted subsets cost 0.
    Explicit(BTreeMap<Coalition, f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SabotageModel {
    pub malicious: Coalition,
    pub mode: SabotageMode,
}

impl SabotageModel {
    pub fn fractional(malicious: Coalition, alpha: f64) -> Result<Self> {
        let m = Self {
            malicious,
            mode: SabotageMode::Fractional(alpha),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn explicit(malicious: Coalition, costs: BTreeMap<Coalition, f64>) -> Result<Self> {
        let m = Self {
            malicious,
            mode: SabotageMode::Explicit(costs),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.mode {
            SabotageMode::Fractional(a) if !(0.0..=1.0).contains(a) => Err(GameError::invalid(
                format!("sabotage fraction must lie in [0, 1], got {a}"),
            )),
            SabotageMode::Explicit(costs) => {
                for (s, c) in costs {
                    if !(c.is_finite() && *c >= 0.0) {
                        return Err(GameError::invalid(format!(
                            "sabotage cost of {s} must be finite and non-negative"
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn cost(&self, s: Coalition, base: f64) -> f64 {
        match &self.mode {
            SabotageMode::Fractional(alpha) => {
                if s.overlaps(self.malicious) {
                    alpha * base
                } else {
                    0.0
                }
            }
            SabotageMode::Explicit(costs) => costs.get(&s).copied().unwrap_or(0.0),
        }
    }
}

/// Sabotage cost `c(S)`; zero when no model is given.
pub fn sabotage_cost(
    cf: &CharacteristicFunction,
    sab: Option<&SabotageModel>,
    s: Coalition,
) -> Result<f64> {
    let base = cf.base(s)?;
    Ok(sab.map_or(0.0, |m| m.cost(s, base)))
}

/// Sabotage-adjusted value `v(S) - c(S)`.
pub fn value(
    cf: &CharacteristicFunction,
    sab: Option<&SabotageModel>,
    s: Coalition,
) -> Result<f64> {
    let base = cf.base(s)?;
    Ok(base - sab.map_or(0.0, |m| m.cost(s, base)))
}

/// Adjusted values of every subset, indexed by bitmask.
pub fn value_table(cf: &CharacteristicFunction, sab: Option<&SabotageModel>) -> Vec<f64> {
    (0..1u32 << cf.n)
        .map(|m| {
            let s = Coalition(m);
            let base = cf.base_unchecked(s);
            base - sab.map_or(0.0, |model| model.cost(s, base))
        })
        .collect()
}

/// Geometric decay of the sabotage fraction as integrity checks pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustSchedule {
    pub alpha0: f64,
    pub rho: f64,
    #[serde(default)]
    pub alpha_min: f64,
}

impl TrustSchedule {
    pub fn new(alpha0: f64, rho: f64, alpha_min: f64) -> Result<Self> {
        let t = Self {
            alpha0,
            rho,
            alpha_min,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha0) {
            return Err(GameError::invalid("alpha0 must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(GameError::invalid("rho must lie in [0, 1]"));
        }
        if !(self.alpha_min >= 0.0 && self.alpha_min.is_finite()) {
            return Err(GameError::invalid("alpha_min must be non-negative"));
        }
        Ok(())
    }
}

/// Sabotage fraction after `k` verified rounds.
pub fn apply_trust(schedule: &TrustSchedule, k: u32) -> f64 {
    let decayed = schedule.alpha0 * schedule.rho.powi(k.min(i32::MAX as u32) as i32);
    decayed.max(schedule.alpha_min)
}

/// Payoff vector over agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation(pub Vec<f64>);

impl Allocation {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn coalition_total(&self, s: Coalition) -> f64 {
        s.members().map(|i| self.0[i]).sum()
    }
}

/// Exact Shapley value via the subset-weighted formula.
pub fn shapley(cf: &CharacteristicFunction, sab: Option<&SabotageModel>) -> Allocation {
    let n = cf.n;
    let values = value_table(cf, sab);
    // weight[k] = k! (n-k-1)! / n!
    let mut weight = vec![0.0; n];
    weight[0] = 1.0 / n as f64;
    for k in 1..n {
        weight[k] = weight[k - 1] * k as f64 / (n - k) as f64;
    }
    let mut phi = vec![0.0; n];
    for (i, slot) in phi.iter_mut().enumerate() {
        let bit = 1u32 << i;
        let mut acc = 0.0;
        for mask in 0..1u32 << n {
            if mask & bit != 0 {
                continue;
            }
            let k = mask.count_ones() as usize;
            acc += weight[k] * (values[(mask | bit) as usize] - values[mask as usize]);
        }
        *slot = acc;
    }
    Allocation(phi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreCheck {
    pub in_core: bool,
    pub efficient: bool,
    /// Coalition with the largest positive deficit `v(S) - x(S)`.
    pub blocking: Option<Coalition>,
    pub deficit: f64,
}

/// Check core membership. The blocking witness is the coalition with the
/// largest deficit; ties go to the smaller coalition, then to the
/// lexicographically smaller member list.
pub fn core_contains(
    cf: &CharacteristicFunction,
    sab: Option<&SabotageModel>,
    allocation: &Allocation,
) -> Result<CoreCheck> {
    if allocation.0.len() != cf.n {
        return Err(GameError::invalid(format!(
            "allocation has {} entries for {} agents",
            allocation.0.len(),
            cf.n
        )));
    }
    if allocation.0.iter().any(|x| !x.is_finite()) {
        return Err(GameError::invalid("allocation entries must be finite"));
    }
    let values = value_table(cf, sab);
    let efficient = (allocation.total() - values[cf.grand().0 as usize]).abs() <= COALITION_TOL;
    let mut best: Option<(Coalition, f64)> = None;
    for mask in 1..1u32 << cf.n {
        let s = Coalition(mask);
        let deficit = values[mask as usize] - allocation.coalition_total(s);
        if deficit <= COALITION_TOL {
            continue;
        }
        let better = match best {
            None => true,
            Some((b, d)) => {
                if (deficit - d).abs() <= 1e-12 {
                    s.canonical_cmp(b) == Ordering::Less
                } else {
                    deficit > d
                }
            }
        };
        if better {
            best = Some((s, deficit));
        }
    }
    Ok(CoreCheck {
        in_core: efficient && best.is_none(),
        efficient,
        blocking: best.map(|(s, _)| s),
        deficit: best.map_or(0.0, |(_, d)| d),
    })
}

/// Coalition with the highest adjusted value; ties go to the smaller
/// coalition, then to the lexicographically smaller member list.
pub fn best_coalition(
    cf: &CharacteristicFunction,
    sab: Option<&SabotageModel>,
) -> (Coalition, f64) {
    let values = value_table(cf, sab);
    let mut best = (Coalition::EMPTY, values[0]);
    for mask in 1..1u32 << cf.n {
        let s = Coalition(mask);
        let v = values[mask as usize];
        let better = if (v - best.1).abs() <= COALITION_TOL {
            s.canonical_cmp(best.0) == Ordering::Less
        } else {
            v > best.1
        };
        if better {
            best = (s, v);
        }
    }
    best
}

/// One row of the subset table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalitionRow {
    pub coalition: Coalition,
    pub v: f64,
    pub c: f64,
    pub v_tilde: f64,
}

/// `v`, `c` and adjusted value for every subset in bitmask order.
pub fn coalition_table(
    cf: &CharacteristicFunction,
    sab: Option<&SabotageModel>,
) -> Vec<CoalitionRow> {
    (0..1u32 << cf.n)
        .map(|m| {
            let s = Coalition(m);
            let v = cf.base_unchecked(s);
            let c = sab.map_or(0.0, |model| model.cost(s, v));
            CoalitionRow {
                coalition: s,
                v,
                c,
                v_tilde: v - c,
            }
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Five subsystems, pair weight 5, subsystem 3 malicious.
    pub fn five_agent(alpha: f64) -> (CharacteristicFunction, SabotageModel) {
        (
            CharacteristicFunction::pairwise(5, 5.0).unwrap(),
            SabotageModel::fractional(Coalition::from_agents(&[3]).unwrap(), alpha).unwrap(),
        )
    }

    /// Permutation-average Shapley oracle over all n! orderings (Heap's
    /// algorithm), independent of the subset-weight formula.
    pub fn shapley_by_permutations(n: usize, v: impl Fn(Coalition) -> f64) -> Vec<f64> {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut phi = vec![0.0; n];
        let mut count = 0usize;
        let mut visit = |p: &[usize]| {
            let mut s = Coalition::EMPTY;
            for &i in p {
                let next = s.with(i);
                phi[i] += v(next) - v(s);
                s = next;
            }
            count += 1;
        };
        let mut c = vec![0usize; n];
        visit(&perm);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                visit(&perm);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        phi.iter().map(|x| x / count as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn agents(a: &[usize]) -> Coalition {
        Coalition::from_agents(a).unwrap()
    }

    #[test]
    fn pairwise_values() {
        let (cf, sab) = five_agent(0.4);
        assert_eq!(value(&cf, None, agents(&[1, 2, 4, 5])).unwrap(), 30.0);
        assert_eq!(value(&cf, None, agents(&[1, 2, 3, 4, 5])).unwrap(), 50.0);
        assert_eq!(
            sabotage_cost(&cf, Some(&sab), agents(&[1, 2, 3, 4, 5])).unwrap(),
            20.0
        );
        assert_eq!(
            value(&cf, Some(&sab), agents(&[1, 2, 3, 4, 5])).unwrap(),
            30.0
        );
        assert_eq!(value(&cf, Some(&sab), agents(&[1, 2, 4, 5])).unwrap(), 30.0);
        for i in 1..=5 {
            assert_eq!(value(&cf, None, agents(&[i])).unwrap(), 0.0);
        }
    }

    #[test]
    fn explicit_grand_coalition_forty() {
        let mut t = BTreeMap::new();
        t.insert(agents(&[1, 2, 3, 4, 5]), 40.0);
        let cf = CharacteristicFunction::explicit(5, &t).unwrap();
        let sab = SabotageModel::fractional(agents(&[3]), 0.5).unwrap();
        assert_eq!(
            value(&cf, Some(&sab), agents(&[1, 2, 3, 4, 5])).unwrap(),
            20.0
        );
    }

    #[test]
    fn out_of_range_subset() {
        let (cf, _) = five_agent(0.4);
        assert!(value(&cf, None, Coalition::from_members(&[5]).unwrap()).is_err());
        assert!(matches!(
            CharacteristicFunction::pairwise(21, 1.0),
            Err(GameError::Size(_))
        ));
        let mut t = BTreeMap::new();
        t.insert(Coalition::EMPTY, 1.0);
        assert!(CharacteristicFunction::explicit(2, &t).is_err());
    }

    #[test]
    fn explicit_sabotage_costs() {
        let cf = CharacteristicFunction::pairwise(3, 2.0).unwrap();
        let mut costs = BTreeMap::new();
        costs.insert(agents(&[1, 2, 3]), 1.5);
        let sab = SabotageModel::explicit(agents(&[2]), costs).unwrap();
        assert_eq!(value(&cf, Some(&sab), agents(&[1, 2, 3])).unwrap(), 4.5);
        assert_eq!(value(&cf, Some(&sab), agents(&[1, 2])).unwrap(), 2.0);
        let mut neg = BTreeMap::new();
        neg.insert(agents(&[1]), -1.0);
        assert!(SabotageModel::explicit(agents(&[1]), neg).is_err());
        assert!(SabotageModel::fractional(agents(&[1]), 1.5).is_err());
    }

    #[test]
    fn trust_schedule() {
        let t = TrustSchedule::new(0.5, 0.8, 0.0).unwrap();
        assert_eq!(apply_trust(&t, 0), 0.5);
        assert!((apply_trust(&t, 3) - 0.256).abs() < 1e-12);
        let flat = TrustSchedule::new(0.4, 1.0, 0.0).unwrap();
        for k in [0, 1, 10, 1000] {
            assert_eq!(apply_trust(&flat, k), 0.4);
        }
        let floored = TrustSchedule::new(0.5, 0.5, 0.1).unwrap();
        assert_eq!(apply_trust(&floored, 10), 0.1);
        assert!(TrustSchedule::new(0.5, 1.2, 0.0).is_err());
    }

    #[test]
    fn symmetric_pairwise_shapley() {
        let cf = CharacteristicFunction::pairwise(4, 5.0).unwrap();
        let phi = shapley(&cf, None);
        for x in &phi.0 {
            assert!((x - 7.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dummy_gets_zero() {
        // agent 3 (index 2) adds nothing anywhere
        let mut t = BTreeMap::new();
        t.insert(agents(&[1, 2]), 6.0);
        t.insert(agents(&[1, 2, 3]), 6.0);
        t.insert(agents(&[1]), 1.0);
        t.insert(agents(&[1, 3]), 1.0);
        let cf = CharacteristicFunction::explicit(3, &t).unwrap();
        let phi = shapley(&cf, None);
        assert!(phi.0[2].abs() < 1e-12);
        assert!((phi.total() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn sabotaged_shapley_matches_permutations() {
        let (cf, sab) = five_agent(0.4);
        let phi = shapley(&cf, Some(&sab));
        let oracle = shapley_by_permutations(5, |s| value(&cf, Some(&sab), s).unwrap());
        for (a, b) in phi.0.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sabotaged_game_blocks_agent_three_payments() {
        let (cf, sab) = five_agent(0.4);
        let eps = 1.0;
        let x = Allocation(vec![7.5, 7.5, eps, 7.5, 7.5 - eps]);
        let check = core_contains(&cf, Some(&sab), &x).unwrap();
        assert!(check.efficient);
        assert!(!check.in_core);
        assert_eq!(check.blocking, Some(agents(&[1, 2, 4, 5])));
        assert!((check.deficit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_split_of_pair() {
        let mut t = BTreeMap::new();
        t.insert(agents(&[1, 2]), 10.0);
        let cf = CharacteristicFunction::explicit(2, &t).unwrap();
        let check = core_contains(&cf, None, &Allocation(vec![5.0, 5.0])).unwrap();
        assert!(check.in_core);
        assert_eq!(check.blocking, None);
    }

    #[test]
    fn inefficient_allocations_rejected() {
        let mut t = BTreeMap::new();
        t.insert(agents(&[1, 2]), 10.0);
        let cf = CharacteristicFunction::explicit(2, &t).unwrap();
        for x in [vec![6.0, 6.0], vec![4.0, 5.0]] {
            assert!(!core_contains(&cf, None, &Allocation(x)).unwrap().in_core);
        }
        assert!(core_contains(&cf, None, &Allocation(vec![1.0])).is_err());
    }

    #[test]
    fn best_coalition_excludes_saboteur() {
        let (cf, sab) = five_agent(0.4);
        assert_eq!(
            best_coalition(&cf, Some(&sab)),
            (agents(&[1, 2, 4, 5]), 30.0)
        );
        let (cf, sab) = five_agent(0.5);
        assert_eq!(value(&cf, Some(&sab), cf.grand()).unwrap(), 25.0);
        assert_eq!(
            best_coalition(&cf, Some(&sab)),
            (agents(&[1, 2, 4, 5]), 30.0)
        );
        let (cf, _) = five_agent(0.0);
        assert_eq!(best_coalition(&cf, None), (cf.grand(), 50.0));
    }

    #[test]
    fn table_has_every_subset() {
        let (cf, sab) = five_agent(0.4);
        let rows = coalition_table(&cf, Some(&sab));
        assert_eq!(rows.len(), 32);
        assert_eq!(rows[31].v, 50.0);
        assert_eq!(rows[31].c, 20.0);
        assert_eq!(rows[31].v_tilde, 30.0);
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(agents(&[1, 2, 4, 5]).to_string(), "{1,2,4,5}");
        assert_eq!(Coalition::EMPTY.to_string(), "{}");
    }

    #[test]
    fn canonical_order() {
        assert_eq!(
            agents(&[1, 4]).canonical_cmp(agents(&[2, 3])),
            Ordering::Less
        );
        assert_eq!(agents(&[5]).canonical_cmp(agents(&[1, 2])), Ordering::Less);
    }

    fn random_game() -> impl Strategy<Value = CharacteristicFunction> {
        (1usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(-10.0f64..10.0, (1 << n) - 1).prop_map(move |vals| {
                let mut table = vec![0.0];
                table.extend(vals);
                CharacteristicFunction::from_table(n, table).unwrap()
            })
        })
    }

    /// Naive core check straight from the definition.
    fn naive_core(cf: &CharacteristicFunction, x: &Allocation) -> bool {
        let n = cf.n_agents();
        let grand = value(cf, None, cf.grand()).unwrap();
        if (x.0.iter().sum::<f64>() - grand).abs() > COALITION_TOL {
            return false;
        }
        for mask in 1..(1u32 << n) {
            let mut total = 0.0;
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    total += x.0[i];
                }
            }
            if total + COALITION_TOL < value(cf, None, Coalition(mask)).unwrap() {
                return false;
            }
        }
        true
    }

    proptest! {
        #[test]
        fn shapley_formula_matches_permutation_oracle(cf in random_game()) {
            let phi = shapley(&cf, None);
            let oracle = shapley_by_permutations(cf.n_agents(), |s| value(&cf, None, s).unwrap());
            for (a, b) in phi.0.iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            prop_assert!((phi.total() - value(&cf, None, cf.grand()).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn core_matches_naive(cf in random_game(), seed in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let n = cf.n_agents();
            // half the time use the Shapley vector, otherwise an efficient perturbation
            let phi = shapley(&cf, None);
            let mut x = phi.0.clone();
            if seed[0] > 0.0 && n > 1 {
                x[0] += seed[1];
                x[n - 1] -= seed[1];
            }
            let x = Allocation(x);
            prop_assert_eq!(core_contains(&cf, None, &x).unwrap().in_core, naive_core(&cf, &x));
        }

        #[test]
        fn sabotage_monotone_in_alpha(a in 0.0f64..=1.0, b in 0.0f64..=1.0, mask in 1u32..32) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let cf = CharacteristicFunction::pairwise(5, 5.0).unwrap();
            let s = Coalition(mask);
            prop_assume!(s.contains(2));
            let m_lo = SabotageModel::fractional(Coalition::from_members(&[2]).unwrap(), lo).unwrap();
            let m_hi = SabotageModel::fractional(Coalition::from_members(&[2]).unwrap(), hi).unwrap();
            prop_assert!(value(&cf, Some(&m_hi), s).unwrap() <= value(&cf, Some(&m_lo), s).unwrap());
        }

        #[test]
        fn trust_nonincreasing(a0 in 0.0f64..=1.0, rho in 0.0f64..=1.0, floor in 0.0f64..0.5, k in 0u32..200) {
            let t = TrustSchedule::new(a0, rho, floor).unwrap();
            prop_assert!(apply_trust(&t, k + 1) <= apply_trust(&t, k));
            prop_assert!(apply_trust(&t, k) >= floor);
        }
    }
}
