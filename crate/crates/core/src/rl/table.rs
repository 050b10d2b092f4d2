use std::ops::{Index, IndexMut};

use rand::Rng;

use super::{LearnerConfig, RlError};
use crate::encoder::{StateId, NUM_STATES};
use crate::weapons::{WeaponCategory, NUM_ACTIONS};

/// Traces that decay below this are dropped from the active set.
pub const TRACE_FLOOR: f64 = 1e-8;

const PAIRS: usize = NUM_STATES * NUM_ACTIONS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// TD error, computed on pre-update values.
    pub delta: f64,
    pub reward: f64,
    pub epsilon_used: f64,
    pub was_exploratory: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionChoice {
    pub action: usize,
    pub exploratory: bool,
}

/// Action values, eligibility traces and visit counts for one weapon category.
///
/// Values and visit counts are dense; traces are kept as a short list of active
/// `(pair, eligibility)` entries since γλ makes them vanish within a few dozen steps.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    category: WeaponCategory,
    values: Vec<f64>,
    visits: Vec<u32>,
    traces: Vec<(u32, f64)>,
}

fn pair(state: StateId, action: usize) -> usize {
    state.index() * NUM_ACTIONS + action
}

fn check_action(action: usize) -> Result<(), RlError> {
    if action < NUM_ACTIONS {
        Ok(())
    } else {
        Err(RlError::ActionOutOfRange(action))
    }
}

impl QTable {
    pub fn new(category: WeaponCategory) -> Self {
        QTable {
            category,
            values: vec![0.0; PAIRS],
            visits: vec![0; PAIRS],
            traces: Vec::new(),
        }
    }

    pub fn category(&self) -> WeaponCategory {
        self.category
    }

    pub fn q(&self, state: StateId, action: usize) -> f64 {
        self.values[pair(state, action)]
    }

    pub fn set_q(&mut self, state: StateId, action: usize, value: f64) {
        self.values[pair(state, action)] = value;
    }

    pub fn q_row(&self, state: StateId) -> &[f64] {
        let start = pair(state, 0);
        &self.values[start..start + NUM_ACTIONS]
    }

    pub fn visits(&self, state: StateId, action: usize) -> u32 {
        self.visits[pair(state, action)]
    }

    pub fn set_visits(&mut self, state: StateId, action: usize, count: u32) {
        self.visits[pair(state, action)] = count;
    }

    pub fn trace(&self, state: StateId, action: usize) -> f64 {
        let key = pair(state, action) as u32;
        self.traces
            .iter()
            .find(|(k, _)| *k == key)
            .map_or(0.0, |&(_, e)| e)
    }

    pub fn active_traces(&self) -> usize {
        self.traces.len()
    }

    /// Nonzero values as `(state, action, value)` in ascending state/action order.
    pub fn nonzero(&self) -> impl Iterator<Item = (StateId, usize, f64)> + '_ {
        self.values.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(i, &v)| {
            let state = StateId::new(i / NUM_ACTIONS).expect("pair index in range");
            (state, i % NUM_ACTIONS, v)
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    /// Actions attaining the maximum value for `state`.
    pub fn greedy_actions(&self, state: StateId) -> Vec<usize> {
        let row = self.q_row(state);
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..NUM_ACTIONS).filter(|&a| row[a] == best).collect()
    }

    /// ε-greedy choice. The exploratory branch prefers actions never taken in `state`.
    pub fn select_action<R: Rng + ?Sized>(&mut self, state: StateId, epsilon: f64, rng: &mut R) -> ActionChoice {
        let exploratory = rng.gen::<f64>() < epsilon;
        let action = if exploratory {
            let unseen: Vec<usize> = (0..NUM_ACTIONS).filter(|&a| self.visits(state, a) == 0).collect();
            if unseen.is_empty() {
                rng.gen_range(0..NUM_ACTIONS)
            } else {
                unseen[rng.gen_range(0..unseen.len())]
            }
        } else {
            let best = self.greedy_actions(state);
            if best.len() == 1 {
                best[0]
            } else {
                best[rng.gen_range(0..best.len())]
            }
        };
        let count = &mut self.visits[pair(state, action)];
        *count = count.saturating_add(1);
        ActionChoice { action, exploratory }
    }

    /// Uniform choice over all actions, leaving visit counts untouched.
    pub fn random_action<R: Rng + ?Sized>(rng: &mut R) -> usize {
        rng.gen_range(0..NUM_ACTIONS)
    }

    /// Greedy choice with random tie-breaking, leaving visit counts untouched.
    pub fn greedy_action<R: Rng + ?Sized>(&self, state: StateId, rng: &mut R) -> usize {
        let best = self.greedy_actions(state);
        if best.len() == 1 {
            best[0]
        } else {
            best[rng.gen_range(0..best.len())]
        }
    }

    /// One Sarsa(λ) step towards `r + γ·Q(s', a')`.
    pub fn sarsa_update(
        &mut self,
        state: StateId,
        action: usize,
        reward: f64,
        next_state: StateId,
        next_action: usize,
        cfg: &LearnerConfig,
    ) -> Result<f64, RlError> {
        check_action(next_action)?;
        let bootstrap = self.q(next_state, next_action);
        self.update_towards(state, action, reward, bootstrap, cfg)
    }

    /// Final step of an episode: the successor is terminal and contributes no value.
    pub fn terminal_update(
        &mut self,
        state: StateId,
        action: usize,
        reward: f64,
        cfg: &LearnerConfig,
    ) -> Result<f64, RlError> {
        self.update_towards(state, action, reward, 0.0, cfg)
    }

    fn update_towards(
        &mut self,
        state: StateId,
        action: usize,
        reward: f64,
        bootstrap: f64,
        cfg: &LearnerConfig,
    ) -> Result<f64, RlError> {
        check_action(action)?;
        if !reward.is_finite() {
            return Err(RlError::NonFiniteReward(reward));
        }
        let delta = reward + cfg.gamma() * bootstrap - self.q(state, action);
        self.mark_eligible(state, action);
        self.apply_delta(cfg.alpha() * delta, cfg.trace_decay());
        Ok(delta)
    }

    /// Replacing trace: e(s, a) = 1.
    fn mark_eligible(&mut self, state: StateId, action: usize) {
        let key = pair(state, action) as u32;
        match self.traces.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = 1.0,
            None => self.traces.push((key, 1.0)),
        }
    }

    /// Q += step·e for every eligible pair, then e ← decay·e.
    fn apply_delta(&mut self, step: f64, decay: f64) {
        let values = &mut self.values;
        self.traces.retain_mut(|(k, e)| {
            values[*k as usize] += step * *e;
            *e *= decay;
            *e >= TRACE_FLOOR
        });
    }

    /// Episode boundary: clear all eligibility.
    pub fn begin_life(&mut self) {
        self.traces.clear();
    }
}

/// One table per weapon category.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    tables: Vec<QTable>,
}

impl Default for TableSet {
    fn default() -> Self {
        TableSet::new()
    }
}

impl TableSet {
    pub fn new() -> Self {
        TableSet {
            tables: WeaponCategory::ALL.iter().map(|&c| QTable::new(c)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &QTable> {
        self.tables.iter()
    }

    pub fn begin_life(&mut self) {
        self.tables.iter_mut().for_each(QTable::begin_life);
    }

    /// True when every q value matches bit for bit.
    pub fn same_values(&self, other: &TableSet) -> bool {
        self.tables.iter().zip(&other.tables).all(|(a, b)| {
            a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits())
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.tables.iter().map(QTable::nonzero_count).sum()
    }

    /// Sarsa(λ) step over the union of all category tables.
    ///
    /// The successor may live in a different category when the weapon changed between
    /// decisions; `next = None` marks a terminal successor. Every eligible pair in every
    /// table receives the TD error.
    pub fn sarsa_update(
        &mut self,
        current: (WeaponCategory, StateId, usize),
        reward: f64,
        next: Option<(WeaponCategory, StateId, usize)>,
        cfg: &LearnerConfig,
    ) -> Result<f64, RlError> {
        let (category, state, action) = current;
        check_action(action)?;
        if !reward.is_finite() {
            return Err(RlError::NonFiniteReward(reward));
        }
        let bootstrap = match next {
            Some((c, s, a)) => {
                check_action(a)?;
                self[c].q(s, a)
            }
            None => 0.0,
        };
        let delta = reward + cfg.gamma() * bootstrap - self[category].q(state, action);
        self[category].mark_eligible(state, action);
        let step = cfg.alpha() * delta;
        let decay = cfg.trace_decay();
        for table in &mut self.tables {
            table.apply_delta(step, decay);
        }
        Ok(delta)
    }
}

impl Index<WeaponCategory> for TableSet {
    type Output = QTable;
    fn index(&self, c: WeaponCategory) -> &QTable {
        &self.tables[c.index()]
    }
}

impl IndexMut<WeaponCategory> for TableSet {
    fn index_mut(&mut self, c: WeaponCategory) -> &mut QTable {
        &mut self.tables[c.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rl::ExplorationSchedule;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(i: usize) -> StateId {
        StateId::new(i).unwrap()
    }

    fn table() -> QTable {
        QTable::new(WeaponCategory::InstantHit)
    }

    #[test]
    fn fresh_table_is_zero() {
        let t = table();
        assert_eq!(t.nonzero_count(), 0);
        assert_eq!(t.q(s(1295), 4), 0.0);
        assert_eq!(t.trace(s(3), 2), 0.0);
    }

    #[test]
    fn first_update_by_hand() {
        let cfg = LearnerConfig::default();
        let mut t = table();
        let delta = t.sarsa_update(s(0), 0, 10.0, s(1), 0, &cfg).unwrap();
        assert_eq!(delta, 10.0);
        assert!((t.q(s(0), 0) - 7.0).abs() < 1e-12);
        assert!((t.trace(s(0), 0) - 0.45).abs() < 1e-12);
        assert_eq!(t.nonzero_count(), 1);
    }

    #[test]
    fn miss_penalty_update() {
        let cfg = LearnerConfig::default();
        let mut t = table();
        let delta = t.sarsa_update(s(5), 2, -1.0, s(9), 1, &cfg).unwrap();
        assert_eq!(delta, -1.0);
        assert!((t.q(s(5), 2) + 0.7).abs() < 1e-12);
    }

    #[test]
    fn two_step_trace_credit() {
        let cfg = LearnerConfig::default();
        let mut t = table();
        t.sarsa_update(s(0), 0, 10.0, s(1), 1, &cfg).unwrap();
        let delta = t.sarsa_update(s(1), 1, 4.0, s(2), 2, &cfg).unwrap();
        assert_eq!(delta, 4.0);
        assert!((t.q(s(1), 1) - 2.8).abs() < 1e-12);
        assert!((t.q(s(0), 0) - 8.26).abs() < 1e-12);
    }

    #[test]
    fn zero_update_changes_nothing() {
        let cfg = LearnerConfig::default();
        let mut t = table();
        t.sarsa_update(s(7), 3, 0.0, s(8), 0, &cfg).unwrap();
        assert_eq!(t.nonzero_count(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = LearnerConfig::default();
        let mut t = table();
        assert!(matches!(t.sarsa_update(s(0), 0, f64::NAN, s(1), 0, &cfg), Err(RlError::NonFiniteReward(_))));
        assert!(t.sarsa_update(s(0), 0, f64::INFINITY, s(1), 0, &cfg).is_err());
        assert_eq!(t.sarsa_update(s(0), 5, 1.0, s(1), 0, &cfg), Err(RlError::ActionOutOfRange(5)));
        assert_eq!(t.sarsa_update(s(0), 0, 1.0, s(1), 7, &cfg), Err(RlError::ActionOutOfRange(7)));
        assert_eq!(t.nonzero_count(), 0);
    }

    #[test]
    fn traces_decay_geometrically_and_reset() {
        let cfg = LearnerConfig::default();
        let mut t = table();
        t.sarsa_update(s(0), 0, 1.0, s(1), 0, &cfg).unwrap();
        for k in 2..=10 {
            t.sarsa_update(s(k), 0, 0.0, s(k + 1), 0, &cfg).unwrap();
            let expected = 0.45f64.powi(k as i32);
            assert!((t.trace(s(0), 0) - expected).abs() <= 4.0 * f64::EPSILON * expected);
        }
        t.begin_life();
        assert_eq!(t.active_traces(), 0);
        let before = t.q(s(0), 0);
        assert_ne!(before, 0.0);

        // after the reset an update acts exactly like one on a fresh table at that pair
        let mut fresh = table();
        let mut reset = table();
        reset.sarsa_update(s(3), 1, 6.0, s(4), 0, &cfg).unwrap();
        reset.begin_life();
        reset.set_q(s(3), 1, 0.0);
        fresh.sarsa_update(s(0), 0, 10.0, s(1), 0, &cfg).unwrap();
        reset.sarsa_update(s(0), 0, 10.0, s(1), 0, &cfg).unwrap();
        assert_eq!(fresh.q(s(0), 0), reset.q(s(0), 0));
        assert_eq!(fresh.trace(s(0), 0), reset.trace(s(0), 0));
        assert_eq!(reset.q(s(3), 1), 0.0);
    }

    #[test]
    fn old_traces_are_dropped() {
        let cfg = LearnerConfig::default();
        let mut t = table();
        for k in 0..100 {
            t.sarsa_update(s(k), 0, 1.0, s(k + 1), 0, &cfg).unwrap();
        }
        // 0.45^k < 1e-8 from k = 24 on
        assert!(t.active_traces() <= 24, "{}", t.active_traces());
    }

    #[test]
    fn greedy_unique_argmax() {
        let mut t = table();
        for (a, v) in [0.0, 3.0, 1.0, 0.0, 0.0].into_iter().enumerate() {
            t.set_q(s(42), a, v);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let c = t.select_action(s(42), 0.0, &mut rng);
            assert_eq!(c, ActionChoice { action: 1, exploratory: false });
        }
        assert_eq!(t.visits(s(42), 1), 100);
    }

    #[test]
    fn greedy_ties_are_spread() {
        let mut t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = [0usize; NUM_ACTIONS];
        for _ in 0..5000 {
            counts[t.select_action(s(0), 0.0, &mut rng).action] += 1;
        }
        assert!(counts.iter().all(|&c| c > 800), "{counts:?}");
    }

    #[test]
    fn exploration_prefers_unseen() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; NUM_ACTIONS];
        for _ in 0..10_000 {
            let mut t = table();
            for a in [0, 1, 4] {
                t.set_visits(s(9), a, 1);
            }
            let c = t.select_action(s(9), 1.0, &mut rng);
            assert!(c.exploratory);
            counts[c.action] += 1;
        }
        assert_eq!(counts[0] + counts[1] + counts[4], 0);
        let f2 = counts[2] as f64 / 10_000.0;
        assert!((f2 - 0.5).abs() < 0.02, "{f2}");
    }

    #[test]
    fn table_set_update_matches_single_table() {
        let cfg = LearnerConfig::default();
        let c = WeaponCategory::SlowMoving;
        let mut single = QTable::new(c);
        let mut set = TableSet::new();
        let steps = [(0, 1, 10.0), (4, 2, -1.0), (9, 0, 4.0), (4, 2, 25.0)];
        for w in steps.windows(2) {
            let (s0, a0, r) = w[0];
            let (s1, a1, _) = w[1];
            let d1 = single.sarsa_update(s(s0), a0, r, s(s1), a1, &cfg).unwrap();
            let d2 = set.sarsa_update((c, s(s0), a0), r, Some((c, s(s1), a1)), &cfg).unwrap();
            assert_eq!(d1, d2);
        }
        assert_eq!(&set[c], &single);
    }

    #[test]
    fn cross_category_credit() {
        let cfg = LearnerConfig::default();
        let mut set = TableSet::new();
        let (a, b) = (WeaponCategory::MachineGun, WeaponCategory::InstantHit);
        set.sarsa_update((a, s(0), 0), 10.0, Some((b, s(1), 1)), &cfg).unwrap();
        let delta = set.sarsa_update((b, s(1), 1), 4.0, None, &cfg).unwrap();
        assert_eq!(delta, 4.0);
        assert!((set[b].q(s(1), 1) - 2.8).abs() < 1e-12);
        assert!((set[a].q(s(0), 0) - 8.26).abs() < 1e-12);
    }

    #[test]
    fn schedule_default_used_by_config() {
        let cfg = LearnerConfig::default();
        assert_eq!(cfg.schedule(), &ExplorationSchedule::default());
    }
}
