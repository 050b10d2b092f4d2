use serde::{Deserialize, Serialize};

use super::RlError;

/// Exploration rate as a step function of lives lived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, f64)>", into = "Vec<(u64, f64)>")]
pub struct ExplorationSchedule {
    bands: Vec<(u64, f64)>,
}

impl Default for ExplorationSchedule {
    fn default() -> Self {
        ExplorationSchedule {
            bands: vec![
                (0, 0.50),
                (10_000, 0.40),
                (20_000, 0.30),
                (30_000, 0.20),
                (40_000, 0.10),
                (50_000, 0.05),
            ],
        }
    }
}

impl ExplorationSchedule {
    /// `bands` holds `(lives_lower_bound, epsilon)` pairs, strictly increasing and starting at 0.
    pub fn new(bands: Vec<(u64, f64)>) -> Result<Self, RlError> {
        match bands.first() {
            None => return Err(RlError::InvalidSchedule("no bands".into())),
            Some(&(first, _)) if first != 0 => {
                return Err(RlError::InvalidSchedule(format!("first band starts at {first}, not 0")))
            }
            _ => {}
        }
        if let Some(w) = bands.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(RlError::InvalidSchedule(format!(
                "band bounds not strictly increasing at {} -> {}",
                w[0].0, w[1].0
            )));
        }
        if let Some(&(_, eps)) = bands.iter().find(|(_, e)| !(0.0..=1.0).contains(e)) {
            return Err(RlError::InvalidSchedule(format!("epsilon {eps} outside [0, 1]")));
        }
        Ok(ExplorationSchedule { bands })
    }

    /// Constant exploration rate.
    pub fn constant(epsilon: f64) -> Result<Self, RlError> {
        Self::new(vec![(0, epsilon)])
    }

    pub fn bands(&self) -> &[(u64, f64)] {
        &self.bands
    }

    pub fn epsilon_for_lives(&self, lives: u64) -> f64 {
        let band = self.bands.partition_point(|&(lower, _)| lower <= lives);
        self.bands[band - 1].1
    }
}

impl TryFrom<Vec<(u64, f64)>> for ExplorationSchedule {
    type Error = RlError;
    fn try_from(bands: Vec<(u64, f64)>) -> Result<Self, RlError> {
        ExplorationSchedule::new(bands)
    }
}

impl From<ExplorationSchedule> for Vec<(u64, f64)> {
    fn from(s: ExplorationSchedule) -> Self {
        s.bands
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bands() {
        let s = ExplorationSchedule::default();
        assert_eq!(s.epsilon_for_lives(0), 0.50);
        assert_eq!(s.epsilon_for_lives(9_999), 0.50);
        assert_eq!(s.epsilon_for_lives(10_000), 0.40);
        assert_eq!(s.epsilon_for_lives(25_000), 0.30);
        assert_eq!(s.epsilon_for_lives(49_999), 0.10);
        assert_eq!(s.epsilon_for_lives(50_000), 0.05);
        assert_eq!(s.epsilon_for_lives(u64::MAX), 0.05);
    }

    #[test]
    fn validation() {
        assert!(ExplorationSchedule::new(vec![]).is_err());
        assert!(ExplorationSchedule::new(vec![(5, 0.1)]).is_err());
        assert!(ExplorationSchedule::new(vec![(0, 0.1), (0, 0.2)]).is_err());
        assert!(ExplorationSchedule::new(vec![(0, 0.1), (10, 1.5)]).is_err());
        assert_eq!(ExplorationSchedule::constant(0.3).unwrap().epsilon_for_lives(123), 0.3);
    }
}
