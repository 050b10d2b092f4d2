use std::fmt::Write as _;

use thiserror::Error;

use super::records::{GameRecord, LifeRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SummaryError {
    #[error("nothing to summarize")]
    Empty,
    #[error("moving-average window {0} must be odd and at least 1")]
    BadWindow(usize),
}

/// Kills per death, counting suicides as deaths. `None` without any deaths.
pub fn kd_ratio(kills: u64, deaths_by_others: u64, suicides: u64) -> Option<f64> {
    let deaths = deaths_by_others + suicides;
    (deaths > 0).then(|| kills as f64 / deaths as f64)
}

/// Share of shots that hit, in percent. `None` without any shots.
pub fn hit_percentage(hits: f64, misses: f64) -> Option<f64> {
    let shots = hits + misses;
    (shots > 0.0).then(|| 100.0 * hits / shots)
}

/// Centred moving average, defined only where a full window fits.
///
/// Output element `i` is the mean of `series[i .. i + window]`, i.e. the value centred
/// at index `i + window / 2` of the input.
pub fn centred_moving_average(series: &[f64], window: usize) -> Result<Vec<f64>, SummaryError> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(SummaryError::BadWindow(window));
    }
    Ok(series
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect())
}

/// Descriptive statistics of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    /// Lower middle element for even counts.
    pub median: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Result<Stat, SummaryError> {
        if values.is_empty() {
            return Err(SummaryError::Empty);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Stat {
            mean,
            sd: var.sqrt(),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            median: sorted[(sorted.len() - 1) / 2],
        })
    }
}

/// Aggregate tables for one opponent level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSummary {
    pub level: u8,
    /// Lives ended by death; lives cut short by the end of a game are left out.
    pub lives: usize,
    pub games: usize,
    /// Per-life statistics; `None` when no life ended in a death.
    pub hits: Option<Stat>,
    pub misses: Option<Stat>,
    pub reward: Option<Stat>,
    pub kills: u64,
    pub deaths_by_others: u64,
    pub suicides: u64,
    pub kd_ratio: Option<f64>,
    pub hit_percentage: Option<f64>,
    pub kills_per_game: Stat,
    pub deaths_per_game: Stat,
    pub max_kill_streak: Stat,
    pub weapons_collected: Stat,
    pub ammo_collected: Stat,
    pub time_moving_min: Stat,
    pub distance_uu: Stat,
    pub shooting_min: Stat,
    /// Mean minutes per game shooting each weapon, in armory column order.
    pub shooting_min_per_weapon: Vec<f64>,
}

/// Summarize one level's records.
pub fn summarize(lives: &[LifeRecord], games: &[GameRecord]) -> Result<LevelSummary, SummaryError> {
    let first = games.first().ok_or(SummaryError::Empty)?;
    let dead: Vec<&LifeRecord> = lives.iter().filter(|l| l.death_cause.is_death()).collect();
    let of_lives = |f: fn(&LifeRecord) -> f64| Stat::of(&dead.iter().map(|l| f(l)).collect::<Vec<_>>()).ok();
    let of_games = |f: &dyn Fn(&GameRecord) -> f64| Stat::of(&games.iter().map(f).collect::<Vec<_>>());

    let kills = games.iter().map(|g| g.kills).sum();
    let deaths_by_others = games.iter().map(|g| g.deaths_by_others).sum();
    let suicides = games.iter().map(|g| g.suicides).sum();
    let hits: u64 = dead.iter().map(|l| l.hits).sum();
    let misses: u64 = dead.iter().map(|l| l.misses).sum();
    let columns = first.shoot_s.len();
    let shooting_min_per_weapon = (0..columns)
        .map(|c| games.iter().map(|g| g.shoot_s[c] / 60.0).sum::<f64>() / games.len() as f64)
        .collect();

    Ok(LevelSummary {
        level: first.level,
        lives: dead.len(),
        games: games.len(),
        hits: of_lives(|l| l.hits as f64),
        misses: of_lives(|l| l.misses as f64),
        reward: of_lives(|l| l.reward),
        kills,
        deaths_by_others,
        suicides,
        kd_ratio: kd_ratio(kills, deaths_by_others, suicides),
        hit_percentage: hit_percentage(hits as f64, misses as f64),
        kills_per_game: of_games(&|g| g.kills as f64)?,
        deaths_per_game: of_games(&|g| g.deaths() as f64)?,
        max_kill_streak: of_games(&|g| g.max_kill_streak as f64)?,
        weapons_collected: of_games(&|g| g.weapons_collected as f64)?,
        ammo_collected: of_games(&|g| g.ammo_collected as f64)?,
        time_moving_min: of_games(&|g| g.time_moving_s / 60.0)?,
        distance_uu: of_games(&|g| g.distance_uu)?,
        shooting_min: of_games(&|g| g.shoot_s_total / 60.0)?,
        shooting_min_per_weapon,
    })
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.digits$}"))
}

impl LevelSummary {
    /// Plain-text report of the aggregate tables.
    pub fn render(&self, weapons: &[String]) -> String {
        let mut s = String::new();
        let row = |s: &mut String, name: &str, st: Option<&Stat>| {
            match st {
                Some(st) => writeln!(
                    s,
                    "  {name:<22} mean {:>10.2}  sd {:>9.2}  min {:>9.2}  max {:>9.2}  median {:>9.2}",
                    st.mean, st.sd, st.min, st.max, st.median
                ),
                None => writeln!(s, "  {name:<22} n/a"),
            }
            .unwrap();
        };
        writeln!(s, "level {}: {} games, {} lives", self.level, self.games, self.lives).unwrap();
        writeln!(
            s,
            "  KD ratio {} (kills {}, deaths by others {}, suicides {})",
            self.kd_ratio.map_or_else(|| "n/a".to_string(), |k| format!("{k:.2}:1")),
            self.kills,
            self.deaths_by_others,
            self.suicides
        )
        .unwrap();
        let miss = self.hit_percentage.map(|h| 100.0 - h);
        let pct = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.1}%"));
        writeln!(s, "  hits {}  misses {}", pct(self.hit_percentage), pct(miss)).unwrap();
        writeln!(s, "  per life:").unwrap();
        row(&mut s, "hits", self.hits.as_ref());
        row(&mut s, "misses", self.misses.as_ref());
        row(&mut s, "reward", self.reward.as_ref());
        writeln!(s, "  per game:").unwrap();
        row(&mut s, "kills", Some(&self.kills_per_game));
        row(&mut s, "deaths", Some(&self.deaths_per_game));
        row(&mut s, "max kill streak", Some(&self.max_kill_streak));
        row(&mut s, "weapons collected", Some(&self.weapons_collected));
        row(&mut s, "ammo collected", Some(&self.ammo_collected));
        row(&mut s, "time moving (min)", Some(&self.time_moving_min));
        row(&mut s, "distance (UU)", Some(&self.distance_uu));
        row(&mut s, "time shooting (min)", Some(&self.shooting_min));
        writeln!(s, "  mean shooting minutes per game by weapon:").unwrap();
        for (w, m) in weapons.iter().zip(&self.shooting_min_per_weapon) {
            writeln!(s, "    {w:<20} {m:.3}").unwrap();
        }
        s
    }

    /// One CSV row of the headline numbers.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.level,
            self.games,
            self.lives,
            self.kills,
            self.deaths_by_others,
            self.suicides,
            opt(self.kd_ratio, 4),
            opt(self.hit_percentage, 2),
            opt(self.hits.map(|h| h.mean), 4),
            opt(self.misses.map(|m| m.mean), 4),
            opt(self.reward.map(|r| r.mean), 4)
        )
    }

    pub const CSV_HEADER: &'static str =
        "level,games,lives,kills,deaths_by_others,suicides,kd_ratio,hit_pct,hits_mean,misses_mean,reward_mean";
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kd_examples() {
        assert!((kd_ratio(112_420, 48_299, 11_701).unwrap() - 1.8737).abs() < 1e-4);
        assert!((kd_ratio(63_934, 52_994, 7_006).unwrap() - 1.0656).abs() < 1e-4);
        assert_eq!(kd_ratio(0, 1, 0), Some(0.0));
        assert_eq!(kd_ratio(5, 0, 0), None);
    }

    #[test]
    fn hit_percentage_examples() {
        assert!((hit_percentage(9.82, 26.84).unwrap() - 26.787).abs() < 1e-3);
        assert!((hit_percentage(4.70, 17.83).unwrap() - 20.861).abs() < 1e-3);
        assert_eq!(hit_percentage(5.0, 0.0), Some(100.0));
        assert_eq!(hit_percentage(0.0, 0.0), None);
    }

    #[test]
    fn moving_average_examples() {
        assert!(centred_moving_average(&[7.0; 20], 11).unwrap().iter().all(|&v| v == 7.0));
        assert_eq!(centred_moving_average(&[7.0; 20], 11).unwrap().len(), 10);
        let ramp: Vec<f64> = (1..=21).map(f64::from).collect();
        let cma = centred_moving_average(&ramp, 11).unwrap();
        // output index 5 is centred on input index 10, whose value is 11
        assert_eq!(cma[5], 11.0);
        assert!(centred_moving_average(&[1.0; 10], 11).unwrap().is_empty());
        assert_eq!(centred_moving_average(&[1.0], 4), Err(SummaryError::BadWindow(4)));
    }

    #[test]
    fn stat_examples() {
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((s.mean, s.median, s.min, s.max), (2.5, 2.0, 1.0, 4.0));
        assert!((s.sd - 1.25f64.sqrt()).abs() < 1e-12);
        let one = Stat::of(&[3.5]).unwrap();
        assert_eq!((one.mean, one.sd), (3.5, 0.0));
        assert_eq!(Stat::of(&[]), Err(SummaryError::Empty));
    }

    proptest! {
        #[test]
        fn moving_average_matches_brute_force(series in proptest::collection::vec(-1e3..1e3f64, 0..60), half in 0usize..7) {
            let w = 2 * half + 1;
            let cma = centred_moving_average(&series, w).unwrap();
            prop_assert_eq!(cma.len(), series.len().saturating_sub(w - 1));
            for (i, v) in cma.iter().enumerate() {
                let centre = i + half;
                let mut total = 0.0;
                for j in centre - half..=centre + half {
                    total += series[j];
                }
                prop_assert_eq!(*v, total / w as f64);
            }
        }
    }
}
