use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::weapons::Armory;

pub const LIVES_FILE: &str = "lives.csv";
pub const GAMES_FILE: &str = "games.csv";

const LIFE_COLUMNS: [&str; 9] = [
    "run_id",
    "game",
    "life",
    "level",
    "hits",
    "misses",
    "reward",
    "duration_s",
    "death_cause",
];
const GAME_COLUMNS: [&str; 12] = [
    "run_id",
    "game",
    "level",
    "kills",
    "deaths_by_others",
    "suicides",
    "max_kill_streak",
    "weapons_collected",
    "ammo_collected",
    "time_moving_s",
    "distance_uu",
    "shoot_s_total",
];

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: row {row}: {reason}", path.display())]
    Invalid { path: PathBuf, row: u64, reason: String },
}

/// How a life ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifeEnd {
    Killed,
    SuicidePit,
    SuicideSplash,
    /// Cut short by the end of the game; not a death.
    GameEnd,
}

impl LifeEnd {
    pub fn name(self) -> &'static str {
        match self {
            LifeEnd::Killed => "killed",
            LifeEnd::SuicidePit => "suicide-pit",
            LifeEnd::SuicideSplash => "suicide-splash",
            LifeEnd::GameEnd => "game-end",
        }
    }

    pub fn is_death(self) -> bool {
        self != LifeEnd::GameEnd
    }

    pub fn is_suicide(self) -> bool {
        matches!(self, LifeEnd::SuicidePit | LifeEnd::SuicideSplash)
    }
}

impl FromStr for LifeEnd {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [LifeEnd::Killed, LifeEnd::SuicidePit, LifeEnd::SuicideSplash, LifeEnd::GameEnd]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown death cause `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifeRecord {
    pub run_id: String,
    pub game: u32,
    /// Index of the life within the campaign.
    pub life: u64,
    pub level: u8,
    pub hits: u64,
    pub misses: u64,
    pub reward: f64,
    pub duration_s: f64,
    pub death_cause: LifeEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub run_id: String,
    pub game: u32,
    pub level: u8,
    pub kills: u64,
    pub deaths_by_others: u64,
    pub suicides: u64,
    pub max_kill_streak: u64,
    pub weapons_collected: u64,
    pub ammo_collected: u64,
    pub time_moving_s: f64,
    pub distance_uu: f64,
    pub shoot_s_total: f64,
    /// Seconds spent shooting each armory weapon, in armory order.
    pub shoot_s: Vec<f64>,
}

impl LifeRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.run_id.clone(),
            self.game.to_string(),
            self.life.to_string(),
            self.level.to_string(),
            self.hits.to_string(),
            self.misses.to_string(),
            self.reward.to_string(),
            self.duration_s.to_string(),
            self.death_cause.name().to_string(),
        ]
    }
}

impl GameRecord {
    fn fields(&self) -> Vec<String> {
        let mut f = vec![
            self.run_id.clone(),
            self.game.to_string(),
            self.level.to_string(),
            self.kills.to_string(),
            self.deaths_by_others.to_string(),
            self.suicides.to_string(),
            self.max_kill_streak.to_string(),
            self.weapons_collected.to_string(),
            self.ammo_collected.to_string(),
            self.time_moving_s.to_string(),
            self.distance_uu.to_string(),
            self.shoot_s_total.to_string(),
        ];
        f.extend(self.shoot_s.iter().map(f64::to_string));
        f
    }

    pub fn deaths(&self) -> u64 {
        self.deaths_by_others + self.suicides
    }
}

fn game_header(armory: &Armory) -> Vec<String> {
    GAME_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(armory.specs().iter().map(|w| format!("shoot_s_{}", w.id)))
        .collect()
}

/// Append-only CSV writers, flushed after every record so a crash loses at most one row.
pub struct CsvLog {
    lives: csv::Writer<File>,
    games: csv::Writer<File>,
    lives_path: PathBuf,
    games_path: PathBuf,
}

impl CsvLog {
    /// Create (truncating) both files and write their headers.
    pub fn create(dir: &Path, armory: &Armory) -> Result<Self, RecordError> {
        let open = |name: &str| {
            let path = dir.join(name);
            OpenOptions::new()
                .write(true)
                .create(true)
                .truncate(true)
                .open(&path)
                .map(|f| (csv::Writer::from_writer(f), path.clone()))
                .map_err(|source| RecordError::Io { path, source })
        };
        let (lives, lives_path) = open(LIVES_FILE)?;
        let (games, games_path) = open(GAMES_FILE)?;
        let mut log = CsvLog {
            lives,
            games,
            lives_path,
            games_path,
        };
        let life_header: Vec<String> = LIFE_COLUMNS.iter().map(|c| c.to_string()).collect();
        log.write_life_row(&life_header)?;
        log.write_game_row(&game_header(armory))?;
        Ok(log)
    }

    fn write_life_row(&mut self, row: &[String]) -> Result<(), RecordError> {
        write_row(&mut self.lives, row, &self.lives_path)
    }

    fn write_game_row(&mut self, row: &[String]) -> Result<(), RecordError> {
        write_row(&mut self.games, row, &self.games_path)
    }

    pub fn append_life(&mut self, life: &LifeRecord) -> Result<(), RecordError> {
        self.write_life_row(&life.fields())
    }

    pub fn append_game(&mut self, game: &GameRecord) -> Result<(), RecordError> {
        self.write_game_row(&game.fields())
    }
}

fn write_row(w: &mut csv::Writer<File>, row: &[String], path: &Path) -> Result<(), RecordError> {
    w.write_record(row).map_err(|source| RecordError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    w.flush().map_err(|source| RecordError::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Rows {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<(u64, csv::StringRecord)>,
}

fn read_rows(path: &Path) -> Result<Rows, RecordError> {
    let file = File::open(path).map_err(|source| RecordError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |source| RecordError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_reader(file);
    let header = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, r) in reader.records().enumerate() {
        rows.push((i as u64 + 1, r.map_err(csv_err)?));
    }
    Ok(Rows {
        path: path.to_path_buf(),
        header,
        rows,
    })
}

impl Rows {
    fn invalid(&self, row: u64, reason: impl Into<String>) -> RecordError {
        RecordError::Invalid {
            path: self.path.clone(),
            row,
            reason: reason.into(),
        }
    }

    fn expect_prefix(&self, columns: &[&str]) -> Result<(), RecordError> {
        if self.header.len() < columns.len() || self.header.iter().zip(columns).any(|(h, c)| h != c) {
            return Err(self.invalid(0, format!("header must start with {}", columns.join(","))));
        }
        Ok(())
    }

    fn field<T: FromStr>(&self, row: u64, rec: &csv::StringRecord, col: usize) -> Result<T, RecordError> {
        let raw = rec.get(col).ok_or_else(|| self.invalid(row, format!("missing column {}", self.header[col])))?;
        raw.parse()
            .map_err(|_| self.invalid(row, format!("bad {} `{raw}`", self.header[col])))
    }
}

pub fn read_lives(path: &Path) -> Result<Vec<LifeRecord>, RecordError> {
    let rows = read_rows(path)?;
    rows.expect_prefix(&LIFE_COLUMNS)?;
    rows.rows
        .iter()
        .map(|(n, r)| {
            if r.len() != LIFE_COLUMNS.len() {
                return Err(rows.invalid(*n, format!("expected {} fields, found {}", LIFE_COLUMNS.len(), r.len())));
            }
            let cause: String = rows.field(*n, r, 8)?;
            Ok(LifeRecord {
                run_id: rows.field(*n, r, 0)?,
                game: rows.field(*n, r, 1)?,
                life: rows.field(*n, r, 2)?,
                level: rows.field(*n, r, 3)?,
                hits: rows.field(*n, r, 4)?,
                misses: rows.field(*n, r, 5)?,
                reward: rows.field(*n, r, 6)?,
                duration_s: rows.field(*n, r, 7)?,
                death_cause: cause.parse().map_err(|e: String| rows.invalid(*n, e))?,
            })
        })
        .collect()
}

/// Read `games.csv`; also returns the weapon ids of the per-weapon shooting columns.
pub fn read_games(path: &Path) -> Result<(Vec<GameRecord>, Vec<String>), RecordError> {
    let rows = read_rows(path)?;
    rows.expect_prefix(&GAME_COLUMNS)?;
    let weapons: Vec<String> = rows.header[GAME_COLUMNS.len()..]
        .iter()
        .map(|h| h.strip_prefix("shoot_s_").map(str::to_string).ok_or_else(|| rows.invalid(0, format!("unexpected column `{h}`"))))
        .collect::<Result<_, _>>()?;
    let games = rows
        .rows
        .iter()
        .map(|(n, r)| {
            if r.len() != rows.header.len() {
                return Err(rows.invalid(*n, format!("expected {} fields, found {}", rows.header.len(), r.len())));
            }
            Ok(GameRecord {
                run_id: rows.field(*n, r, 0)?,
                game: rows.field(*n, r, 1)?,
                level: rows.field(*n, r, 2)?,
                kills: rows.field(*n, r, 3)?,
                deaths_by_others: rows.field(*n, r, 4)?,
                suicides: rows.field(*n, r, 5)?,
                max_kill_streak: rows.field(*n, r, 6)?,
                weapons_collected: rows.field(*n, r, 7)?,
                ammo_collected: rows.field(*n, r, 8)?,
                time_moving_s: rows.field(*n, r, 9)?,
                distance_uu: rows.field(*n, r, 10)?,
                shoot_s_total: rows.field(*n, r, 11)?,
                shoot_s: (GAME_COLUMNS.len()..rows.header.len())
                    .map(|c| rows.field(*n, r, c))
                    .collect::<Result<_, _>>()?,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok((games, weapons))
}
