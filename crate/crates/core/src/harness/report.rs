use std::fs;
use std::path::{Path, PathBuf};

use super::metrics::{summarize, LevelSummary};
use super::records::{read_games, read_lives, GameRecord, LIVES_FILE};
use super::{io_err, HarnessError};

/// Records and aggregates of one finished campaign directory.
#[derive(Debug, Clone)]
pub struct LevelReport {
    pub dir: PathBuf,
    pub summary: LevelSummary,
    pub games: Vec<GameRecord>,
    /// Weapon ids of the per-weapon shooting columns.
    pub weapons: Vec<String>,
}

/// Campaign directories under `dir`: `dir` itself when it holds `lives.csv`, otherwise
/// every immediate subdirectory that does, in name order.
pub fn campaign_dirs(dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if dir.join(LIVES_FILE).is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let mut found = Vec::new();
    if dir.is_dir() {
        for entry in fs::read_dir(dir).map_err(io_err(dir))? {
            let path = entry.map_err(io_err(dir))?.path();
            if path.join(LIVES_FILE).is_file() {
                found.push(path);
            }
        }
    }
    found.sort();
    if found.is_empty() {
        let missing = dir.join(LIVES_FILE);
        return Err(HarnessError::Io {
            path: missing,
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "missing; no campaign records found"),
        });
    }
    Ok(found)
}

/// Load and summarize one campaign directory.
pub fn load_level(dir: &Path) -> Result<LevelReport, HarnessError> {
    let lives = read_lives(&dir.join(LIVES_FILE))?;
    let games_path = dir.join(super::GAMES_FILE);
    let (games, weapons) = read_games(&games_path)?;
    let summary = summarize(&lives, &games).map_err(|source| HarnessError::Summary {
        path: games_path.clone(),
        source,
    })?;
    Ok(LevelReport {
        dir: dir.to_path_buf(),
        summary,
        games,
        weapons,
    })
}

/// Load every campaign found under `dir`.
pub fn load_reports(dir: &Path) -> Result<Vec<LevelReport>, HarnessError> {
    campaign_dirs(dir)?.iter().map(|d| load_level(d)).collect()
}
