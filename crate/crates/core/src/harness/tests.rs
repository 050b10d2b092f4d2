use super::*;

fn config(level: u8, games: u32, minutes: f64, seed: u64, out_dir: Option<PathBuf>) -> RunConfig {
    RunConfig {
        run_id: format!("test-{level}-{seed}"),
        level,
        games,
        minutes,
        seed,
        learner: LearnerConfig::default(),
        rules: Arc::new(Rules::default()),
        opponent: OpponentProfile::for_level(level).unwrap(),
        opponents: 3,
        out_dir,
        snapshot_every: 1,
    }
}

fn count_events(logs: &[Vec<SimEvent>]) -> (u64, u64, u64) {
    let (mut kills, mut killed, mut suicides) = (0, 0, 0);
    for e in logs.iter().flatten() {
        match e.kind {
            EventKind::Kill { killer: 0, victim } if victim != 0 => kills += 1,
            EventKind::Kill { victim: 0, .. } => killed += 1,
            EventKind::Suicide { victim: 0, .. } => suicides += 1,
            _ => {}
        }
    }
    (kills, killed, suicides)
}

#[test]
fn csv_round_trip_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_campaign(&config(5, 2, 1.0, 11, Some(dir.path().to_path_buf())), CampaignOptions::default()).unwrap();
    assert!(r.deaths >= 1, "expected at least one death");
    let lives = read_lives(&dir.path().join(LIVES_FILE)).unwrap();
    let (games, weapons) = read_games(&dir.path().join(GAMES_FILE)).unwrap();
    assert_eq!(lives, r.lives);
    assert_eq!(games, r.games);
    assert_eq!(weapons.len(), Rules::default().armory.len());
    assert_eq!(r.snapshots.len() as u64, r.deaths);
    let last = r.snapshots.last().unwrap();
    assert!(last.ends_with(snapshot_name(5, r.deaths)));
    let snap = crate::rl::parse_snapshot(&fs::read_to_string(last).unwrap()).unwrap();
    assert_eq!(snap.lives, r.deaths);
}

#[test]
fn snapshot_every_keeps_multiples_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(5, 2, 1.0, 11, Some(dir.path().to_path_buf()));
    cfg.snapshot_every = 3;
    let r = run_campaign(&cfg, CampaignOptions::default()).unwrap();
    assert_eq!(r.snapshots.len() as u64, r.deaths / 3);
}

#[test]
fn identical_seeds_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_campaign(&config(3, 2, 1.0, 5, Some(a.path().to_path_buf())), CampaignOptions::default()).unwrap();
    run_campaign(&config(3, 2, 1.0, 5, Some(b.path().to_path_buf())), CampaignOptions::default()).unwrap();
    for f in [LIVES_FILE, GAMES_FILE] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn accounting_matches_event_log() {
    let opts = CampaignOptions { keep_event_logs: true };
    for level in [1, 3, 5] {
        let r = run_campaign(&config(level, 3, 1.0, 2, None), opts).unwrap();
        let deaths: u64 = r.games.iter().map(|g| g.deaths()).sum();
        assert_eq!(deaths, r.deaths);
        assert_eq!(r.lives.iter().filter(|l| l.death_cause.is_death()).count() as u64, r.deaths);
        let (kills, killed, suicides) = count_events(&r.event_logs);
        assert_eq!(kills, r.games.iter().map(|g| g.kills).sum::<u64>());
        assert_eq!(killed, r.games.iter().map(|g| g.deaths_by_others).sum::<u64>());
        assert_eq!(suicides, r.games.iter().map(|g| g.suicides).sum::<u64>());
        for g in &r.games {
            assert!(g.max_kill_streak <= g.kills);
            assert!(g.time_moving_s <= 60.0 + 1e-9);
        }
        for (i, l) in r.lives.iter().enumerate() {
            assert_eq!(l.life, i as u64);
        }
    }
}

#[test]
fn unwritable_output_fails_before_playing() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    fs::write(&file, "x").unwrap();
    let err = run_campaign(&config(1, 1, 1.0, 1, Some(file.join("out"))), CampaignOptions::default()).unwrap_err();
    assert!(matches!(err, HarnessError::Io { .. }), "{err}");
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = config(1, 1, 1.0, 1, None);
    cfg.level = 2;
    assert!(matches!(cfg.validate(), Err(HarnessError::InvalidConfig(_))));
    cfg.level = 1;
    cfg.games = 0;
    assert!(cfg.validate().is_err());
    cfg.games = 1;
    cfg.minutes = 0.0;
    assert!(cfg.validate().is_err());
}

#[test]
fn reports_find_campaigns_in_subdirectories() {
    let root = tempfile::tempdir().unwrap();
    for level in [1, 5] {
        let dir = root.path().join(format!("level_{level}"));
        run_campaign(&config(level, 2, 1.0, 3, Some(dir)), CampaignOptions::default()).unwrap();
    }
    let reports = load_reports(root.path()).unwrap();
    assert_eq!(reports.iter().map(|r| r.summary.level).collect::<Vec<_>>(), vec![1, 5]);
    let single = load_reports(&root.path().join("level_5")).unwrap();
    assert_eq!(single.len(), 1);
    assert_eq!(single[0].summary, reports[1].summary);

    let empty = tempfile::tempdir().unwrap();
    let err = load_reports(empty.path()).unwrap_err();
    assert!(err.to_string().contains(LIVES_FILE), "{err}");
}
