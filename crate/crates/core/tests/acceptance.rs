//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and exits non-zero
//! if any criterion fails. Tolerances are pinned below.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sarsa_arena::config::ExperimentConfig;
use sarsa_arena::encoder::{DirectionClass, DistanceBand, RotationSector, SpeedClass, StateAttributes, StateId, NUM_STATES};
use sarsa_arena::harness::{
    bootstrap_mean_difference, centred_moving_average, evaluate_policy, hit_percentage, kd_ratio, run_campaign,
    summarize, CampaignOptions, CampaignResult, RunConfig,
};
use sarsa_arena::rl::{ExplorationSchedule, LearnerConfig, TableSet, TRACE_FLOOR};
use sarsa_arena::sim::{EventKind, ShooterMode};
use sarsa_arena::weapons::{WeaponCategory, NUM_ACTIONS};

const STEP_TOL: f64 = 1e-12;
const CONVERGENCE_TOL: f64 = 1e-3;
const EXPLORE_TOL: f64 = 0.02;
const KD_TOL: f64 = 0.005;
const HIT_TOL: f64 = 0.5;
const SUICIDE_SHARE: (f64, f64) = (5.0, 25.0);
const TREND_SEEDS: [u64; 3] = [1, 2, 3];
const EVAL_LIVES: usize = 500;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sarsa step oracle", sarsa_step_oracle),
        ("chain MDP convergence", chain_convergence),
        ("encoding completeness", encoding_completeness),
        ("schedule exactness", schedule_exactness),
        ("metric formulas", metric_formulas),
        ("trend reproduction", trend_reproduction),
        ("learning sanity", learning_sanity),
        ("determinism", determinism),
        ("accounting identities", accounting_identities),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "[{verdict}] criterion {}: {name}: {} ({:.2} s)",
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn pair_index(c: WeaponCategory, s: usize, a: usize) -> usize {
    (c.index() * NUM_STATES + s) * NUM_ACTIONS + a
}

/// Dense textbook Sarsa(λ) with replacing traces over every category table.
struct Reference {
    q: Vec<f64>,
    e: Vec<f64>,
}

impl Reference {
    fn new() -> Self {
        let n = WeaponCategory::ALL.len() * NUM_STATES * NUM_ACTIONS;
        Reference { q: vec![0.0; n], e: vec![0.0; n] }
    }

    fn step(&mut self, cur: usize, r: f64, next: Option<usize>, alpha: f64, gamma: f64, lambda: f64) {
        let q_next = next.map_or(0.0, |n| self.q[n]);
        let delta = r + gamma * q_next - self.q[cur];
        self.e[cur] = 1.0;
        for i in 0..self.q.len() {
            if self.e[i] != 0.0 {
                self.q[i] += alpha * delta * self.e[i];
                self.e[i] *= gamma * lambda;
                if self.e[i] < TRACE_FLOOR {
                    self.e[i] = 0.0;
                }
            }
        }
    }
}

fn sarsa_step_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let cfg = LearnerConfig::default();
    let mut tables = TableSet::new();
    let mut reference = Reference::new();
    let mut worst = 0.0f64;
    // a small pool of pairs so that traces overlap and revisit
    let pool: Vec<(WeaponCategory, usize, usize)> = (0..12)
        .map(|_| {
            let c = WeaponCategory::ALL[rng.gen_range(0..6)];
            (c, rng.gen_range(0..NUM_STATES), rng.gen_range(0..NUM_ACTIONS))
        })
        .collect();
    for step in 0..100 {
        if step % 25 == 24 {
            tables.begin_life();
            reference.e.iter_mut().for_each(|e| *e = 0.0);
        }
        let (c, s, a) = pool[rng.gen_range(0..pool.len())];
        let r = if rng.gen_bool(0.3) { -1.0 } else { rng.gen_range(0.0..120.0) };
        let next = rng.gen_bool(0.9).then(|| pool[rng.gen_range(0..pool.len())]);
        let sid = |s| StateId::new(s).unwrap();
        tables
            .sarsa_update((c, sid(s), a), r, next.map(|(c, s, a)| (c, sid(s), a)), &cfg)
            .unwrap();
        reference.step(
            pair_index(c, s, a),
            r,
            next.map(|(c, s, a)| pair_index(c, s, a)),
            cfg.alpha(),
            cfg.gamma(),
            cfg.lambda(),
        );
        for &(c, s, a) in &pool {
            let got = tables[c].q(sid(s), a);
            worst = worst.max((got - reference.q[pair_index(c, s, a)]).abs());
        }
    }
    let untouched = tables.nonzero_count() <= pool.len();
    outcome(
        worst < STEP_TOL && untouched,
        format!("100 updates, max |Q - reference| = {worst:.3e} (tol {STEP_TOL:.0e})"),
    )
}

/// Deterministic 5-state chain. Action 0 moves right (leaving state 4 ends the episode
/// with reward 1), action 1 moves left, actions 2-4 stay put at a cost.
fn chain_step(s: usize, a: usize) -> (f64, Option<usize>) {
    match a {
        0 if s == 4 => (1.0, None),
        0 => (0.0, Some(s + 1)),
        1 => (0.0, Some(s.saturating_sub(1))),
        _ => (-0.1 * (a - 1) as f64, Some(s)),
    }
}

fn chain_optimum(gamma: f64) -> Vec<[f64; NUM_ACTIONS]> {
    let mut q = vec![[0.0; NUM_ACTIONS]; 5];
    for _ in 0..500 {
        let v: Vec<f64> = q.iter().map(|row| row.iter().copied().fold(f64::MIN, f64::max)).collect();
        for (s, row) in q.iter_mut().enumerate() {
            for (a, slot) in row.iter_mut().enumerate() {
                let (r, next) = chain_step(s, a);
                *slot = r + gamma * next.map_or(0.0, |n| v[n]);
            }
        }
    }
    q
}

fn chain_convergence() -> Outcome {
    let cfg = LearnerConfig::default();
    let optimum = chain_optimum(cfg.gamma());
    let category = WeaponCategory::InstantHit;
    let mut tables = TableSet::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let episodes = 5000;
    for ep in 0..episodes {
        let epsilon = (1.0 - ep as f64 / 4000.0).max(0.0);
        tables.begin_life();
        // exploring start: every state-action pair keeps being tried after ε reaches 0
        let mut s = rng.gen_range(0..5);
        let mut a = rng.gen_range(0..NUM_ACTIONS);
        for _ in 0..50 {
            let (r, next) = chain_step(s, a);
            let sid = StateId::new(s).unwrap();
            match next {
                Some(n) => {
                    let nid = StateId::new(n).unwrap();
                    let next_a = tables[category].select_action(nid, epsilon, &mut rng).action;
                    tables
                        .sarsa_update((category, sid, a), r, Some((category, nid, next_a)), &cfg)
                        .unwrap();
                    s = n;
                    a = next_a;
                }
                None => {
                    tables.sarsa_update((category, sid, a), r, None, &cfg).unwrap();
                    break;
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for (s, row) in optimum.iter().enumerate() {
        for (a, &v) in row.iter().enumerate() {
            worst = worst.max((tables[category].q(StateId::new(s).unwrap(), a) - v).abs());
        }
    }
    outcome(
        worst < CONVERGENCE_TOL,
        format!("{episodes} episodes, max |Q - Q*| = {worst:.3e} (tol {CONVERGENCE_TOL:.0e})"),
    )
}

fn encoding_completeness() -> Outcome {
    let mut seen = HashSet::new();
    let mut round_trips = true;
    for distance in DistanceBand::ALL {
        for speed in [SpeedClass::Regular, SpeedClass::Fast] {
            for jumping in [false, true] {
                for d in 0..9 {
                    for rotation in RotationSector::ALL {
                        for instant_hit in [false, true] {
                            let attrs = StateAttributes {
                                distance,
                                speed,
                                jumping,
                                direction: DirectionClass::from_ordinal(d).unwrap(),
                                rotation,
                                instant_hit,
                            };
                            let id = attrs.encode();
                            round_trips &= id.decode() == attrs;
                            seen.insert(id.index());
                        }
                    }
                }
            }
        }
    }
    let covers = seen.len() == 1296 && seen.iter().all(|&i| i < 1296) && NUM_STATES == 1296;
    let pairs = WeaponCategory::ALL.len() * NUM_STATES * NUM_ACTIONS;
    outcome(
        covers && round_trips && pairs == 38880 && StateId::new(1296).is_err(),
        format!("{} distinct states, bijective {round_trips}, {pairs} state-action pairs", seen.len()),
    )
}

fn schedule_exactness() -> Outcome {
    let schedule = ExplorationSchedule::default();
    let expected = [(0, 0.5), (10_000, 0.4), (20_000, 0.3), (30_000, 0.2), (40_000, 0.1), (50_000, 0.05)];
    let mut exact = true;
    for (i, &(bound, eps)) in expected.iter().enumerate() {
        exact &= schedule.epsilon_for_lives(bound) == eps;
        if i > 0 {
            exact &= schedule.epsilon_for_lives(bound - 1) == expected[i - 1].1;
        }
    }
    exact &= schedule.epsilon_for_lives(1_000_000) == 0.05;

    let mut tables = TableSet::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 100_000;
    let state = StateId::new(701).unwrap();
    let explored = (0..n)
        .filter(|_| tables[WeaponCategory::InstantHit].select_action(state, 0.3, &mut rng).exploratory)
        .count();
    let freq = explored as f64 / n as f64;
    outcome(
        exact && (freq - 0.3).abs() <= EXPLORE_TOL,
        format!("band boundaries exact {exact}, exploratory share at ε=0.3 {:.2}% (30% ± 2%)", 100.0 * freq),
    )
}

fn metric_formulas() -> Outcome {
    let kd = [
        (kd_ratio(112_420, 48_299, 11_701), 1.87),
        (kd_ratio(63_934, 52_994, 7_006), 1.07),
        (kd_ratio(40_466, 54_136, 5_864), 0.67),
    ];
    let hits = [
        (hit_percentage(9.82, 26.84), 27.0),
        (hit_percentage(7.30, 21.41), 25.0),
        (hit_percentage(4.70, 17.83), 21.0),
    ];
    let kd_ok = kd.iter().all(|(v, want)| v.is_some_and(|v| (v - want).abs() <= KD_TOL));
    let hit_ok = hits.iter().all(|(v, want)| v.is_some_and(|v| (v - want).abs() <= HIT_TOL));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cma_ok = true;
    for _ in 0..200 {
        let len: usize = rng.gen_range(0..80);
        let series: Vec<f64> = (0..len).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let cma = centred_moving_average(&series, 11).unwrap();
        cma_ok &= cma.len() == len.saturating_sub(10);
        for (i, v) in cma.iter().enumerate() {
            let centre = i + 5;
            let mut sum = 0.0;
            for x in &series[centre - 5..=centre + 5] {
                sum += x;
            }
            cma_ok &= *v == sum / 11.0;
        }
    }
    let show = |v: &[(Option<f64>, f64)], digits: usize| {
        v.iter().map(|(x, _)| format!("{:.digits$}", x.unwrap_or(f64::NAN))).collect::<Vec<_>>().join("/")
    };
    outcome(
        kd_ok && hit_ok && cma_ok,
        format!(
            "KD {} (±{KD_TOL}), hit% {} (±{HIT_TOL}), CMA brute-force match {cma_ok}",
            show(&kd, 4),
            show(&hits, 2)
        ),
    )
}

fn campaign(level: u8, seed: u64, out: Option<&Path>, opts: CampaignOptions, snapshot_every: Option<u64>) -> CampaignResult {
    let mut cfg = ExperimentConfig::default();
    cfg.harness.seed = seed;
    if let Some(k) = snapshot_every {
        cfg.harness.snapshot_every = k;
    }
    let run: RunConfig = cfg.run_config(level, out.map(Path::to_path_buf)).unwrap();
    run_campaign(&run, opts).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn trend_reproduction() -> Outcome {
    let levels = [1u8, 3, 5];
    let results: Vec<(u8, u64, CampaignResult)> = thread::scope(|scope| {
        let handles: Vec<_> = levels
            .iter()
            .flat_map(|&l| TREND_SEEDS.iter().map(move |&s| (l, s)))
            .map(|(l, s)| scope.spawn(move || (l, s, campaign(l, s, None, CampaignOptions::default(), None))))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut kd_medians = Vec::new();
    let mut hit_medians = Vec::new();
    let mut shares = Vec::new();
    for level in levels {
        let (mut kds, mut hits, mut others, mut suicides) = (Vec::new(), Vec::new(), 0u64, 0u64);
        for (_, _, r) in results.iter().filter(|(l, _, _)| *l == level) {
            let s = summarize(&r.lives, &r.games).unwrap();
            kds.push(s.kd_ratio.unwrap_or(f64::INFINITY));
            hits.push(s.hit_percentage.unwrap_or(0.0));
            others += s.deaths_by_others;
            suicides += s.suicides;
        }
        kd_medians.push(median(kds));
        hit_medians.push(median(hits));
        shares.push(100.0 * suicides as f64 / (others + suicides).max(1) as f64);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[0] > w[1]);
    let shares_ok = shares.iter().all(|&s| (SUICIDE_SHARE.0..=SUICIDE_SHARE.1).contains(&s));
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" > ");
    outcome(
        decreasing(&kd_medians) && decreasing(&hit_medians) && shares_ok,
        format!(
            "median KD {}, median hit% {}, suicide share {}% (levels 1/3/5, seeds {TREND_SEEDS:?}, 30 games x 3 min)",
            fmt(&kd_medians),
            fmt(&hit_medians),
            shares.iter().map(|x| format!("{x:.1}")).collect::<Vec<_>>().join("/")
        ),
    )
}

fn learning_sanity() -> Outcome {
    let cfg = ExperimentConfig::default();
    let trained = campaign(1, 1, None, CampaignOptions::default(), None);
    let rules = cfg.rules().unwrap();
    let opponent = cfg.opponent(1).unwrap().clone();
    let max_seconds = 20_000.0 * 60.0;
    let eval = |mode| {
        evaluate_policy(&rules, &opponent, cfg.opponents.count, &trained.tables, mode, EVAL_LIVES, 77, max_seconds).unwrap()
    };
    let (greedy, random) = thread::scope(|s| {
        let g = s.spawn(|| eval(ShooterMode::Greedy));
        let r = s.spawn(|| eval(ShooterMode::Random));
        (g.join().unwrap(), r.join().unwrap())
    });
    let complete = greedy.len() == EVAL_LIVES && random.len() == EVAL_LIVES;
    let c = bootstrap_mean_difference(&greedy, &random, 10_000, 0.95, 7).unwrap();
    // greedy must be at least as good on average and not significantly worse
    let pass = complete && c.difference >= 0.0 && c.high > 0.0;
    outcome(
        pass,
        format!(
            "{} lives each: greedy mean reward {:.2}, random {:.2}, difference {:.2}, 95% CI [{:.2}, {:.2}]",
            greedy.len().min(random.len()),
            c.mean_a,
            c.mean_b,
            c.difference,
            c.low,
            c.high
        ),
    )
}

fn dir_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let roots = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for root in &roots {
        thread::scope(|scope| {
            for level in [1u8, 3, 5] {
                let dir = root.path().join(format!("level_{level}"));
                scope.spawn(move || campaign(level, 42, Some(&dir), CampaignOptions::default(), Some(1)));
            }
        });
    }
    let mut files = 0;
    let mut identical = true;
    for level in [1, 3, 5] {
        let sub = format!("level_{level}");
        let a = dir_files(&roots[0].path().join(&sub));
        let b = dir_files(&roots[1].path().join(&sub));
        files += a.len();
        identical &= a == b;
    }
    outcome(
        identical && files > 6,
        format!("two seed-42 runs of levels 1/3/5: {files} files (CSVs and snapshots), byte-identical {identical}"),
    )
}

fn accounting_identities() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for level in [1u8, 3, 5] {
        let dir = root.path().join(format!("level_{level}"));
        let opts = CampaignOptions { keep_event_logs: true };
        let r = campaign(level, 9, Some(&dir), opts, Some(1));
        let game_deaths: u64 = r.games.iter().map(|g| g.deaths_by_others + g.suicides).sum();
        let snapshots = fs::read_dir(&dir)
            .unwrap()
            .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "rlsq"))
            .count() as u64;
        let dead_lives = r.lives.iter().filter(|l| l.death_cause.is_death()).count() as u64;
        let (mut kills, mut killed, mut suicides) = (0u64, 0u64, 0u64);
        for e in r.event_logs.iter().flatten() {
            match e.kind {
                EventKind::Kill { killer: 0, victim } if victim != 0 => kills += 1,
                EventKind::Kill { victim: 0, .. } => killed += 1,
                EventKind::Suicide { victim: 0, .. } => suicides += 1,
                _ => {}
            }
        }
        let sum = |f: fn(&sarsa_arena::harness::GameRecord) -> u64| r.games.iter().map(f).sum::<u64>();
        let level_ok = game_deaths == r.deaths
            && snapshots == r.deaths
            && dead_lives == r.deaths
            && kills == sum(|g| g.kills)
            && killed == sum(|g| g.deaths_by_others)
            && suicides == sum(|g| g.suicides);
        ok &= level_ok;
        details.push(format!("L{level}: {} deaths = {snapshots} snapshots, {kills} kills", r.deaths));
    }
    outcome(ok, details.join("; "))
}
