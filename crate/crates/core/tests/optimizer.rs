use proptest::prelude::*;

use prefsearch::latent::{norm, squared_distance};
use prefsearch::oracle::{Objective, ScalarObjective, ScriptedOracle, Transformed};
use prefsearch::ranking::transcript::{read_transcript, write_transcript};
use prefsearch::ranking::{
    build_comparison_dag, estimate_gradient, replay, run_scripted, FeedbackKind, OptimizerConfig, OptimizerState,
    RankFeedback, RoundRecord, RunOutcome, SessionStart, Stage, StopRule,
};
use prefsearch::stats::{mean, std_dev};
use prefsearch::LatentPoint;

fn sphere_run(d: usize, seed: u64, stop: StopRule) -> (f64, f64) {
    let config = OptimizerConfig {
        seed,
        ..OptimizerConfig::with_dim(d)
    };
    let objective = ScalarObjective::sphere(d);
    let run = run_scripted(config, ScriptedOracle::new(objective.clone(), 4), stop).unwrap();
    let initial = run.log.best_f_per_round()[0];
    (initial, objective.evaluate(run.result.as_slice()).unwrap())
}

#[test]
fn sphere_d2_improves_on_initial_best() {
    let (initial, last) = sphere_run(2, 1, StopRule::new(10, 5));
    assert!(last < initial, "{last} >= {initial}");
    let ratios: Vec<f64> = (0..20)
        .map(|seed| {
            let (initial, last) = sphere_run(2, seed, StopRule::new(10, 5));
            last / initial
        })
        .collect();
    let med = prefsearch::stats::median(&ratios);
    assert!(med < 0.1, "median ratio {med}");
}

#[test]
fn zero_rounds_returns_best_initial_candidate() {
    let config = OptimizerConfig {
        seed: 4,
        ..OptimizerConfig::with_dim(5)
    };
    let objective = ScalarObjective::sphere(5);
    let init = OptimizerState::init_session(config.clone()).unwrap();
    let brute = init
        .candidates
        .points
        .iter()
        .min_by(|a, b| {
            objective
                .evaluate(a.as_slice())
                .unwrap()
                .total_cmp(&objective.evaluate(b.as_slice()).unwrap())
        })
        .unwrap()
        .clone();
    let run = run_scripted(config, ScriptedOracle::new(objective, 4), StopRule::new(0, 0)).unwrap();
    assert_eq!(run.result, brute);
    assert_eq!(run.log.rounds.len(), 1);
}

#[test]
fn initial_spread_matches_mu1() {
    let mut xs = Vec::new();
    for seed in 0..200 {
        let config = OptimizerConfig {
            seed,
            ..OptimizerConfig::with_dim(32)
        };
        let state = OptimizerState::init_session(config).unwrap();
        assert_eq!(state.candidates.len(), 4);
        assert_eq!(state.tau, 0);
        assert!(state.g_bar.iter().all(|&g| g == 0.0));
        xs.extend(state.candidates.points.iter().flat_map(|p| p.as_slice().to_vec()));
    }
    let sd = std_dev(&xs);
    assert!((sd / 0.8 - 1.0).abs() < 0.05, "std {sd}");
    assert!(mean(&xs).abs() < 0.02);
}

#[test]
fn refine_start_locality_over_many_inits() {
    let from = LatentPoint::new((0..16).map(|i| i as f64 * 0.1 - 0.5).collect()).unwrap();
    let mu3 = OptimizerConfig::default().mu3;
    let (mut inside, mut total) = (0usize, 0usize);
    for seed in 0..10_000 {
        let config = OptimizerConfig {
            seed,
            elitism: false,
            ..OptimizerConfig::with_dim(16)
        };
        let state = OptimizerState::start(config, &SessionStart::Refine { from: from.clone() }).unwrap();
        for p in &state.candidates.points {
            for (x, c) in p.as_slice().iter().zip(from.as_slice()) {
                total += 1;
                inside += usize::from((x - c).abs() <= 3.0 * mu3);
            }
        }
    }
    assert!(inside as f64 / total as f64 >= 0.99);
}

#[test]
fn running_mean_matches_recomputed_estimates() {
    let config = OptimizerConfig {
        seed: 21,
        max_stage1_rounds: 25,
        ..OptimizerConfig::with_dim(6)
    };
    let run = run_scripted(config.clone(), ScriptedOracle::new(ScalarObjective::sphere(6), 4), StopRule::new(25, 0))
        .unwrap();
    let mut estimates: Vec<Vec<f64>> = Vec::new();
    for (t, logged) in run.log.rounds.iter().enumerate() {
        let record = &logged.record;
        if record.stage != Stage::Stage1 || t >= 25 {
            continue;
        }
        let dag = build_comparison_dag(4, &record.feedback).unwrap();
        let mu = if t == 0 { config.mu1 } else { config.mu2 };
        estimates.push(estimate_gradient(&record.candidates, &dag, mu).unwrap());
        let n = estimates.len() as f64;
        let expected: Vec<f64> = (0..6).map(|j| estimates.iter().map(|g| g[j]).sum::<f64>() / n).collect();
        let err = squared_distance(&expected, &record.g_bar).sqrt();
        assert!(err <= 1e-12 * norm(&expected).max(1e-300), "round {t}: error {err}");
        assert_eq!(record.tau, t + 1);
    }
    assert_eq!(estimates.len(), 25);
}

#[test]
fn transcript_file_round_trip_replays_bitwise() {
    let config = OptimizerConfig {
        seed: 3,
        ..OptimizerConfig::with_dim(12)
    };
    let run = run_scripted(config.clone(), ScriptedOracle::new(ScalarObjective::sphere(12), 4), StopRule::from_caps(&config))
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    write_transcript(std::fs::File::create(&path).unwrap(), &run.log.records()).unwrap();
    let records = read_transcript(std::io::BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    let state = replay(config, &SessionStart::Cold, &records).unwrap();
    let bits = |p: &LatentPoint| p.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(state.result().unwrap()), bits(&run.result));
}

fn stage2_run(seed: u64, elitism: bool) -> (ScalarObjective, RunOutcome) {
    let config = OptimizerConfig {
        seed,
        elitism,
        max_stage2_rounds: 20,
        ..OptimizerConfig::with_dim(8)
    };
    let objective = ScalarObjective::sphere(8);
    let run = run_scripted(config, ScriptedOracle::new(objective.clone(), 4), StopRule::new(5, 20)).unwrap();
    (objective, run)
}

fn chosen(record: &RoundRecord) -> &LatentPoint {
    &record.candidates[record.feedback.best()]
}

/// The incumbent after each Stage-2 selection, plus the one entering Stage 2.
fn stage2_choices(run: &RunOutcome) -> Vec<LatentPoint> {
    let mut out = Vec::new();
    for r in &run.log.rounds {
        if r.record.stage == Stage::Stage2 || r.record.feedback.kind == FeedbackKind::BestOnly {
            out.push(chosen(&r.record).clone());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn elitism_makes_incumbent_monotone(seed in 0u64..10_000) {
        let (objective, run) = stage2_run(seed, true);
        let incumbents: Vec<f64> = stage2_choices(&run)
            .iter()
            .map(|z| objective.evaluate(z.as_slice()).unwrap())
            .collect();
        prop_assert!(incumbents.len() >= 20);
        for w in incumbents.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn without_elitism_incumbent_is_never_a_candidate(seed in 0u64..10_000) {
        let (_, run) = stage2_run(seed, false);
        for pair in run.log.rounds.windows(2) {
            if pair[1].record.stage == Stage::Stage2 {
                let chosen = chosen(&pair[0].record);
                prop_assert!(!pair[1].record.candidates.contains(chosen));
            }
        }
    }

    #[test]
    fn stage2_selection_is_candidate_argmin(seed in 0u64..10_000) {
        let (objective, run) = stage2_run(seed, seed % 2 == 0);
        for r in &run.log.rounds {
            let brute = r
                .record
                .candidates
                .iter()
                .min_by(|a, b| objective.evaluate(a.as_slice()).unwrap().total_cmp(&objective.evaluate(b.as_slice()).unwrap()))
                .unwrap();
            prop_assert_eq!(chosen(&r.record), brute);
        }
        prop_assert_eq!(&run.result, chosen(&run.log.rounds.last().unwrap().record));
    }

    #[test]
    fn monotone_transforms_leave_transcripts_unchanged(seed in 0u64..10_000, which in 0usize..3) {
        let config = OptimizerConfig { seed, ..OptimizerConfig::with_dim(6) };
        let stop = StopRule::from_caps(&config);
        let base = run_scripted(config.clone(), ScriptedOracle::new(ScalarObjective::sphere(6), 4), stop).unwrap();
        let transform: fn(f64) -> f64 = [|x: f64| x.powi(3), |x: f64| 2.0 * x + 1.0, |x: f64| x.ln_1p()][which];
        let warped = Transformed { inner: ScalarObjective::sphere(6), transform };
        let other = run_scripted(config, ScriptedOracle::new(warped, 4), stop).unwrap();
        prop_assert_eq!(base.log.records(), other.log.records());
    }

    #[test]
    fn same_seed_same_log(seed in 0u64..10_000) {
        let config = OptimizerConfig { seed, ..OptimizerConfig::with_dim(4) };
        let stop = StopRule::from_caps(&config);
        let a = run_scripted(config.clone(), ScriptedOracle::new(ScalarObjective::Rosenbrock { dim: 4 }, 4), stop).unwrap();
        let b = run_scripted(config, ScriptedOracle::new(ScalarObjective::Rosenbrock { dim: 4 }, 4), stop).unwrap();
        prop_assert_eq!(
            serde_json::to_string(&a.log).unwrap(),
            serde_json::to_string(&b.log).unwrap()
        );
    }
}

#[test]
fn best_only_in_stage1_moves_to_stage2() {
    let state = OptimizerState::init_session(OptimizerConfig::with_dim(3)).unwrap();
    let next = state.apply(&RankFeedback::best_only(2)).unwrap();
    assert_eq!(next.stage, Stage::Stage2);
    assert_eq!(next.z_star_star.as_ref(), Some(&state.candidates.points[2]));
}
