use fdr_core::{
    aggregate_rates, generate_replicate, per_replicate_indicators, run_replicate, run_study,
    run_study_with, Procedure, RunOptions, SignificanceLevel, SimConfig, StudyResult,
};

fn config(m: usize, m0: usize, effect: f64, reps: usize, seed: u64) -> SimConfig {
    SimConfig {
        effect,
        n_replicates: reps,
        seed,
        ..SimConfig::new(m, m0)
    }
}

fn bits(result: &StudyResult) -> Vec<u64> {
    result
        .results
        .iter()
        .flat_map(|r| {
            let e = &r.estimates;
            [
                e.fdr,
                e.se_fdr,
                e.fwer,
                e.se_fwer,
                e.pcer,
                e.se_pcer,
                e.power.unwrap_or(-1.0),
                e.se_power.unwrap_or(-1.0),
            ]
        })
        .map(f64::to_bits)
        .collect()
}

#[test]
fn batching_and_threads_do_not_change_any_bit() {
    let cfg = config(20, 12, 2.5, 3000, 99);
    let reference = run_study_with(
        &cfg,
        &RunOptions {
            threads: 1,
            batch_size: 3000,
        },
    )
    .unwrap();
    for (threads, batch_size) in [(1, 1), (1, 7), (2, 64), (4, 333), (0, 512)] {
        let other = run_study_with(
            &cfg,
            &RunOptions {
                threads,
                batch_size,
            },
        )
        .unwrap();
        assert_eq!(
            bits(&reference),
            bits(&other),
            "threads={threads} batch={batch_size}"
        );
        assert_eq!(reference, other);
    }
}

#[test]
fn same_seed_same_result_other_seed_differs() {
    let cfg = config(16, 8, 3.0, 2000, 5);
    assert_eq!(
        bits(&run_study(&cfg).unwrap()),
        bits(&run_study(&cfg).unwrap())
    );
    let other = config(16, 8, 3.0, 2000, 6);
    assert_ne!(
        bits(&run_study(&cfg).unwrap()),
        bits(&run_study(&other).unwrap())
    );
}

#[test]
fn study_matches_sequential_aggregation_of_replicates() {
    let cfg = config(10, 4, 2.0, 500, 11);
    let study = run_study(&cfg).unwrap();
    for (k, proc_) in cfg.procedures.iter().enumerate() {
        let indicators: Vec<_> = (0..cfg.n_replicates)
            .map(|rep| per_replicate_indicators(&run_replicate(&cfg, rep).unwrap()[k]))
            .collect();
        let sequential = aggregate_rates(&indicators).unwrap();
        assert_eq!(study.get(*proc_).unwrap(), &sequential, "{proc_}");
    }
}

#[test]
fn per_replicate_power_ordering() {
    let mut cfg = config(16, 8, 3.0, 3000, 21);
    cfg.procedures = vec![
        Procedure::Bonferroni,
        Procedure::Sidak,
        Procedure::Holm,
        Procedure::Hochberg,
        Procedure::Bh,
        Procedure::Unadjusted,
    ];
    for rep in 0..cfg.n_replicates {
        let c = run_replicate(&cfg, rep).unwrap();
        let (bonf, sidak, holm, hoch, bh, unadj) = (c[0], c[1], c[2], c[3], c[4], c[5]);
        assert!(bonf.s <= sidak.s && bonf.s <= holm.s, "rep {rep}");
        assert!(
            holm.s <= hoch.s && hoch.s <= bh.s && bh.s <= unadj.s,
            "rep {rep}"
        );
        for counts in &c {
            assert!(counts.is_consistent());
        }
    }
}

#[test]
fn complete_null_fdr_equals_fwer_for_every_procedure() {
    let study = run_study(&config(16, 16, 3.0, 4000, 3)).unwrap();
    for r in &study.results {
        let e = &r.estimates;
        assert_eq!(e.fdr.to_bits(), e.fwer.to_bits(), "{}", r.procedure);
        assert_eq!(e.se_fdr.to_bits(), e.se_fwer.to_bits(), "{}", r.procedure);
        assert_eq!(e.power, None);
    }
}

#[test]
fn complete_null_error_rates() {
    let cfg = config(16, 16, 0.0, 20_000, 8);
    let study = run_study(&cfg).unwrap();
    let level = cfg.level.value();
    let bonf = study.get(Procedure::Bonferroni).unwrap();
    assert!(bonf.fwer <= level + 3.0 * bonf.se_fwer, "{bonf:?}");
    let unadj = study.get(Procedure::Unadjusted).unwrap();
    assert!(
        (unadj.pcer - level).abs() <= 3.0 * unadj.se_pcer,
        "{unadj:?}"
    );
}

#[test]
fn fdr_and_pcer_never_exceed_fwer() {
    for (m, m0) in [(8, 2), (16, 8), (32, 30)] {
        let study = run_study(&config(m, m0, 2.0, 2000, m as u64)).unwrap();
        for r in &study.results {
            let e = &r.estimates;
            assert!(e.fdr <= e.fwer, "{} {m} {m0}", r.procedure);
            assert!(e.pcer <= e.fwer, "{} {m} {m0}", r.procedure);
        }
    }
}

/// Kolmogorov–Smirnov distance of a sample from Uniform(0, 1).
fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &u)| ((i + 1) as f64 / n - u).max(u - i as f64 / n))
        .fold(0.0, f64::max)
}

#[test]
fn null_p_values_are_uniform() {
    // labels are irrelevant when the effect is zero
    let cfg = config(100, 40, 0.0, 1000, 17);
    let pooled: Vec<f64> = (0..cfg.n_replicates)
        .flat_map(|rep| generate_replicate(&cfg, rep).unwrap().0.values().to_vec())
        .collect();
    assert_eq!(pooled.len(), 100_000);
    let d = ks_uniform(pooled);
    assert!(d < 0.01, "KS statistic {d}");
}

#[test]
fn ks_helper_detects_non_uniform_samples() {
    let skewed: Vec<f64> = (0..10_000).map(|i| (i as f64 / 10_000.0).powi(2)).collect();
    assert!(ks_uniform(skewed) > 0.2);
    let grid: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
    assert!(ks_uniform(grid) < 1e-3);
}

#[test]
fn level_is_respected_by_bh_in_mixed_configuration() {
    let mut cfg = config(32, 16, 3.0, 5000, 77);
    cfg.level = SignificanceLevel::new(0.1).unwrap();
    let study = run_study(&cfg).unwrap();
    let bh = study.get(Procedure::Bh).unwrap();
    assert!(bh.fdr <= 0.1 + 3.0 * bh.se_fdr, "{bh:?}");
    let power = |p| study.get(p).unwrap().power.unwrap();
    assert!(power(Procedure::Bh) >= power(Procedure::Hochberg));
    assert!(power(Procedure::Hochberg) >= power(Procedure::Holm));
    assert!(power(Procedure::Holm) >= power(Procedure::Bonferroni));
}
