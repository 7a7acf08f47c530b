use hallsync_core::init::{random_field, RandomFieldSpec};
use hallsync_core::lp::{lambda, DyadicPartition};
use hallsync_core::spectral::{Grid, SpectralField};
use hallsync_core::wavenumbers::{
    kappa, lambda_b, lambda_u, pairwise_max, BoundMonitor, BoundSample, Condition, DeterminingShell,
    WavenumberParams,
};
use proptest::prelude::*;

use DeterminingShell::{Resolved, Unresolved};

fn params() -> WavenumberParams {
    WavenumberParams::new(2.5, 2.0, 0.05, 1.0, 1.0, 0.5).unwrap()
}

fn lr(f: &SpectralField, r: Option<f64>) -> f64 {
    let p = f.to_physical().unwrap();
    match r {
        Some(r) => p.lr_norm(r).unwrap(),
        None => p.linf_norm(),
    }
}

/// Direct evaluation of both conditions for every candidate.
fn oracle_u(f: &SpectralField, wp: &WavenumberParams, part: &DyadicPartition) -> DeterminingShell {
    let e = -1.0 + 3.0 / wp.r;
    let thr = wp.threshold();
    for q in 0..=part.q_max() {
        let low = lambda(q).powf(e) * lr(&part.lowpass(f, q).unwrap(), Some(wp.r));
        let high_ok = ((q + 1)..=part.q_max())
            .all(|p| lambda(p).powf(e) * lr(&part.project(f, p).unwrap(), Some(wp.r)) < thr);
        if low < thr && high_ok {
            return Resolved(q);
        }
    }
    Unresolved
}

fn oracle_b(f: &SpectralField, wp: &WavenumberParams, part: &DyadicPartition) -> DeterminingShell {
    let thr = wp.threshold();
    for q in 0..=part.q_max() {
        let low = lr(&part.lowpass(f, q).unwrap(), None);
        let high_ok = ((q + 1)..=part.q_max())
            .all(|p| lambda(p - q).powf(wp.delta) * lr(&part.project(f, p).unwrap(), None) < thr);
        if low < thr && high_ok {
            return Resolved(q);
        }
    }
    Unresolved
}

/// Rescales `f` to the given sup norm.
fn with_sup(f: &SpectralField, sup: f64) -> SpectralField {
    f.scaled(sup / f.to_physical().unwrap().linf_norm())
}

#[test]
fn agrees_with_direct_evaluation() {
    let g = Grid::new(32).unwrap();
    let part = DyadicPartition::new(&g).unwrap();
    let wp = params();
    let mut seen_u = std::collections::BTreeSet::new();
    let mut seen_b = std::collections::BTreeSet::new();
    for seed in 0..24u64 {
        let amp = 10f64.powf(-3.0 + 0.125 * seed as f64);
        let k_min = [1.0, 2.0, 3.0][seed as usize % 3];
        let f = random_field(&g, seed, RandomFieldSpec::band(amp, k_min, 6.0));
        let qu = lambda_u(&f, &wp, &part).shell;
        let qb = lambda_b(&f, &wp, &part).shell;
        assert_eq!(qu, oracle_u(&f, &wp, &part), "seed {seed}");
        assert_eq!(qb, oracle_b(&f, &wp, &part), "seed {seed}");
        seen_u.insert(qu);
        seen_b.insert(qb);
    }
    // The sweep should exercise more than one outcome for each field type.
    assert!(seen_u.len() >= 2, "{seen_u:?}");
    assert!(seen_b.len() >= 3, "{seen_b:?}");
}

#[test]
fn zero_fields_are_resolved_at_zero() {
    let g = Grid::new(32).unwrap();
    let part = DyadicPartition::new(&g).unwrap();
    let z = SpectralField::zeros(&g);
    let u = lambda_u(&z, &params(), &part);
    let b = lambda_b(&z, &params(), &part);
    assert_eq!(u.shell, Resolved(0));
    assert_eq!(b.shell, Resolved(0));
    assert_eq!(u.margin, 0.0);
    assert_eq!(b.blocker, None);
    assert_eq!(u.lambda(), 1.0);
}

#[test]
fn single_high_shell_examples() {
    // At n = 96 the top shell is q = 4, and 16 <= |k| <= 24 lies entirely in it.
    let g = Grid::new(96).unwrap();
    let part = DyadicPartition::new(&g).unwrap();
    assert_eq!(part.q_max(), 4);
    let wp = params();
    let thr = wp.threshold();
    let base = random_field(&g, 7, RandomFieldSpec::band(1.0, 16.0, 24.0));
    for q in -1..=3 {
        assert_eq!(part.project(&base, q).unwrap().max_abs(), 0.0);
    }

    // The lowpass passes for every candidate below 4, but lambda_{4-q}^2 ||b||_inf
    // fails down to q = 3 once ||b||_inf >= thr / 4.
    let b = lambda_b(&with_sup(&base, 0.5 * thr), &wp, &part);
    assert_eq!(b.shell, Resolved(4));
    assert_eq!(b.lambda(), 16.0);
    let blocker = b.blocker.unwrap();
    assert_eq!(blocker.candidate, 3);
    assert_eq!(blocker.condition, Condition::HighShell { p: 4 });
    assert!((blocker.ratio - 2.0).abs() < 1e-12);
    assert!((b.margin - 0.5).abs() < 1e-12);

    assert_eq!(lambda_b(&with_sup(&base, 1.5 * thr), &wp, &part).shell, Unresolved);
    assert_eq!(lambda_b(&with_sup(&base, 0.2 * thr / 256.0), &wp, &part).shell, Resolved(0));

    // For the velocity the top shell enters every candidate with the same weight.
    let ur = base.to_physical().unwrap().lr_norm(wp.r).unwrap();
    let weight = 16f64.powf(-1.0 + 3.0 / wp.r);
    let small = base.scaled(0.5 * thr / (weight * ur));
    let large = base.scaled(2.0 * thr / (weight * ur));
    assert_eq!(lambda_u(&small, &wp, &part).shell, Resolved(0));
    let reading = lambda_u(&large, &wp, &part);
    assert_eq!(reading.shell, Unresolved);
    assert!(reading.margin.is_nan());
    assert_eq!(reading.blocker.unwrap().candidate, 4);
    assert_eq!(reading.blocker.unwrap().condition, Condition::Lowpass);
}

#[test]
fn low_mode_blocks_lowpass() {
    let g = Grid::new(32).unwrap();
    let part = DyadicPartition::new(&g).unwrap();
    let wp = params();
    let base = random_field(&g, 3, RandomFieldSpec::band(1.0, 1.0, 1.0));
    let b = with_sup(&base, 2.0 * wp.threshold());
    let reading = lambda_b(&b, &wp, &part);
    assert_eq!(reading.shell, Unresolved);
    assert_eq!(reading.blocker.unwrap().condition, Condition::Lowpass);
}

#[test]
fn shell_ordering_and_pairwise_max() {
    assert!(Resolved(0) < Resolved(3));
    assert!(Resolved(i32::MAX) < Unresolved);
    assert_eq!(pairwise_max(Resolved(1), Resolved(2)), Resolved(2));
    assert_eq!(pairwise_max(Unresolved, Resolved(2)), Unresolved);
    assert_eq!(pairwise_max(Resolved(0), Unresolved), Unresolved);
    assert_eq!(Unresolved.lambda(), f64::INFINITY);
    assert_eq!(Resolved(3).lambda(), 8.0);
    assert_eq!(Unresolved.to_string(), "unresolved");
    assert_eq!(Resolved(2).to_string(), "2");
}

#[test]
fn parameter_validation() {
    assert!(WavenumberParams::new(2.0, 2.0, 0.05, 1.0, 1.0, 0.5).is_err());
    assert!(WavenumberParams::new(3.0, 2.0, 0.05, 1.0, 1.0, 0.5).is_err());
    assert!(WavenumberParams::new(2.5, 1.0, 0.05, 1.0, 1.0, 0.5).is_err());
    assert!(WavenumberParams::new(2.5, 2.0, 0.0, 1.0, 1.0, 0.5).is_err());
    assert!(WavenumberParams::new(2.5, 2.0, 0.05, 0.0, 1.0, 0.5).is_err());
    assert_eq!(kappa(2.0, 1.0, 4.0), 0.25);
    assert_eq!(kappa(0.5, 1.0, 0.0), 0.5);
    assert_eq!(params().threshold(), 0.05);
}

#[test]
fn bound_monitor_accounting() {
    let wp = params();
    let mut m = BoundMonitor::new(&wp);
    assert_eq!(
        m.record(Resolved(0), 0.0),
        BoundSample::Checked {
            pointwise_ok: true,
            margin: 0.0
        }
    );
    // Lambda = 4 needs ||grad b||_inf >= 0.2.
    assert_eq!(
        m.record(Resolved(2), 0.4),
        BoundSample::Checked {
            pointwise_ok: true,
            margin: 2.0
        }
    );
    assert!(matches!(
        m.record(Resolved(2), 0.1),
        BoundSample::Checked {
            pointwise_ok: false,
            ..
        }
    ));
    assert_eq!(m.record(Unresolved, 5.0), BoundSample::Skipped);
    assert_eq!(m.samples(), 3);
    assert_eq!(m.skipped(), 1);
    assert_eq!(m.violations(), 1);
    assert_eq!(m.min_margin_above_lambda0(), 0.5);
    assert!((m.mean_lambda_sq() - 11.0).abs() < 1e-12);
    assert!((m.mean_grad_sq() - 0.17 / 3.0).abs() < 1e-15);
    assert!((m.average_bound() - 0.17 / 3.0 / 0.0025).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn shells_grow_with_amplitude(seed in any::<u64>(), a in -4.0f64..0.0, factor in 1.0f64..30.0) {
        let g = Grid::new(24).unwrap();
        let part = DyadicPartition::new(&g).unwrap();
        let wp = params();
        let f = random_field(&g, seed, RandomFieldSpec::band(10f64.powf(a), 1.0, 4.5));
        let big = f.scaled(factor);
        prop_assert!(lambda_u(&f, &wp, &part).shell <= lambda_u(&big, &wp, &part).shell);
        prop_assert!(lambda_b(&f, &wp, &part).shell <= lambda_b(&big, &wp, &part).shell);
    }

    #[test]
    fn shells_shrink_with_threshold(seed in any::<u64>(), a in -4.0f64..0.0, c in 0.01f64..0.2) {
        let g = Grid::new(24).unwrap();
        let part = DyadicPartition::new(&g).unwrap();
        let strict = params().with_c_r(c);
        let loose = params().with_c_r(2.0 * c);
        let f = random_field(&g, seed, RandomFieldSpec::band(10f64.powf(a), 1.0, 4.5));
        prop_assert!(lambda_u(&f, &loose, &part).shell <= lambda_u(&f, &strict, &part).shell);
        prop_assert!(lambda_b(&f, &loose, &part).shell <= lambda_b(&f, &strict, &part).shell);
    }

    #[test]
    fn accepted_margin_below_one(seed in any::<u64>(), a in -4.0f64..0.0) {
        let g = Grid::new(24).unwrap();
        let part = DyadicPartition::new(&g).unwrap();
        let f = random_field(&g, seed, RandomFieldSpec::band(10f64.powf(a), 1.0, 4.5));
        for reading in [lambda_u(&f, &params(), &part), lambda_b(&f, &params(), &part)] {
            match reading.shell {
                Resolved(_) => prop_assert!(reading.margin < 1.0),
                Unresolved => prop_assert!(reading.margin.is_nan()),
            }
            if let Some(b) = reading.blocker {
                prop_assert!(b.ratio >= 1.0);
            }
        }
    }
}
