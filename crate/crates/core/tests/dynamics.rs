mod common;

use common::gaussian;
use inls_core::dichotomy::virial_defect;
use inls_core::groundstate::{self, GroundStateResult};
use inls_core::{
    build_cutoff, classify, delta_margin, evolve, evolve_observed, pohozaev_functional, presets,
    thresholds_from_groundstate, virial_consistency, BlowUpReason, EvolveOptions, Field, RadialGrid,
    SystemSpec, ThresholdSet, Verdict, VirialObserver,
};
use num_complex::Complex64;

fn benchmark() -> (SystemSpec, GroundStateResult, ThresholdSet) {
    let spec = presets::two_wave(3, 0.6, 1.0, 0.0).unwrap();
    let grid = RadialGrid::new(3, 2048, 20.0).unwrap();
    let gs = groundstate::solve(&spec, 1.0, &grid, &Default::default()).unwrap();
    let th = thresholds_from_groundstate(&spec, &gs).unwrap();
    (spec, gs, th)
}

#[test]
fn verdicts_split_at_the_ground_state() {
    let (spec, gs, th) = benchmark();
    for (c, expected) in [
        (0.8, Verdict::GlobalIntercritical),
        (0.9, Verdict::GlobalIntercritical),
        (1.05, Verdict::BlowUpCandidate),
        (1.1, Verdict::BlowUpCandidate),
    ] {
        let u = gs.psi.scaled(Complex64::new(c, 0.0));
        let cls = classify(&spec, &u, &th, true).unwrap();
        assert_eq!(cls.verdict, expected, "c = {c}: {cls}");
    }
    let at = classify(&spec, &gs.psi, &th, true).unwrap();
    assert_eq!(at.verdict, Verdict::Indeterminate);
}

#[test]
fn pohozaev_vanishes_on_the_ground_state_and_signs_the_scalings() {
    let (spec, gs, th) = benchmark();
    let p = pohozaev_functional(&spec, &gs.psi).unwrap();
    let scale = gs.report.k;
    assert!(p.direct.abs() < 1e-3 * scale, "𝒯 = {}", p.direct);
    assert!((p.direct - p.recombined).abs() < 1e-9 * scale);
    let above = gs.psi.scaled(Complex64::new(1.1, 0.0));
    let below = gs.psi.scaled(Complex64::new(0.9, 0.0));
    assert!(delta_margin(&spec, &above, &th).unwrap() > 0.0);
    assert!(delta_margin(&spec, &below, &th).unwrap() < 0.0);
}

#[test]
fn subcritical_run_conserves_and_satisfies_the_virial_law() {
    let spec = presets::two_wave(2, 0.5, 1.0, 0.5).unwrap();
    let grid = RadialGrid::new(2, 1024, 20.0).unwrap();
    let cutoff = build_cutoff(&grid, 5.0).unwrap();
    let u0 = gaussian(&grid, &[1.0, 0.5], 1.5, 0.2);
    let opts = EvolveOptions {
        dt: 2e-4,
        t_final: 0.2,
        monitor_stride: 5,
        snapshot_every: Some(5),
        ..Default::default()
    };
    let trace = evolve_observed(&spec, &u0, &opts, &mut VirialObserver::new(&spec, &cutoff)).unwrap();
    assert!(trace.blowup.is_none());
    assert!(trace.relative_drift(|r| r.q) < 1e-12);
    assert!(trace.relative_drift(|r| r.e) < 1e-5);
    let samples: Vec<_> = trace.rows.iter().filter_map(|r| r.virial).collect();
    assert_eq!(samples.len(), trace.rows.len());
    assert!(virial_defect(&samples).unwrap() < 1e-4);
    let from_snapshots = virial_consistency(&spec, &trace.snapshots, &cutoff).unwrap();
    assert!(from_snapshots < 1e-4);
    let csv = trace.to_csv();
    assert!(csv.lines().next().unwrap().contains("virial_rhs"));
    assert_eq!(csv.lines().count(), trace.rows.len() + 1);
}

#[test]
fn supercritical_scaling_is_flagged() {
    let (spec, gs, _) = benchmark();
    let u0 = gs.psi.scaled(Complex64::new(1.3, 0.0));
    let opts = EvolveOptions { dt: 1e-4, t_final: 1.0, ..Default::default() };
    let trace = evolve(&spec, &u0, &opts).unwrap();
    let flag = trace.blowup.expect("collapse flagged");
    assert!(flag.time < 1.0);
    assert!(matches!(flag.reason, BlowUpReason::Kinetic | BlowUpReason::Resolution));
    let k0 = trace.rows[0].k;
    assert!(trace.rows.last().unwrap().k > 10.0 * k0);
}

#[test]
fn runs_are_deterministic() {
    let spec = presets::two_wave(2, 0.5, 1.0, 0.0).unwrap();
    let grid = RadialGrid::new(2, 256, 16.0).unwrap();
    let u0: Field = gaussian(&grid, &[1.0, 0.5], 1.0, 0.1);
    let opts = EvolveOptions { dt: 1e-3, t_final: 0.05, ..Default::default() };
    let a = evolve(&spec, &u0, &opts).unwrap();
    let b = evolve(&spec, &u0, &opts).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}
