mod common;

use common::Shooting;
use inls_core::groundstate::{self, GroundStateOptions};
use inls_core::{certify, presets, Field, RadialGrid};

fn deviation(shot: &Shooting, grid: &RadialGrid, psi: &Field, from: f64) -> f64 {
    grid.nodes()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r >= from && r <= shot.trusted)
        .map(|(j, &r)| (psi.component(0)[j].re - shot.value(r)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn shooting_profile_is_self_consistent() {
    let shot = Shooting::solve(12.0);
    assert!(shot.psi0 > 1.0 && shot.psi0 < 10.0, "ψ(0) = {}", shot.psi0);
    assert!(shot.trusted > 6.0, "trusted up to r = {}", shot.trusted);
    let mut prev = f64::INFINITY;
    for i in 0..60 {
        let v = shot.value(0.1 * i as f64);
        assert!(v > 0.0 && v < prev);
        prev = v;
    }
}

#[test]
fn petviashvili_converges_to_shooting() {
    let spec = presets::scalar(3, 0.5).unwrap();
    let shot = Shooting::solve(12.0);
    let mut sup = Vec::new();
    let mut away = Vec::new();
    for points in [2048, 4096] {
        let grid = RadialGrid::new(3, points, 40.0).unwrap();
        let gs = groundstate::solve(&spec, 1.0, &grid, &GroundStateOptions::default()).unwrap();
        assert!(gs.iterations < 500);
        if points == 4096 {
            assert!(certify(&spec, &gs).unwrap().all_pass());
        }
        sup.push(deviation(&shot, &grid, &gs.psi, 0.0));
        away.push(deviation(&shot, &grid, &gs.psi, 0.2));
    }
    // the r^{3/2} cusp at the origin lowers the local order below two
    assert!(sup[0] / sup[1] > 2.8, "{sup:?}");
    assert!(away[0] / away[1] > 3.6, "{away:?}");
    assert!(sup[1] < 2e-3 && away[1] < 3e-4, "{sup:?} {away:?}");
}
