//! Cross-cutting properties of the analysis chain on random and fixture
//! states.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slitomo_core::states::{frobenius_distance, DensityMatrix, PureState2Q};
use slitomo_core::stategen::mix_states;
use slitomo_core::tomography::{
    decompose_two_component, fidelity, fit_mixture_weights, project_physical, purity,
};

#[test]
fn projection_never_increases_distance_to_physical_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let target = common::measured_matrix();
    let projected = project_physical(&target);
    for _ in 0..50 {
        let reference = DensityMatrix::random_physical(&mut rng);
        let before = frobenius_distance(target.matrix(), reference.matrix());
        let after = frobenius_distance(projected.matrix(), reference.matrix());
        assert!(
            after <= before + 1e-12,
            "projection moved away from a physical state: {after} > {before}"
        );
    }
}

#[test]
fn projection_distance_to_measured_matrix_is_recorded() {
    let rho = common::measured_matrix();
    let projected = project_physical(&rho);
    let dist = frobenius_distance(projected.matrix(), rho.matrix());
    assert!((dist - 0.163_076_55).abs() < 1e-6, "distance {dist}");
    assert!(projected.is_physical(1e-12));
}

#[test]
fn projected_eigenvalues_beat_a_brute_force_simplex_grid() {
    // the projection minimizes ||λ' − λ||² over the probability simplex;
    // sweep the simplex on a 0.005 grid and confirm nothing does better
    let rho = common::measured_matrix();
    let lambda = rho.eigenvalues_desc();
    let projected = project_physical(&rho).eigenvalues_desc();
    let projected_cost: f64 = lambda
        .iter()
        .zip(&projected)
        .map(|(a, b)| (a - b).powi(2))
        .sum();

    let steps = 200i64;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=(steps - i) {
            for k in 0..=(steps - i - j) {
                let l = steps - i - j - k;
                let candidate = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    k as f64 / steps as f64,
                    l as f64 / steps as f64,
                ];
                let cost: f64 = lambda
                    .iter()
                    .zip(&candidate)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                best = best.min(cost);
            }
        }
    }
    assert!(
        projected_cost <= best + 1e-12,
        "grid found a better point: {best} < {projected_cost}"
    );
    // and the grid optimum is within grid resolution of the projection
    assert!(best - projected_cost < 1e-3, "projection suspiciously far from grid optimum");
}

#[test]
fn purity_of_the_fitted_mixture_matches_the_overlap_formula() {
    let phi1 = common::fitted_dominant_component();
    let phi2 = common::fitted_minor_component();
    let rho = mix_states(&[0.87, 0.13], &[phi1.clone(), phi2.clone()]).unwrap();
    let overlap_sq = phi1.overlap(&phi2).norm_sqr();
    let expect = 0.87f64.powi(2) + 0.13f64.powi(2) + 2.0 * 0.87 * 0.13 * overlap_sq;
    let got = purity(&rho);
    assert!((got - expect).abs() < 1e-12, "purity {got} vs formula {expect}");
}

#[test]
fn decomposition_of_the_measured_matrix_matches_the_fit() {
    let dec = decompose_two_component(&common::measured_matrix());
    assert!(
        (dec.weights.0 - 0.87).abs() <= 0.10,
        "dominant weight {} strays from 0.87",
        dec.weights.0
    );
    let fid = dec
        .components
        .0
        .overlap(&common::fitted_dominant_component())
        .norm_sqr();
    assert!(fid >= 0.95, "dominant-component fidelity {fid}");
    assert!((dec.weights.0 + dec.weights.1 - 1.0).abs() < 1e-12);
    assert!(!dec.degenerate_split);
}

#[test]
fn fidelity_is_symmetric_and_matches_pure_overlap() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10 {
        let a = DensityMatrix::random_physical(&mut rng);
        let b = DensityMatrix::random_physical(&mut rng);
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        assert!((fab - fba).abs() < 1e-9, "asymmetry {fab} vs {fba}");
        assert!((0.0..=1.0).contains(&fab));

        let psi = PureState2Q::random(&mut rng);
        let phi = PureState2Q::random(&mut rng);
        let f = fidelity(&psi.projector(), &phi.projector()).unwrap();
        let expect = psi.overlap(&phi).norm_sqr();
        // the √ of numerically-zero eigenvalues limits accuracy to ~√ε
        assert!((f - expect).abs() < 1e-7, "{f} vs |<ψ|φ>|² = {expect}");
    }
}

#[test]
fn mixing_reduces_fringe_visibility_off_axis() {
    // with the idler at Δ the two mixture components carry different fringe
    // phases, so the mixed state washes out relative to the pure arm-1 state
    // (recorded baselines ≈ 0.9995 vs ≈ 0.886); on the optical axis the two
    // components share one fringe shape and the contrast would coincide
    let geom = slitomo_core::presets::geometry();
    let opt = slitomo_core::presets::optics();
    let b = slitomo_core::presets::DETECTOR_HALF_WIDTH;
    let delta = slitomo_core::presets::DETECTOR_SPACING;
    let (p1, p2) = slitomo_core::stategen::arm_states(&geom, &opt).unwrap();
    let mixed = mix_states(&[0.87, 0.13], &[p1.clone(), p2]).unwrap();
    let range = (-7.0e-3, 7.0e-3);

    let pure_scan =
        slitomo_core::fringe::scan(&p1.projector(), &geom, &opt, b, delta, range, 1401).unwrap();
    let mixed_scan = slitomo_core::fringe::scan(&mixed, &geom, &opt, b, delta, range, 1401).unwrap();
    let vis_pure = slitomo_core::fringe::visibility(&pure_scan, 2.0 * delta);
    let vis_mixed = slitomo_core::fringe::visibility(&mixed_scan, 2.0 * delta);
    assert!(
        vis_pure > vis_mixed + 0.05,
        "pure {vis_pure} vs mixed {vis_mixed}"
    );
    assert!((vis_pure - 0.9995).abs() < 5e-3, "pure visibility {vis_pure} drifted");
    assert!((vis_mixed - 0.886).abs() < 2e-2, "mixed visibility {vis_mixed} drifted");
}

#[test]
fn weight_fit_tracks_the_mixing_weight_across_the_range() {
    let geom = slitomo_core::presets::geometry();
    let opt = slitomo_core::presets::optics();
    let (p1, p2) = slitomo_core::stategen::arm_states(&geom, &opt).unwrap();
    for w in [0.0, 0.25, 0.5, 0.87, 1.0] {
        let rho = mix_states(&[w, 1.0 - w], &[p1.clone(), p2.clone()]).unwrap();
        let (a, b) = fit_mixture_weights(&rho, &p1, &p2);
        assert!((a - w).abs() < 1e-10, "w = {w}: fitted {a}");
        assert!((a + b - 1.0).abs() < 1e-12);
    }
}
