//! Cross-route and physics-invariant checks that span modules: the
//! number-basis solver against the independent phase-grid solver, exact
//! symmetries of the spectrum, truncation behavior, and the sweet-spot
//! finder against known spot inventories.

use flatsonium_core::circuit::{
    build_effective_hamiltonian, build_hamiltonian, lowest_eigenvalues, CircuitParams, FluxBias,
};
use flatsonium_core::error::CoreError;
use flatsonium_core::noise::{flux_sensitivity, SensitivityMode};
use flatsonium_core::oracle::{
    phase_grid_eigenlevels, richardson_phase_grid_levels, PhaseGridSpec,
};
use flatsonium_core::spectrum::{
    eigenlevels, find_sweet_spots, find_sweet_spots_default, linspace, sweep_spectrum,
    SpotKind, SweetSpotSearch,
};

/// Workhorse parameters: E_C=6, E_L=0.5, E_JΣ=20, b=3, r=2 (GHz).
fn bench_params() -> CircuitParams {
    CircuitParams::new(6.0, 0.5, 20.0, 3.0, 2.0).unwrap()
}

/// Single-junction reference device: b = 0 (one junction), r = 0 (only
/// the second loop is biased, so the total flux is the bias).
fn single_junction_params() -> CircuitParams {
    CircuitParams::new(6.0, 0.5, 20.0, 0.0, 0.0).unwrap()
}

fn transitions_from_levels(levels: &[f64]) -> [f64; 3] {
    [
        levels[1] - levels[0],
        levels[2] - levels[1],
        levels[3] - levels[2],
    ]
}

/// The two independent solver routes must agree on the lowest three
/// transitions to 1e-4 relative at eleven equispaced flux points, already
/// at the default resolutions (basis 50, grid 2001).
#[test]
fn fock_and_grid_transitions_agree_at_default_resolution() {
    let p = bench_params();
    let spec = PhaseGridSpec::default();
    let mut worst: f64 = 0.0;
    for x2 in linspace(0.0, 1.0, 11) {
        let bias = FluxBias::constrained(p.r(), x2);
        let fock = eigenlevels(&p, &bias, 50, 4).unwrap();
        let grid = phase_grid_eigenlevels(&p, &bias, &spec, 4).unwrap();
        let tf = transitions_from_levels(&fock);
        let tg = transitions_from_levels(&grid);
        for (a, b) in tf.iter().zip(tg.iter()) {
            let rel = (a - b).abs() / b.abs();
            worst = worst.max(rel);
        }
    }
    assert!(
        worst < 1e-4,
        "worst relative transition disagreement {worst:.3e}"
    );
}

/// The same cross-check tightens by an order of magnitude when both
/// routes get more resolution (basis 70, grid 8001): the 1e-4 agreement
/// above is a converged property, not a coincidence of matched biases.
#[test]
fn fock_and_grid_transitions_agree_tightly_at_higher_resolution() {
    let p = bench_params();
    let spec = PhaseGridSpec::new(flatsonium_core::DEFAULT_HALF_WIDTH, 8001).unwrap();
    let mut worst: f64 = 0.0;
    for x2 in linspace(0.0, 1.0, 11) {
        let bias = FluxBias::constrained(p.r(), x2);
        let fock = eigenlevels(&p, &bias, 70, 4).unwrap();
        let grid = phase_grid_eigenlevels(&p, &bias, &spec, 4).unwrap();
        let tf = transitions_from_levels(&fock);
        let tg = transitions_from_levels(&grid);
        for (a, b) in tf.iter().zip(tg.iter()) {
            let rel = (a - b).abs() / b.abs();
            worst = worst.max(rel);
        }
    }
    assert!(
        worst < 1e-5,
        "worst relative transition disagreement {worst:.3e}"
    );
}

/// Absolute levels (not just transitions) agree between a well-converged
/// basis solve and the Richardson-extrapolated phase grid.
#[test]
fn levels_match_richardson_extrapolated_grid() {
    let p = bench_params();
    let spec = PhaseGridSpec::new(flatsonium_core::DEFAULT_HALF_WIDTH, 4001).unwrap();
    let mut worst: f64 = 0.0;
    for x2 in linspace(0.0, 1.0, 11) {
        let bias = FluxBias::constrained(p.r(), x2);
        let fock = eigenlevels(&p, &bias, 70, 4).unwrap();
        let rich = richardson_phase_grid_levels(&p, &bias, &spec, 4).unwrap();
        for (a, b) in fock.iter().zip(rich.iter()) {
            let rel = (a - b).abs() / b.abs();
            worst = worst.max(rel);
        }
    }
    assert!(worst < 1e-4, "worst relative level disagreement {worst:.3e}");
}

/// The two-cosine and single-effective-junction constructions are the
/// same operator up to a trigonometric identity, so their spectra must
/// agree essentially to machine precision across the flux period.
#[test]
fn hamiltonian_forms_agree_across_the_flux_period() {
    let p = bench_params();
    for x2 in linspace(0.0, 1.0, 21) {
        let h2 = build_hamiltonian(&p, &FluxBias::constrained(p.r(), x2), 50).unwrap();
        let h1 = build_effective_hamiltonian(&p, x2, 50).unwrap();
        let lv2 = lowest_eigenvalues(&h2, 6).unwrap();
        let lv1 = lowest_eigenvalues(&h1, 6).unwrap();
        for (a, b) in lv2.iter().zip(lv1.iter()) {
            assert!(
                (a - b).abs() <= 1e-9,
                "forms disagree at x2 = {x2}: {a} vs {b}"
            );
        }
    }
}

/// For an integer tie ratio, shifting the bias by one flux quantum shifts
/// both cosine arguments by full turns: the spectrum is exactly periodic.
#[test]
fn spectrum_is_periodic_in_one_flux_quantum() {
    let p = bench_params();
    for &x2 in &[0.13, 0.37] {
        let a = eigenlevels(&p, &FluxBias::constrained(p.r(), x2), 50, 50).unwrap();
        let b = eigenlevels(&p, &FluxBias::constrained(p.r(), x2 + 1.0), 50, 50).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            assert!((u - v).abs() <= 1e-9, "periodicity broken at x2 = {x2}");
        }
    }
}

/// When the junction asymmetry matches the tie as b = r + 1, the spectrum
/// is mirror-symmetric about the half-quantum bias.
#[test]
fn mirror_symmetry_when_asymmetry_matches_tie() {
    let p = bench_params(); // b = 3 = r + 1 for r = 2
    for &x2 in &[0.1, 0.23, 0.4] {
        let a = eigenlevels(&p, &FluxBias::constrained(p.r(), x2), 50, 6).unwrap();
        let b = eigenlevels(&p, &FluxBias::constrained(p.r(), 1.0 - x2), 50, 6).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            assert!((u - v).abs() <= 1e-9, "mirror broken at x2 = {x2}");
        }
    }
}

/// The single-junction device is symmetric about the half-quantum point.
#[test]
fn single_junction_spectrum_is_symmetric_about_half_flux() {
    let p = single_junction_params();
    for &d in &[0.1, 0.2, 0.35] {
        let a = eigenlevels(&p, &FluxBias::constrained(p.r(), 0.5 - d), 50, 4).unwrap();
        let b = eigenlevels(&p, &FluxBias::constrained(p.r(), 0.5 + d), 50, 4).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            assert!((u - v).abs() <= 1e-9, "symmetry broken at offset {d}");
        }
    }
}

/// Enlarging the basis from 50 to 70 moves the lowest four levels at the
/// engineered bias by well under 1e-4 GHz. (Measured movement there is
/// ~3.3e-5 GHz, dominated by the 4th level; movements shrink roughly
/// 10x per +20 basis states, reaching ~4e-6 GHz only for 80 → 100.)
#[test]
fn truncation_movement_is_small_at_the_engineered_bias() {
    let p = bench_params();
    let bias = FluxBias::constrained(p.r(), 0.25);
    let small = eigenlevels(&p, &bias, 50, 4).unwrap();
    let large = eigenlevels(&p, &bias, 70, 4).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in small.iter().zip(large.iter()) {
        worst = worst.max((a - b).abs());
    }
    assert!(worst < 1e-4, "worst level movement {worst:.3e} GHz");
}

/// The f12 transition never collides with f01 anywhere on the standard
/// sweep grid, and is gigahertz-separated at the operating points.
#[test]
fn transitions_stay_separated_across_the_sweep() {
    let p = bench_params();
    let grid = linspace(0.0, 1.0, 401);
    let sweep = sweep_spectrum(&p, &grid, &[(0, 1), (1, 2)], 50).unwrap();
    let mut min_gap = f64::INFINITY;
    for row in &sweep.frequencies_ghz {
        min_gap = min_gap.min((row[1] - row[0]).abs());
    }
    assert!(min_gap > 0.03, "minimum |f12 - f01| = {min_gap}");
    for &x2 in &[0.25, 0.5, 0.75] {
        let bias = FluxBias::constrained(p.r(), x2);
        let lv = eigenlevels(&p, &bias, 50, 3).unwrap();
        let gap = ((lv[2] - lv[1]) - (lv[1] - lv[0])).abs();
        assert!(gap > 3.0, "anharmonicity at x2 = {x2} is only {gap}");
    }
}

/// Identical results regardless of how many worker threads compute the
/// sweep: parallelism must not change a single bit of the output.
#[test]
fn sweeps_are_deterministic_across_thread_counts() {
    let p = bench_params();
    let grid = linspace(0.0, 1.0, 51);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| sweep_spectrum(&p, &grid, &[(0, 1), (1, 2), (2, 3)], 50).unwrap())
    };
    let a = run(1);
    let b = run(4);
    for (ra, rb) in a.frequencies_ghz.iter().zip(b.frequencies_ghz.iter()) {
        for (u, v) in ra.iter().zip(rb.iter()) {
            assert!(u.to_bits() == v.to_bits(), "thread count changed a result bit");
        }
    }
}

/// Spot inventory of the workhorse device (r = 2): exactly five spots at
/// the quarter-quantum lattice, with the engineered maxima at 0.25/0.75.
#[test]
fn finder_reports_five_spots_for_r2() {
    let p = bench_params();
    let spots = find_sweet_spots_default(&p, 50).unwrap();
    assert_eq!(spots.len(), 5, "spots: {spots:?}");
    let want = [
        (0.0, SpotKind::Maximum),
        (0.25, SpotKind::Maximum),
        (0.5, SpotKind::Minimum),
        (0.75, SpotKind::Maximum),
        (1.0, SpotKind::Maximum),
    ];
    for (spot, (x, kind)) in spots.iter().zip(want.iter()) {
        assert!(
            (spot.phi2_over_phi0 - x).abs() <= 1e-3,
            "spot at {} (wanted {x})",
            spot.phi2_over_phi0
        );
        assert_eq!(spot.kind, *kind, "kind at {x}");
        assert!(
            spot.residual_slope_ghz_per_phi0 < 1e-3,
            "residual slope {} at {x}",
            spot.residual_slope_ghz_per_phi0
        );
    }
}

/// Spot inventory for r = 3 with b = 4 (= r + 1): exactly seven spots.
/// Four of them sit off the naive half-period lattice; their locations
/// are pinned from a fine-grid scan of the same model.
#[test]
fn finder_reports_seven_spots_for_r3() {
    let p = CircuitParams::new(6.0, 0.5, 20.0, 4.0, 3.0).unwrap();
    let spots = find_sweet_spots_default(&p, 50).unwrap();
    assert_eq!(spots.len(), 7, "spots: {spots:?}");
    let want = [0.0, 0.17516, 0.43369, 0.5, 0.56631, 0.82484, 1.0];
    for (spot, x) in spots.iter().zip(want.iter()) {
        assert!(
            (spot.phi2_over_phi0 - x).abs() <= 1e-3,
            "spot at {} (wanted {x})",
            spot.phi2_over_phi0
        );
    }
}

/// The single-junction device has only the trivial inventory: the
/// endpoints and the half-quantum minimum.
#[test]
fn finder_reports_three_spots_for_single_junction() {
    let p = single_junction_params();
    let spots = find_sweet_spots_default(&p, 50).unwrap();
    assert_eq!(spots.len(), 3, "spots: {spots:?}");
    let want = [
        (0.0, SpotKind::Maximum),
        (0.5, SpotKind::Minimum),
        (1.0, SpotKind::Maximum),
    ];
    for (spot, (x, kind)) in spots.iter().zip(want.iter()) {
        assert!(
            (spot.phi2_over_phi0 - x).abs() <= 1e-3,
            "spot at {} (wanted {x})",
            spot.phi2_over_phi0
        );
        assert_eq!(spot.kind, *kind, "kind at {x}");
    }
    // At its spots the common-mode slope is far below tolerance.
    for spot in &spots {
        let bias = FluxBias::constrained(p.r(), spot.phi2_over_phi0);
        let s = flux_sensitivity(&p, &bias, SensitivityMode::CommonMode, 1e-5, 50).unwrap();
        assert!(s.abs() < 1e-3, "slope {s} at {}", spot.phi2_over_phi0);
    }
}

/// A tie ratio so large that neighboring spots fall inside adjacent
/// seeding intervals must be refused with a grid-too-coarse report, not
/// silently merged or miscounted.
#[test]
fn finder_refuses_a_grid_that_cannot_separate_spots() {
    let p = CircuitParams::new(6.0, 0.5, 20.0, 3.0, 30.0).unwrap();
    let search = SweetSpotSearch {
        grid_n: 101,
        dim: 30,
        ..SweetSpotSearch::default()
    };
    match find_sweet_spots(&p, &search) {
        Err(CoreError::GridTooCoarse {
            suggested_grid_n, ..
        }) => {
            assert_eq!(suggested_grid_n, 401);
        }
        other => panic!("expected grid-too-coarse, got {other:?}"),
    }
}
