//! Property-based invariants: randomized parameter draws for structural
//! guarantees that must hold everywhere, not only at the worked examples.

use flatsonium_core::circuit::{
    build_hamiltonian, effective_josephson_energy_at, CircuitParams, FluxBias,
};
use flatsonium_core::noise::{mode_dephasing_rate, total_dephasing_rate, NoiseModel};
use flatsonium_core::spectrum::analytic_sweet_spot_candidates;
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = CircuitParams> {
    (
        0.1f64..20.0,  // E_C
        0.01f64..5.0,  // E_L
        0.0f64..50.0,  // E_JΣ
        0.0f64..10.0,  // b
        0.0f64..6.0,   // r
    )
        .prop_map(|(ec, el, ejs, b, r)| CircuitParams::new(ec, el, ejs, b, r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The Hamiltonian is symmetric for any parameters and any
    /// (unconstrained) bias point.
    #[test]
    fn hamiltonian_is_symmetric_everywhere(
        p in params_strategy(),
        x1 in -2.0f64..2.0,
        x2 in -2.0f64..2.0,
        dim in 8usize..24,
    ) {
        let h = build_hamiltonian(&p, &FluxBias::new(x1, x2).unwrap(), dim).unwrap();
        let asym = (&h - h.transpose()).abs().max();
        prop_assert!(asym <= 1e-12, "asymmetry {asym}");
    }

    /// The effective junction energy stays inside its interference
    /// bounds: between |E_J1 − E_J2| and E_J1 + E_J2.
    #[test]
    fn effective_junction_energy_within_bounds(
        p in params_strategy(),
        x1 in -2.0f64..2.0,
        x2 in -2.0f64..2.0,
    ) {
        let e = effective_josephson_energy_at(&p, &FluxBias::new(x1, x2).unwrap());
        let hi = p.ej_sum_ghz();
        let lo = (p.ej1_ghz() - p.ej2_ghz()).abs();
        prop_assert!(e <= hi + 1e-9 * hi.max(1.0), "E_eff {e} above {hi}");
        prop_assert!(e >= lo - 1e-9 * hi.max(1.0), "E_eff {e} below {lo}");
    }

    /// With zero correlation the total rate reduces exactly (to rounding)
    /// to the quadrature sum of the channel rates.
    #[test]
    fn uncorrelated_total_is_quadrature_sum(
        a_s in 0.0f64..1e-4,
        a_d in 0.0f64..1e-4,
        ss in -50.0f64..50.0,
        sd in -50.0f64..50.0,
        log_factor in 0.5f64..8.0,
    ) {
        let m = NoiseModel::new(a_s, a_d, 0.0, log_factor, 1.0).unwrap();
        let gs = mode_dephasing_rate(a_s, ss, log_factor);
        let gd = mode_dephasing_rate(a_d, sd, log_factor);
        let g = total_dephasing_rate(&m, ss, sd);
        let want = (gs * gs + gd * gd).sqrt();
        prop_assert!(
            (g - want).abs() <= 1e-12 * want.max(1e-300),
            "quadrature mismatch: {g} vs {want}"
        );
    }

    /// At perfect correlation the rate vanishes identically on the
    /// cancellation locus A_s·s_s = −A_d·s_d.
    #[test]
    fn perfect_correlation_cancels_on_the_locus(
        a_s in 1e-7f64..1e-4,
        a_d in 1e-7f64..1e-4,
        ss in prop::sample::select(vec![-40.0, -3.5, -0.1, 0.2, 7.0, 30.0]),
        log_factor in 0.5f64..8.0,
    ) {
        let m = NoiseModel::new(a_s, a_d, 1.0, log_factor, 1.0).unwrap();
        let sd = -(a_s / a_d) * ss;
        let g = total_dephasing_rate(&m, ss, sd);
        let scale = mode_dephasing_rate(a_s, ss, log_factor);
        prop_assert!(g <= 1e-12 * scale.max(1e-300), "residual rate {g}");
    }

    /// For any correlation in [0, 1] the total rate obeys the triangle
    /// bounds |Γs − Γd| ≤ Γ ≤ Γs + Γd, and scaling an amplitude up never
    /// lowers the rate when the cross term is non-negative.
    #[test]
    fn total_rate_bounds_and_monotone_scaling(
        a_s in 0.0f64..1e-4,
        a_d in 0.0f64..1e-4,
        c in 0.0f64..1.0,
        ss in -50.0f64..50.0,
        sd in -50.0f64..50.0,
        log_factor in 0.5f64..8.0,
    ) {
        let m = NoiseModel::new(a_s, a_d, c, log_factor, 1.0).unwrap();
        let gs = mode_dephasing_rate(a_s, ss, log_factor);
        let gd = mode_dephasing_rate(a_d, sd, log_factor);
        let g = total_dephasing_rate(&m, ss, sd);
        let tol = 1e-9 * (gs + gd).max(1e-300);
        prop_assert!(g <= gs + gd + tol);
        prop_assert!(g >= (gs - gd).abs() - tol);
        // Single-channel rate is exactly linear in its amplitude.
        let doubled = mode_dephasing_rate(2.0 * a_s, ss, log_factor);
        prop_assert!((doubled - 2.0 * gs).abs() <= 4.0 * f64::EPSILON * doubled.max(1e-300));
        // Same-sign sensitivities: growing A_s cannot lower the total.
        if ss >= 0.0 && sd >= 0.0 {
            let m2 = NoiseModel::new(2.0 * a_s, a_d, c, log_factor, 1.0).unwrap();
            let g2 = total_dephasing_rate(&m2, ss, sd);
            prop_assert!(g2 + tol >= g, "rate dropped from {g} to {g2}");
        }
    }

    /// Loop fluxes and mode coordinates are inverse parameterizations.
    #[test]
    fn flux_bias_mode_round_trip(
        x1 in -3.0f64..3.0,
        x2 in -3.0f64..3.0,
        r in 0.0f64..6.0,
    ) {
        let bias = FluxBias::new(x1, x2).unwrap();
        let back = FluxBias::from_modes(bias.phi_s_over_phi0(), bias.phi_d_over_phi0());
        prop_assert!((back.phi1_over_phi0() - x1).abs() <= 1e-12);
        prop_assert!((back.phi2_over_phi0() - x2).abs() <= 1e-12);
        // On the tied line the differential flux follows the common flux
        // with slope β = (r−1)/(r+1).
        let tied = FluxBias::constrained(r, x2);
        let beta = (r - 1.0) / (r + 1.0);
        prop_assert!(
            (tied.phi_d_over_phi0() - beta * tied.phi_s_over_phi0()).abs() <= 1e-12
        );
    }

    /// Candidate spot locations are sorted, span exactly one period, and
    /// count 2r + 1 points.
    #[test]
    fn candidates_are_sorted_and_span_the_period(r in 1u32..30) {
        let c = analytic_sweet_spot_candidates(r).unwrap();
        prop_assert_eq!(c.len(), 2 * r as usize + 1);
        prop_assert_eq!(c[0], 0.0);
        prop_assert_eq!(*c.last().unwrap(), 1.0);
        prop_assert!(c.windows(2).all(|w| w[1] > w[0]));
    }
}
