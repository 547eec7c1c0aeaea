use std::f64::consts::{PI, TAU};

use mzi_bound::bound::classical_bound;
use mzi_bound::cli::ScanFile;
use mzi_bound::coincidence::{
    coherent_pair_analytic, coherent_pair_rate, coincidence_trace, mixture_scan, CoincidencePattern, CoincidenceScan,
    Injection, PhaseGrid, Provenance,
};
use mzi_bound::detector::{ideal_detector, imperfect_detector};
use mzi_bound::fock::{apply, BlockUnitary};
use mzi_bound::states::{coherent_product, noon_state, ClassicalMixture, CoherentAmplitude, MixtureComponent};
use mzi_bound::visibility::{analyze_visibility, VisibilityMethod};
use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;

fn amplitude() -> impl Strategy<Value = CoherentAmplitude> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(re, im)| CoherentAmplitude::new(re, im))
}

fn pattern(max_total: usize) -> impl Strategy<Value = CoincidencePattern> {
    (1..=max_total).prop_flat_map(|total| (0..=total).prop_map(move |m| CoincidencePattern::new(m, total - m)))
}

/// General SU(2) element times a global phase.
fn unitary(a: f64, b: f64, c: f64, g: f64) -> Matrix2<Complex64> {
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (s, co) = a.sin_cos();
    Matrix2::new(e(g + b) * co, -e(g - c) * s, e(g + c) * s, e(g - b) * co)
}

fn visibility(scan: &CoincidenceScan) -> Option<f64> {
    analyze_visibility(scan, scan.pattern().total(), VisibilityMethod::DirectFit).ok().map(|(_, v)| v.value)
}

fn pair_scan(
    alpha: CoherentAmplitude,
    beta: CoherentAmplitude,
    pattern: CoincidencePattern,
    points: usize,
) -> CoincidenceScan {
    let grid = PhaseGrid::uniform(points);
    let values = grid.phases().iter().map(|&p| coherent_pair_analytic(alpha, beta, p, pattern)).collect();
    CoincidenceScan::new(grid, values, pattern, Provenance::Analytic).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn induced_blocks_are_unitary(a in 0.0..PI, b in -PI..PI, c in -PI..PI, g in -PI..PI, s in 1usize..25) {
        let u = BlockUnitary::from_single_photon(&unitary(a, b, c, g), s);
        prop_assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn interferometers_preserve_norm(alpha in amplitude(), beta in amplitude(), phi in -PI..PI, half in any::<bool>()) {
        let state = coherent_product(alpha, beta, 30);
        let inj = if half { Injection::Half } else { Injection::Full };
        let out = apply(&inj.unitary(phi, 30), &state).unwrap();
        prop_assert!((out.norm_sqr() - state.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn rates_are_two_pi_periodic(alpha in amplitude(), beta in amplitude(), phi in -PI..PI, p in pattern(5)) {
        for inj in [Injection::Full, Injection::Half] {
            let a = coherent_pair_rate(alpha, beta, inj, phi, p);
            let b = coherent_pair_rate(alpha, beta, inj, phi + TAU, p);
            prop_assert!((a - b).abs() <= 1e-10 * a + 1e-15);
        }
        let noon = noon_state(p.total()).unwrap();
        let d = ideal_detector(p.total());
        let a = coincidence_trace(&noon, Injection::Half, phi, p, &d, &d).unwrap();
        let b = coincidence_trace(&noon, Injection::Half, phi + TAU, p, &d, &d).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn visibility_ignores_overall_scale(alpha in amplitude(), beta in amplitude(), p in pattern(5), k in 1e-3f64..1e3) {
        let scan = pair_scan(alpha, beta, p, 24);
        if let Some(v) = visibility(&scan) {
            let w = visibility(&scan.scaled(k)).unwrap();
            prop_assert!((v - w).abs() <= 1e-9 * v.max(1.0));
        }
    }

    #[test]
    fn visibility_ignores_phase_offset(alpha in amplitude(), beta in amplitude(), p in pattern(5), shift in 1usize..24) {
        let scan = pair_scan(alpha, beta, p, 24);
        let rotated: Vec<f64> = (0..24).map(|i| scan.values()[(i + shift) % 24]).collect();
        let other = CoincidenceScan::new(scan.grid().clone(), rotated, p, Provenance::Analytic).unwrap();
        if let (Some(v), Some(w)) = (visibility(&scan), visibility(&other)) {
            prop_assert!((v - w).abs() <= 1e-9 * v.max(1.0));
        }
    }

    #[test]
    fn mixtures_are_linear(a1 in amplitude(), b1 in amplitude(), a2 in amplitude(), b2 in amplitude(), w in 0.01f64..0.99, p in pattern(5)) {
        let mix = ClassicalMixture::new(vec![
            MixtureComponent { weight: w, alpha: a1, beta: b1 },
            MixtureComponent { weight: 1.0 - w, alpha: a2, beta: b2 },
        ]).unwrap();
        let grid = PhaseGrid::uniform(16);
        let combined = mixture_scan(&mix, &grid, p);
        let s1 = pair_scan(a1, b1, p, 16);
        let s2 = pair_scan(a2, b2, p, 16);
        for i in 0..16 {
            let expected = w * s1.values()[i] + (1.0 - w) * s2.values()[i];
            prop_assert!((combined.values()[i] - expected).abs() <= 1e-15 + 1e-12 * expected);
        }
    }

    #[test]
    fn coherent_pairs_never_beat_the_bound(alpha in amplitude(), beta in amplitude(), p in pattern(5)) {
        let scan = pair_scan(alpha, beta, p, 32);
        if let Some(v) = visibility(&scan) {
            let gamma = classical_bound(p.m, p.n).unwrap().to_f64();
            prop_assert!(v <= gamma * (1.0 + 1e-9) + 1e-12, "{v} > {gamma}");
        }
    }

    #[test]
    fn detector_columns_are_stochastic(eta in 0.0f64..=1.0, dark in 0.0f64..0.5, xt in 0.0f64..=1.0, cutoff in 0usize..10, extra in 0usize..5) {
        let d = imperfect_detector(eta, dark, xt, cutoff, cutoff + extra).unwrap();
        for k in 0..=cutoff {
            let total: f64 = (0..=d.n_max()).map(|n| d.response(n, k)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!((0..=d.n_max()).all(|n| d.response(n, k) >= 0.0));
        }
    }

    #[test]
    fn bound_is_symmetric_and_at_most_one(m in 0usize..15, n in 0usize..15) {
        prop_assume!(m + n > 0);
        let a = classical_bound(m, n).unwrap();
        let b = classical_bound(n, m).unwrap();
        prop_assert_eq!(a.exact(), b.exact());
        prop_assert!(a.to_f64() > 0.0 && a.to_f64() <= 1.0);
    }

    #[test]
    fn scan_files_roundtrip(values in proptest::collection::vec(0.0f64..1.0, 4..40), p in pattern(5), with_shots in any::<bool>()) {
        let grid = PhaseGrid::uniform(values.len());
        let mut scan = CoincidenceScan::new(grid, values.clone(), p, Provenance::Ingested).unwrap();
        if with_shots {
            scan = scan.with_shots(vec![1234; values.len()]).unwrap();
        }
        let file = ScanFile::new(scan, vec![("note".into(), "random".into())]);
        prop_assert_eq!(ScanFile::parse(&file.to_csv_string()).unwrap(), file);
    }
}
