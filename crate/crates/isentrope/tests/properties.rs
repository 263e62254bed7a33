//! Invariants as properties over random inputs.

use isentrope::blaschke::return_map_analysis;
use isentrope::entropy::{gcd, lap_entropy, markov_matrix, pq_horner, pq_product, root_of_pq, spectral_radius};
use isentrope::explore::invert_sigma;
use isentrope::moduli::{barrier_distance, choose_numerator, fold, per1_line, side_of_barrier, BarrierCurve};
use isentrope::pcf::{find_center, SeedStrategy};
use isentrope::ratmap::{fixed_point_data, moduli_point, MixedNormalForm, Mobius, ModuliPoint, QuadMap};
use proptest::prelude::*;
use std::sync::OnceLock;

fn coeff() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn well_posed(c: [f64; 6]) -> Option<QuadMap> {
    let m = QuadMap::new([c[0], c[1], c[2]], [c[3], c[4], c[5]]).ok()?;
    (m.resultant().abs() > 0.05).then_some(m)
}

/// μ away from 0, where the normal form degenerates.
fn multiplier() -> impl Strategy<Value = f64> {
    prop_oneof![-40.0..-0.5f64, 0.5..40.0f64]
}

fn barrier() -> &'static BarrierCurve {
    static L: OnceLock<BarrierCurve> = OnceLock::new();
    L.get_or_init(|| {
        let c = find_center(3, 1, &SeedStrategy::default()).unwrap();
        BarrierCurve::standard(&c.params).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fixed_point_formula_and_sigma3(c in prop::array::uniform6(coeff())) {
        let Some(m) = well_posed(c) else { return Ok(()) };
        let fp = fixed_point_data(&m, 1e-6);
        let Some(r) = fp.formula_residual(1e-3) else { return Ok(()) };
        prop_assert!(r < 1e-8, "formula residual {r}");
        let [s1, _, s3] = fp.sigmas();
        prop_assert!((s3 - (s1 - 2.0)).norm() < 1e-8 * (1.0 + s1.norm()));
    }

    #[test]
    fn moduli_invariant_under_conjugation(
        c in prop::array::uniform6(coeff()),
        g in prop::array::uniform4(-2.0..2.0f64),
    ) {
        let Some(m) = well_posed(c) else { return Ok(()) };
        let Ok(h) = Mobius::new(g[0], g[1], g[2], g[3]) else { return Ok(()) };
        prop_assume!(h.det().abs() > 0.2);
        let (Ok(x), Ok(f)) = (moduli_point(&m, 1e-7), h.conjugate(&m)) else { return Ok(()) };
        let Ok(y) = moduli_point(&f, 1e-7) else { return Ok(()) };
        prop_assert!(x.dist(&y) < 1e-7 * (1.0 + x.sigma1.abs().max(x.sigma2.abs())));
    }

    #[test]
    fn closed_form_matches_multipliers(mu in multiplier(), a in -3.0..3.0f64, minus in any::<bool>()) {
        let nf = if minus { MixedNormalForm::minus(mu, a) } else { MixedNormalForm::plus(mu, a) };
        let closed = nf.closed_form_sigma().unwrap();
        let numeric = moduli_point(&nf.to_map().unwrap(), 1e-6).unwrap();
        let scale = 1.0 + closed.sigma1.abs().max(closed.sigma2.abs());
        prop_assert!(closed.dist(&numeric) < 1e-8 * scale, "{closed:?} vs {numeric:?}");
    }

    #[test]
    fn normal_form_lies_on_its_per1_line(mu in multiplier(), a in -3.0..3.0f64) {
        let pt = MixedNormalForm::plus(mu, a).closed_form_sigma().unwrap();
        let line = per1_line(mu).unwrap();
        let scale = 1.0 + mu.abs().powi(3) + pt.sigma2.abs() * mu.abs();
        prop_assert!(line.cubic_residual(&pt).abs() < 1e-10 * scale);
        prop_assert!((line.sigma2_at(pt.sigma1) - pt.sigma2).abs() < 1e-9 * (1.0 + pt.sigma2.abs()));
    }

    #[test]
    fn inversion_round_trips(mu in multiplier(), a in -3.0..3.0f64, minus in any::<bool>()) {
        let nf = if minus { MixedNormalForm::minus(mu, a) } else { MixedNormalForm::plus(mu, a) };
        let pt = nf.closed_form_sigma().unwrap();
        let rep = invert_sigma(&pt).unwrap();
        let back = rep.form.closed_form_sigma().unwrap();
        let scale = 1.0 + pt.sigma1.abs().max(pt.sigma2.abs());
        prop_assert!(back.dist(&pt) < 1e-7 * scale, "{pt:?} -> {back:?}");
    }

    #[test]
    fn fold_lands_in_unit_interval(x in prop_oneof![-1e6..-1e-6f64, 1e-6..1e6f64]) {
        let f = fold(x);
        prop_assert!(f.abs() <= 1.0);
        prop_assert_eq!(fold(f), f);
        prop_assert!((fold(1.0 / x) - f).abs() <= 1e-12 * (1.0 + f.abs()) || x.abs() == 1.0);
    }

    #[test]
    fn horner_matches_product(q in 3usize..40, t in 0.0..2.0f64) {
        let (h, p) = (pq_horner(q, t), pq_product(q, t));
        prop_assert!((h - p).abs() < 1e-12 * (1.0 + 2f64.powi(q as i32)));
    }

    #[test]
    fn blaschke_invariants(t in 0.0..0.999f64) {
        let r = return_map_analysis(t, 1e-8).unwrap();
        prop_assert!((r.rho_plus().norm() - 1.0).abs() < 1e-9);
        prop_assert!((r.rho_plus() - r.rho_minus().conj()).norm() < 1e-9);
        prop_assert!(r.lambda_numeric >= 1.0 - 1e-12);
        prop_assert!((r.multiplier_at_1 - 4.0 / (1.0 - t).powi(2)).abs() < 1e-8 * r.multiplier_at_1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lap_entropy_is_conjugacy_invariant(
        mu in -30.0..-1.5f64,
        a in -1.0..1.0f64,
        g in prop::array::uniform4(-2.0..2.0f64),
    ) {
        let m = MixedNormalForm::plus(mu, a).to_map().unwrap();
        let Ok(h) = Mobius::new(g[0], g[1], g[2], g[3]) else { return Ok(()) };
        prop_assume!(h.det().abs() > 0.3);
        let f = h.conjugate(&m).unwrap();
        let (x, y) = (lap_entropy(&m, 40, 1_000_000).unwrap(), lap_entropy(&f, 40, 1_000_000).unwrap());
        prop_assume!(!x.budget_exhausted && !y.budget_exhausted);
        prop_assert!((x.value - y.value).abs() <= x.error_bound + y.error_bound + 1e-9, "{x:?} vs {y:?}");
    }

    #[test]
    fn side_constant_along_short_segments(
        s1 in -200.0..20.0f64,
        s2 in -100.0..400.0f64,
        angle in 0.0..std::f64::consts::TAU,
    ) {
        let l = barrier();
        let p = ModuliPoint::new(s1, s2).unwrap();
        let d = barrier_distance(&p, l);
        prop_assume!(d > 1e-3);
        let side = side_of_barrier(&p, l);
        for k in 1..=8 {
            let r = 0.9 * d * k as f64 / 8.0;
            let q = ModuliPoint::new(s1 + r * angle.cos(), s2 + r * angle.sin()).unwrap();
            prop_assert_eq!(side_of_barrier(&q, l), side);
        }
    }
}

#[test]
fn numerator_choice_is_admissible() {
    for q in 13..=500 {
        let p = choose_numerator(q).unwrap();
        assert_eq!(gcd(p as u64, q as u64), 1, "q = {q}");
        assert!(3 * p > q && 2 * p < q, "{p}/{q}");
    }
    assert!(choose_numerator(12).is_err());
}

#[test]
fn spectral_radius_matches_root() {
    for q in 3..=30 {
        let h = root_of_pq(q, 1e-15).unwrap().value;
        for p in (1..q).filter(|&p| gcd(p as u64, q as u64) == 1) {
            let rho = spectral_radius(&markov_matrix(q, p).unwrap(), 1e-14).unwrap();
            assert!((rho.ln() - h).abs() < 1e-9, "{p}/{q}");
        }
    }
}

#[test]
fn root_ladder_increases_towards_log_two() {
    let hs: Vec<f64> = (3..=40).map(|q| root_of_pq(q, 1e-15).unwrap().value).collect();
    assert!(hs.windows(2).all(|w| w[0] < w[1]));
    assert!(*hs.last().unwrap() < 2f64.ln());
}

#[test]
fn mirrored_rotation_numbers_share_a_class() {
    let seeds = SeedStrategy::default();
    for q in 3..=10 {
        for p in (1..q).filter(|&p| 2 * p < q && gcd(p as u64, q as u64) == 1) {
            let a = find_center(q, p, &seeds).unwrap().moduli;
            let b = find_center(q, q - p, &seeds).unwrap().moduli;
            assert!(a.dist(&b) < 1e-8 * (1.0 + a.sigma1.abs().max(a.sigma2.abs())), "{p}/{q}: {a:?} vs {b:?}");
        }
    }
}
