use super::*;
use crate::mpkit::{agreement_digits, build_grid, integrate_on_grid};
use crate::weil_kernel::{CharacterSpec, Turn};
use once_cell::sync::Lazy;
use rug::Rational;
use serde::Deserialize;

fn ctx50() -> Ctx {
    Ctx::new(50).unwrap()
}

fn zeta_spec(n: usize, dps: u32) -> CutoffSpec {
    CutoffSpec::new(
        Rational::from(13),
        Rational::from(400),
        n,
        dps,
        CharacterSpec::zeta(),
    )
    .unwrap()
}

fn log13(ctx: &Ctx) -> Float {
    ctx.f(13u32).ln()
}

#[derive(Deserialize)]
struct VectorFixture {
    c: u32,
    n: usize,
    dps: u32,
    values: Vec<String>,
}

/// c = 13, N = 100 even-sector ground-state eigenvector (independent
/// high-precision computation), parsed once at dps 80.
static C13_VECTOR: Lazy<(CutoffSpec, Ctx, Vec<Float>)> = Lazy::new(|| {
    let raw = include_str!("../../testdata/c13_ground_vector.json");
    let fixture: VectorFixture = serde_json::from_str(raw).unwrap();
    assert_eq!((fixture.c, fixture.n, fixture.dps), (13, 100, 80));
    let spec = zeta_spec(100, 80);
    let ctx = spec.ctx().unwrap();
    let v: Vec<Float> = fixture
        .values
        .iter()
        .map(|s| ctx.parse(s).unwrap())
        .collect();
    assert_eq!(v.len(), 101);
    (spec, ctx, v)
});

mod mode_transform {
    use super::*;

    #[test]
    fn constant_mode_at_zero_is_sqrt_l() {
        let ctx = ctx50();
        let l = log13(&ctx);
        let m0 = mellin_mode_transform(0, &ctx.zero(), &l, &ctx).unwrap();
        let d = Float::with_val(ctx.prec(), &m0 - &l.clone().sqrt()).abs();
        assert!(d <= ctx.decade(-48), "M0(0) off by {d}");
    }

    #[test]
    fn transform_is_even_in_gamma() {
        let ctx = ctx50();
        let l = log13(&ctx);
        let gamma = ctx.parse("7.3125").unwrap();
        let neg = -gamma.clone();
        for k in [0usize, 1, 2, 5] {
            let plus = mellin_mode_transform(k, &gamma, &l, &ctx).unwrap();
            let minus = mellin_mode_transform(k, &neg, &l, &ctx).unwrap();
            let d = Float::with_val(ctx.prec(), &plus - &minus).abs();
            assert!(d <= ctx.decade(-48), "M_{k} parity defect {d}");
        }
    }

    #[test]
    fn rejects_nonpositive_length() {
        let ctx = ctx50();
        let gamma = ctx.f(2u32);
        let err = mellin_mode_transform(1, &gamma, &ctx.zero(), &ctx).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    /// The closed form must agree with direct tanh–sinh integration of
    /// mode × centered cosine at doubled precision.
    #[test]
    fn matches_direct_quadrature() {
        let ctx = ctx50();
        let ctx2 = ctx.doubled();
        let prec2 = ctx2.prec();
        let l = log13(&ctx2);
        let gamma = ctx2.parse("14.1").unwrap();
        let k = 3usize;

        let grid = build_grid(&ctx2.zero(), &l, 12, &ctx2).unwrap();
        let two_pi_k = Float::with_val(prec2, ctx2.pi() * 2u32) * ctx2.f(k as u64);
        let half = Float::with_val(prec2, &l / 2u32);
        let norm = (ctx2.f(2u32) / &l).sqrt();
        let values: Vec<Float> = grid
            .nodes()
            .iter()
            .map(|x| {
                let mode = Float::with_val(prec2, &two_pi_k * x) / &l;
                let centered = Float::with_val(prec2, x - &half);
                let c1 = mode.cos();
                let c2 = Float::with_val(prec2, &gamma * &centered).cos();
                Float::with_val(prec2, &c1 * &c2) * &norm
            })
            .collect();
        let direct = integrate_on_grid(&values, &grid).unwrap();

        let gamma50 = ctx.parse("14.1").unwrap();
        let closed = mellin_mode_transform(k, &gamma50, &log13(&ctx), &ctx).unwrap();
        let agree = agreement_digits(&Float::with_val(prec2, &closed), &direct).unwrap();
        assert!(agree >= 40, "only {agree} digits against quadrature");
    }
}

mod test_function {
    use super::*;

    #[test]
    fn even_in_gamma_and_constant_mode_positive_at_origin() {
        let ctx = ctx50();
        let l = log13(&ctx);
        let mut v = vec![ctx.zero(); 4];
        v[0] = ctx.f(1u32);
        let at_zero = f_even(&ctx.zero(), &v, &l, &ctx).unwrap();
        let d = Float::with_val(ctx.prec(), &at_zero - &l.clone().sqrt()).abs();
        assert!(d <= ctx.decade(-48), "constant mode at origin off by {d}");

        let mut mixed = vec![ctx.zero(); 5];
        mixed[0] = ctx.parse("0.6").unwrap();
        mixed[2] = ctx.parse("-0.8").unwrap();
        let gamma = ctx.parse("9.25").unwrap();
        let plus = f_even(&gamma, &mixed, &l, &ctx).unwrap();
        let minus = f_even(&(-gamma.clone()), &mixed, &l, &ctx).unwrap();
        let d = Float::with_val(ctx.prec(), &plus - &minus).abs();
        assert!(d <= ctx.decade(-48));
    }

    #[test]
    fn rejects_empty_vector() {
        let ctx = ctx50();
        let err = f_even(&ctx.f(1u32), &[], &log13(&ctx), &ctx).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}

mod extraction {
    use super::*;

    /// With v = e₁ the test function reduces to M₁, whose zero set is
    /// exactly {2πm/L : m ≥ 2} — the m = 1 point is a removable
    /// cancellation where M₁ = L/2, not a zero.
    #[test]
    fn single_cosine_mode_zeros_are_lattice_points() {
        let spec = zeta_spec(6, 50);
        let ctx = spec.ctx().unwrap();
        let prec = ctx.prec();
        let l = spec.l(&ctx);
        let mut v = vec![ctx.zero(); 7];
        v[1] = ctx.f(1u32);

        let lo = ctx.f(1u32);
        let hi = ctx.f(30u32);
        let step = ctx.parse("0.25").unwrap();
        let tol = ctx.decade(-45);
        let report = extract_zeros(&spec, &v, 5, (&lo, &hi), &step, &tol).unwrap();
        assert!(!report.partial());
        assert_eq!(report.len(), 5);

        let two_pi_over_l = Float::with_val(prec, ctx.pi() * 2u32) / &l;
        for (i, gamma) in report.gammas().iter().enumerate() {
            let m = (i + 2) as u64;
            let expect = Float::with_val(prec, &two_pi_over_l * &ctx.f(m));
            let d = Float::with_val(prec, gamma - &expect).abs();
            assert!(d <= ctx.decade(-40), "zero {i}: {gamma} vs {expect}");
        }
        // Interlacing simple zeros: slopes alternate and never vanish.
        for (i, s) in report.fm_slopes().iter().enumerate() {
            assert!(!s.is_zero());
            if i > 0 {
                assert!(
                    (report.fm_slopes()[i - 1] < 0u32) != (*s < 0u32),
                    "slopes must alternate"
                );
            }
        }
        // The m = 1 lattice point is not among the zeros.
        let first_lattice = Float::with_val(prec, &two_pi_over_l * &ctx.f(1u32));
        for gamma in report.gammas() {
            let d = Float::with_val(prec, gamma - &first_lattice).abs();
            assert!(d > ctx.parse("0.5").unwrap());
        }
    }

    #[test]
    fn constant_mode_first_zero() {
        let spec = zeta_spec(4, 50);
        let ctx = spec.ctx().unwrap();
        let prec = ctx.prec();
        let l = spec.l(&ctx);
        let mut v = vec![ctx.zero(); 5];
        v[0] = ctx.f(1u32);
        let lo = ctx.f(1u32);
        let hi = ctx.f(12u32);
        let step = ctx.parse("0.25").unwrap();
        let tol = ctx.decade(-45);
        let report = extract_zeros(&spec, &v, 2, (&lo, &hi), &step, &tol).unwrap();
        assert_eq!(report.len(), 2);
        let expect = Float::with_val(prec, ctx.pi() * 2u32) / &l;
        let d = Float::with_val(prec, &report.gammas()[0] - &expect).abs();
        assert!(d <= ctx.decade(-40));
    }

    #[test]
    fn config_rejections() {
        let spec = zeta_spec(4, 50);
        let ctx = spec.ctx().unwrap();
        let v = vec![ctx.f(1u32)];
        let one = ctx.f(1u32);
        let ten = ctx.f(10u32);
        let step = ctx.parse("0.25").unwrap();
        let tol = ctx.decade(-40);
        let cases: Vec<Error> = vec![
            extract_zeros(&spec, &v, 0, (&one, &ten), &step, &tol).unwrap_err(),
            extract_zeros(&spec, &v, 1, (&ten, &one), &step, &tol).unwrap_err(),
            extract_zeros(&spec, &v, 1, (&ctx.zero(), &ten), &step, &tol).unwrap_err(),
            extract_zeros(&spec, &v, 1, (&one, &ten), &ctx.zero(), &tol).unwrap_err(),
        ];
        for err in cases {
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn window_without_zeros_flags_partial() {
        let spec = zeta_spec(4, 50);
        let ctx = spec.ctx().unwrap();
        let mut v = vec![ctx.zero(); 5];
        v[0] = ctx.f(1u32);
        // First zero of the constant mode sits at 2π/log 13 ≈ 2.45.
        let lo = ctx.f(1u32);
        let hi = ctx.f(2u32);
        let step = ctx.parse("0.125").unwrap();
        let tol = ctx.decade(-40);
        let report = extract_zeros(&spec, &v, 3, (&lo, &hi), &step, &tol).unwrap();
        assert!(report.partial());
        assert!(report.is_empty());
    }
}

mod scoring {
    use super::*;

    #[test]
    fn digit_counts_floor_and_snap() {
        let ctx = Ctx::new(80).unwrap();
        let refs = ReferenceZeros::embedded(&CharacterSpec::zeta()).unwrap();
        let reference = refs.raw_value(0);
        assert!(significant_digits_str(reference) >= 400);

        // An error of exactly 1e−55 scores 55, not 54.
        let r = ctx.parse(reference).unwrap();
        let delta = ctx.decade(-55);
        let gamma = Float::with_val(ctx.prec(), &r + &delta);
        let (err, digits) = score_one(&gamma, reference, &ctx).unwrap();
        let dd = Float::with_val(ctx.prec(), &err - &delta).abs();
        assert!(dd <= ctx.decade(-95));
        assert_eq!(digits, 55);

        // 2.005e−55 scores 54 (floor of 54.698).
        let delta = Float::with_val(ctx.prec(), ctx.parse("2.005e-55").unwrap());
        let gamma = Float::with_val(ctx.prec(), &r + &delta);
        let (_, digits) = score_one(&gamma, reference, &ctx).unwrap();
        assert_eq!(digits, 54);
    }

    #[test]
    fn reference_resolution_is_never_truncated_silently() {
        let ctx = ctx50();
        // A 6-digit reference can certify at most ~1 digit of error.
        let (_, digits) = score_one(&ctx.parse("3.24159").unwrap(), "3.14159", &ctx).unwrap();
        assert_eq!(digits, 1);
        let err = score_one(&ctx.parse("3.14159000001").unwrap(), "3.14159", &ctx).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn report_scoring_requires_enough_references() {
        let ctx = ctx50();
        let refs = ReferenceZeros::from_parts(
            ReferenceKind::Zeta,
            vec!["14.2".into()],
            "test stub".into(),
        );
        let spec = zeta_spec(4, 50);
        let mut v = vec![ctx.zero(); 5];
        v[0] = ctx.f(1u32);
        let lo = ctx.f(1u32);
        let hi = ctx.f(12u32);
        let step = ctx.parse("0.25").unwrap();
        let tol = ctx.decade(-40);
        let mut report = extract_zeros(&spec, &v, 3, (&lo, &hi), &step, &tol).unwrap();
        assert!(report.len() > 1);
        let err = matching_digits(&mut report, &refs).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(report.matching_digits().is_empty());
    }
}

mod reference_tables {
    use super::*;

    #[test]
    fn embedded_zeta_table_integrity() {
        let refs = ReferenceZeros::embedded(&CharacterSpec::zeta()).unwrap();
        assert_eq!(*refs.kind(), ReferenceKind::Zeta);
        assert_eq!(refs.count(), 15);
        assert!(!refs.provenance().is_empty());
        // Independently published prefixes of the first three ordinates.
        assert!(refs.raw_value(0).starts_with("14.134725141734693790457251983562"));
        assert!(refs.raw_value(1).starts_with("21.022039638771554992628479593896"));
        assert!(refs.raw_value(2).starts_with("25.010857580145688763213790992562"));
        for k in 0..refs.count() {
            assert!(refs.significant_digits(k) >= 400);
        }
        let ctx = ctx50();
        let vals: Vec<Float> = (0..refs.count())
            .map(|k| refs.value(k, &ctx).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(vals[0] > 14u32);
    }

    #[test]
    fn embedded_chi3_table_integrity() {
        let chi3 = CharacterSpec::chi3();
        let refs = ReferenceZeros::embedded(&chi3).unwrap();
        match refs.kind() {
            ReferenceKind::Dirichlet {
                modulus,
                character_digest,
            } => {
                assert_eq!(*modulus, 3);
                assert_eq!(*character_digest, chi3.digest());
            }
            other => panic!("wrong kind {other:?}"),
        }
        assert_eq!(refs.count(), 12);
        assert!(refs.raw_value(0).starts_with("8.039737155681466681"));
        for k in 0..refs.count() {
            assert!(refs.significant_digits(k) >= 400);
        }
    }

    #[test]
    fn missing_character_is_a_config_error() {
        // Quadratic character mod 5: no reference table is embedded for it.
        let chi5 = CharacterSpec::dirichlet(
            5,
            vec![
                None,
                Some(Turn::one()),
                Some(Turn::minus_one()),
                Some(Turn::minus_one()),
                Some(Turn::one()),
            ],
        )
        .unwrap();
        let err = ReferenceZeros::embedded(&chi5).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}

mod c13_fixture {
    use super::*;

    /// End-to-end on the independently computed c = 13 ground state: scan
    /// (5, 60) at step 1/4, refine, and score against the embedded
    /// references. Reproduces the ~55-digit first-zero match.
    #[test]
    fn ground_state_zero_extraction_scores() {
        let (spec, ctx, v) = &*C13_VECTOR;
        let prec = ctx.prec();
        let lo = ctx.f(5u32);
        let hi = ctx.f(60u32);
        let step = ctx.parse("0.25").unwrap();
        let tol = ctx.decade(-70);
        let mut report = extract_zeros(spec, v, 10, (&lo, &hi), &step, &tol).unwrap();
        assert!(!report.partial(), "expected at least ten sign changes");
        assert_eq!(report.len(), 10);
        let g1_prefix = ctx.parse("14.134725141734693790457251983562").unwrap();
        let d = Float::with_val(prec, &report.gammas()[0] - &g1_prefix).abs();
        assert!(d < ctx.decade(-25), "first zero not near 14.1347...: {d}");

        let refs = ReferenceZeros::embedded(&CharacterSpec::zeta()).unwrap();
        let digits = matching_digits(&mut report, &refs).unwrap();
        // Independent implementation of the same chain reports errors
        // 1.455e−55, 2.691e−52, 2.492e−50, … for the first zeros.
        assert_eq!(digits[0], 54);
        assert_eq!(digits[1], 51);
        assert_eq!(digits[2], 49);
        let e0 = &report.abs_errors()[0];
        assert!(
            *e0 > ctx.parse("1.40e-55").unwrap() && *e0 < ctx.parse("1.51e-55").unwrap(),
            "gamma1 error {e0}"
        );

        // Tolerance dominance: the measured error is not the root-finder's.
        let floor = Float::with_val(prec, &tol * &ctx.f(10u32));
        for e in report.abs_errors() {
            assert!(*e >= floor);
        }

        // Slopes: strictly nonzero, first positive, strictly alternating.
        let slopes = report.fm_slopes();
        assert_eq!(slopes.len(), 10);
        assert!(slopes[0] > 0u32);
        for (i, s) in slopes.iter().enumerate() {
            assert!(!s.is_zero());
            if i > 0 {
                assert!((slopes[i - 1] < 0u32) != (*s < 0u32));
            }
        }
        let s0_ref = ctx.parse("0.00328704").unwrap();
        let rel = Float::with_val(prec, &slopes[0] - &s0_ref).abs() / s0_ref;
        assert!(rel < ctx.parse("1e-4").unwrap(), "slope drift {rel}");
    }

    #[test]
    fn window_excluding_first_zero_is_partial() {
        let (spec, ctx, v) = &*C13_VECTOR;
        let lo = ctx.f(20u32);
        let hi = ctx.f(30u32);
        let step = ctx.parse("0.25").unwrap();
        let tol = ctx.decade(-60);
        let report = extract_zeros(spec, v, 10, (&lo, &hi), &step, &tol).unwrap();
        assert!(report.partial());
        assert!(report.len() >= 2);
        let g2_prefix = ctx.parse("21.022039638771554992").unwrap();
        let d = Float::with_val(ctx.prec(), &report.gammas()[0] - &g2_prefix).abs();
        assert!(d < ctx.decade(-15), "first in-window zero should be near 21.02: {d}");
    }
}
