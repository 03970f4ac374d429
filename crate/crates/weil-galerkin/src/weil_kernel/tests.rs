use super::*;
use crate::mpkit::agreement_digits;
use once_cell::sync::Lazy;
use rug::{Float, Rational};

fn ctx80() -> Ctx {
    Ctx::new(80).unwrap()
}

fn assert_close_digits(got: &Float, want: &str, digits: i64, ctx: &Ctx) {
    let w = ctx.parse(want).unwrap();
    match agreement_digits(got, &w) {
        None => {}
        Some(d) => assert!(
            d >= digits,
            "agreement only {d} digits (wanted >= {digits}); got {got}, want {want}"
        ),
    }
}

fn zeta_spec(c: u32, t: u32, n: usize, dps: u32) -> CutoffSpec {
    CutoffSpec::new(
        Rational::from(c),
        Rational::from(t),
        n,
        dps,
        CharacterSpec::zeta(),
    )
    .unwrap()
}

/// Shared c=13, T=400, dps=80 archimedean cache (several tests reuse it; the
/// digamma node values are additionally memoized process-wide).
static STD: Lazy<(CutoffSpec, Ctx, ArchCache)> = Lazy::new(|| {
    let spec = zeta_spec(13, 400, 8, 80);
    let ctx = spec.ctx().unwrap();
    let cache = calibrated_arch_cache(&spec, &ctx).unwrap();
    (spec, ctx, cache)
});

mod characters {
    use super::*;

    fn turn(num: u64, den: u64) -> Turn {
        Turn::new(num, den).unwrap()
    }

    #[test]
    fn turn_reduction_and_product() {
        assert_eq!(turn(2, 8), turn(1, 4));
        assert_eq!(turn(0, 6), turn(0, 1));
        assert_eq!(turn(7, 6), turn(1, 6));
        assert_eq!(turn(1, 3).mul(turn(1, 3)), turn(2, 3));
        assert_eq!(turn(1, 2).mul(turn(1, 2)), turn(0, 1));
        assert!(Turn::new(1, 0).is_err());
    }

    #[test]
    fn turn_real_parts() {
        let ctx = ctx80();
        assert_eq!(Turn::one().re(&ctx), ctx.f(1u32));
        assert_eq!(Turn::minus_one().re(&ctx), ctx.f(-1i32));
        assert!(turn(1, 4).re(&ctx).is_zero());
        assert!(turn(3, 4).re(&ctx).is_zero());
        // cos(2π/3) = −1/2
        let third = turn(1, 3).re(&ctx);
        assert_close_digits(&third, "-0.5", 75, &ctx);
    }

    #[test]
    fn zeta_character_shape() {
        let ctx = ctx80();
        let z = CharacterSpec::zeta();
        assert_eq!(z.kind(), CharacterKind::Zeta);
        assert!(z.pole_enabled());
        assert_eq!(z.parity(), Parity::Even);
        assert_eq!(*z.arch_param(), Rational::from((1u32, 4u32)));
        assert_eq!(z.re_value(97, &ctx), ctx.f(1u32));
    }

    #[test]
    fn chi3_character_shape() {
        let ctx = ctx80();
        let x = CharacterSpec::chi3();
        assert_eq!(x.kind(), CharacterKind::Dirichlet);
        assert!(!x.pole_enabled());
        assert_eq!(x.parity(), Parity::Odd);
        assert_eq!(*x.arch_param(), Rational::from((3u32, 4u32)));
        assert_eq!(x.re_value(1, &ctx), ctx.f(1u32));
        assert_eq!(x.re_value(2, &ctx), ctx.f(-1i32));
        assert!(x.re_value(6, &ctx).is_zero());
        assert_eq!(x.re_value(4, &ctx), ctx.f(1u32));
    }

    #[test]
    fn dirichlet_validation_rejects_bad_tables() {
        // χ(2) must be 0 mod 4 (gcd 2), so a nonzero entry is rejected.
        let bad = CharacterSpec::dirichlet(
            4,
            vec![None, Some(Turn::one()), Some(Turn::one()), Some(Turn::minus_one())],
        );
        assert!(bad.is_err());
        // Non-multiplicative: χ(3)² must equal χ(9 mod 4) = χ(1).
        let bad = CharacterSpec::dirichlet(
            4,
            vec![None, Some(Turn::one()), None, Some(turn(1, 4))],
        );
        assert!(bad.is_err());
        // The quadratic character mod 4 is accepted and odd.
        let good = CharacterSpec::dirichlet(
            4,
            vec![None, Some(Turn::one()), None, Some(Turn::minus_one())],
        )
        .unwrap();
        assert_eq!(good.parity(), Parity::Odd);
        assert_eq!(*good.arch_param(), Rational::from((3u32, 4u32)));
    }

    #[test]
    fn digest_separates_characters() {
        assert_ne!(CharacterSpec::zeta().digest(), CharacterSpec::chi3().digest());
        assert_eq!(CharacterSpec::chi3().digest(), CharacterSpec::chi3().digest());
    }
}

mod primes {
    use super::*;

    #[test]
    fn prime_powers_to_thirteen() {
        let pp = prime_powers_upto(&Rational::from(13));
        let got: Vec<(u64, u64, u32)> = pp.iter().map(|q| (q.n, q.p, q.k)).collect();
        assert_eq!(
            got,
            vec![
                (2, 2, 1),
                (3, 3, 1),
                (4, 2, 2),
                (5, 5, 1),
                (7, 7, 1),
                (8, 2, 3),
                (9, 3, 2),
                (11, 11, 1),
                (13, 13, 1),
            ]
        );
    }

    #[test]
    fn small_cutoffs_are_empty() {
        assert!(prime_powers_upto(&Rational::from((3u32, 2u32))).is_empty());
        assert!(prime_powers_upto(&Rational::from(1)).is_empty());
        assert_eq!(prime_powers_upto(&Rational::from(2)).len(), 1);
    }

    #[test]
    fn fractional_cutoff_floors() {
        // 8.9 includes 8 but not 9.
        let pp = prime_powers_upto(&Rational::from((89u32, 10u32)));
        assert_eq!(pp.last().unwrap().n, 8);
    }
}

mod multiplier {
    use super::*;

    /// At τ = 0 the multiplier has closed forms through Ψ(1/4), Ψ(3/4).
    #[test]
    fn closed_forms_at_zero() {
        let ctx = ctx80();
        let zero = ctx.zero();
        let quarter = Rational::from((1u32, 4u32));
        let three_quarter = Rational::from((3u32, 4u32));
        let got_q = h_plus(&zero, &quarter, &ctx).unwrap();
        let got_tq = h_plus(&zero, &three_quarter, &ctx).unwrap();
        let base = -ctx.ln_pi() - ctx.euler_gamma() - ctx.ln2() * 3u32;
        let half_pi = ctx.pi() / 2u32;
        let want_q = base.clone() - &half_pi;
        let want_tq = base + &half_pi;
        let tol = ctx.eps() * 10u32;
        assert!(Float::with_val(ctx.prec(), &got_q - &want_q).abs() <= tol);
        assert!(Float::with_val(ctx.prec(), &got_tq - &want_tq).abs() <= tol);
    }

    #[test]
    fn node_cache_soundness() {
        let (spec, ctx, cache) = &*STD;
        let ln_pi = ctx.ln_pi();
        let tol = ctx.eps() * 10u32;
        let m = cache.grid().len();
        for j in [0usize, 1, m / 3, m / 2, m - 1] {
            let tau = &cache.grid().nodes()[j];
            let fresh = h_plus(tau, spec.character().arch_param(), ctx).unwrap();
            let cached = Float::with_val(ctx.prec(), &cache.hplus()[j] - &ln_pi);
            assert!(
                Float::with_val(ctx.prec(), &fresh - &cached).abs() <= tol,
                "node {j} cache mismatch"
            );
        }
    }
}

mod kernel_values {
    use super::*;

    /// ψ and ψ′ at integer points against values computed by an independent
    /// implementation of the same kernel (c=13, T=400, dps=80), themselves
    /// stable to all 78 recorded digits under quadrature refinement.
    #[test]
    fn integer_point_regression() {
        let (spec, ctx, cache) = &*STD;
        let table = build_psi_table(spec, 2).unwrap();
        assert!(table.psi_at(0).is_zero());
        let checks = [
            (1i64, "0.0425200765125653083353093354509768842426978117544920031472145109032506066002311"),
            (5, "0.342830492518823996176100139584553291564511676031325431499286282826418756238086"),
            (8, "0.647212296289831343507556869198449419622916925172387906895061823580009026829099"),
        ];
        for (n, want) in checks {
            assert_close_digits(&table.psi_at(n), want, 68, ctx);
        }
        let dchecks = [
            (0i64, "0.0421326113869818651010336175780590151277443641249230665378996815612412143762534"),
            (1, "0.0433115520196005955938009212071112161656331711076347478873650165986643631506623"),
            (5, "0.249721235115945811424692267183771931983648700879181870961188742513241680626979"),
            (8, "0.814523689230744265305331394426297861150191073507431196854683481705321585640672"),
        ];
        for (n, want) in dchecks {
            assert_close_digits(&table.psi_deriv_at(n), want, 68, ctx);
        }
        // Table values match direct evaluation through the same cache.
        let x5 = ctx.f(5u32);
        let direct = psi(&x5, spec, cache, ctx).unwrap();
        assert_eq!(direct, table.psi_at(5));
    }

    /// Same regression for the odd quadratic character mod 3.
    #[test]
    fn chi3_integer_point_regression() {
        let spec = CutoffSpec::new(
            Rational::from(13),
            Rational::from(400),
            4,
            80,
            CharacterSpec::chi3(),
        )
        .unwrap();
        let ctx = spec.ctx().unwrap();
        let table = build_psi_table(&spec, 2).unwrap();
        assert!(table.psi_at(0).is_zero());
        assert_close_digits(
            &table.psi_at(1),
            "0.122037313750672912501877405611316484741865288159015520142938294372432657105205",
            68,
            &ctx,
        );
        assert_close_digits(
            &table.psi_at(2),
            "0.285032073422935092030074886130035254165453890493121647969614518278108783112261",
            68,
            &ctx,
        );
        assert_close_digits(
            &table.psi_deriv_at(1),
            "0.132300165652332889164244655866130648695875727318762627455510523391886394299550",
            68,
            &ctx,
        );
        assert_close_digits(
            &table.psi_deriv_at(2),
            "0.216125762718045991622986852740155338520362030467188704522328203136466053016877",
            68,
            &ctx,
        );
    }

    /// Non-integer evaluation against an independent quadrature of the raw
    /// (cos 2πx − cos τL)-form kernel and definitional y-integrals.
    #[test]
    fn non_integer_point_cross_check() {
        let (spec, ctx, cache) = &*STD;
        let x = ctx.f(7u32) / 3u32;
        let arch = psi_arch_piece(&x, spec, cache.hplus(), cache.grid(), ctx).unwrap();
        assert_close_digits(&arch, "-0.15691793679102128821252640076056242136", 26, ctx);
        let arch_d = psi_arch_deriv_piece(&x, spec, cache.hplus(), cache.grid(), ctx).unwrap();
        assert_close_digits(&arch_d, "-1.2777769908905847225920491728747012693", 26, ctx);
        let full = psi(&x, spec, cache, ctx).unwrap();
        assert_close_digits(&full, "-0.018774177510456406082085343301405802374", 26, ctx);
        let full_d = psi_deriv(&x, spec, cache, ctx).unwrap();
        assert_close_digits(&full_d, "-0.45478304588922479613392293406727961393", 26, ctx);
    }

    #[test]
    fn all_pieces_vanish_at_origin() {
        let (spec, ctx, cache) = &*STD;
        let zero = ctx.zero();
        assert!(psi_prime_piece(&zero, spec, ctx).unwrap().is_zero());
        assert!(psi_pole_piece(&zero, spec, ctx).unwrap().is_zero());
        assert!(psi_arch_piece(&zero, spec, cache.hplus(), cache.grid(), ctx)
            .unwrap()
            .is_zero());
        // ψ′(0) is finite and nonzero.
        let d0 = psi_deriv(&zero, spec, cache, ctx).unwrap();
        assert!(d0.is_finite() && !d0.is_zero());
    }

    #[test]
    fn oddness_and_derivative_evenness() {
        let (spec, ctx, cache) = &*STD;
        let tol = ctx.eps() * 10u32;
        for num in [7u32, 23, 61] {
            let x = ctx.f(num) / 9u32;
            let plus = psi(&x, spec, cache, ctx).unwrap();
            let minus = psi(&(-x.clone()), spec, cache, ctx).unwrap();
            assert!(
                Float::with_val(ctx.prec(), &plus + &minus).abs() <= tol,
                "psi not odd at {num}/9"
            );
            let dplus = psi_deriv(&x, spec, cache, ctx).unwrap();
            let dminus = psi_deriv(&(-x.clone()), spec, cache, ctx).unwrap();
            assert!(
                Float::with_val(ctx.prec(), &dplus - &dminus).abs() <= tol,
                "psi' not even at {num}/9"
            );
        }
    }

    #[test]
    fn piece_additivity_is_exact() {
        let (spec, ctx, cache) = &*STD;
        let x = ctx.f(11u32) / 7u32;
        let total = psi(&x, spec, cache, ctx).unwrap();
        let a = psi_prime_piece(&x, spec, ctx).unwrap();
        let b = psi_pole_piece(&x, spec, ctx).unwrap();
        let c = psi_arch_piece(&x, spec, cache.hplus(), cache.grid(), ctx).unwrap();
        assert_eq!(total, a + c + b);
    }

    /// A trivial modulus-1 character drops the pole piece and nothing else.
    #[test]
    fn modulus_one_reduction_to_zeta() {
        let trivial = CharacterSpec::dirichlet(1, vec![Some(Turn::one())]).unwrap();
        assert_eq!(trivial.parity(), Parity::Even);
        assert_eq!(*trivial.arch_param(), Rational::from((1u32, 4u32)));
        let spec_z = zeta_spec(13, 400, 3, 80);
        let spec_d = CutoffSpec::new(
            Rational::from(13),
            Rational::from(400),
            3,
            80,
            trivial,
        )
        .unwrap();
        let tz = build_psi_table(&spec_z, 2).unwrap();
        let td = build_psi_table(&spec_d, 2).unwrap();
        let ctx = spec_z.ctx().unwrap();
        // The pole term is summed last, and the trivial character's pole is
        // an exact zero, so the relation holds bitwise.
        for n in 0..=3i64 {
            let x = ctx.f(n as u32);
            let pole = psi_pole_piece(&x, &spec_z, &ctx).unwrap();
            assert_eq!(tz.psi_at(n), td.psi_at(n) + pole);
            let dpole = psi_pole_deriv_piece(&x, &spec_z, &ctx).unwrap();
            assert_eq!(tz.psi_deriv_at(n), td.psi_deriv_at(n) + dpole);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (spec, ctx, cache) = &*STD;
        // h = 10^(−dps/4); central difference error ≤ C·h².
        let h = ctx.decade(-(spec.dps() as i32) / 4);
        let x = ctx.f(1u32);
        let fp = psi(&Float::with_val(ctx.prec(), &x + &h), spec, cache, ctx).unwrap();
        let fm = psi(&Float::with_val(ctx.prec(), &x - &h), spec, cache, ctx).unwrap();
        let fd = (fp - fm) / (h.clone() * 2u32);
        let exact = psi_deriv(&x, spec, cache, ctx).unwrap();
        let err = Float::with_val(ctx.prec(), &exact - &fd).abs();
        let bound = Float::with_val(ctx.prec(), h.square_ref()) * 10000u32;
        assert!(err <= bound, "fd error {err:e} exceeds C·h²");
    }

    /// Larger T changes ψ(n) less: the tail contribution decays.
    #[test]
    fn t_monotone_stability() {
        let specs: Vec<CutoffSpec> = [200u32, 400, 800]
            .iter()
            .map(|&t| zeta_spec(13, t, 2, 40))
            .collect();
        let tables: Vec<PsiTable> = specs
            .iter()
            .map(|s| build_psi_table(s, 2).unwrap())
            .collect();
        let ctx = specs[0].ctx().unwrap();
        for n in 1..=2i64 {
            let d1 = Float::with_val(ctx.prec(), tables[1].psi_at(n) - tables[0].psi_at(n)).abs();
            let d2 = Float::with_val(ctx.prec(), tables[2].psi_at(n) - tables[1].psi_at(n)).abs();
            assert!(
                d2 < d1,
                "T-tail did not shrink at n={n}: |Δ(400−200)|={d1:e}, |Δ(800−400)|={d2:e}"
            );
        }
    }
}

mod tables {
    use super::*;

    #[test]
    fn jobs_do_not_change_bits() {
        let spec = zeta_spec(13, 400, 2, 80);
        let t1 = build_psi_table(&spec, 1).unwrap();
        let t3 = build_psi_table(&spec, 3).unwrap();
        assert_eq!(t1.psi_values(), t3.psi_values());
        assert_eq!(t1.psi_deriv_values(), t3.psi_deriv_values());
        assert_eq!(t1.hplus_cache_digest(), t3.hplus_cache_digest());
    }

    #[test]
    fn zero_jobs_rejected() {
        let spec = zeta_spec(13, 400, 2, 80);
        let err = build_psi_table(&spec, 0).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn parity_extension_of_table_lookups() {
        let (spec, _ctx, _cache) = &*STD;
        let table = build_psi_table(spec, 2).unwrap();
        for n in 1..=8i64 {
            assert_eq!(table.psi_at(-n), -table.psi_at(n));
            assert_eq!(table.psi_deriv_at(-n), table.psi_deriv_at(n));
        }
    }

    #[test]
    fn truncation_is_a_prefix() {
        let (spec, _ctx, _cache) = &*STD;
        let full = build_psi_table(spec, 2).unwrap();
        let cut = full.truncated(3).unwrap();
        assert_eq!(cut.spec().n(), 3);
        assert_eq!(cut.psi_values(), &full.psi_values()[..=3]);
        assert_eq!(cut.psi_deriv_values(), &full.psi_deriv_values()[..=3]);
        assert!(full.truncated(9).is_err());
    }

    #[test]
    fn disk_cache_roundtrip_is_bitwise() {
        let spec = zeta_spec(13, 400, 2, 80);
        let table = build_psi_table(&spec, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = save_psi_table(&table, dir.path()).unwrap();
        assert!(path.exists());
        let loaded = load_psi_table(&spec, dir.path()).unwrap().unwrap();
        assert_eq!(loaded.psi_values(), table.psi_values());
        assert_eq!(loaded.psi_deriv_values(), table.psi_deriv_values());
        assert_eq!(loaded.hplus_cache_digest(), table.hplus_cache_digest());
        // A different spec misses.
        let other = zeta_spec(17, 400, 2, 80);
        assert!(load_psi_table(&other, dir.path()).unwrap().is_none());
    }

    #[test]
    fn misaligned_node_values_rejected() {
        let (spec, ctx, cache) = &*STD;
        let x = ctx.f(1u32);
        let short = &cache.hplus()[..cache.hplus().len() - 1];
        let err = psi_arch_piece(&x, spec, short, cache.grid(), ctx).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn calibration_is_reproducible() {
        let (spec, ctx, cache) = &*STD;
        let again = calibrated_arch_cache(spec, ctx).unwrap();
        assert_eq!(again.level(), cache.level());
        assert_eq!(again.digest(), cache.digest());
    }

    #[test]
    fn spec_validation() {
        // c must exceed e.
        assert!(CutoffSpec::new(
            Rational::from(2),
            Rational::from(400),
            2,
            80,
            CharacterSpec::zeta()
        )
        .is_err());
        assert!(CutoffSpec::new(
            Rational::from(13),
            Rational::from(0),
            2,
            80,
            CharacterSpec::zeta()
        )
        .is_err());
        assert!(CutoffSpec::new(
            Rational::from(13),
            Rational::from(400),
            0,
            80,
            CharacterSpec::zeta()
        )
        .is_err());
        let stem = zeta_spec(13, 400, 8, 80).cache_stem();
        assert!(stem.contains("c13") && stem.contains("N8") && stem.contains("T400"));
    }
}
