use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use mobius_core::band::{
    self, find_t_pattern, fold, measure_t_pattern, parse_band_spec, perp_pair_locus, random_closed_band,
    random_isometric_band, ridge_curve, zero_slope_bends, ConePatch, Tolerances, SEVEN_PI_TWELFTHS,
};
use mobius_core::certs::{
    const3_check, expand_p, expand_p_certificate, reference_degree8, reference_quartic, s_bound,
    statement1_certificate, statement2_x_certificate, statement2_y_certificate, statement3_certificate, CertReport,
    MEASURE_TOL,
};
use mobius_core::exactnum::{ratio, QSqrt3};
use mobius_core::lambda::{critical_point_certificate, grid_min_oracle, lambda1};
use mobius_core::poly::{isolate_roots, Bound, SturmChain};
use mobius_core::region::{branch_intersections, omega_member_f64, trapezoid_certificate};
use mobius_core::{QBivarPoly, QPoly, Rational};
use num_traits::Zero;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const LAMBDA1: f64 = 1.694_973_171_224_941_6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn step_ok(r: &CertReport, needle: &str) -> Result<(), String> {
    match r.steps.iter().find(|s| s.description.contains(needle)) {
        Some(s) if s.result.verified => Ok(()),
        Some(s) => Err(format!("{}: {}", s.description, s.result.detail)),
        None => Err(format!("no step `{needle}` in {}", r.id)),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()))
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn width_1e12() -> Rational {
    ratio(1, 1_000_000_000_000)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = lambda1(&width_1e12()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(r.lambda1.width() <= width_1e12(), || format!("width {}", r.lambda1.width()))?;
    let lo = ratio(169_497, 100_000);
    let hi = ratio(169_498, 100_000);
    check(r.lambda1.lo_rational() >= lo && r.lambda1.hi_rational() <= hi, || format!("enclosure {}", r.lambda1))?;
    step_ok(&r.certificate, "φ*(t₀) = λ₁")?;
    within(elapsed, 5.0)?;
    Ok(format!("λ₁ ∈ {}, φ*(t₀) − λ₁ = 0 certified, {:.2} s", r.lambda1, elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (t0, cert) = critical_point_certificate(&width_1e12());
    let elapsed = start.elapsed();
    let t0 = t0.map_err(|e| e.to_string())?;
    check((t0.midpoint_f64() + 0.39332).abs() <= 1e-5, || format!("t₀ ∈ {t0}"))?;
    step_ok(&cert, "exactly one zero in D*")?;
    within(elapsed, 5.0)?;
    Ok(format!("t₀ ∈ {t0}, one root of dφ*/dt in D*, {:.2} s", elapsed.as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let m = grid_min_oracle((ratio(-1, 1), ratio(1, 1)), (ratio(-3, 2), ratio(1, 2)), &ratio(1, 1000))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let v = num_traits::ToPrimitive::to_f64(&m).unwrap_or(f64::NAN);
    check((v - LAMBDA1).abs() <= 1e-3, || format!("grid minimum {v}"))?;
    within(elapsed, 60.0)?;
    Ok(format!("grid minimum {v:.9}, |min − λ₁| = {:.2e}, {:.2} s", (v - LAMBDA1).abs(), elapsed.as_secs_f64()))
}

fn criterion_4() -> Outcome {
    let pts = branch_intersections().map_err(|e| e.to_string())?;
    check(pts.len() == 2, || format!("{} intersections", pts.len()))?;
    let (p0, p1) = (&pts[0], &pts[1]);
    let near = |i: &mobius_core::exactnum::Interval, x: f64| (i.midpoint_f64() - x).abs() < 1e-12;
    check(near(&p0.b_enclosure, 0.0) && near(&p0.t_enclosure, -1.0 / 3f64.sqrt()), || {
        format!("first intersection ({}, {})", p0.b_enclosure, p0.t_enclosure)
    })?;
    let a = p1.b_enclosure.midpoint_f64();
    let exact_a = (27f64.sqrt() - 11f64.sqrt()) / 4.0;
    check((a - exact_a).abs() < 1e-12 && (a - 0.4698).abs() < 1e-4, || format!("a = {a}"))?;
    check((p1.t_enclosure.midpoint_f64() + a / 2.0).abs() < 1e-12, || format!("t = {}", p1.t_enclosure))?;
    let cert = trapezoid_certificate();
    step_ok(&cert, "margin in (1e−5, 5e−5)")?;
    step_ok(&cert, "critical point is b = (39 + √8151)/520")?;
    check(cert.is_verified(), || cert.to_string())?;
    Ok(format!("intersections (0, −1/√3) and ({a:.6}, {:.6}); g-minimum margin in (1e−5, 5e−5)", -a / 2.0))
}

fn criterion_5() -> Outcome {
    let p = expand_p().map_err(|e| e.to_string())?;
    check(p.coeff(6, 0) == QSqrt3::from_int(4), || format!("b⁶ coefficient {}", p.coeff(6, 0)))?;
    check(p.coeff(5, 1) == QSqrt3::from_int(-8), || format!("b⁵t coefficient {}", p.coeff(5, 1)))?;
    check(p.coeff(0, 2) == QSqrt3::from_int(27), || format!("t² coefficient {}", p.coeff(0, 2)))?;
    let cert = expand_p_certificate();
    check(cert.is_verified(), || cert.to_string())?;
    Ok("expanded P matches the reference polynomial, 0 mismatches".into())
}

fn criterion_6() -> Outcome {
    let p = expand_p().map_err(|e| e.to_string())?;
    let d = |n: usize| (0..n).fold(p.clone(), |q, _| q.diff_t());
    check(d(3) == QBivarPoly::monomial(QSqrt3::from_int(108), 1, 0), || "P''' ≠ 108b".into())?;
    let m = QSqrt3::from_ratios(2, 3, 0, 1);
    let c = QSqrt3::from_ratios(0, 1, -1, 3);
    let (zero, half) = (Bound::At(QSqrt3::zero()), Bound::At(QSqrt3::from_ratios(1, 2, 0, 1)));
    for order in 0..=2 {
        let on_z = d(order).restrict_to_line(&m, &c);
        let roots = SturmChain::new(&on_z).map_err(|e| e.to_string())?.count_roots_open(&zero, &half);
        check(roots == 0, || format!("order {order}: {roots} roots on Z"))?;
    }
    let cert = statement1_certificate();
    for order in 0..=2 {
        step_ok(&cert, &format!("∂^{order}P/∂t^{order} > 0 on Z"))?;
    }
    check(cert.is_verified(), || cert.to_string())?;
    Ok("P''' = 108b; P'', P', P positive on Z with 0 Sturm roots each".into())
}

fn roots(p: &QPoly) -> Result<Vec<f64>, String> {
    let iv = isolate_roots(p, &Bound::NegInf, &Bound::PosInf, &ratio(1, 100_000_000)).map_err(|e| e.to_string())?;
    Ok(iv.iter().map(|i| i.midpoint_f64()).collect())
}

fn criterion_7() -> Outcome {
    let p8 = reference_degree8();
    check(p8.coeffs()[0] == QSqrt3::from_int(379_204_871_936), || "printed coefficient".into())?;
    let x = statement2_x_certificate();
    step_ok(&x, "matches the reference degree-8 polynomial")?;
    check(x.is_verified(), || x.to_string())?;
    let (zero, half) = (Bound::At(QSqrt3::zero()), Bound::At(QSqrt3::from_ratios(1, 2, 0, 1)));
    let chain8 = SturmChain::new(&p8).map_err(|e| e.to_string())?;
    check(chain8.count_roots_closed(&zero, &half) == 0, || "degree-8 root in [0, 1/2]".into())?;
    let nearest = roots(&p8)?
        .into_iter()
        .min_by(|a, b| (a.clamp(0.0, 0.5) - a).abs().total_cmp(&(b.clamp(0.0, 0.5) - b).abs()))
        .ok_or("no real roots")?;
    check((nearest - 0.624325).abs() <= 1e-6, || format!("nearest root {nearest}"))?;

    let y = statement2_y_certificate();
    check(y.is_verified(), || y.to_string())?;
    let q = reference_quartic();
    let chain4 = SturmChain::new(&q).map_err(|e| e.to_string())?;
    let real = chain4.total_real_roots();
    let negative = chain4.count_roots(&Bound::NegInf, &zero);
    let r4 = roots(&q)?;
    check(real == 2 && negative == 2, || {
        format!("quartic has {real} real roots {r4:.4?}, {negative} negative (expected both negative)")
    })?;
    Ok(format!("degree-8 nearest root {nearest:.7}, quartic roots {r4:.4?}"))
}

fn criterion_8() -> Outcome {
    let r = statement3_certificate();
    step_ok(&r, "arctan(4/3) > π/4")?;
    step_ok(&r, "ratio at the right vertex is in (1.125, 1.13)")?;
    step_ok(&r, "1.13 − (B + 1/18)/T_g > 0")?;
    step_ok(&r, "left angle")?;
    check(r.is_verified(), || r.to_string())?;
    let m1 = (4f64 / 3.0).atan() - PI / 4.0;
    let m2 = (0.375f64 / 1.13).atan() + (0.625f64 / 1.13).atan() - PI / 4.0;
    Ok(format!("angle margins {m1:.4} and {m2:.4}, ratio bound 1.13"))
}

fn triangle_spec() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/triangle.json")
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let spec = parse_band_spec(triangle_spec()).map_err(|e| e.to_string())?;
    let e = fold(&spec.flat, &spec.dihedrals.ok_or("no dihedrals")?).map_err(|e| e.to_string())?;
    let r = ridge_curve(&e, 1e-9).map_err(|e| e.to_string())?;
    let lambda = e.lambda();
    let big_b = e.bend_vector(0).norm();
    let end_ok = (r.start - band::Vec3::new(big_b, 0.0, 0.0)).norm() < 1e-9
        && (r.end() - band::Vec3::new(-big_b, 0.0, 0.0)).norm() < 1e-9;
    let elapsed = start.elapsed();
    check((r.length() - 2.0 * 3f64.sqrt()).abs() < 1e-9, || format!("length {}", r.length()))?;
    check(end_ok, || format!("start {:?}, end {:?}", r.start, r.end()))?;
    check(r.min_vertex_norm() >= 1.0 - 1e-12, || format!("min vertex norm {}", r.min_vertex_norm()))?;
    check(r.spherical_length() >= PI - 1e-9, || format!("spherical length {}", r.spherical_length()))?;
    check(lambda > PI / 2.0, || format!("λ = {lambda}"))?;
    check(e.flat().signs().iter().map(|&s| s as i32).eq([1, -1, 1, -1]), || "sign sequence".into())?;
    within(elapsed, 1.0)?;
    Ok(format!(
        "length 2√3, ends (±{big_b:.3}, 0, 0), min |vertex| {:.6}, |Γ*| {:.6}, {:.3} s",
        r.min_vertex_norm(),
        r.spherical_length(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_10() -> Outcome {
    let mut counts = Vec::new();
    for seed in 0..20 {
        let e = random_closed_band(seed, 0.03).map_err(|e| e.to_string())?;
        check(e.lambda() < SEVEN_PI_TWELFTHS, || format!("seed {seed}: λ = {}", e.lambda()))?;
        let locus = perp_pair_locus(&e).map_err(|e| format!("seed {seed}: {e}"))?;
        let k = locus.essential_count();
        check(k % 2 == 1 && locus.has_invariant_essential(), || {
            format!("seed {seed}: {k} essential components, invariant: {}", locus.has_invariant_essential())
        })?;
        counts.push(k);
    }
    Ok(format!("20 bands, essential counts {counts:?}"))
}

fn criterion_11() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 24, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let measured = std::cell::Cell::new(0usize);
    let in_omega = std::cell::Cell::new(0usize);
    let result = runner.run(&(0u64..1_000_000), |seed| {
        let fail = |m: String| proptest::test_runner::TestCaseError::fail(format!("seed {seed}: {m}"));
        let e = random_isometric_band(seed).map_err(|e| fail(e.to_string()))?;
        let locus = perp_pair_locus(&e).map_err(|e| fail(e.to_string()))?;
        let tp = match find_t_pattern(&e, &locus, &Tolerances::default()) {
            Ok(tp) => tp,
            Err(band::BandError::NotFound(_)) => return Ok(()),
            Err(err) => return Err(fail(err.to_string())),
        };
        let rep = measure_t_pattern(&e, &tp).map_err(|e| fail(e.to_string()))?;
        let m = &rep.measurements;
        let ok = m.right_arcs_ok(MEASURE_TOL)
            && m.left_arcs_ok(MEASURE_TOL)
            && const3_check(m, 1)
            && const3_check(m, 2)
            && s_bound(m, 1)
            && s_bound(m, 2);
        if !ok {
            return Err(fail(format!("{m:?}")));
        }
        measured.set(measured.get() + 1);
        if omega_member_f64(m.b, m.t) {
            in_omega.set(in_omega.get() + 1);
            let z = zero_slope_bends(&rep);
            if z.count < 2 || !z.b_positive || !z.t_negative {
                return Err(fail(format!("{z:?}")));
            }
        }
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    Ok(format!("{} T-patterns measured, all constraints hold; {} in Ω", measured.get(), in_omega.get()))
}

fn criterion_12() -> Outcome {
    let start = Instant::now();
    let cone = ConePatch::default();
    let ks = [8, 16, 32]
        .iter()
        .map(|&n| cone.approximate(n).map(|a| a.k).map_err(|e| e.to_string()))
        .collect::<Result<Vec<f64>, String>>()?;
    let elapsed = start.elapsed();
    check(ks[0] > ks[1] && ks[1] > ks[2] && ks[2] < 1.01, || format!("K = {ks:?}"))?;
    within(elapsed, 10.0)?;
    Ok(format!("K(8), K(16), K(32) = {:.6}, {:.6}, {:.6}", ks[0], ks[1], ks[2]))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("λ₁ enclosure and exact optimum", criterion_1),
        ("t₀ enclosure and unique critical point", criterion_2),
        ("grid oracle", criterion_3),
        ("trapezoid certificate", criterion_4),
        ("expanded P", criterion_5),
        ("first statement cascade", criterion_6),
        ("second statement polynomials", criterion_7),
        ("third statement angles", criterion_8),
        ("triangle band invariants", criterion_9),
        ("perpendicular-pair locus parity", criterion_10),
        ("T-pattern constraints", criterion_11),
        ("cone-patch approximation", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
