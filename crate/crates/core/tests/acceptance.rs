//! Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fractal_image::certifier::{
    certify_linear, certify_moran, certify_nonneg_quadform, certify_sss, classify_signs, sign_pattern_fast_path,
    sss_directions, Budget, DomainSpec, Quadrant, SignCase,
};
use fractal_image::demo::{run_demo, DemoOutcome, SINE_FUNCTION, QUADRATIC_FUNCTION};
use fractal_image::expr::{BinaryOp, UnaryOp};
use fractal_image::fractal::{HomogeneousIFS, Level, MoranClass, MoranRealization, Source, Strategy};
use fractal_image::image::{extreme_pairs, sss_extreme_pairs, stabilization_report, DEFAULT_X0_SAMPLES};
use fractal_image::oracle::brute_force_image;
use fractal_image::{Expr, Interval, Param, PartialBundle, Var};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn demo(name: &str, max_seconds: f64) -> Outcome {
    let d: DemoOutcome = run_demo(name).map_err(|e| e.to_string())?;
    let failed: Vec<String> = d
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({})", c.name, c.detail))
        .collect();
    ensure(failed.is_empty(), format!("failed checks: {}", failed.join("; ")))?;
    ensure(
        d.seconds < max_seconds,
        format!("took {:.2}s, limit {max_seconds}s", d.seconds),
    )?;
    Ok(format!("{} checks in {:.2}s", d.checks.len(), d.seconds))
}

fn steinhaus_sum() -> Outcome {
    demo("steinhaus-sum", 10.0)
}

fn steinhaus_diff() -> Outcome {
    let b = PartialBundle::new(Expr::parse("x - y").unwrap());
    let v = certify_moran(&b, &MoranClass::cantor(), &DomainSpec::unit_square(), &Budget::default());
    ensure(
        v.sign_case.map(|s| s.delta) == Some(-1),
        format!("expected delta = -1, got {:?}", v.sign_case),
    )?;
    demo("steinhaus-diff", 10.0)
}

fn cantor_product() -> Outcome {
    demo("cantor-product", 60.0)
}

fn quotient_truncation() -> Outcome {
    demo("cantor-quotient-truncation", 60.0)
}

fn quadratic_sandwich() -> Outcome {
    demo("example9", 60.0)
}

fn sine_example() -> Outcome {
    demo("example10", 60.0)
}

/// Random `f` with `fxx >= 0`, `fxy <= 0`, `fyy >= 0` on the unit square.
fn random_convex_submodular(rng: &mut ChaCha8Rng) -> String {
    let mut c = || rng.gen_range(0.0..3.0f64);
    let terms = [
        format!("{:.4}*x^2", c()),
        format!("{:.4}*y^2", c()),
        format!("-{:.4}*x*y", c()),
        format!("{:.4}*x^3", c()),
        format!("{:.4}*y^4", c()),
        format!("{:.4}*exp(x)", c()),
        format!("{:.4}*exp(-y)", c()),
        format!("{:.4}*(x-y)^2", c()),
        format!("{:.4}*x", c() - 1.5),
        format!("{:.4}*y", c() - 1.5),
    ];
    terms.join(" + ")
}

fn cantor_constants_and_fast_path() -> Outcome {
    demo("corollary7-constants", 10.0)?;
    let cantor = HomogeneousIFS::cantor();
    let dirs = sss_directions(&cantor, &cantor, 1).map_err(|e| e.to_string())?;
    ensure(dirs.forms.len() == 2, "expected two forms")?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dom = DomainSpec::unit_square();
    let budget = Budget::default();
    for i in 0..50 {
        let text = random_convex_submodular(&mut rng);
        let b = PartialBundle::new(Expr::parse(&text).unwrap());
        let fast = sign_pattern_fast_path(&b, &dom, &budget);
        ensure(fast.is_certified(), format!("instance {i}: fast path not certified for {text}"))?;
        for (label, l1, l2) in &dirs.forms {
            let v = certify_nonneg_quadform(l1, l2, &b, &dom, &budget);
            ensure(v.is_certified(), format!("instance {i}: {label} not certified for {text}"))?;
        }
    }
    Ok("constants match; fast path implied both forms on 50 instances".into())
}

// ---------------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------------

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => Expr::Var(Var::X),
            1 => Expr::Var(Var::Y),
            _ => Expr::Const((rng.gen_range(-30..30) as f64) / 10.0),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_expr(rng, depth - 1));
    match rng.gen_range(0..10) {
        0 => Expr::Binary(BinaryOp::Add, sub(rng), sub(rng)),
        1 => Expr::Binary(BinaryOp::Sub, sub(rng), sub(rng)),
        2 | 3 => Expr::Binary(BinaryOp::Mul, sub(rng), sub(rng)),
        4 => Expr::Binary(BinaryOp::Div, sub(rng), sub(rng)),
        5 => Expr::Pow(sub(rng), [2.0, 3.0, 0.5, -1.0][rng.gen_range(0..4)]),
        6 => Expr::Unary(UnaryOp::Sin, sub(rng)),
        7 => Expr::Unary(UnaryOp::Cos, sub(rng)),
        8 => Expr::Unary(UnaryOp::Exp, sub(rng)),
        _ => Expr::Unary(UnaryOp::Log, sub(rng)),
    }
}

fn random_box(rng: &mut ChaCha8Rng) -> (Interval, Interval) {
    let mut side = || {
        let a = rng.gen_range(-2.0..2.0f64);
        let w = rng.gen_range(0.0..1.0f64).powi(2);
        Interval::new(a, a + w).unwrap()
    };
    (side(), side())
}

fn inside(rng: &mut ChaCha8Rng, i: Interval) -> f64 {
    (i.lo() + rng.gen_range(0.0..=1.0) * i.width()).clamp(i.lo(), i.hi())
}

fn isotonicity() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut checked = 0;
    let mut draws = 0;
    while checked < 1000 {
        draws += 1;
        ensure(draws < 100_000, "too few well-defined triples")?;
        let e = random_expr(&mut rng, 4);
        let (bx, by) = random_box(&mut rng);
        let Ok(enc) = e.eval_interval(bx, by) else { continue };
        let (px, py) = (inside(&mut rng, bx), inside(&mut rng, by));
        let Ok(v) = e.eval_real(px, py) else { continue };
        if !v.is_finite() {
            continue;
        }
        ensure(enc.contains(v), format!("{e} on {bx} x {by}: {v} at ({px}, {py}) outside {enc}"))?;
        // a sub-box must map into the enclosure of the box
        let sx = Interval::new(px.min(bx.mid()), px.max(bx.mid())).unwrap();
        let sy = Interval::new(py.min(by.mid()), py.max(by.mid())).unwrap();
        if let Ok(sub) = e.eval_interval(sx, sy) {
            ensure(sub.is_subset_of(&enc), format!("{e}: sub-box enclosure {sub} not inside {enc}"))?;
        }
        checked += 1;
    }
    Ok(checked)
}

fn demo_functions() -> Vec<&'static str> {
    vec!["x + y", "x - y", "x * y", "x / y", "x + 0.5*y", QUADRATIC_FUNCTION, SINE_FUNCTION]
}

fn finite_differences() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(86);
    let h = 1e-5;
    let mut n = 0;
    for text in demo_functions() {
        let b = PartialBundle::new(Expr::parse(text).unwrap());
        // (expression, its symbolic x- and y-derivatives)
        let pairs = [(&b.f, &b.fx, &b.fy), (&b.fx, &b.fxx, &b.fxy), (&b.fy, &b.fxy, &b.fyy)];
        for _ in 0..100 {
            let x = rng.gen_range(0.05..0.95);
            let y = rng.gen_range(0.05..0.95);
            for (g, gx, gy) in pairs {
                let ev = |e: &Expr, x: f64, y: f64| e.eval_real(x, y).unwrap();
                let fd_x = (ev(g, x + h, y) - ev(g, x - h, y)) / (2.0 * h);
                let fd_y = (ev(g, x, y + h) - ev(g, x, y - h)) / (2.0 * h);
                for (sym, fd, var) in [(ev(gx, x, y), fd_x, "x"), (ev(gy, x, y), fd_y, "y")] {
                    let err = (sym - fd).abs() / (1.0 + sym.abs());
                    ensure(err < 1e-6, format!("d/d{var} of {g} at ({x}, {y}): {sym} vs {fd}"))?;
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}

fn mixed_class() -> MoranClass {
    MoranClass::new(
        vec![],
        vec![Level::new(Param::frac(3, 10), 3), Level::new(Param::frac(2, 5), 2)],
        Param::frac(1, 2),
    )
    .unwrap()
}

/// Functions certified on both the Cantor class and the mixed class.
fn certified_functions() -> Vec<&'static str> {
    vec!["x + y", "x + 0.5*y", "x - y", "-x - y", "y - x", QUADRATIC_FUNCTION, SINE_FUNCTION]
}

fn stabilization_and_nesting() -> Result<usize, String> {
    let class = mixed_class();
    let dom = DomainSpec::unit_square();
    let mut strategies = vec![Strategy::Uniform, Strategy::ExtremeLeftPacked];
    strategies.extend((0..20).map(|s| Strategy::Random(1000 + s)));
    let mut runs = 0;
    for text in certified_functions() {
        let b = PartialBundle::new(Expr::parse(text).unwrap());
        let v = certify_moran(&b, &class, &dom, &Budget::default());
        ensure(v.is_certified(), format!("{text} not certified on the mixed class: {:?}", v.status))?;
        for (i, &s) in strategies.iter().enumerate() {
            let other = strategies[(i + 1) % strategies.len()];
            let k_max = 8;
            let e1 = MoranRealization::realize(&class, k_max, s).map_err(|e| e.to_string())?;
            let e2 = MoranRealization::realize(&class, k_max, other).map_err(|e| e.to_string())?;
            let r = stabilization_report(&b.f, v.sign_case, Source::Moran(&e1), Source::Moran(&e2), k_max, 1e-9)
                .map_err(|e| e.to_string())?;
            ensure(r.nested, format!("{text} with {s:?}: levels not nested"))?;
            ensure(r.stabilized, format!("{text} with {s:?}: not stabilized"))?;
            runs += 1;
        }
    }
    Ok(runs)
}

fn fixtures() -> Result<usize, String> {
    let classes = [
        MoranClass::cantor(),
        mixed_class(),
        MoranClass::constant(Param::frac(1, 4), 3, Param::frac(1, 3)).unwrap(),
        MoranClass::new(
            vec![Level::new(Param::frac(2, 5), 2)],
            vec![Level::new(Param::frac(1, 3), 2), Level::new(Param::frac(1, 5), 4)],
            Param::frac(1, 4),
        )
        .unwrap(),
    ];
    let quadrants = [Quadrant::PP, Quadrant::NN, Quadrant::NP, Quadrant::PN];
    let mut n = 0;
    for class in &classes {
        for k in 1..=4 {
            for q in quadrants {
                for p in extreme_pairs(class, k, SignCase::new(q), DEFAULT_X0_SAMPLES) {
                    ensure(p.displacement_holds(), format!("displacement fails: {p:?}"))?;
                    n += 1;
                }
            }
        }
    }
    let ifs = [
        HomogeneousIFS::cantor(),
        HomogeneousIFS::new(Param::frac(1, 4), vec![Param::int(0), Param::frac(1, 3), Param::frac(3, 4)]).unwrap(),
    ];
    for a in &ifs {
        for b in &ifs {
            if a.lambda() != b.lambda() {
                continue;
            }
            for k in 1..=3 {
                for q in quadrants {
                    for p in sss_extreme_pairs(a, b, k, SignCase::new(q)).map_err(|e| e.to_string())? {
                        ensure(p.displacement_holds(), format!("displacement fails: {p:?}"))?;
                        n += 1;
                    }
                }
            }
        }
    }

    // monotone along every fixture for functions certified on the set
    let dom = DomainSpec::unit_square();
    let cantor = HomogeneousIFS::cantor();
    for text in certified_functions() {
        let b = PartialBundle::new(Expr::parse(text).unwrap());
        for class in [MoranClass::cantor(), mixed_class()] {
            let v = certify_moran(&b, &class, &dom, &Budget::default());
            ensure(v.is_certified(), format!("{text} not certified"))?;
            let sc = v.sign_case.unwrap();
            for k in 1..=4 {
                for p in extreme_pairs(&class, k, sc, DEFAULT_X0_SAMPLES) {
                    let g = p.gain(&b.f).map_err(|e| e.to_string())?;
                    ensure(g >= -1e-9, format!("{text}: f(P_hi) < f(P_lo) by {g} at {p:?}"))?;
                    n += 1;
                }
            }
        }
        let v = certify_sss(&b, &cantor, &cantor, &dom, &Budget::default()).map_err(|e| e.to_string())?;
        ensure(v.is_certified(), format!("{text} not certified on the Cantor IFS"))?;
        for k in 1..=3 {
            for p in sss_extreme_pairs(&cantor, &cantor, k, v.sign_case.unwrap()).map_err(|e| e.to_string())? {
                let g = p.gain(&b.f).map_err(|e| e.to_string())?;
                ensure(g >= -1e-9, format!("{text}: f(P_hi) < f(P_lo) by {g} at {p:?}"))?;
                n += 1;
            }
        }
    }
    Ok(n)
}

fn property_suites() -> Outcome {
    let iso = isotonicity()?;
    let fd = finite_differences()?;
    let stab = stabilization_and_nesting()?;
    let fix = fixtures()?;
    Ok(format!(
        "{iso} isotonicity triples, {fd} derivative checks, {stab} stabilization runs, {fix} fixture checks"
    ))
}

fn linear_sweep() -> Outcome {
    let start = Instant::now();
    let class = MoranClass::cantor();
    let cantor = HomogeneousIFS::cantor();
    let mut certified = Vec::new();
    for k in 1..=20 {
        let s = rat(k, 10);
        let v = certify_linear(&class, &s).map_err(|e| e.to_string())?;
        let expect = (4..=10).contains(&k);
        ensure(
            v.is_certified() == expect,
            format!("s = {s}: got {:?}, expected certified = {expect}", v.status),
        )?;
        if v.is_certified() {
            let f = Expr::parse(&format!("x + {}*y", k as f64 / 10.0)).unwrap();
            let img = brute_force_image(&f, Source::Homogeneous(&cantor), Source::Homogeneous(&cantor), 8, 0.01)
                .map_err(|e| e.to_string())?;
            ensure(img.component_count() == 1, format!("s = {s}: {} components", img.component_count()))?;
            certified.push(s.to_string());
        }
    }
    // the boundary itself
    ensure(certify_linear(&class, &rat(1, 3)).unwrap().is_certified(), "s = 1/3 not certified")?;
    ensure(certify_linear(&class, &rat(-1, 1)).unwrap().is_certified(), "s = -1 not certified")?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("certified for s in {{{}}} in {secs:.2}s", certified.join(", ")))
}

fn main() {
    // keep the sign-classification path warm so timing covers only the demos
    let _ = classify_signs(
        &PartialBundle::new(Expr::parse("x + y").unwrap()),
        &DomainSpec::unit_square(),
        &Budget::default(),
    );
    let criteria: [Criterion; 9] = [
        ("AC1", "Steinhaus sum", steinhaus_sum),
        ("AC2", "Steinhaus difference", steinhaus_diff),
        ("AC3", "Cantor product negative control", cantor_product),
        ("AC4", "quotient truncation", quotient_truncation),
        ("AC5", "three-map quadratic example", quadratic_sandwich),
        ("AC6", "three-map sine example", sine_example),
        ("AC7", "Cantor constants and fast path", cantor_constants_and_fast_path),
        ("AC8", "property suites", property_suites),
        ("AC9", "linear sweep", linear_sweep),
    ];
    let mut failures = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("{id} PASS {name} [{secs:.2}s]: {detail}"),
            Err(why) => {
                failures += 1;
                println!("{id} FAIL {name} [{secs:.2}s]: {why}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
