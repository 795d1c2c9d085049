//! Pre-registered jobs with pinned parameters and their expected outcomes.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::certifier::{cantor_constants, proportional, Conclusion, DomainSpec, Status};
use crate::fractal::{HomogeneousIFS, Source};
use crate::interval::Interval;
use crate::interval_set::IntervalSet;
use crate::job::{cmd_certify, cmd_image, cmd_oracle, Job, JobError, Prepared};
use crate::oracle::{any_in_open, image_values, max_gap_within, sample_points};
use num_rational::BigRational;

pub const DEMOS: [&str; 7] = [
    "steinhaus-sum",
    "steinhaus-diff",
    "cantor-product",
    "cantor-quotient-truncation",
    "corollary7-constants",
    "example9",
    "example10",
];

const CANTOR_CLASS: &str = r#"{"kind": "moran", "period": [{"c": "1/3", "n": 2}], "kappa": 0}"#;
const CANTOR_IFS: &str = r#"{"kind": "homogeneous", "lambda": "1/3", "a": [0, "2/3"]}"#;
const THREE_MAPS: &str = r#"{"kind": "general",
    "maps": [{"r": "1/3", "a": 0}, {"r": "1/4", "a": 0}, {"r": "1/3", "a": "2/3"}],
    "witness": {"sub": {"lambda": "1/3", "a": [0, "2/3"]}, "words": ["1", "3"]}}"#;

pub const QUADRATIC_FUNCTION: &str = "x^2 + y^2 + 6*x + 3*y + 0.5*x*y";
pub const SINE_FUNCTION: &str = "sin(-0.5*x*y) + 12*x + 6*y";

fn job_text(function: &str, set: &str, k_max: usize) -> String {
    format!(
        r#"{{"version": 1, "function": "{function}", "fractal1": {set}, "fractal2": {set},
            "image": {{"k_max": {k_max}}}}}"#
    )
}

/// The job file a demo runs, if it runs one.
pub fn demo_job(name: &str) -> Option<String> {
    Some(match name {
        "steinhaus-sum" => job_text("x + y", CANTOR_CLASS, 10),
        "steinhaus-diff" => job_text("x - y", CANTOR_CLASS, 10),
        "cantor-product" => job_text("x * y", CANTOR_CLASS, 4),
        "example9" => job_text(QUADRATIC_FUNCTION, THREE_MAPS, 6),
        "example10" => job_text(SINE_FUNCTION, CANTOR_IFS, 8),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoOutcome {
    pub name: String,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Reports of the underlying pipeline runs.
    pub reports: Value,
    #[serde(skip)]
    pub seconds: f64,
}

impl DemoOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

fn prepared(name: &str) -> Result<Prepared, JobError> {
    Job::from_json(&demo_job(name).expect("registered demo"))?.prepare()
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).expect("ordered endpoints")
}

fn close_to(set: &IntervalSet, want: Interval, tol: f64) -> bool {
    set.component_count() == 1 && {
        let h = set.hull();
        (h.lo() - want.lo()).abs() <= tol && (h.hi() - want.hi()).abs() <= tol
    }
}

pub fn run_demo(name: &str) -> Result<DemoOutcome, JobError> {
    let start = Instant::now();
    let mut c = Checks::default();
    let reports = match name {
        "steinhaus-sum" => steinhaus(name, iv(0.0, 2.0), &mut c)?,
        "steinhaus-diff" => steinhaus(name, iv(-1.0, 1.0), &mut c)?,
        "cantor-product" => product(&mut c)?,
        "cantor-quotient-truncation" => quotient(&mut c)?,
        "corollary7-constants" => constants(&mut c),
        "example9" => quadratic_on_three_maps(&mut c)?,
        "example10" => sine_on_three_maps(&mut c)?,
        other => return Err(JobError::Unsupported(format!("unknown demo '{other}' (known: {})", DEMOS.join(", ")))),
    };
    let passed = c.0.iter().all(|ch| ch.passed);
    Ok(DemoOutcome {
        name: name.into(),
        checks: c.0,
        passed,
        reports,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn steinhaus(name: &str, want: Interval, c: &mut Checks) -> Result<Value, JobError> {
    let p = prepared(name)?;
    let cert = cmd_certify(&p, None)?;
    c.add("certified", cert.verdict.is_certified(), format!("{:?}", cert.verdict.status));
    let linear = cert.linear.as_ref();
    let steinhaus = linear.and_then(|v| v.conclusion.clone());
    c.add(
        "linear_steinhaus",
        steinhaus == Some(Conclusion::Steinhaus { image: want }),
        format!("{steinhaus:?}"),
    );
    let tight = linear.and_then(|v| v.constants.get("c+xi[0]")).cloned();
    c.add("c_plus_xi_is_one", tight.as_deref() == Some("1"), format!("{tight:?}"));
    let img = cmd_image(&p, None, false)?;
    let levels = &img.report.levels;
    let bad: Vec<usize> = levels.iter().filter(|l| !close_to(&l.image, want, 1e-9)).map(|l| l.k).collect();
    c.add(
        "levels_equal_target",
        levels.len() == 11 && bad.is_empty(),
        format!("{} levels, mismatches at {bad:?}", levels.len()),
    );
    c.add("stabilized", img.report.stabilized, "");
    Ok(json!({"certify": cert, "image": img}))
}

fn product(c: &mut Checks) -> Result<Value, JobError> {
    let p = prepared("cantor-product")?;
    let cert = cmd_certify(&p, None)?;
    c.add("not_certified", cert.verdict.status != Status::Certified, format!("{:?}", cert.verdict.status));
    let img = cmd_image(&p, None, true)?;
    let split: Vec<usize> = img.report.levels[1..].iter().map(|l| l.components).collect();
    c.add("levels_split", split.iter().all(|&n| n >= 2), format!("components for k=1..4: {split:?}"));
    c.add("not_stabilized", !img.report.stabilized, "");
    let src = p.sources(6)?;
    let (a, b) = src.pair();
    let vals = image_values(&p.bundle.f, &sample_points(a, 6).map_err(JobError::Oracle)?, &sample_points(b, 6)?)?;
    c.add(
        "oracle_gap",
        // 1e-12 absorbs the rounding of products that equal 1/3 exactly
        !any_in_open(&vals, 1.0 / 3.0 + 1e-12, 4.0 / 9.0 - 1e-12),
        "no depth-6 product value in (1/3, 4/9)",
    );
    Ok(json!({"certify": cert, "image": img}))
}

fn quotient(c: &mut Checks) -> Result<Value, JobError> {
    let cantor = HomogeneousIFS::cantor();
    let pts = sample_points(Source::Homogeneous(&cantor), 8)?;
    let dens: Vec<f64> = pts.iter().copied().filter(|&y| y >= 2.0 / 3.0).collect();
    let f = crate::Expr::parse("x / y")?;
    let vals = image_values(&f, &pts, &dens)?;
    let (lo, hi) = (2.0 / 3.0, 1.5);
    let gap = max_gap_within(&vals, lo, hi);
    c.add("covers_window", gap < 0.02, format!("max gap {gap:.3e} in [2/3, 3/2]"));
    Ok(json!({"depth": 8, "window": [lo, hi], "max_gap": gap, "samples": vals.len()}))
}

fn constants(c: &mut Checks) -> Value {
    let k = cantor_constants();
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let bounds = k.ratio_lower == r(1, 3) && k.ratio_upper == r(1, 1);
    c.add("ratio_bounds", bounds, format!("[{}, {}]", k.ratio_lower, k.ratio_upper));
    let first = [r(1, 1), r(-6, 1), r(9, 1)];
    let second = [r(1, 1), r(-2, 1), r(1, 1)];
    c.add("first_form", proportional(&k.first_form, &first), fmt_form(&k.first_form));
    c.add("second_form", proportional(&k.second_form, &second), fmt_form(&k.second_form));
    json!({
        "ratio_lower": k.ratio_lower.to_string(),
        "ratio_upper": k.ratio_upper.to_string(),
        "first_form": fmt_form(&k.first_form),
        "second_form": fmt_form(&k.second_form),
    })
}

fn fmt_form(f: &[BigRational; 3]) -> String {
    format!("({}, {}, {})", f[0], f[1], f[2])
}

/// Image of `[0,1]^2`, the target in both examples.
fn hull(p: &Prepared) -> Result<Interval, JobError> {
    let v = crate::certifier::classify_signs(&p.bundle, &DomainSpec::unit_square(), &p.budget());
    Ok(crate::image::hull_image(&p.bundle.f, v.sign_case)?)
}

fn quadratic_on_three_maps(c: &mut Checks) -> Result<Value, JobError> {
    let p = prepared("example9")?;
    let cert = cmd_certify(&p, None)?;
    c.add("certified", cert.verdict.is_certified(), format!("{:?}", cert.verdict.status));
    let witness_ok = cert.verdict.conditions.first().map(|r| r.id == "subifs_witness" && r.status == Status::Certified);
    c.add("witness_words_1_3", witness_ok == Some(true), "sub-IFS {x/3, (x+2)/3} from words 1, 3");
    let h = hull(&p)?;
    let want = iv(0.0, 11.5);
    c.add("h_is_0_to_11.5", (h.lo() - 0.0).abs() < 1e-12 && (h.hi() - 11.5).abs() < 1e-12, format!("{h}"));
    c.add(
        "conclusion",
        matches!(&cert.verdict.conclusion, Some(Conclusion::Sandwich { image }) if image.lo() <= 0.0 && image.hi() >= 11.5),
        format!("{:?}", cert.verdict.conclusion),
    );
    let orc = cmd_oracle(&p, Some(6))?;
    let inside = orc.image.subset_of(&IntervalSet::single(want), 1e-9);
    c.add("oracle_inside_h", inside, "");
    let src = p.sources(6)?;
    let (a, b) = src.pair();
    let vals = image_values(&p.bundle.f, &sample_points(a, 6)?, &sample_points(b, 6)?)?;
    let gap = max_gap_within(&vals, want.lo(), want.hi());
    c.add("oracle_covers_h", gap < 0.05, format!("max gap {gap:.3e}"));
    c.add("oracle_within_level_image", orc.comparison.passed, "");
    Ok(json!({"certify": cert, "oracle": orc}))
}

fn sine_on_three_maps(c: &mut Checks) -> Result<Value, JobError> {
    let p = prepared("example10")?;
    let cert = cmd_certify(&p, None)?;
    c.add("certified", cert.verdict.is_certified(), format!("{:?}", cert.verdict.status));
    let want = iv(0.0, (-0.5f64).sin() + 18.0);
    let img = cmd_image(&p, None, false)?;
    let last = img.report.last();
    c.add(
        "image_at_k8",
        last.k == 8 && close_to(&last.image, want, 1e-6),
        format!("k={} image {:?}", last.k, last.image),
    );
    // The three-map set sits between the Cantor set and [0,1].
    let mut q = Job::from_json(&job_text(SINE_FUNCTION, THREE_MAPS, 6))?.prepare()?;
    q.job.budget = p.job.budget;
    let sandwich = cmd_certify(&q, None)?;
    c.add("sandwich_certified", sandwich.verdict.is_certified(), format!("{:?}", sandwich.verdict.status));
    Ok(json!({"certify": cert, "image": img, "sandwich": sandwich}))
}
