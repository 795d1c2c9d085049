use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::search::{prove_nonneg, prove_strict_sign, Inequality, Term};
use super::{
    Budget, CertError, ConditionReport, Conclusion, DomainSpec, SignCase, Stats, Status, Verdict,
    Witness,
};
use crate::expr::PartialBundle;
use crate::fractal::{verify_subifs_witness, GeneralIFS, HomogeneousIFS, LevelSummary, MoranClass};
use crate::image::hull_image;
use crate::interval::Interval;
use crate::param::{enclose, Param};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn show(r: &BigRational) -> String {
    Param::from_ratio(r.clone()).to_string()
}

/// `(l1^2, 2 l1 l2, l2^2)`: coefficients of `fxx`, `fxy`, `fyy` in
/// `(l1 ∂x + l2 ∂y)^2 f`.
pub fn form_coefficients(l1: &BigRational, l2: &BigRational) -> [BigRational; 3] {
    [l1 * l1, rat(2) * l1 * l2, l2 * l2]
}

/// `a = t b` for some `t > 0`.
pub fn proportional(a: &[BigRational; 3], b: &[BigRational; 3]) -> bool {
    let cross_zero = (0..3).all(|i| (0..3).all(|j| &a[i] * &b[j] == &a[j] * &b[i]));
    let dot: BigRational = a.iter().zip(b).map(|(p, q)| p * q).sum();
    cross_zero && dot.is_positive()
}

/// Directions of the second-order forms and the two ratio bounds for one
/// sign case.
#[derive(Debug, Clone, PartialEq)]
pub struct Directions {
    /// `(label, l1, l2)` for each required `(l1 ∂x + l2 ∂y)^2 f >= 0`.
    pub forms: Vec<(String, BigRational, BigRational)>,
    pub ratio_lower: BigRational,
    pub ratio_upper: BigRational,
}

impl Directions {
    fn push_form(&mut self, label: String, l1: BigRational, l2: BigRational) {
        if !self.forms.iter().any(|(_, a, b)| *a == l1 && *b == l2) {
            self.forms.push((label, l1, l2));
        }
    }
}

/// For every distinct level: `(c, δ(ξ-1))` and `(δ(ξ-1), 1)`; ratio bounds
/// `sup (1-ξ)` and `inf c/(1-ξ)`.
pub fn moran_directions(summary: &LevelSummary, delta: i8) -> Directions {
    let d = rat(delta.into());
    let mut out = Directions {
        forms: Vec::new(),
        ratio_lower: summary.sup_one_minus_xi.clone(),
        ratio_upper: summary.inf_c_over_one_minus_xi.clone(),
    };
    for t in &summary.triples {
        let s = &d * (&t.xi - rat(1));
        let lv = format!("c={}, n={}", show(&t.c), t.n);
        out.push_form(format!("level {lv}: (c, delta(xi-1))"), t.c.clone(), s.clone());
        out.push_form(format!("level {lv}: (delta(xi-1), 1)"), s, rat(1));
    }
    out
}

/// For every adjacent pair `l` of the second IFS: `(λδ, g_l(1) - g_{l+1}(0))`;
/// for every adjacent pair `j` of the first: `(δ(f_j(1) - f_{j+1}(0)), 1)`;
/// ratio bounds `τ1` and `λ/τ2`.
pub fn sss_directions(
    k1: &HomogeneousIFS,
    k2: &HomogeneousIFS,
    delta: i8,
) -> Result<Directions, CertError> {
    if k1.lambda().ratio() != k2.lambda().ratio() {
        return Err(CertError::MismatchedLambda(
            k1.lambda().to_string(),
            k2.lambda().to_string(),
        ));
    }
    let lambda = k1.lambda().ratio().clone();
    let g1 = k1.gap_profile()?;
    let g2 = k2.gap_profile()?;
    let d = rat(delta.into());
    let mut out = Directions {
        forms: Vec::new(),
        ratio_lower: g1.tau.clone(),
        ratio_upper: &lambda / &g2.tau,
    };
    for (l, gap) in &g2.gaps {
        out.push_form(format!("second set, pair {l}: (lambda*delta, g_l(1)-g_(l+1)(0))"), &lambda * &d, -gap);
    }
    for (j, gap) in &g1.gaps {
        out.push_form(format!("first set, pair {j}: (delta(f_j(1)-f_(j+1)(0)), 1)"), &d * -gap, rat(1));
    }
    Ok(out)
}

fn quadform_report(
    label: &str,
    l1: &BigRational,
    l2: &BigRational,
    b: &PartialBundle,
    dom: &DomainSpec,
    budget: &Budget,
) -> ConditionReport {
    let [a, m, c] = form_coefficients(l1, l2);
    let ineq = Inequality {
        id: format!("form({}, {})", show(l1), show(l2)),
        description: format!(
            "{label}: {}*fxx + {}*fxy + {}*fyy >= 0",
            show(&a),
            show(&m),
            show(&c)
        ),
        terms: vec![Term::new(&a, &b.fxx), Term::new(&m, &b.fxy), Term::new(&c, &b.fyy)],
    };
    prove_nonneg(&ineq, dom, budget)
}

fn ratio_reports(
    lo: &BigRational,
    hi: &BigRational,
    sc: SignCase,
    b: &PartialBundle,
    dom: &DomainSpec,
    budget: &Budget,
) -> Vec<ConditionReport> {
    // s (δ fy - lo fx) >= 0 and s (hi fx - δ fy) >= 0 with s the sign of fx
    let s = rat(sc.fx_sign().into());
    let sd = &s * rat(sc.delta.into());
    let lower = Inequality {
        id: "ratio_lower".into(),
        description: format!("{} <= delta * fy / fx", show(lo)),
        terms: vec![Term::new(&sd, &b.fy), Term::new(&(-&s * lo), &b.fx)],
    };
    let upper = Inequality {
        id: "ratio_upper".into(),
        description: format!("delta * fy / fx <= {}", show(hi)),
        terms: vec![Term::new(&(&s * hi), &b.fx), Term::new(&-sd, &b.fy)],
    };
    vec![prove_nonneg(&lower, dom, budget), prove_nonneg(&upper, dom, budget)]
}

/// Strict sign-definiteness of both first partials.
pub fn classify_signs(b: &PartialBundle, dom: &DomainSpec, budget: &Budget) -> Verdict {
    let (rx, sx) = prove_strict_sign("fx_nonzero", "fx != 0 with one sign", &b.fx, dom, budget);
    if rx.status != Status::Certified {
        return Verdict::from_conditions(vec![rx]);
    }
    let (ry, sy) = prove_strict_sign("fy_nonzero", "fy != 0 with one sign", &b.fy, dom, budget);
    let mut v = Verdict::from_conditions(vec![rx, ry]);
    if let (Some(px), Some(py)) = (sx, sy) {
        let sc = SignCase::from_signs(px, py);
        v.sign_case = Some(sc);
        v.constants.insert("delta".into(), sc.delta.to_string());
    }
    v
}

pub fn certify_nonneg_quadform(
    l1: &BigRational,
    l2: &BigRational,
    b: &PartialBundle,
    dom: &DomainSpec,
    budget: &Budget,
) -> Verdict {
    Verdict::from_conditions(vec![quadform_report("quadratic form", l1, l2, b, dom, budget)])
}

/// `lo <= δ fy/fx <= hi`, certified through sign-corrected products.
pub fn certify_ratio_bounds(
    lo: &BigRational,
    hi: &BigRational,
    sc: SignCase,
    b: &PartialBundle,
    dom: &DomainSpec,
    budget: &Budget,
) -> Verdict {
    let mut v = Verdict::from_conditions(ratio_reports(lo, hi, sc, b, dom, budget));
    v.sign_case = Some(sc);
    v
}

/// `fxx >= 0`, `fxy <= 0`, `fyy >= 0`: together they imply every form whose
/// direction has components of opposite sign.
pub fn sign_pattern_fast_path(b: &PartialBundle, dom: &DomainSpec, budget: &Budget) -> Verdict {
    let one = rat(1);
    let checks = [
        ("fxx_nonneg", "fxx >= 0", Term::new(&one, &b.fxx)),
        ("fxy_nonpos", "fxy <= 0", Term::new(&-&one, &b.fxy)),
        ("fyy_nonneg", "fyy >= 0", Term::new(&one, &b.fyy)),
    ];
    Verdict::from_conditions(
        checks
            .into_iter()
            .map(|(id, d, t)| {
                let ineq = Inequality {
                    id: id.into(),
                    description: d.into(),
                    terms: vec![t],
                };
                prove_nonneg(&ineq, dom, budget)
            })
            .collect(),
    )
}

/// Signs, then every form in `dirs`, then the ratio bounds.
fn certify_directions(
    b: &PartialBundle,
    dom: &DomainSpec,
    budget: &Budget,
    dirs: impl FnOnce(SignCase) -> Result<Directions, CertError>,
) -> Result<Verdict, CertError> {
    let signs = classify_signs(b, dom, budget);
    let Some(sc) = signs.sign_case.filter(|_| signs.is_certified()) else {
        return Ok(signs);
    };
    let d = dirs(sc)?;
    let mut reports = signs.conditions;
    for (label, l1, l2) in &d.forms {
        reports.push(quadform_report(label, l1, l2, b, dom, budget));
    }
    reports.extend(ratio_reports(&d.ratio_lower, &d.ratio_upper, sc, b, dom, budget));
    let mut v = Verdict::from_conditions(reports);
    v.sign_case = Some(sc);
    v.constants = signs.constants;
    v.constants.insert("ratio_lower".into(), show(&d.ratio_lower));
    v.constants.insert("ratio_upper".into(), show(&d.ratio_upper));
    if v.is_certified() {
        v.conclusion = Some(match dom.restriction() {
            None if dom.is_unit_square() => match hull_image(&b.f, Some(sc)) {
                Ok(image) => Conclusion::ClosedInterval { image },
                Err(_) => return Ok(v),
            },
            _ => Conclusion::FinitelyManyIntervals {
                at_most: dom.boxes().len(),
            },
        });
    }
    Ok(v)
}

/// Conditions for two sets of one Moran class. On a restricted domain
/// `C_p x D_p` the levels are quantified over `k >= p`.
pub fn certify_moran(
    b: &PartialBundle,
    class: &MoranClass,
    dom: &DomainSpec,
    budget: &Budget,
) -> Verdict {
    let summary = class.distinct_levels_from(dom.restriction().unwrap_or(1));
    let mut v = certify_directions(b, dom, budget, |sc| Ok(moran_directions(&summary, sc.delta)))
        .expect("Moran directions are infallible");
    for (i, t) in summary.triples.iter().enumerate() {
        v.constants.insert(
            format!("level[{i}]"),
            format!("c={}, n={}, xi={}", show(&t.c), t.n, show(&t.xi)),
        );
    }
    v
}

/// Conditions for two homogeneous self-similar sets with a common ratio.
pub fn certify_sss(
    b: &PartialBundle,
    k1: &HomogeneousIFS,
    k2: &HomogeneousIFS,
    dom: &DomainSpec,
    budget: &Budget,
) -> Result<Verdict, CertError> {
    // validate before any subdivision
    sss_directions(k1, k2, 1)?;
    let mut v = certify_directions(b, dom, budget, |sc| sss_directions(k1, k2, sc.delta))?;
    v.constants.insert("lambda".into(), k1.lambda().to_string());
    v.constants.insert("tau1".into(), show(&k1.gap_profile()?.tau));
    v.constants.insert("tau2".into(), show(&k2.gap_profile()?.tau));
    Ok(v)
}

fn closed_form(id: &str, description: String, holds: bool, value: &BigRational) -> ConditionReport {
    let witness = (!holds).then(|| Witness {
        condition: id.into(),
        x: Interval::unit(),
        y: Interval::unit(),
        enclosure: Some(enclose(value)),
        reason: "closed-form bound fails".into(),
    });
    ConditionReport {
        id: id.into(),
        description,
        status: if holds {
            Status::Certified
        } else {
            Status::ConditionsViolated
        },
        witness,
        stats: Stats::default(),
    }
}

/// `f = x + s y`: `sup (1-ξ) <= |s| <= inf c/(1-ξ)`, decided exactly. For
/// `s = ±1` with `c_k + ξ_k >= 1` at every level the image is `[0,2]` or `[-1,1]`.
pub fn certify_linear(class: &MoranClass, s: &BigRational) -> Result<Verdict, CertError> {
    if s.is_zero() {
        return Err(CertError::ZeroSlope);
    }
    let summary = class.distinct_levels();
    let a = s.abs();
    let mut v = Verdict::from_conditions(vec![
        closed_form(
            "ratio_lower",
            format!("sup(1 - xi) = {} <= |s|", show(&summary.sup_one_minus_xi)),
            summary.sup_one_minus_xi <= a,
            &a,
        ),
        closed_form(
            "ratio_upper",
            format!("|s| <= inf c/(1 - xi) = {}", show(&summary.inf_c_over_one_minus_xi)),
            a <= summary.inf_c_over_one_minus_xi,
            &a,
        ),
    ]);
    v.sign_case = Some(SignCase::from_signs(true, s.is_positive()));
    v.constants.insert("s".into(), show(s));
    v.constants.insert("ratio_lower".into(), show(&summary.sup_one_minus_xi));
    v.constants.insert("ratio_upper".into(), show(&summary.inf_c_over_one_minus_xi));
    let mut steinhaus = true;
    for (i, t) in summary.triples.iter().enumerate() {
        let sum = &t.c + &t.xi;
        steinhaus &= sum >= rat(1);
        v.constants.insert(format!("c+xi[{i}]"), show(&sum));
    }
    if v.is_certified() {
        // f(0,0), f(1,0), f(0,1), f(1,1) all lie in the image, which is
        // therefore [min(0, s), 1 + max(0, s)]
        let lo = enclose(&BigRational::zero().min(s.clone()));
        let hi = enclose(&(rat(1) + BigRational::zero().max(s.clone())));
        let image = Interval::new(lo.lo(), hi.hi()).expect("ordered corners");
        v.conclusion = Some(if a.is_one() && steinhaus {
            Conclusion::Steinhaus { image }
        } else {
            Conclusion::ClosedInterval { image }
        });
    }
    Ok(v)
}

/// `f(K, K)` for a general self-similar `K` that contains a homogeneous
/// sub-attractor `K'` with the same hull: if the conditions hold for `K'`,
/// then `f(K', K') = H ⊆ f(K, K) ⊆ f([0,1]^2) = H`.
pub fn certify_sandwich(
    b: &PartialBundle,
    k: &GeneralIFS,
    kp: &HomogeneousIFS,
    words: &[String],
    budget: &Budget,
) -> Result<Verdict, CertError> {
    if !verify_subifs_witness(k, kp, words)? {
        return Err(CertError::WitnessInvalid);
    }
    let mut v = certify_sss(b, kp, kp, &DomainSpec::unit_square(), budget)?;
    v.conditions.insert(
        0,
        ConditionReport {
            id: "subifs_witness".into(),
            description: format!("words {words:?} reproduce the homogeneous sub-IFS"),
            status: Status::Certified,
            witness: None,
            stats: Stats::default(),
        },
    );
    if let Some(Conclusion::ClosedInterval { image }) = v.conclusion {
        v.conclusion = Some(Conclusion::Sandwich { image });
    }
    Ok(v)
}

/// Constants of the self-similar theorem specialized to two middle-third
/// Cantor sets with both partials positive.
#[derive(Debug, Clone, PartialEq)]
pub struct CantorConstants {
    pub ratio_lower: BigRational,
    pub ratio_upper: BigRational,
    /// Coefficients `(fxx, fxy, fyy)` of the first-set form.
    pub first_form: [BigRational; 3],
    /// Coefficients of the second-set form.
    pub second_form: [BigRational; 3],
}

pub fn cantor_constants() -> CantorConstants {
    let c = HomogeneousIFS::cantor();
    let d = sss_directions(&c, &c, 1).expect("Cantor IFS is valid");
    // one adjacent pair per set: second-set form first, then first-set form
    let second = &d.forms[0];
    let first = &d.forms[1];
    CantorConstants {
        ratio_lower: d.ratio_lower,
        ratio_upper: d.ratio_upper,
        first_form: form_coefficients(&first.1, &first.2),
        second_form: form_coefficients(&second.1, &second.2),
    }
}
