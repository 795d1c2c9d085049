//! Versioned JSON job files and the certify / image / oracle pipelines that
//! consume them.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certifier::{
    certify_linear, certify_moran, certify_sandwich, certify_sss, classify_signs, Budget, CertError,
    DomainSpec, SignCase, Verdict,
};
use crate::expr::{Expr, ParseError, PartialBundle};
use crate::fractal::{
    FractalError, GeneralIFS, HomogeneousIFS, Map, MoranClass, MoranRealization, Source, Strategy,
};
use crate::image::{stabilization_report, ImageError, LevelImageReport};
use crate::interval_set::{IntervalSet, IMAGE_TOL};
use crate::oracle::{brute_force_image, compare_to_level_image, Comparison, OracleError};

pub const JOB_VERSION: u32 = 1;
/// Exit code for invalid jobs and runtime errors.
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Error)]
pub enum JobError {
    #[error("malformed job file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported job version {0} (expected {JOB_VERSION})")]
    Version(u32),
    #[error("cannot parse function: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Fractal(#[from] FractalError),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Eval(#[from] crate::expr::EvalError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Unsupported(String),
}

/// A homogeneous sub-IFS of a general IFS, given by one word per map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubWitness {
    pub sub: HomogeneousIFS,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralSpec {
    pub maps: Vec<Map>,
    #[serde(default)]
    pub witness: Option<SubWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FractalSpec {
    Moran(MoranClass),
    Homogeneous(HomogeneousIFS),
    General(GeneralSpec),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainChoice {
    #[default]
    UnitSquare,
    /// `C_p x D_p`.
    Restricted { level: usize },
}

fn default_k_max() -> usize {
    8
}

fn default_image_tol() -> f64 {
    IMAGE_TOL
}

fn default_oracle_tol() -> f64 {
    0.01
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageSettings {
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_image_tol")]
    pub tol: f64,
}

impl Default for ImageSettings {
    fn default() -> Self {
        ImageSettings {
            k_max: default_k_max(),
            tol: default_image_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    /// Defaults to 8 when every set has two maps (or branches in two), else 6.
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            depth: None,
            tol: default_oracle_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub version: u32,
    pub function: String,
    pub fractal1: FractalSpec,
    pub fractal2: FractalSpec,
    #[serde(default)]
    pub domain: DomainChoice,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub image: ImageSettings,
    #[serde(default)]
    pub oracle: OracleSettings,
    /// Placement of Moran basic intervals; the second set uses `seed + 1`.
    #[serde(default = "default_strategy")]
    pub realization: Strategy,
}

fn default_strategy() -> Strategy {
    Strategy::Uniform
}

/// Which certification procedure a job uses.
#[derive(Debug, Clone)]
pub enum Setting {
    Moran(MoranClass),
    SelfSimilar(HomogeneousIFS, HomogeneousIFS),
    Sandwich {
        k: GeneralIFS,
        sub: HomogeneousIFS,
        words: Vec<String>,
    },
}

impl Setting {
    pub fn name(&self) -> &'static str {
        match self {
            Setting::Moran(_) => "moran",
            Setting::SelfSimilar(..) => "homogeneous",
            Setting::Sandwich { .. } => "general",
        }
    }
}

/// A validated job.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub job: Job,
    pub bundle: PartialBundle,
    pub setting: Setting,
}

impl Job {
    pub fn from_json(text: &str) -> Result<Self, JobError> {
        let job: Job = serde_json::from_str(text)?;
        if job.version != JOB_VERSION {
            return Err(JobError::Version(job.version));
        }
        Ok(job)
    }

    pub fn prepare(self) -> Result<Prepared, JobError> {
        if self.version != JOB_VERSION {
            return Err(JobError::Version(self.version));
        }
        let f = Expr::parse(&self.function)?;
        let setting = match (&self.fractal1, &self.fractal2) {
            (FractalSpec::Moran(a), FractalSpec::Moran(b)) => {
                if a != b {
                    return Err(JobError::Unsupported(
                        "both Moran sets must belong to the same class".into(),
                    ));
                }
                Setting::Moran(a.clone())
            }
            (FractalSpec::Homogeneous(a), FractalSpec::Homogeneous(b)) => {
                Setting::SelfSimilar(a.clone(), b.clone())
            }
            (FractalSpec::General(a), FractalSpec::General(b)) => {
                if a != b {
                    return Err(JobError::Unsupported(
                        "the general-IFS procedure needs the same set on both sides".into(),
                    ));
                }
                let w = a.witness.clone().ok_or_else(|| {
                    JobError::Unsupported("a general IFS needs an explicit sub-IFS witness".into())
                })?;
                if self.domain != DomainChoice::UnitSquare {
                    return Err(JobError::Unsupported(
                        "the general-IFS procedure runs on the unit square only".into(),
                    ));
                }
                Setting::Sandwich {
                    k: GeneralIFS::new(a.maps.clone())?,
                    sub: w.sub,
                    words: w.words,
                }
            }
            _ => {
                return Err(JobError::Unsupported(
                    "fractal1 and fractal2 must be of the same kind".into(),
                ))
            }
        };
        Ok(Prepared {
            bundle: PartialBundle::new(f),
            setting,
            job: self,
        })
    }
}

fn second_strategy(s: Strategy) -> Strategy {
    match s {
        Strategy::Random(seed) => Strategy::Random(seed.wrapping_add(1)),
        other => other,
    }
}

/// Owned level-interval generators for both sets.
pub enum Sources {
    Moran(MoranRealization, MoranRealization),
    SelfSimilar(HomogeneousIFS, HomogeneousIFS),
    General(GeneralIFS),
}

impl Sources {
    pub fn pair(&self) -> (Source<'_>, Source<'_>) {
        match self {
            Sources::Moran(a, b) => (Source::Moran(a), Source::Moran(b)),
            Sources::SelfSimilar(a, b) => (Source::Homogeneous(a), Source::Homogeneous(b)),
            Sources::General(k) => (Source::General(k), Source::General(k)),
        }
    }
}

impl Prepared {
    pub fn budget(&self) -> Budget {
        self.job.budget.map(Budget::with_boxes).unwrap_or_default()
    }

    /// Level generators deep enough for level `depth`.
    pub fn sources(&self, depth: usize) -> Result<Sources, JobError> {
        Ok(match &self.setting {
            Setting::Moran(class) => {
                let d = depth.max(1);
                let s = self.job.realization;
                Sources::Moran(
                    MoranRealization::realize(class, d, s)?,
                    MoranRealization::realize(class, d, second_strategy(s))?,
                )
            }
            Setting::SelfSimilar(a, b) => Sources::SelfSimilar(a.clone(), b.clone()),
            Setting::Sandwich { k, .. } => Sources::General(k.clone()),
        })
    }

    pub fn domain(&self) -> Result<DomainSpec, JobError> {
        match self.job.domain {
            DomainChoice::UnitSquare => Ok(DomainSpec::unit_square()),
            DomainChoice::Restricted { level } => {
                let src = self.sources(level)?;
                let (a, b) = src.pair();
                Ok(DomainSpec::restricted(level, &a.level_intervals(level)?, &b.level_intervals(level)?)?)
            }
        }
    }

    pub fn certify(&self, budget: Budget) -> Result<Verdict, JobError> {
        let b = &self.bundle;
        let dom = self.domain()?;
        Ok(match &self.setting {
            Setting::Moran(class) => certify_moran(b, class, &dom, &budget),
            Setting::SelfSimilar(k1, k2) => certify_sss(b, k1, k2, &dom, &budget)?,
            Setting::Sandwich { k, sub, words } => certify_sandwich(b, k, sub, words, &budget)?,
        })
    }

    /// `x + s y` up to a positive or negative multiple, for the closed-form linear check.
    pub fn linear_slope(&self) -> Option<BigRational> {
        let (a, b) = self.bundle.linear_coefficients()?;
        if a == 0.0 || b == 0.0 {
            return None;
        }
        Some(BigRational::from_float(b)? / BigRational::from_float(a)?)
    }

    pub fn default_oracle_depth(&self) -> usize {
        let branching = match &self.setting {
            Setting::Moran(class) => class
                .preperiod()
                .iter()
                .chain(class.period())
                .map(|l| l.n as usize)
                .max()
                .unwrap_or(2),
            Setting::SelfSimilar(a, b) => a.len().max(b.len()),
            Setting::Sandwich { k, .. } => k.maps().len(),
        };
        if branching <= 2 {
            8
        } else {
            6
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub version: u32,
    pub command: &'static str,
    pub function: String,
    pub setting: &'static str,
    pub verdict: Verdict,
    /// Closed-form check for linear `f` on Moran sets.
    pub linear: Option<Verdict>,
    pub exit_code: i32,
}

pub fn cmd_certify(p: &Prepared, budget: Option<usize>) -> Result<CertifyReport, JobError> {
    let budget = budget.map(Budget::with_boxes).unwrap_or_else(|| p.budget());
    let verdict = p.certify(budget)?;
    let linear = match (&p.setting, p.linear_slope()) {
        (Setting::Moran(class), Some(s)) if p.job.domain == DomainChoice::UnitSquare => {
            Some(certify_linear(class, &s)?)
        }
        _ => None,
    };
    Ok(CertifyReport {
        version: JOB_VERSION,
        command: "certify",
        function: p.job.function.clone(),
        setting: p.setting.name(),
        exit_code: verdict.exit_code(),
        verdict,
        linear,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageReport {
    pub version: u32,
    pub command: &'static str,
    pub function: String,
    pub certified: bool,
    /// Computed without a certificate, using the four-corner fallback.
    pub forced: bool,
    pub sign_case: Option<SignCase>,
    pub report: LevelImageReport,
    pub exit_code: i32,
}

pub fn cmd_image(p: &Prepared, k_max: Option<usize>, force: bool) -> Result<ImageReport, JobError> {
    let k_max = k_max.unwrap_or(p.job.image.k_max);
    let verdict = p.certify(p.budget())?;
    if !verdict.is_certified() && !force {
        return Err(JobError::Unsupported(format!(
            "conditions not certified ({:?}); rerun with --force for a non-rigorous corner-value image",
            verdict.status
        )));
    }
    let sc = verdict.sign_case.filter(|_| verdict.is_certified());
    let src = p.sources(k_max)?;
    let (a, b) = src.pair();
    let report = stabilization_report(&p.bundle.f, sc, a, b, k_max, p.job.image.tol)?;
    Ok(ImageReport {
        version: JOB_VERSION,
        command: "image",
        function: p.job.function.clone(),
        certified: verdict.is_certified(),
        forced: sc.is_none(),
        sign_case: sc,
        exit_code: if report.stabilized { 0 } else { 1 },
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub version: u32,
    pub command: &'static str,
    pub function: String,
    pub depth: usize,
    pub tol: f64,
    pub image: IntervalSet,
    pub components: usize,
    /// Largest gap between components of the sampled image.
    pub max_gap: f64,
    /// Comparison with the level image at the same depth.
    pub comparison: Comparison,
    /// `false` when the level image used the four-corner fallback.
    pub rigorous_reference: bool,
    pub exit_code: i32,
}

pub fn cmd_oracle(p: &Prepared, depth: Option<usize>) -> Result<OracleReport, JobError> {
    let depth = depth
        .or(p.job.oracle.depth)
        .unwrap_or_else(|| p.default_oracle_depth());
    let tol = p.job.oracle.tol;
    let src = p.sources(depth)?;
    let (a, b) = src.pair();
    let image = brute_force_image(&p.bundle.f, a, b, depth, tol)?;
    let signs = classify_signs(&p.bundle, &DomainSpec::unit_square(), &p.budget());
    let sc = signs.sign_case.filter(|_| signs.is_certified());
    let exact = crate::image::level_image(
        &p.bundle.f,
        sc,
        &a.level_intervals(depth)?,
        &b.level_intervals(depth)?,
        p.job.image.tol,
    )?;
    let comparison = compare_to_level_image(&image, &exact, p.job.image.tol.max(1e-9));
    Ok(OracleReport {
        version: JOB_VERSION,
        command: "oracle",
        function: p.job.function.clone(),
        depth,
        tol,
        components: image.component_count(),
        max_gap: image.max_gap(),
        exit_code: if comparison.passed { 0 } else { 1 },
        image,
        comparison,
        rigorous_reference: sc.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const STEINHAUS: &str = r#"{
        "version": 1,
        "function": "x + y",
        "fractal1": {"kind": "moran", "period": [{"c": "1/3", "n": 2}], "kappa": 0},
        "fractal2": {"kind": "moran", "period": [{"c": "1/3", "n": 2}], "kappa": 0}
    }"#;

    #[test]
    fn parses_and_certifies() {
        let p = Job::from_json(STEINHAUS).unwrap().prepare().unwrap();
        let r = cmd_certify(&p, None).unwrap();
        assert_eq!(r.exit_code, 0);
        assert!(r.linear.unwrap().is_certified());
        assert_eq!(p.default_oracle_depth(), 8);
    }

    #[test]
    fn rejects_bad_jobs() {
        assert!(matches!(
            Job::from_json(&STEINHAUS.replace("\"version\": 1", "\"version\": 2")),
            Err(JobError::Version(2))
        ));
        assert!(Job::from_json(&STEINHAUS.replace("1/3", "2/3")).is_err());
        assert!(Job::from_json(&STEINHAUS.replace("x + y", "x^y"))
            .unwrap()
            .prepare()
            .is_err());
        let mixed = STEINHAUS.replacen(
            r#"{"kind": "moran", "period": [{"c": "1/3", "n": 2}], "kappa": 0}"#,
            r#"{"kind": "homogeneous", "lambda": "1/3", "a": [0, "2/3"]}"#,
            1,
        );
        assert!(matches!(
            Job::from_json(&mixed).unwrap().prepare(),
            Err(JobError::Unsupported(_))
        ));
    }

    #[test]
    fn restricted_domain_counts_box_pairs() {
        let text = STEINHAUS.replace(
            "\"version\": 1,",
            "\"version\": 1, \"domain\": {\"kind\": \"restricted\", \"level\": 1},",
        );
        let p = Job::from_json(&text).unwrap().prepare().unwrap();
        let v = p.certify(Budget::default()).unwrap();
        assert!(v.is_certified());
        assert_eq!(
            v.conclusion,
            Some(crate::certifier::Conclusion::FinitelyManyIntervals { at_most: 4 })
        );
    }
}
