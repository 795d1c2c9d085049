use fractal_image::certifier::{certify_sandwich, Budget, CertError, Conclusion, Status};
use fractal_image::demo::{demo_job, SINE_FUNCTION, QUADRATIC_FUNCTION};
use fractal_image::fractal::{GeneralIFS, HomogeneousIFS, Map, Source};
use fractal_image::image::level_image;
use fractal_image::job::{cmd_oracle, Job};
use fractal_image::oracle::{brute_force_image, compare_to_level_image};
use fractal_image::{Expr, Param, PartialBundle};

fn three_maps() -> GeneralIFS {
    GeneralIFS::new(vec![
        Map { r: Param::frac(1, 3), a: Param::int(0) },
        Map { r: Param::frac(1, 4), a: Param::int(0) },
        Map { r: Param::frac(1, 3), a: Param::frac(2, 3) },
    ])
    .unwrap()
}

/// Sampled images are genuine subsets of the level image and close to it.
#[test]
fn oracle_sits_inside_level_image() {
    let cantor = HomogeneousIFS::cantor();
    let k = three_maps();
    for text in ["x + y", "x - y", "x + 0.5*y", QUADRATIC_FUNCTION, SINE_FUNCTION] {
        let f = Expr::parse(text).unwrap();
        for (src, depth) in [(Source::Homogeneous(&cantor), 7), (Source::General(&k), 5)] {
            let oracle = brute_force_image(&f, src, src, depth, 0.05).unwrap();
            let c = src.level_intervals(depth).unwrap();
            let exact = level_image(&f, None, &c, &c, 1e-9).unwrap();
            let cmp = compare_to_level_image(&oracle, &exact, 1e-9);
            assert!(cmp.passed, "{text}: {:?}", cmp.uncovered);
            assert!(cmp.hausdorff < 0.05, "{text}: {}", cmp.hausdorff);
        }
    }
}

#[test]
fn demo_jobs_pass_their_oracle() {
    for name in ["steinhaus-sum", "steinhaus-diff", "example9", "example10"] {
        let p = Job::from_json(&demo_job(name).unwrap()).unwrap().prepare().unwrap();
        let r = cmd_oracle(&p, None).unwrap();
        assert!(r.comparison.passed && r.rigorous_reference, "{name}");
        assert_eq!(r.components, 1, "{name}");
    }
}

#[test]
fn sandwich_rejects_a_wrong_witness() {
    let b = PartialBundle::new(Expr::parse(QUADRATIC_FUNCTION).unwrap());
    let k = three_maps();
    let cantor = HomogeneousIFS::cantor();
    let words = |w: &[&str]| w.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let ok = certify_sandwich(&b, &k, &cantor, &words(&["1", "3"]), &Budget::default()).unwrap();
    assert_eq!(ok.status, Status::Certified);
    assert!(matches!(ok.conclusion, Some(Conclusion::Sandwich { .. })));
    // words 2 and 3 give {x/4, (x+2)/3}, which is not the Cantor IFS
    let bad = certify_sandwich(&b, &k, &cantor, &words(&["2", "3"]), &Budget::default());
    assert!(matches!(bad, Err(CertError::WitnessInvalid)), "{bad:?}");
    // a longer word: 11 -> x/9, 33 -> (x+8)/9, matching the Cantor set at ratio 1/9
    let sub9 = HomogeneousIFS::new(Param::frac(1, 9), vec![Param::int(0), Param::frac(8, 9)]).unwrap();
    let deep = certify_sandwich(&b, &k, &sub9, &words(&["11", "33"]), &Budget::default()).unwrap();
    assert_eq!(deep.conditions[0].status, Status::Certified);
}

#[test]
fn restricted_domain_concludes_finitely_many_intervals() {
    let text = r#"{"version": 1, "function": "x + 0.5*y",
        "fractal1": {"kind": "moran", "period": [{"c": "1/3", "n": 2}], "kappa": 0},
        "fractal2": {"kind": "moran", "period": [{"c": "1/3", "n": 2}], "kappa": 0},
        "domain": {"kind": "restricted", "level": 3}}"#;
    let p = Job::from_json(text).unwrap().prepare().unwrap();
    let v = p.certify(Budget::default()).unwrap();
    assert_eq!(v.conclusion, Some(Conclusion::FinitelyManyIntervals { at_most: 64 }));
}

#[test]
fn job_files_survive_a_round_trip() {
    for name in ["steinhaus-sum", "example9", "example10"] {
        let job = Job::from_json(&demo_job(name).unwrap()).unwrap();
        let back = Job::from_json(&serde_json::to_string(&job).unwrap()).unwrap();
        assert_eq!(job, back);
    }
}
