use num_rational::BigRational;
use proptest::prelude::*;

use fractal_image::certifier::{certify_moran, Budget, DomainSpec};
use fractal_image::fractal::{MoranClass, MoranRealization, Source, Strategy as Placement};
use fractal_image::image::{box_image, level_image, stabilization_report};
use fractal_image::param::parse_ratio;
use fractal_image::{Expr, Interval, IntervalSet, Param, PartialBundle};

fn interval() -> impl Strategy<Value = Interval> {
    (-100.0..100.0f64, 0.0..10.0f64).prop_map(|(a, w)| Interval::new(a, a + w).unwrap())
}

fn point_in(i: Interval, t: f64) -> f64 {
    (i.lo() + t * i.width()).clamp(i.lo(), i.hi())
}

proptest! {
    #[test]
    fn arithmetic_encloses_point_results(a in interval(), b in interval(), s in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let (x, y) = (point_in(a, s), point_in(b, t));
        prop_assert!(a.add(b).unwrap().contains(x + y));
        prop_assert!(a.sub(b).unwrap().contains(x - y));
        prop_assert!(a.mul(b).unwrap().contains(x * y));
        if !b.contains_zero() {
            prop_assert!(a.div(b).unwrap().contains(x / y));
        }
        prop_assert!(a.sin().unwrap().contains(x.sin()));
        prop_assert!(a.powi(3).unwrap().contains(x.powi(3)));
    }

    #[test]
    fn normalization_is_canonical(raw in prop::collection::vec(interval(), 1..40), tol in 0.0..1.0f64) {
        let s = IntervalSet::normalize(&raw, tol).unwrap();
        for w in s.items().windows(2) {
            prop_assert!(w[1].lo() - w[0].hi() > tol);
        }
        for i in &raw {
            prop_assert!(s.items().iter().any(|c| i.is_subset_of(c)));
        }
        let again = IntervalSet::normalize(s.items(), tol).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert!(s.set_equal(&s, 0.0));
        prop_assert_eq!(s.hausdorff_distance(&s), 0.0);
    }

    #[test]
    fn ratios_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let p = Param::frac(n, d);
        prop_assert_eq!(parse_ratio(&p.to_string()).unwrap(), BigRational::new(n.into(), d.into()));
        prop_assert!(p.enclosure().contains(n as f64 / d as f64));
    }

    #[test]
    fn printed_expressions_reparse(a in -5.0..5.0f64, b in -5.0..5.0f64, x in 0.0..1.0f64, y in 0.0..1.0f64) {
        let e = Expr::parse(&format!("{a}*x^2 - sin({b}*x*y) / (2 + y) + exp(-x)")).unwrap();
        let back = Expr::parse(&e.to_string()).unwrap();
        let (u, v) = (e.eval_real(x, y).unwrap(), back.eval_real(x, y).unwrap());
        prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()));
    }

    /// For a certified linear map, the image of a basic box equals the image
    /// of its children at the next level.
    #[test]
    fn box_image_is_recovered_from_children(k in 1usize..5, s in 0.34f64..=1.0, seed in 0u64..1000) {
        let class = MoranClass::cantor();
        let f = Expr::parse(&format!("x + {s}*y")).unwrap();
        let b = PartialBundle::new(f.clone());
        let v = certify_moran(&b, &class, &DomainSpec::unit_square(), &Budget::default());
        prop_assert!(v.is_certified());
        let m = MoranRealization::realize(&class, k + 1, Placement::Random(seed)).unwrap();
        let (parents, kids) = (m.level_intervals(k).unwrap(), m.level_intervals(k + 1).unwrap());
        let i = parents[seed as usize % parents.len()];
        let j = parents[(seed as usize / 7) % parents.len()];
        let ci: Vec<Interval> = kids.iter().copied().filter(|c| i.contains(c.mid())).collect();
        let cj: Vec<Interval> = kids.iter().copied().filter(|c| j.contains(c.mid())).collect();
        prop_assert_eq!(ci.len(), 2);
        let whole = box_image(&f, v.sign_case, i, j).unwrap();
        let split = level_image(&f, v.sign_case, &ci, &cj, 1e-9).unwrap();
        prop_assert!(split.set_equal(&IntervalSet::single(whole), 1e-9), "{:?} vs {}", split, whole);
    }

    /// Level images are nested; the corner rule is exact here because each
    /// function is monotone in each variable on the unit square.
    #[test]
    fn level_images_are_nested(seed in 0u64..1000, which in 0usize..3) {
        let f = Expr::parse(["x*y", "x - y^2", "exp(x)*y"][which]).unwrap();
        let class = MoranClass::constant(Param::frac(1, 4), 3, Param::frac(1, 2)).unwrap();
        let a = MoranRealization::realize(&class, 4, Placement::Random(seed)).unwrap();
        let b = MoranRealization::realize(&class, 4, Placement::Random(seed + 1)).unwrap();
        let r = stabilization_report(&f, None, Source::Moran(&a), Source::Moran(&b), 4, 1e-9).unwrap();
        prop_assert!(r.nested);
    }
}
