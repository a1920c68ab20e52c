use fuzzdep::interval::{alpha_cut, intersect, modular, to_interval, PointSize};
use fuzzdep::proximity::{sp_extended, sp_improved, sp_liu, sp_value, Form, ProximityConfig};
use fuzzdep::{AttributeDomain, FuzzyValue, Interval};
use proptest::prelude::*;

fn domain() -> AttributeDomain {
    AttributeDomain::new(0.0, 20.0).unwrap()
}

fn interval() -> impl Strategy<Value = Interval> {
    (0u32..=80, 0u32..=40).prop_map(|(a, w)| {
        let lower = a as f64 / 4.0;
        let upper = (lower + w as f64 / 4.0).min(20.0);
        Interval::new(lower, upper).unwrap()
    })
}

fn cell() -> impl Strategy<Value = FuzzyValue> {
    prop_oneof![
        Just(FuzzyValue::Null),
        (0u32..=20).prop_map(|x| FuzzyValue::Crisp(x as f64)),
        interval().prop_map(|i| FuzzyValue::interval(i.lower(), i.upper()).unwrap()),
        (interval(), 1u32..=10)
            .prop_map(|(i, p)| FuzzyValue::with_confidence(i, p as f64 / 10.0).unwrap()),
        (0u32..=5, 0u32..=5, 0u32..=5, 0u32..=5).prop_map(|(a, b, c, d)| {
            let a = a as f64;
            FuzzyValue::trapezoid(a, a + b as f64, a + (b + c) as f64, a + (b + c + d) as f64)
                .unwrap()
        }),
    ]
}

proptest! {
    #[test]
    fn liu_symmetric_and_bounded(a in interval(), b in interval(), ratio in any::<bool>()) {
        let form = if ratio { Form::Ratio } else { Form::TwoTerm };
        let ab = sp_liu(&a, &b, &domain(), form);
        prop_assert_eq!(ab, sp_liu(&b, &a, &domain(), form));
        prop_assert!((0.0..=1.0).contains(&ab));
        if intersect(&a, &b).is_none() {
            prop_assert_eq!(ab, 0.0);
        }
    }

    #[test]
    fn improved_symmetric_bounded_reflexive(a in interval(), b in interval()) {
        let ab = sp_improved(&a, &b).unwrap();
        prop_assert_eq!(ab, sp_improved(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(sp_improved(&a, &a).unwrap(), 1.0);
        if intersect(&a, &b).is_none() {
            prop_assert_eq!(ab, 0.0);
        }
    }

    #[test]
    fn extended_symmetric_and_bounded(a in cell(), b in cell(), alpha in 0.0f64..=1.0) {
        let ab = sp_extended(&a, &b, alpha, &domain(), Form::Ratio).unwrap();
        prop_assert_eq!(ab, sp_extended(&b, &a, alpha, &domain(), Form::Ratio).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn extended_ratio_reflexive_when_cut_nonempty(a in cell(), alpha in 0.0f64..=1.0) {
        let cut = alpha_cut(&a, alpha, &domain()).unwrap();
        let aa = sp_extended(&a, &a, alpha, &domain(), Form::Ratio).unwrap();
        prop_assert_eq!(aa, if cut.is_some() { 1.0 } else { 0.0 });
    }

    #[test]
    fn equal_hull_monotonicity(a in interval(), b1 in interval(), s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let d = domain();
        let hull = |b: &Interval| Interval::new(a.lower().min(b.lower()), a.upper().max(b.upper())).unwrap();
        let h = hull(&b1);
        // Any b2 whose hull with `a` is also `h`.
        let lower = if h.lower() < a.lower() { h.lower() } else { a.lower() + s * (h.upper() - a.lower()) };
        let upper = if h.upper() > a.upper() { h.upper() } else { lower + t * (a.upper() - lower).max(0.0) };
        prop_assume!(lower <= upper);
        let b2 = Interval::new(lower, upper).unwrap();
        prop_assume!(hull(&b2) == h);
        let size = |b: &Interval| modular(intersect(&a, b).as_ref(), &d, PointSize::Epsilon);
        let sp = |b: &Interval| {
            sp_extended(&FuzzyValue::interval(a.lower(), a.upper()).unwrap(),
                        &FuzzyValue::interval(b.lower(), b.upper()).unwrap(), 0.5, &d, Form::Ratio).unwrap()
        };
        if size(&b1) <= size(&b2) {
            prop_assert!(sp(&b1) <= sp(&b2));
        } else {
            prop_assert!(sp(&b2) <= sp(&b1));
        }
    }

    #[test]
    fn cuts_shrink_with_alpha(v in cell(), lo in 0.0f64..=1.0, hi in 0.0f64..=1.0) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let d = domain();
        match (alpha_cut(&v, lo, &d).unwrap(), alpha_cut(&v, hi, &d).unwrap()) {
            (Some(wide), Some(narrow)) => prop_assert!(wide.contains(&narrow)),
            (None, Some(_)) => prop_assert!(false, "cut reappeared at higher alpha"),
            _ => {}
        }
    }

    #[test]
    fn modular_monotone_under_containment(outer in interval(), a in 0u32..=4, b in 0u32..=4) {
        prop_assume!(!outer.is_point());
        let len = outer.length();
        let inner = Interval::new(outer.lower() + len * a as f64 / 10.0, outer.upper() - len * b as f64 / 10.0).unwrap();
        prop_assume!(!inner.is_point());
        let d = domain();
        prop_assert!(modular(Some(&inner), &d, PointSize::Delta) <= modular(Some(&outer), &d, PointSize::Delta));
        prop_assert!(modular(Some(&inner), &d, PointSize::Delta) >= 0.0);
    }

    #[test]
    fn cell_text_round_trips(v in cell()) {
        let text = v.to_string();
        prop_assert_eq!(text.parse::<FuzzyValue>().unwrap(), v);
    }
}

#[test]
fn null_maps_to_domain() {
    let d = domain();
    assert_eq!(
        to_interval(&FuzzyValue::Null, &d).unwrap(),
        Interval::new(0.0, 20.0).unwrap()
    );
    let cfg = ProximityConfig::improved();
    assert_eq!(
        sp_value(&FuzzyValue::Null, &FuzzyValue::Null, &d, &cfg).unwrap(),
        1.0
    );
}
