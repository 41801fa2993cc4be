mod common;

use common::{two_body_trace, Body};
use fade::oracle::{mettc, motion_deviation, risk_gain, T_CAP};
use proptest::prelude::*;

fn body() -> impl Strategy<Value = Body> {
    (
        (-60.0..60.0f64, -60.0..60.0f64),
        -3.2..3.2f64,
        (-20.0..20.0f64, -20.0..20.0f64),
        (-3.0..3.0f64, -3.0..3.0f64),
    )
        .prop_map(|(p, h, v, a)| Body::car(p, h, v, a))
}

fn rot((x, y): (f64, f64), th: f64) -> (f64, f64) {
    (x * th.cos() - y * th.sin(), x * th.sin() + y * th.cos())
}

fn moved(b: &Body, th: f64, shift: (f64, f64)) -> Body {
    let p = rot(b.p, th);
    Body { p: (p.0 + shift.0, p.1 + shift.1), v: rot(b.v, th), a: rot(b.a, th), heading: b.heading + th, ..*b }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn mettc_is_bounded(e in body(), o in body(), road in -3.2..3.2f64) {
        let m = mettc(&two_body_trace(&e, &o, road));
        prop_assert!((0.0..=T_CAP).contains(&m), "{m}");
    }

    #[test]
    fn mettc_is_invariant_under_rigid_motion(e in body(), o in body(), road in -3.2..3.2f64, th in -3.2..3.2f64, sx in -500.0..500.0f64, sy in -500.0..500.0f64) {
        let a = mettc(&two_body_trace(&e, &o, road));
        let b = mettc(&two_body_trace(&moved(&e, th, (sx, sy)), &moved(&o, th, (sx, sy)), road + th));
        prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a), "{a} vs {b}");
    }

    #[test]
    fn self_comparison_is_neutral(e in body(), o in body(), road in -3.2..3.2f64) {
        let t = two_body_trace(&e, &o, road);
        prop_assert_eq!(risk_gain(&t, &t), 0.0);
        prop_assert_eq!(motion_deviation(&t, &t), 0.0);
    }
}

#[test]
fn empty_scene_is_capped() {
    let e = Body::car((0.0, 0.0), 0.0, (10.0, 0.0), (0.0, 0.0));
    let mut t = two_body_trace(&e, &e, 0.0);
    t.steps[0].participants.clear();
    assert_eq!(mettc(&t), T_CAP);
}
