use proptest::prelude::*;

use heavytail_oco::geometry::BallDomain;
use heavytail_oco::linalg::{dist, dot, norm, sub};

fn vec_strategy(d: usize, scale: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-scale..scale, d)
}

fn ball_and_points() -> impl Strategy<Value = (BallDomain, Vec<f64>, Vec<f64>)> {
    (1usize..8).prop_flat_map(|d| {
        (vec_strategy(d, 3.0), 0.01f64..5.0, vec_strategy(d, 20.0), vec_strategy(d, 20.0))
            .prop_map(|(c, r, x, y)| (BallDomain::new(c, r).unwrap(), x, y))
    })
}

proptest! {
    #[test]
    fn projection_is_nonexpansive((dom, x, y) in ball_and_points()) {
        let px = dom.project(&x).unwrap();
        let py = dom.project(&y).unwrap();
        prop_assert!(dist(&px, &py) <= dist(&x, &y) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn projection_is_idempotent_and_lands_inside((dom, x, _y) in ball_and_points()) {
        let px = dom.project(&x).unwrap();
        prop_assert!(dom.contains(&px));
        let ppx = dom.project(&px).unwrap();
        prop_assert_eq!(px, ppx);
    }

    #[test]
    fn projection_satisfies_variational_inequality((dom, x, y) in ball_and_points()) {
        // <x - P x, u - P x> <= 0 for every u in the ball.
        let px = dom.project(&x).unwrap();
        let u = dom.project(&y).unwrap();
        let lhs = dot(&sub(&x, &px), &sub(&u, &px));
        prop_assert!(lhs <= 1e-9 * (1.0 + norm(&x) * norm(&y)));
    }

    #[test]
    fn linear_minimizer_beats_every_point((dom, w, y) in ball_and_points()) {
        let m = dom.linear_minimizer(&w);
        prop_assert!(dom.contains(&m));
        let u = dom.project(&y).unwrap();
        prop_assert!(dot(&w, &m) <= dot(&w, &u) + 1e-9 * (1.0 + norm(&w)));
    }
}

#[test]
fn projection_of_far_point_lands_on_boundary() {
    let dom = BallDomain::origin(2, 1.0).unwrap();
    let p = dom.project(&[3.0, 4.0]).unwrap();
    assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
}

#[test]
fn rejects_bad_radius_and_dimension() {
    assert!(BallDomain::origin(2, -1.0).is_err());
    assert!(BallDomain::origin(2, f64::NAN).is_err());
    let dom = BallDomain::origin(2, 1.0).unwrap();
    assert!(dom.project(&[1.0, 2.0, 3.0]).is_err());
}
