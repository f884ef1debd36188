use proptest::prelude::*;

use paneitz_core::euclid_kernel::{boggio_g, BoggioConstant};
use paneitz_core::geometry::{
    ball_radius, bracket_xy, distance, hyperbolic_distance, hyperbolic_radius, norm, BallPoint,
    PlaneReflector,
};
use paneitz_core::hyperbolic_map::{law_of_cosines_distance, u_to_v, v_to_u};

fn interior(max_r: f64) -> impl Strategy<Value = BallPoint> {
    (0.0..max_r, -1.0f64..1.0, 0.0..std::f64::consts::TAU).prop_map(|(r, z, phi)| {
        let s = (1.0 - z * z).sqrt();
        BallPoint::from_polar(r, &[s * phi.cos(), s * phi.sin(), z]).unwrap()
    })
}

proptest! {
    #[test]
    fn reflection_is_an_involution(lambda in 0.0f64..0.99, x in interior(0.99)) {
        let refl = PlaneReflector::new(lambda).unwrap();
        let back = refl.reflect(&refl.reflect(x.coords()));
        prop_assert!(distance(&back, x.coords()) <= 1e-15);
    }

    #[test]
    fn bracket_dominates_distance(x in interior(0.99), y in interior(0.99)) {
        let d = distance(x.coords(), y.coords());
        prop_assert!(bracket_xy(&x, &y) >= d - 1e-15);
    }

    #[test]
    fn kernel_symmetric_and_positive(x in interior(0.99), y in interior(0.99)) {
        prop_assume!(distance(x.coords(), y.coords()) > 1e-9);
        let c = BoggioConstant::ORACLE;
        let (gxy, gyx) = (boggio_g(&x, &y, c), boggio_g(&y, &x, c));
        prop_assert!(gxy > 0.0);
        prop_assert!((gxy - gyx).abs() <= 1e-15 * gxy.abs().max(1.0));
    }

    #[test]
    fn radius_maps_invert(r in 0.0f64..0.999) {
        prop_assert!((ball_radius(hyperbolic_radius(r)) - r).abs() <= 1e-14);
    }

    #[test]
    fn transport_round_trip(rho in 0.0f64..30.0, v in 1e-3f64..1e3) {
        prop_assert!((u_to_v(rho, v_to_u(rho, v)) - v).abs() <= 1e-14 * v);
    }

    #[test]
    fn law_of_cosines_matches_ball_distance(x in interior(0.95), y in interior(0.95)) {
        let (rx, ry) = (hyperbolic_radius(x.norm()), hyperbolic_radius(y.norm()));
        prop_assume!(x.norm() > 1e-6 && y.norm() > 1e-6);
        let cos = (paneitz_core::geometry::dot(x.coords(), y.coords()) / (norm(x.coords()) * norm(y.coords()))).clamp(-1.0, 1.0);
        let direct = hyperbolic_distance(&x, &y).unwrap();
        let via = law_of_cosines_distance(rx, ry, cos.acos());
        prop_assert!((direct - via).abs() <= 1e-9 * direct.max(1e-3), "{direct} vs {via}");
    }
}
