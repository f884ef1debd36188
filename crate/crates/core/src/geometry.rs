//! Points of the closed unit ball in three dimensions, doubling as points
//! of the Poincaré ball model of hyperbolic 3-space.

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Slack allowed on the norm when constructing a point of the closed ball.
pub const BALL_SLACK: f64 = 1e-14;
/// Points with `|1 - |x|| <= BOUNDARY_TOL` are treated as boundary points.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(s: f64, a: &Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn distance(a: &Vec3, b: &Vec3) -> f64 {
    norm(&sub(a, b))
}

/// Orthonormal pair completing `axis` (unit) to a right-handed frame.
pub fn orthonormal_frame(axis: &Vec3) -> (Vec3, Vec3) {
    let helper = if axis[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let u = cross(axis, &helper);
    let u = scale(1.0 / norm(&u), &u);
    let v = cross(axis, &u);
    (u, v)
}

/// A point of the closed Euclidean unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPoint(Vec3);

impl BallPoint {
    pub const ORIGIN: BallPoint = BallPoint([0.0; 3]);

    pub fn new(coords: Vec3) -> Result<Self> {
        let n = norm(&coords);
        if !n.is_finite() || n > 1.0 + BALL_SLACK {
            return Err(Error::Domain(format!(
                "point {coords:?} lies outside the closed unit ball (|x| = {n})"
            )));
        }
        Ok(BallPoint(coords))
    }

    /// `None` when the coordinates fall outside the closed ball.
    pub fn try_new(coords: Vec3) -> Option<Self> {
        Self::new(coords).ok()
    }

    /// A point at distance `r` from the origin along the unit vector `direction`.
    pub fn from_polar(r: f64, direction: &Vec3) -> Result<Self> {
        Self::new(scale(r, direction))
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn is_boundary(&self) -> bool {
        (1.0 - self.norm()).abs() <= BOUNDARY_TOL
    }

    pub fn is_interior(&self) -> bool {
        !self.is_boundary()
    }
}

impl From<BallPoint> for Vec3 {
    fn from(p: BallPoint) -> Vec3 {
        p.0
    }
}

/// The hyperplane `x1 = lambda` used by the moving-plane audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneReflector {
    lambda: f64,
}

impl PlaneReflector {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::Domain(format!(
                "plane position {lambda} not in [0, 1)"
            )));
        }
        Ok(PlaneReflector { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn reflect(&self, x: &Vec3) -> Vec3 {
        [2.0 * self.lambda - x[0], x[1], x[2]]
    }

    /// Membership in `{x in B1 : x1 < lambda}`.
    pub fn in_cap(&self, x: &Vec3) -> bool {
        x[0] < self.lambda && norm(x) < 1.0
    }
}

pub fn reflect(reflector: &PlaneReflector, x: &BallPoint) -> Vec3 {
    reflector.reflect(x.coords())
}

/// Inversion in the unit sphere, `x / |x|^2`.
pub fn kelvin_point(x: &BallPoint) -> Result<Vec3> {
    let n2 = x.norm_sq();
    if n2 == 0.0 {
        return Err(Error::Domain("inversion of the origin".into()));
    }
    Ok(scale(1.0 / n2, x.coords()))
}

/// `[XY] = sqrt(|x|^2 |y|^2 - 2 x.y + 1)`.
#[inline]
pub fn bracket(x: &Vec3, y: &Vec3) -> f64 {
    // |x|^2|y|^2 - 2x.y + 1 = |y|x| - x/|x||^2 rewritten without the division;
    // clamp guards the last ulp.
    let arg = dot(x, x) * dot(y, y) - 2.0 * dot(x, y) + 1.0;
    arg.max(0.0).sqrt()
}

pub fn bracket_xy(x: &BallPoint, y: &BallPoint) -> f64 {
    bracket(x.coords(), y.coords())
}

/// Geodesic distance of the Poincaré ball model.
///
/// Uses `sinh(rho/2) = |x-y| / sqrt((1-|x|^2)(1-|y|^2))`, which is the
/// `cosh rho = 1 + 2|x-y|^2/((1-|x|^2)(1-|y|^2))` identity without the
/// cancellation of `acosh` near coincident points.
pub fn hyperbolic_distance(x: &BallPoint, y: &BallPoint) -> Result<f64> {
    let dx = 1.0 - x.norm_sq();
    let dy = 1.0 - y.norm_sq();
    if x.is_boundary() || y.is_boundary() || dx <= 0.0 || dy <= 0.0 {
        return Err(Error::Domain(
            "hyperbolic distance to an ideal point".into(),
        ));
    }
    let s = distance(x.coords(), y.coords()) / (dx * dy).sqrt();
    Ok(2.0 * s.asinh())
}

/// Distance from the origin, `ln((1+r)/(1-r))`, as a function of `r = |x|`.
pub fn hyperbolic_radius(r: f64) -> f64 {
    2.0 * r.atanh()
}

/// Inverse of [`hyperbolic_radius`].
pub fn ball_radius(rho: f64) -> f64 {
    (0.5 * rho).tanh()
}

/// Conformal factor `2 / (1 - |x|^2)` of the Poincaré metric.
pub fn conformal_factor(x: &BallPoint) -> Result<f64> {
    if x.is_boundary() {
        return Err(Error::Domain("conformal factor on the boundary".into()));
    }
    Ok(2.0 / (1.0 - x.norm_sq()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ball(rng: &mut ChaCha8Rng, rmax: f64) -> BallPoint {
        loop {
            let p = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            if norm(&p) < rmax {
                return BallPoint::new(p).unwrap();
            }
        }
    }

    #[test]
    fn reflection_examples() {
        let r0 = PlaneReflector::new(0.0).unwrap();
        assert_eq!(r0.reflect(&[0.3, 0.0, 0.0]), [-0.3, 0.0, 0.0]);
        let r5 = PlaneReflector::new(0.5).unwrap();
        assert_eq!(r5.reflect(&[0.5, 0.2, 0.0]), [0.5, 0.2, 0.0]);
        let r25 = PlaneReflector::new(0.25).unwrap();
        let y = r25.reflect(&[0.1, 0.0, 0.4]);
        assert_relative_eq!(y[0], 0.4, epsilon = 1e-15);
        assert_eq!(&y[1..], &[0.0, 0.4]);
        assert!(PlaneReflector::new(1.0).is_err());
    }

    #[test]
    fn reflection_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let lam = rng.gen_range(0.0..1.0);
            let refl = PlaneReflector::new(lam).unwrap();
            let x = random_ball(&mut rng, 1.0);
            let back = refl.reflect(&refl.reflect(x.coords()));
            for k in 0..3 {
                assert!((back[k] - x.coords()[k]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn kelvin_examples() {
        let p = BallPoint::new([0.5, 0.0, 0.0]).unwrap();
        assert_eq!(kelvin_point(&p).unwrap(), [2.0, 0.0, 0.0]);
        let p = BallPoint::new([0.0, 0.25, 0.0]).unwrap();
        assert_eq!(kelvin_point(&p).unwrap(), [0.0, 4.0, 0.0]);
        let p = BallPoint::new([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(kelvin_point(&p).unwrap(), [1.0, 0.0, 0.0]);
        assert!(kelvin_point(&BallPoint::ORIGIN).is_err());
    }

    #[test]
    fn bracket_examples() {
        let y = BallPoint::new([0.3, -0.2, 0.6]).unwrap();
        assert_eq!(bracket_xy(&BallPoint::ORIGIN, &y), 1.0);
        let x = BallPoint::new([0.5, 0.0, 0.0]).unwrap();
        assert_relative_eq!(bracket_xy(&x, &x), 0.75, epsilon = 1e-15);

        let x = BallPoint::new([0.2, 0.1, -0.4]).unwrap();
        let s = (1.0f64 / 3.0).sqrt();
        let yb = BallPoint::new([s, s, s]).unwrap();
        assert!(yb.is_boundary());
        assert_relative_eq!(
            bracket_xy(&x, &yb),
            distance(x.coords(), yb.coords()),
            max_relative = 1e-14
        );
    }

    #[test]
    fn bracket_symmetry_and_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let x = random_ball(&mut rng, 1.0);
            let y = random_ball(&mut rng, 1.0);
            let b = bracket_xy(&x, &y);
            assert_eq!(b, bracket_xy(&y, &x));
            assert!(b >= (1.0 - x.norm() * y.norm()).abs() - 1e-15);
        }
    }

    #[test]
    fn distance_examples() {
        let x = BallPoint::new([0.5, 0.0, 0.0]).unwrap();
        let mx = BallPoint::new([-0.5, 0.0, 0.0]).unwrap();
        let ln3 = 3.0f64.ln();
        assert_relative_eq!(
            hyperbolic_distance(&x, &BallPoint::ORIGIN).unwrap(),
            ln3,
            max_relative = 1e-15
        );
        assert_eq!(hyperbolic_distance(&x, &x).unwrap(), 0.0);
        assert_relative_eq!(
            hyperbolic_distance(&x, &mx).unwrap(),
            2.0 * ln3,
            max_relative = 1e-15
        );
        // cosh form
        let cosh_form = (1.0 + 2.0 * 1.0 / (0.75 * 0.75f64)).acosh();
        assert_relative_eq!(cosh_form, 2.0 * ln3, max_relative = 1e-14);

        let b = BallPoint::new([1.0, 0.0, 0.0]).unwrap();
        assert!(hyperbolic_distance(&x, &b).is_err());
    }

    #[test]
    fn distance_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let a = random_ball(&mut rng, 0.999);
            let b = random_ball(&mut rng, 0.999);
            let c = random_ball(&mut rng, 0.999);
            let ab = hyperbolic_distance(&a, &b).unwrap();
            let bc = hyperbolic_distance(&b, &c).unwrap();
            let ac = hyperbolic_distance(&a, &c).unwrap();
            assert!(ab + bc - ac >= -1e-12);
            assert_eq!(ab, hyperbolic_distance(&b, &a).unwrap());
        }
    }

    #[test]
    fn conformal_factor_matches_cosh_form() {
        assert_eq!(conformal_factor(&BallPoint::ORIGIN).unwrap(), 2.0);
        let p = BallPoint::new([0.0, 0.5, 0.0]).unwrap();
        assert_relative_eq!(
            conformal_factor(&p).unwrap(),
            8.0 / 3.0,
            max_relative = 1e-15
        );
        for k in 0..=999 {
            let r = k as f64 / 1000.0;
            let p = BallPoint::new([r, 0.0, 0.0]).unwrap();
            let rho = hyperbolic_distance(&p, &BallPoint::ORIGIN).unwrap();
            let cf = conformal_factor(&p).unwrap();
            let alt = 2.0 * (0.5 * rho).cosh().powi(2);
            assert!((cf - alt).abs() <= 1e-12 * cf, "r = {r}");
        }
    }

    #[test]
    fn ball_point_membership() {
        assert!(BallPoint::new([1.0 + 1e-15, 0.0, 0.0]).is_ok());
        assert!(BallPoint::new([1.0 + 1e-13, 0.0, 0.0]).is_err());
        assert!(BallPoint::new([1.0 - 1e-13, 0.0, 0.0])
            .unwrap()
            .is_boundary());
        assert!(BallPoint::new([0.9, 0.0, 0.0]).unwrap().is_interior());
    }
}
