//! Double integrals of a radial power law over angular sectors.
//!
//! Every toy-model power reduces to integrals of `R^{-s}` over a region
//! `θ ∈ [θa, θb]`, `R` between a fixed radius and either another fixed radius
//! or the wall line `R = d0 / cos θ`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{beta_continued, hyp2f1, im_li2_on_circle, SpecfunError};

/// Angles closer than this to ±π/2 are rejected (sec θ is unbounded there).
pub const ANGLE_GUARD: f64 = 1e-9;

/// `∫_{θa}^{θb} ∫_{r0}^{r1} R^{-s} dR dθ`.
pub fn annular_sector_integral(theta_a: f64, theta_b: f64, r0: f64, r1: f64, s: f64) -> f64 {
    let span = theta_b - theta_a;
    if s == 1.0 {
        span * (r1 / r0).ln()
    } else {
        let e = 1.0 - s;
        span * (r1.powf(e) - r0.powf(e)) / e
    }
}

/// `∫_0^θ cos^{a-1}(t) dt` for `a ≥ -1` and `|θ| < π/2`. Odd in θ.
///
/// Near the perpendicular the sine substitution gives
/// `sin θ · ₂F₁(1/2, (2-a)/2; 3/2; sin²θ)`; towards the edges the
/// complementary form `B(a/2, 1/2)/2 − cos^a θ / a · ₂F₁(a/2, 1/2; (a+2)/2; cos²θ)`
/// (analytically continued in `a` below zero) keeps both series arguments
/// at or below 1/2.
pub fn cos_power_integral(theta: f64, a: f64) -> Result<f64, SpecfunError> {
    if theta == 0.0 {
        return Ok(0.0);
    }
    if a == 0.0 {
        return Ok(theta.tan().asinh());
    }
    if a == 1.0 {
        return Ok(theta);
    }
    let t = theta.abs();
    let sign = theta.signum();
    let value = if t <= FRAC_PI_4 {
        let s = t.sin();
        s * hyp2f1(0.5, (2.0 - a) / 2.0, 1.5, s * s)?
    } else {
        let c = t.cos();
        let half_beta = 0.5 * beta_continued(a / 2.0, 0.5);
        half_beta - c.powf(a) / a * hyp2f1(a / 2.0, 0.5, (a + 2.0) / 2.0, c * c)?
    };
    Ok(sign * value)
}

fn check_angles(theta_a: f64, theta_b: f64) -> Result<(), SpecfunError> {
    if !(theta_a.is_finite() && theta_b.is_finite()) {
        return Err(SpecfunError::Domain(format!("non-finite angle ({theta_a}, {theta_b})")));
    }
    if theta_a > theta_b {
        return Err(SpecfunError::Domain(format!(
            "angles out of order: {theta_a} > {theta_b}"
        )));
    }
    for t in [theta_a, theta_b] {
        if t.abs() >= FRAC_PI_2 - ANGLE_GUARD {
            return Err(SpecfunError::NearRightAngle(t));
        }
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<(), SpecfunError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SpecfunError::Domain(format!("{name} = {v} must be positive and finite")))
    }
}

/// `∫_{θa}^{θb} ∫_{r0}^{d0/cos θ} R^{-s} dR dθ` for `s ≥ -1`.
///
/// The inner integral is signed: where the wall line is nearer than `r0` it
/// contributes negatively.
pub fn wall_bounded_integral(
    theta_a: f64,
    theta_b: f64,
    r0: f64,
    d0: f64,
    s: f64,
) -> Result<f64, SpecfunError> {
    check_angles(theta_a, theta_b)?;
    check_positive("inner radius", r0)?;
    check_positive("wall distance", d0)?;
    if !(s.is_finite() && s >= -1.0) {
        return Err(SpecfunError::Domain(format!("exponent {s} must be finite and ≥ -1")));
    }
    if theta_a == theta_b {
        return Ok(0.0);
    }
    let span = theta_b - theta_a;
    let value = if s == -1.0 {
        0.5 * d0 * d0 * (theta_b.tan() - theta_a.tan()) - 0.5 * span * r0 * r0
    } else if s == 0.0 {
        d0 * (theta_b.tan().asinh() - theta_a.tan().asinh()) - span * r0
    } else if s == 1.0 {
        span * (2.0 * d0 / r0).ln()
            + 0.5 * (im_li2_on_circle(2.0 * theta_b + PI) - im_li2_on_circle(2.0 * theta_a + PI))
    } else {
        let e = 1.0 - s;
        let angular = cos_power_integral(theta_b, s)? - cos_power_integral(theta_a, s)?;
        d0.powf(e) / e * angular - span * r0.powf(e) / e
    };
    Ok(value)
}

/// `∫_{θa}^{θb} ∫_{r0}^{d0/cos θ} R^{-s} dR dθ` in the limit `r0 → ∞`, `s > 1`.
///
/// Equals minus the power-law mass beyond the wall line.
pub fn wall_to_infinity_integral(
    theta_a: f64,
    theta_b: f64,
    d0: f64,
    s: f64,
) -> Result<f64, SpecfunError> {
    check_angles(theta_a, theta_b)?;
    check_positive("wall distance", d0)?;
    if !(s.is_finite() && s > 1.0) {
        return Err(SpecfunError::Domain(format!("exponent {s} must exceed 1 for an infinite region")));
    }
    if theta_a == theta_b {
        return Ok(0.0);
    }
    let e = 1.0 - s;
    let angular = cos_power_integral(theta_b, s)? - cos_power_integral(theta_a, s)?;
    Ok(d0.powf(e) / e * angular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::quad::{gauss_kronrod, QuadSpec};
    use crate::specfun::beta_fn;

    fn spec() -> QuadSpec {
        QuadSpec { rel_tol: 1e-13, abs_tol: 1e-15, max_subdivisions: 4000 }
    }

    /// Nested adaptive quadrature of the defining double integral.
    fn brute(theta_a: f64, theta_b: f64, r0: f64, d0: f64, s: f64) -> f64 {
        gauss_kronrod(
            |t| {
                let upper = d0 / t.cos();
                gauss_kronrod(|r| r.powf(-s), r0, upper, &spec()).unwrap().value
            },
            theta_a,
            theta_b,
            &spec(),
        )
        .unwrap()
        .value
    }

    /// The general-case formula exactly as written with sign functions,
    /// `sgn(0) = 0`, and `₂F₁` at `cos²θ` (exercising the `z → 1` path).
    fn printed_general(z1: f64, z2: f64, z3: f64, z4: f64, z5: f64) -> f64 {
        let sgn = |x: f64| if x == 0.0 { 0.0 } else { x.signum() };
        let e = 1.0 - z5;
        let f = |z: f64| {
            let c = z.cos();
            sgn(z) * c.powf(z5) * hyp2f1(z5 / 2.0, 0.5, (z5 + 2.0) / 2.0, c * c).unwrap()
        };
        crate::specfun::beta_continued(0.5, z5 / 2.0) * (sgn(z2) - sgn(z1)) * z4.powf(e) / (2.0 * e)
            + (z1 - z2) * z3.powf(e) / e
            + z4.powf(e) / (e * z5) * (f(z1) - f(z2))
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn annular_trivial_values() {
        assert_eq!(annular_sector_integral(0.0, 1.0, 2.0, 2.0, 0.73), 0.0);
        assert_eq!(annular_sector_integral(0.0, 1.0, 1.0, std::f64::consts::E, 1.0), 1.0);
        assert!((annular_sector_integral(-0.5, 0.5, 1.0, 3.0, 0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn annular_matches_quadrature() {
        for (ta, tb, r0, r1, s) in
            [(-1.0, 0.4, 1.0, 5.3, 0.73), (0.1, 0.2, 2.0, 9.0, 2.19), (-0.3, 1.2, 0.5, 0.9, -0.6)]
        {
            let q = brute_annulus(ta, tb, r0, r1, s);
            assert!(rel(annular_sector_integral(ta, tb, r0, r1, s), q) < 1e-12);
        }
    }

    fn brute_annulus(ta: f64, tb: f64, r0: f64, r1: f64, s: f64) -> f64 {
        (tb - ta) * gauss_kronrod(|r| r.powf(-s), r0, r1, &spec()).unwrap().value
    }

    #[test]
    fn empty_interval_is_zero() {
        for s in [-1.0, 0.0, 1.0, 0.73, 2.19] {
            assert_eq!(wall_bounded_integral(0.3, 0.3, 1.0, 2.0, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn quadratic_case_closed_value() {
        let v = wall_bounded_integral(0.0, FRAC_PI_4, 1.0, 1.0, -1.0).unwrap();
        assert!((v - (0.5 * FRAC_PI_4.tan() - PI / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn every_case_matches_nested_quadrature() {
        let cases = [
            (-1.0, -0.4, 5.3, 2.0, 0.73),
            (-1.0, 1.0, 1.0, 0.6, 1.0),
            (-0.2, 1.3, 2.5, 1.7, 2.19),
            (-1.4, 0.0, 1.0, 0.5, 0.0),
            (0.2, 1.1, 1.0, 3.0, -1.0),
            (-0.7, 0.9, 1.5, 1.0, -0.5),
            (-1.5, 1.5, 3.0, 2.0, 1.6),
        ];
        for (ta, tb, r0, d0, s) in cases {
            let v = wall_bounded_integral(ta, tb, r0, d0, s).unwrap();
            let q = brute(ta, tb, r0, d0, s);
            assert!(rel(v, q) < 1e-10, "{:?}: {v} vs {q}", (ta, tb, r0, d0, s));
        }
    }

    #[test]
    fn stable_form_matches_printed_form() {
        for (z1, z2, z3, z4, z5) in [
            (-1.0, -0.4, 5.3, 2.0, 0.73),
            (-1.0, 0.4, 5.3, 2.0, 0.73),
            (-0.05, 1.2, 2.5, 1.7, 2.19),
            (0.3, 1.4, 1.0, 0.8, 2.19),
            (-1.2, 0.7, 1.0, 0.8, -0.4),
        ] {
            let v = wall_bounded_integral(z1, z2, z3, z4, z5).unwrap();
            let p = printed_general(z1, z2, z3, z4, z5);
            assert!((v - p).abs() < 1e-11 * v.abs().max(1.0), "{:?}: {v} vs {p}", (z1, z2, z3, z4, z5));
        }
    }

    #[test]
    fn continuous_when_an_endpoint_crosses_zero() {
        for s in [0.73, 2.19, -0.4] {
            let at = |z1: f64| wall_bounded_integral(z1, 0.8, 1.0, 1.3, s).unwrap();
            let centre = at(0.0);
            for d in [1e-3, 1e-6, 1e-9] {
                assert!((at(-d) - centre).abs() < 2.0 * d * 2.0);
                assert!((at(d) - centre).abs() < 2.0 * d * 2.0);
            }
        }
    }

    #[test]
    fn infinite_limit_matches_large_radius_difference() {
        // Z(r0 → ∞) = Z(r0) + span·r0^{1-s}/(1-s)
        let (ta, tb, d0, s) = (-0.9, 0.3, 1.7, 2.19);
        let inf = wall_to_infinity_integral(ta, tb, d0, s).unwrap();
        let r0 = 1e3;
        let finite = wall_bounded_integral(ta, tb, r0, d0, s).unwrap();
        let shifted = finite + (tb - ta) * r0.powf(1.0 - s) / (1.0 - s);
        assert!(rel(inf, shifted) < 1e-12);
        let q = gauss_kronrod(
            |t| {
                let r = d0 / t.cos();
                -r.powf(1.0 - s) / (s - 1.0)
            },
            ta,
            tb,
            &spec(),
        )
        .unwrap()
        .value;
        assert!(rel(inf, q) < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(wall_bounded_integral(0.5, 0.2, 1.0, 1.0, 0.7).is_err());
        assert!(matches!(
            wall_bounded_integral(0.0, FRAC_PI_2, 1.0, 1.0, 0.7),
            Err(SpecfunError::NearRightAngle(_))
        ));
        assert!(wall_bounded_integral(0.0, 0.2, 0.0, 1.0, 0.7).is_err());
        assert!(wall_bounded_integral(0.0, 0.2, 1.0, 1.0, -1.5).is_err());
        assert!(wall_to_infinity_integral(0.0, 0.2, 1.0, 0.9).is_err());
    }

    #[test]
    fn cos_power_integral_endpoints() {
        // The omitted sliver near π/2 is O(δ^a / a).
        for a in [1.5, 2.19, 3.0] {
            let near_edge = cos_power_integral(FRAC_PI_2 - 1e-7, a).unwrap();
            let full = 0.5 * beta_fn(a / 2.0, 0.5).unwrap();
            assert!((near_edge - full).abs() < 1e-6 * full.max(1.0), "a = {a}");
        }
        assert!((cos_power_integral(0.6, -1.0).unwrap() - 0.6f64.tan()).abs() < 1e-14);
        assert!((cos_power_integral(-0.6, 3.0).unwrap() + (0.3 + 0.25 * 1.2f64.sin())).abs() < 1e-14);
    }
}
