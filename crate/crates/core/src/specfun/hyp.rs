use super::{gamma, recip_gamma, SpecfunError};

const SERIES_CUTOFF: f64 = 1e-17;
const MAX_TERMS: usize = 1_000_000;

/// Gauss hypergeometric function `₂F₁(a, b; c; z)` for `0 ≤ z < 1`.
///
/// Uses the power series `Σ (a)ₖ(b)ₖ/((c)ₖ k!) zᵏ` with rising factorials
/// for `z ≤ 0.75`. Above that the `z → 1 − z` connection formula is used,
/// unless `c − a − b` is an integer (the formula degenerates there) in which
/// case the series is summed directly.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecfunError> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(SpecfunError::Domain(format!("2F1({a}, {b}; {c}; {z}) has non-finite input")));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(SpecfunError::Domain(format!("2F1 argument z = {z} outside [0, 1)")));
    }
    if c <= 0.0 && c == c.floor() {
        return Err(SpecfunError::Domain(format!("2F1 parameter c = {c} is a pole")));
    }
    let s = c - a - b;
    if z <= 0.75 || s == s.round() {
        return Ok(series(a, b, c, z));
    }
    let w = 1.0 - z;
    let first = gamma(c) * gamma(s) * recip_gamma(c - a) * recip_gamma(c - b);
    let second = gamma(c) * gamma(-s) * recip_gamma(a) * recip_gamma(b);
    let mut out = 0.0;
    if first != 0.0 {
        out += first * series(a, b, 1.0 - s, w);
    }
    if second != 0.0 {
        out += second * w.powf(s) * series(c - a, c - b, 1.0 + s, w);
    }
    Ok(out)
}

fn series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() < SERIES_CUTOFF * sum.abs() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::quad::tanh_sinh;
    use crate::specfun::beta_fn;

    /// Euler integral `B(b, c−b)·₂F₁ = ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1−zt)^{−a} dt`,
    /// valid for `c > b > 0`.
    fn euler(a: f64, b: f64, c: f64, z: f64) -> f64 {
        let q = tanh_sinh(
            |t, lo, hi| lo.powf(b - 1.0) * hi.powf(c - b - 1.0) * (1.0 - z * t).powf(-a),
            0.0,
            1.0,
            1e-15,
        )
        .unwrap();
        q.value / beta_fn(b, c - b).unwrap()
    }

    /// Plain series summed until a term falls below 1e−14 relative.
    fn plain_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
        let mut term: f64 = 1.0;
        let mut sum: f64 = 1.0;
        let mut k = 0.0;
        while term.abs() > 1e-14 * sum.abs() {
            term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
            sum += term;
            k += 1.0;
        }
        sum
    }

    #[test]
    fn zero_argument_is_one() {
        assert_eq!(hyp2f1(0.3, 0.5, 1.3, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn matches_plain_series() {
        let z5 = 2.19;
        let v = hyp2f1(z5 / 2.0, 0.5, (z5 + 2.0) / 2.0, 0.25).unwrap();
        let e = plain_series(z5 / 2.0, 0.5, (z5 + 2.0) / 2.0, 0.25);
        assert!(((v - e) / e).abs() < 1e-13);
    }

    #[test]
    fn elementary_closed_forms() {
        // 2F1(1, 1; 2; z) = -ln(1-z)/z
        for z in [0.1, 0.5, 0.8, 0.95] {
            let v = hyp2f1(1.0, 1.0, 2.0, z).unwrap();
            let e = -(1.0 - z).ln() / z;
            assert!(((v - e) / e).abs() < 1e-12, "z = {z}");
        }
        // 2F1(1/2, 1/2; 3/2; z²) = asin(z)/z, c - a - b = 1/2
        for x in [0.3f64, 0.9, 0.99, 0.9999] {
            let v = hyp2f1(0.5, 0.5, 1.5, x * x).unwrap();
            let e = x.asin() / x;
            assert!(((v - e) / e).abs() < 1e-13, "x = {x}: {v} vs {e}");
        }
    }

    #[test]
    fn near_one_matches_euler_integral() {
        for z5 in [0.73, 2.19, -0.4] {
            let (a, b, c) = (z5 / 2.0, 0.5, (z5 + 2.0) / 2.0);
            for z in [0.76, 0.9, 0.999, 0.999999] {
                let v = hyp2f1(a, b, c, z).unwrap();
                let e = euler(a, b, c, z);
                assert!(((v - e) / e).abs() < 1e-12, "z5 = {z5}, z = {z}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(hyp2f1(0.5, 0.5, 1.5, 1.0).is_err());
        assert!(hyp2f1(0.5, 0.5, 1.5, -0.1).is_err());
        assert!(hyp2f1(0.5, 0.5, -2.0, 0.3).is_err());
        assert!(hyp2f1(f64::NAN, 0.5, 1.5, 0.3).is_err());
    }
}
