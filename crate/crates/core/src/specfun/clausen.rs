use std::f64::consts::PI;
use std::sync::OnceLock;

const TERMS: usize = 40;

/// `ζ(2n) / (n (2n+1) (2π)^{2n})` for n = 1..=TERMS.
fn coefficients() -> &'static [f64; TERMS] {
    static COEFFS: OnceLock<[f64; TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut out = [0.0; TERMS];
        let two_pi_sq = (2.0 * PI) * (2.0 * PI);
        let mut scale = 1.0;
        for (i, c) in out.iter_mut().enumerate() {
            let n = (i + 1) as f64;
            scale *= two_pi_sq;
            *c = zeta_even(i + 1) / (n * (2.0 * n + 1.0) * scale);
        }
        out
    })
}

fn zeta_even(n: usize) -> f64 {
    let p2 = PI * PI;
    match n {
        1 => p2 / 6.0,
        2 => p2 * p2 / 90.0,
        3 => p2 * p2 * p2 / 945.0,
        4 => p2 * p2 * p2 * p2 / 9450.0,
        _ => {
            let s = -2.0 * n as f64;
            // Sum small terms first; k^(-10) at k = 64 is below 1e-18.
            (1..=64).rev().map(|k| (k as f64).powf(s)).sum()
        }
    }
}

/// `Im Li₂(e^{iφ})`, i.e. the Clausen function `Cl₂(φ) = Σ sin(kφ)/k²`.
///
/// `Im Li₂(−e^{2iθ})` is `im_li2_on_circle(2θ + π)`.
pub fn im_li2_on_circle(phi: f64) -> f64 {
    if !phi.is_finite() {
        return f64::NAN;
    }
    // Odd by construction: evaluate on |φ| and restore the sign.
    let sign = if phi < 0.0 { -1.0 } else { 1.0 };
    let mut t = phi.abs() % (2.0 * PI);
    let mut sign = sign;
    if t > PI {
        t = 2.0 * PI - t;
        sign = -sign;
    }
    sign * clausen_reduced(t)
}

/// Cl₂ on [0, π] via `θ − θ ln θ + Σ ζ(2n) θ^{2n+1} / (n (2n+1) (2π)^{2n})`.
fn clausen_reduced(t: f64) -> f64 {
    if t == 0.0 || t == PI {
        return 0.0;
    }
    let t2 = t * t;
    let mut power = t;
    let mut tail = 0.0;
    for c in coefficients() {
        power *= t2;
        let term = c * power;
        tail += term;
        if term < 1e-18 * tail {
            break;
        }
    }
    t - t * t.ln() + tail
}
