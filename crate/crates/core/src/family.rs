//! The family `f_a = h + conj(g)` with
//! `h = a/(n+1) z^(n+1) - 1/n z^(-n)` and `g = 1/(n+1) z^(n+1) - a/n z^(-n)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The pair `(n, a)` selecting one member of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    n: u32,
    a: f64,
}

impl FamilyParams {
    pub const MIN_N: u32 = 4;

    pub fn new(n: u32, a: f64) -> Result<Self> {
        if n < Self::MIN_N {
            return Err(Error::InvalidParams(format!(
                "n must be at least {}, got {n}",
                Self::MIN_N
            )));
        }
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "a must be a positive finite real, got {a}"
            )));
        }
        if a == 1.0 {
            return Err(Error::InvalidParams(
                "a = 1 collapses the caustic onto a segment".into(),
            ));
        }
        Ok(Self { n, a })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// For `a > 1` the exterior of the unit circle is sense-preserving; for
    /// `a < 1` the roles are swapped.
    pub fn exterior_is_sense_preserving(&self) -> bool {
        self.a > 1.0
    }

    /// Order (+1 or -1) carried by a non-singular zero at modulus `r`.
    pub fn expected_order_at_modulus(&self, r: f64) -> i32 {
        if (r > 1.0) == self.exterior_is_sense_preserving() {
            1
        } else {
            -1
        }
    }
}

/// `h'(z)` and `g'(z)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerPair {
    pub dh: Complex64,
    pub dg: Complex64,
}

/// Real Jacobian of `(u, v)` with respect to `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianEval {
    /// `[[u_x, u_y], [v_x, v_y]]`
    pub entries: [[f64; 2]; 2],
    pub det: f64,
}

impl JacobianEval {
    /// Solves `J d = rhs`. Returns `None` when `det` is exactly zero.
    pub fn solve(&self, rhs: [f64; 2]) -> Option<[f64; 2]> {
        if self.det == 0.0 {
            return None;
        }
        let [[a, b], [c, d]] = self.entries;
        Some([
            (d * rhs[0] - b * rhs[1]) / self.det,
            (a * rhs[1] - c * rhs[0]) / self.det,
        ])
    }
}

/// `z^k` by binary exponentiation.
pub(crate) fn pow_sq(z: Complex64, mut k: u32) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        k >>= 1;
        if k > 0 {
            base = base * base;
        }
    }
    acc
}

fn reciprocal(z: Complex64) -> Complex64 {
    let d = z.norm_sqr();
    Complex64::new(z.re / d, -z.im / d)
}

fn check_nonzero(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        Err(Error::Domain)
    } else {
        Ok(())
    }
}

pub fn evaluate(params: &FamilyParams, z: Complex64) -> Result<Complex64> {
    check_nonzero(z)?;
    let n = params.nf();
    let a = params.a;
    let p = pow_sq(z, params.n + 1);
    let q = pow_sq(reciprocal(z), params.n);
    let h = p * (a / (n + 1.0)) - q * (1.0 / n);
    let g = p * (1.0 / (n + 1.0)) - q * (a / n);
    Ok(h + g.conj() - 1.0)
}

pub fn wirtinger_derivatives(params: &FamilyParams, z: Complex64) -> Result<WirtingerPair> {
    check_nonzero(z)?;
    let a = params.a;
    let zn = pow_sq(z, params.n);
    let zm = pow_sq(reciprocal(z), params.n + 1);
    Ok(WirtingerPair {
        dh: zn * a + zm,
        dg: zn + zm * a,
    })
}

/// `|g'(z) / h'(z)|`, evaluated as `|w + a| / |a w + 1|` with `w = z^(2n+1)`.
pub fn dilatation_modulus(params: &FamilyParams, z: Complex64) -> Result<f64> {
    check_nonzero(z)?;
    let a = params.a;
    let w = pow_sq(z, 2 * params.n + 1);
    let num = (w + a).norm();
    let den = (w * a + 1.0).norm();
    if den == 0.0 {
        if num == 0.0 {
            return Err(Error::Indeterminate { re: z.re, im: z.im });
        }
        return Ok(f64::INFINITY);
    }
    Ok(num / den)
}

pub fn jacobian(params: &FamilyParams, z: Complex64) -> Result<JacobianEval> {
    let WirtingerPair { dh, dg } = wirtinger_derivatives(params, z)?;
    let entries = [
        [dh.re + dg.re, -dh.im - dg.im],
        [dh.im - dg.im, dh.re - dg.re],
    ];
    let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
    Ok(JacobianEval { entries, det })
}

/// Radii `rho_min < 1 < r_max` such that `f_a` has no zeros with
/// `|z| <= rho_min` or `|z| >= r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContainmentRadii {
    pub rho_min: f64,
    pub r_max: f64,
}

/// Outer dominance: `|a-1|/(n+1) R^(n+1) > (a+1)/n R^(-n) + 1`. The left side
/// lower-bounds `|a z^(n+1) + conj(z)^(n+1)| / (n+1)` and the right side
/// upper-bounds the remaining terms, so the margin is increasing in `R`.
pub(crate) fn outer_margin(params: &FamilyParams, r: f64) -> f64 {
    let n = params.nf();
    let a = params.a;
    (a - 1.0).abs() / (n + 1.0) * r.powf(n + 1.0) - (a + 1.0) / n * r.powf(-n) - 1.0
}

/// Inner dominance: `|a-1|/n rho^(-n) > (a+1)/(n+1) rho^(n+1) + 1`, decreasing in `rho`.
pub(crate) fn inner_margin(params: &FamilyParams, rho: f64) -> f64 {
    let n = params.nf();
    let a = params.a;
    (a - 1.0).abs() / n * rho.powf(-n) - (a + 1.0) / (n + 1.0) * rho.powf(n + 1.0) - 1.0
}

pub fn containment_radii(params: &FamilyParams) -> ContainmentRadii {
    // Both margins are monotone, so a bracket plus bisection to two
    // significant digits is enough; the returned radius is the end of the
    // bracket on which the strict inequality holds.
    let mut hi = 1.0;
    while outer_margin(params, hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while (hi - lo) > 0.01 * hi {
        let mid = 0.5 * (lo + hi);
        if outer_margin(params, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r_max = hi;

    let mut small = 1.0;
    while inner_margin(params, small) <= 0.0 {
        small /= 2.0;
    }
    let mut big = small * 2.0;
    while (big - small) > 0.01 * small {
        let mid = 0.5 * (small + big);
        if inner_margin(params, mid) > 0.0 {
            small = mid;
        } else {
            big = mid;
        }
    }
    ContainmentRadii {
        rho_min: small,
        r_max,
    }
}
