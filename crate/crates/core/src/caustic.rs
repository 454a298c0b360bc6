//! Geometry of the caustic `f_a(Γ)`, the image of the unit circle.
//!
//! With `θ = φ/n`, the caustic is `A·E(φ) + b` where `E` is a standard
//! epicycloid with fixed radius `R = (a+1)/(n(n+1))` and rolling radius
//! `r = (a+1)/(n+1)`, `A = diag(-1, 2/(a+1) - 1)` and `b = (-1, 0)`.
//!
//! Writing `s(φ) = sin φ/n - sin((n+1)φ/n)/(n+1)` and
//! `c(φ) = cos φ/n - cos((n+1)φ/n)/(n+1)`, the caustic is
//! `u = -(a+1)c(φ) - 1`, `v = -(a-1)s(φ)`. Real-axis crossings are the roots of
//! `s` and do not depend on `a`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::family::FamilyParams;
use crate::{Error, Result};

pub type Point2 = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpicycloidSpec {
    pub fixed_radius: f64,
    pub rolling_radius: f64,
    pub cusps: u32,
    pub revolutions: u32,
    pub orientation: Orientation,
}

impl EpicycloidSpec {
    /// Inner and outer radii of the annulus containing the base epicycloid.
    pub fn annulus(&self) -> (f64, f64) {
        (
            self.fixed_radius,
            self.fixed_radius + 2.0 * self.rolling_radius,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    /// Diagonal linear part, stored as a full matrix.
    pub linear: [[f64; 2]; 2],
    pub offset: Point2,
}

impl AffineMap {
    pub fn apply(&self, p: Point2) -> Point2 {
        let m = &self.linear;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + self.offset[0],
            m[1][0] * p[0] + m[1][1] * p[1] + self.offset[1],
        ]
    }

    /// Inverse image of `p`; the linear part is diagonal and non-singular for `a != 1`.
    pub fn invert(&self, p: Point2) -> Point2 {
        [
            (p[0] - self.offset[0]) / self.linear[0][0],
            (p[1] - self.offset[1]) / self.linear[1][1],
        ]
    }

    pub fn det(&self) -> f64 {
        self.linear[0][0] * self.linear[1][1] - self.linear[0][1] * self.linear[1][0]
    }
}

/// Imaginary-part factor: `v(φ) = -(a-1)·s(φ)`.
pub fn crossing_sine(n: u32, phi: f64) -> f64 {
    let n = f64::from(n);
    phi.sin() / n - ((n + 1.0) * phi / n).sin() / (n + 1.0)
}

/// Real-part factor: `u(φ) = -(a+1)·c(φ) - 1`.
pub fn crossing_cosine(n: u32, phi: f64) -> f64 {
    let n = f64::from(n);
    phi.cos() / n - ((n + 1.0) * phi / n).cos() / (n + 1.0)
}

pub fn base_epicycloid_point(params: &FamilyParams, phi: f64) -> Point2 {
    let n = params.nf();
    let k = params.a() + 1.0;
    let w = (n + 1.0) * phi / n;
    [
        k / n * phi.cos() - k / (n + 1.0) * w.cos(),
        k / n * phi.sin() - k / (n + 1.0) * w.sin(),
    ]
}

pub fn affine_map(params: &FamilyParams) -> AffineMap {
    AffineMap {
        linear: [[-1.0, 0.0], [0.0, 2.0 / (params.a() + 1.0) - 1.0]],
        offset: [-1.0, 0.0],
    }
}

pub fn caustic_point(params: &FamilyParams, phi: f64) -> Point2 {
    affine_map(params).apply(base_epicycloid_point(params, phi))
}

pub fn epicycloid_spec(params: &FamilyParams) -> EpicycloidSpec {
    let n = params.nf();
    let k = params.a() + 1.0;
    let orientation = if affine_map(params).det() > 0.0 {
        Orientation::Counterclockwise
    } else {
        Orientation::Clockwise
    };
    EpicycloidSpec {
        fixed_radius: k / (n * (n + 1.0)),
        rolling_radius: k / (n + 1.0),
        cusps: 1,
        revolutions: params.n(),
        orientation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausticSample {
    pub phi: f64,
    pub point: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausticCurve {
    pub params: FamilyParams,
    pub samples: Vec<CausticSample>,
}

impl CausticCurve {
    pub fn is_closed(&self, tol: f64) -> bool {
        match (self.samples.first(), self.samples.last()) {
            (Some(f), Some(l)) => (f.point[0] - l.point[0]).hypot(f.point[1] - l.point[1]) <= tol,
            _ => false,
        }
    }

    /// Smallest and largest norm of the samples pulled back to the base epicycloid.
    pub fn base_norm_range(&self) -> (f64, f64) {
        let map = affine_map(&self.params);
        self.samples
            .iter()
            .map(|s| {
                let q = map.invert(s.point);
                q[0].hypot(q[1])
            })
            .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }

    pub fn min_distance_to_origin(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.point[0].hypot(s.point[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn turn_between(d1: Point2, d2: Point2) -> f64 {
    let cross = d1[0] * d2[1] - d1[1] * d2[0];
    let dot = d1[0] * d2[0] + d1[1] * d2[1];
    cross.atan2(dot).abs()
}

fn sub(p: Point2, q: Point2) -> Point2 {
    [p[0] - q[0], p[1] - q[1]]
}

/// Samples the caustic on `φ ∈ [0, 2nπ]`, bisecting intervals until both the
/// turning angle between consecutive chords and the change of argument about
/// the origin stay below `max_turn`.
pub fn sample_caustic(
    params: &FamilyParams,
    max_turn: f64,
    max_points: usize,
) -> Result<CausticCurve> {
    let n = params.n() as usize;
    if !(max_turn > 0.0 && max_turn <= PI / 2.0) {
        return Err(Error::InvalidParams(format!(
            "max_turn must lie in (0, pi/2], got {max_turn}"
        )));
    }
    if max_points < 4 * n + 4 {
        return Err(Error::InvalidParams(format!(
            "max_points must be at least {}, got {max_points}",
            4 * n + 4
        )));
    }

    let end = 2.0 * params.nf() * PI;
    let initial = 4 * n + 3;
    let mut phis: Vec<f64> = (0..=initial)
        .map(|k| end * k as f64 / initial as f64)
        .collect();
    phis[initial] = end;
    let mut points: Vec<Point2> = phis.iter().map(|&p| caustic_point(params, p)).collect();

    loop {
        let m = points.len();
        let mut split = vec![false; m - 1];
        for i in 0..m - 1 {
            let (p, q) = (points[i], points[i + 1]);
            let arg_change = (p[0] * q[1] - p[1] * q[0])
                .atan2(p[0] * q[0] + p[1] * q[1])
                .abs();
            if arg_change >= max_turn || (p[0] == 0.0 && p[1] == 0.0) {
                split[i] = true;
            }
        }
        for i in 1..m - 1 {
            let turn = turn_between(sub(points[i], points[i - 1]), sub(points[i + 1], points[i]));
            if turn >= max_turn {
                split[i - 1] = true;
                split[i] = true;
            }
        }
        let extra = split.iter().filter(|&&s| s).count();
        if extra == 0 {
            break;
        }
        if m + extra > max_points {
            return Err(Error::BudgetExceeded { max_points });
        }
        let mut new_phis = Vec::with_capacity(m + extra);
        let mut new_points = Vec::with_capacity(m + extra);
        for i in 0..m - 1 {
            new_phis.push(phis[i]);
            new_points.push(points[i]);
            if split[i] {
                let mid = 0.5 * (phis[i] + phis[i + 1]);
                new_phis.push(mid);
                new_points.push(caustic_point(params, mid));
            }
        }
        new_phis.push(phis[m - 1]);
        new_points.push(points[m - 1]);
        phis = new_phis;
        points = new_points;
    }

    Ok(CausticCurve {
        params: *params,
        samples: phis
            .into_iter()
            .zip(points)
            .map(|(phi, point)| CausticSample { phi, point })
            .collect(),
    })
}

/// The caustic evaluated directly through the family, `f_a(e^{iφ/n})`.
pub fn caustic_point_via_family(params: &FamilyParams, phi: f64) -> Point2 {
    let z = Complex64::from_polar(1.0, phi / params.nf());
    let w = crate::family::evaluate(params, z).expect("unit circle avoids the pole");
    [w.re, w.im]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    Double,
    Single,
}

/// A real-axis crossing of the caustic to the right of its center `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionRecord {
    pub phi: f64,
    /// `c(φ)`, negative for right-side crossings.
    pub c_value: f64,
    pub multiplicity: Multiplicity,
}

impl IntersectionRecord {
    /// Abscissa of the crossing for parameter `a`.
    pub fn x(&self, a: f64) -> f64 {
        -(a + 1.0) * self.c_value - 1.0
    }

    /// The parameter at which the crossing passes through the origin.
    pub fn critical_a(&self) -> f64 {
        -1.0 / self.c_value - 1.0
    }
}

const CROSSING_BISECTION_TOL: f64 = 1e-13;
const CROSSING_DEDUP_TOL: f64 = 1e-9;

fn bisect_sine(n: u32, mut lo: f64, mut hi: f64) -> f64 {
    let mut s_lo = crossing_sine(n, lo);
    while hi - lo > CROSSING_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let s_mid = crossing_sine(n, mid);
        if s_mid == 0.0 {
            return mid;
        }
        if (s_mid > 0.0) == (s_lo > 0.0) {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The `⌊(n+1)/2⌋` distinct right-side real-axis crossings, outermost first.
///
/// Only `φ ∈ (0, nπ]` is scanned; the second half of the parameter range
/// retraces the same crossings in mirror image.
pub fn right_side_intersections(n: u32) -> Result<Vec<IntersectionRecord>> {
    if n < FamilyParams::MIN_N {
        return Err(Error::InvalidParams(format!(
            "n must be at least 4, got {n}"
        )));
    }
    let nf = f64::from(n);
    let half = nf * PI;
    let steps = 8 * n as usize * (n as usize + 1);
    let step = PI / (8.0 * (nf + 1.0));

    let mut roots = Vec::new();
    // s > 0 just after the cusp at φ = 0, and φ = nπ is an exact simple root
    // handled separately, so the last grid interval is skipped.
    let mut prev_phi = step;
    let mut prev_s = crossing_sine(n, prev_phi);
    if prev_s <= 0.0 {
        return Err(Error::RootSolverFailure(format!(
            "expected s > 0 at the first grid point, found {prev_s:e}"
        )));
    }
    for k in 2..steps {
        let phi = step * k as f64;
        let s = crossing_sine(n, phi);
        if s == 0.0 {
            roots.push(phi);
        } else if (s > 0.0) != (prev_s > 0.0) && prev_s != 0.0 {
            roots.push(bisect_sine(n, prev_phi, phi));
        }
        prev_phi = phi;
        prev_s = s;
    }
    let last_s = crossing_sine(n, half);
    if (last_s > 0.0) == (prev_s > 0.0) && last_s.abs() > 1e-12 {
        return Err(Error::RootSolverFailure(
            "no sign change bracketing phi = n*pi".into(),
        ));
    }
    roots.push(half);

    let mut records: Vec<IntersectionRecord> = Vec::new();
    for phi in roots {
        let c_value = crossing_cosine(n, phi);
        if c_value >= 0.0 {
            continue;
        }
        if records
            .iter()
            .any(|r| (r.c_value.abs() - c_value.abs()).abs() < CROSSING_DEDUP_TOL)
        {
            continue;
        }
        let multiplicity = if n % 2 == 1 && (phi - half).abs() < 1e-10 {
            Multiplicity::Single
        } else {
            Multiplicity::Double
        };
        records.push(IntersectionRecord {
            phi,
            c_value,
            multiplicity,
        });
    }
    records.sort_by(|p, q| q.c_value.abs().total_cmp(&p.c_value.abs()));

    let expected = (n as usize).div_ceil(2);
    if records.len() != expected {
        return Err(Error::RootSolverFailure(format!(
            "found {} right-side crossings, expected {expected}",
            records.len()
        )));
    }
    Ok(records)
}
