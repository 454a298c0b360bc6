//! Winding numbers about the origin by adaptive argument accumulation.
//!
//! A parameter interval is accepted once the principal increment of the
//! argument is below `max_turn` and, when the path supplies a bound on its
//! speed, once `L·h/2 < min(|w0|, |w1|)`. The second condition keeps each half
//! of the interval inside a disk that excludes the origin, so the principal
//! increment is the true one.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::caustic::epicycloid_spec;
use crate::family::{self, FamilyParams};
use crate::{Error, Result};

/// A closed path `t ↦ w(t)` in the plane.
pub trait ClosedPath {
    fn point(&self, t: f64) -> Complex64;

    /// Upper bound on `|dw/dt|` over `[t0, t1]`, if known.
    fn speed_bound(&self, _t0: f64, _t1: f64) -> Option<f64> {
        None
    }
}

impl<F: Fn(f64) -> Complex64> ClosedPath for F {
    fn point(&self, t: f64) -> Complex64 {
        self(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindingStatus {
    Certified,
    NearOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub value: i64,
    pub min_distance: f64,
    /// Number of interval bisections performed.
    pub refinements: usize,
    pub status: WindingStatus,
}

impl WindingReport {
    pub fn is_certified(&self) -> bool {
        self.status == WindingStatus::Certified
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingOptions {
    pub max_turn: f64,
    pub origin_tolerance: f64,
    pub max_points: usize,
    pub initial_intervals: usize,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            max_turn: PI / 2.0,
            origin_tolerance: 1e-9,
            max_points: 1_000_000,
            initial_intervals: 64,
        }
    }
}

const CLOSURE_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-6 * TAU;

fn arg_increment(w0: Complex64, w1: Complex64) -> f64 {
    let q = w1 * w0.conj();
    q.im.atan2(q.re)
}

pub fn winding_closed_curve<P: ClosedPath + ?Sized>(
    path: &P,
    t_start: f64,
    t_end: f64,
    opts: &WindingOptions,
) -> Result<WindingReport> {
    if opts.origin_tolerance.is_nan() || opts.origin_tolerance <= 0.0 {
        return Err(Error::InvalidParams(
            "origin_tolerance must be positive".into(),
        ));
    }
    let w_start = path.point(t_start);
    let w_end = path.point(t_end);
    let gap = (w_start - w_end).norm();
    if gap > CLOSURE_TOL * (1.0 + w_start.norm()) {
        return Err(Error::NotClosed { gap });
    }

    let k = opts.initial_intervals.max(1);
    let ts: Vec<f64> = (0..=k)
        .map(|i| {
            if i == k {
                t_end
            } else {
                t_start + (t_end - t_start) * i as f64 / k as f64
            }
        })
        .collect();
    let ws: Vec<Complex64> = ts.iter().map(|&t| path.point(t)).collect();
    let mut points = ws.len();
    if points > opts.max_points {
        return Err(Error::BudgetExceeded {
            max_points: opts.max_points,
        });
    }

    let mut total = 0.0;
    let mut refinements = 0;
    let mut near = false;
    let mut min_distance = ws.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);

    let mut stack: Vec<(f64, Complex64, f64, Complex64)> = (0..k)
        .rev()
        .map(|i| (ts[i], ws[i], ts[i + 1], ws[i + 1]))
        .collect();

    while let Some((t0, w0, t1, w1)) = stack.pop() {
        let r = w0.norm().min(w1.norm());
        let d = arg_increment(w0, w1);
        if r < opts.origin_tolerance {
            near = true;
            total += d;
            continue;
        }
        let h = t1 - t0;
        let bound_ok = match path.speed_bound(t0, t1) {
            Some(l) => 0.5 * l * h < r,
            None => true,
        };
        if d.abs() < opts.max_turn && bound_ok {
            total += d;
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        if tm <= t0 || tm >= t1 {
            // Interval cannot be split further in floating point.
            near = true;
            total += d;
            continue;
        }
        points += 1;
        if points > opts.max_points {
            return Err(Error::BudgetExceeded {
                max_points: opts.max_points,
            });
        }
        refinements += 1;
        let wm = path.point(tm);
        min_distance = min_distance.min(wm.norm());
        stack.push((tm, wm, t1, w1));
        stack.push((t0, w0, tm, wm));
    }

    let value = (total / TAU).round();
    let residual = (total - value * TAU).abs();
    let status = if near || residual > RESIDUAL_TOL {
        WindingStatus::NearOrigin
    } else {
        WindingStatus::Certified
    };
    Ok(WindingReport {
        value: value as i64,
        min_distance,
        refinements,
        status,
    })
}

struct CausticPath<'a> {
    params: &'a FamilyParams,
    speed: f64,
}

impl ClosedPath for CausticPath<'_> {
    fn point(&self, t: f64) -> Complex64 {
        family::evaluate(self.params, Complex64::from_polar(1.0, t)).expect("nonzero")
    }

    fn speed_bound(&self, _t0: f64, _t1: f64) -> Option<f64> {
        Some(self.speed)
    }
}

pub fn caustic_winding_options(params: &FamilyParams) -> WindingOptions {
    let (_, outer) = epicycloid_spec(params).annulus();
    WindingOptions {
        origin_tolerance: 1e-9 * outer,
        ..WindingOptions::default()
    }
}

/// Winding of `θ ↦ f_a(e^{iθ})`, `θ ∈ [0, 2π]`, about the origin.
pub fn caustic_winding(params: &FamilyParams) -> Result<WindingReport> {
    caustic_winding_with(params, &caustic_winding_options(params))
}

pub fn caustic_winding_with(params: &FamilyParams, opts: &WindingOptions) -> Result<WindingReport> {
    // On |z| = 1, |d/dθ f(e^{iθ})| <= |h'| + |g'| <= 2(a+1).
    let path = CausticPath {
        params,
        speed: 2.0 * (params.a() + 1.0) * (1.0 + 1e-12),
    };
    winding_closed_curve(&path, 0.0, TAU, opts)
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.x0 - slack
            && z.re <= self.x1 + slack
            && z.im >= self.y0 - slack
            && z.im <= self.y1 + slack
    }

    /// Distance from the origin to the closest point of the rectangle.
    pub fn min_modulus(&self) -> f64 {
        let cx = 0.0f64.clamp(self.x0, self.x1);
        let cy = 0.0f64.clamp(self.y0, self.y1);
        cx.hypot(cy)
    }

    pub fn max_modulus(&self) -> f64 {
        self.x0
            .abs()
            .max(self.x1.abs())
            .hypot(self.y0.abs().max(self.y1.abs()))
    }

    /// Counterclockwise boundary, `t ∈ [0, 4]`, one unit per edge.
    pub fn boundary_point(&self, t: f64) -> Complex64 {
        let (edge, s) = edge_of(t);
        let (a, b) = self.edge(edge);
        a + (b - a) * s
    }

    fn edge(&self, k: usize) -> (Complex64, Complex64) {
        let c00 = Complex64::new(self.x0, self.y0);
        let c10 = Complex64::new(self.x1, self.y0);
        let c11 = Complex64::new(self.x1, self.y1);
        let c01 = Complex64::new(self.x0, self.y1);
        match k {
            0 => (c00, c10),
            1 => (c10, c11),
            2 => (c11, c01),
            _ => (c01, c00),
        }
    }
}

fn edge_of(t: f64) -> (usize, f64) {
    let k = (t.floor() as i64).clamp(0, 3) as usize;
    (k, t - k as f64)
}

fn segment_min_modulus(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let s = (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0);
    (a + d * s).norm()
}

/// Upper bound of `|h'| + |g'|` over an annulus `r_lo <= |z| <= r_hi`.
pub(crate) fn derivative_bound(params: &FamilyParams, r_lo: f64, r_hi: f64) -> f64 {
    let n = params.n() as i32;
    (params.a() + 1.0) * (r_hi.powi(n) + r_lo.powi(-n - 1))
}

struct BoxPath<'a> {
    params: &'a FamilyParams,
    rect: Rect,
}

impl ClosedPath for BoxPath<'_> {
    fn point(&self, t: f64) -> Complex64 {
        family::evaluate(self.params, self.rect.boundary_point(t))
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn speed_bound(&self, t0: f64, t1: f64) -> Option<f64> {
        let (k0, _) = edge_of(t0);
        let (k1, s1) = edge_of(t1);
        // Intervals never straddle a corner; t1 may sit exactly on the next one.
        if k1 != k0 && !(k1 == k0 + 1 && s1 == 0.0) {
            return None;
        }
        let z0 = self.rect.boundary_point(t0);
        let z1 = if k1 != k0 {
            self.rect.edge(k0).1
        } else {
            self.rect.boundary_point(t1)
        };
        let r_lo = segment_min_modulus(z0, z1);
        let r_hi = z0.norm().max(z1.norm());
        let (a, b) = self.rect.edge(k0);
        let len = (b - a).norm();
        Some(derivative_bound(self.params, r_lo, r_hi) * len * (1.0 + 1e-9))
    }
}

pub fn box_winding_options(params: &FamilyParams) -> WindingOptions {
    WindingOptions {
        origin_tolerance: 1e-9 * (1.0 + params.a()),
        max_points: 200_000,
        initial_intervals: 16,
        ..WindingOptions::default()
    }
}

/// Sum of the orders of the zeros of `f_a` inside `rect`, which must not
/// contain the pole at the origin.
pub fn box_boundary_winding(params: &FamilyParams, rect: &Rect) -> Result<WindingReport> {
    box_boundary_winding_with(params, rect, &box_winding_options(params))
}

pub fn box_boundary_winding_with(
    params: &FamilyParams,
    rect: &Rect,
    opts: &WindingOptions,
) -> Result<WindingReport> {
    if rect.min_modulus() == 0.0 {
        return Err(Error::InvalidParams(
            "rectangle must not contain the pole at the origin".into(),
        ));
    }
    let mut opts = *opts;
    // Keep corners on the initial grid so no interval straddles an edge.
    opts.initial_intervals = 4 * opts.initial_intervals.div_ceil(4).max(1);
    let path = BoxPath {
        params,
        rect: *rect,
    };
    winding_closed_curve(&path, 0.0, 4.0, &opts)
}
