//! Certified zero census by argument-principle subdivision.
//!
//! The search region is the square annulus between the square of half-width
//! `rho_min/2` and the square of half-width `r_max`, tiled by eight rectangles so
//! that no cell contains the pole. Each cell carries the winding number of its
//! boundary image, which equals the sum of the orders of the zeros inside.
//!
//! Away from the unit circle all zeros in a cell share one order, so a cell with
//! winding `±1` holds exactly one zero and is handed to Newton. Cells crossing
//! the circle can hide a `(+1, -1)` pair behind a zero winding; those are
//! subdivided down to `cell_min` unless a Lipschitz bound proves them zero-free.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::family::{self, containment_radii, FamilyParams};
use crate::theorem;
use crate::winding::{
    box_boundary_winding_with, box_winding_options, derivative_bound, Rect, WindingOptions,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusOptions {
    /// Residual tolerance relative to `1 + |a|`.
    pub tol_f_rel: f64,
    /// Newton step tolerance.
    pub tol_z: f64,
    /// Singularity threshold relative to `|h'|^2 + |g'|^2`.
    pub tol_det_rel: f64,
    pub max_iters: usize,
    /// Smallest cell diameter, relative to `r_max`.
    pub cell_min_rel: f64,
    pub critical_exclusion: f64,
    pub max_jitter: usize,
    /// Cell budget per root cell.
    pub max_cells: usize,
    /// Box winding options; `None` selects [`box_winding_options`].
    pub winding: Option<WindingOptions>,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            tol_f_rel: 1e-10,
            tol_z: 1e-12,
            tol_det_rel: 1e-8,
            max_iters: 50,
            cell_min_rel: 1e-3,
            critical_exclusion: 1e-6,
            max_jitter: 5,
            max_cells: 500_000,
            winding: None,
        }
    }
}

impl CensusOptions {
    pub fn tol_f(&self, params: &FamilyParams) -> f64 {
        self.tol_f_rel * (1.0 + params.a().abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCertificate {
    pub location: Complex64,
    pub order: i32,
    pub residual: f64,
    pub jacobian_det: f64,
    pub cell: Option<Rect>,
    pub iterations: usize,
    /// `|f|` at each Newton iterate.
    #[serde(skip)]
    pub residual_history: Vec<f64>,
}

/// A terminal cell of the subdivision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub rect: Rect,
    pub winding: i64,
    pub crosses_circle: bool,
    pub plus_found: usize,
    pub minus_found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub params: FamilyParams,
    pub zeros: Vec<ZeroCertificate>,
    pub z_plus: usize,
    pub z_minus: usize,
    pub total: usize,
    pub order_sum: i64,
    /// Total matches the count predicted from the caustic winding number.
    pub consistent: bool,
    pub predicted_total: Option<u32>,
    /// Sum of the boundary windings of the eight root cells.
    pub root_winding_sum: i64,
    pub leaves: Vec<Leaf>,
    pub cells_visited: usize,
    pub warnings: Vec<String>,
}

fn singularity_scale(params: &FamilyParams, z: Complex64) -> Result<f64> {
    let w = family::wirtinger_derivatives(params, z)?;
    Ok(w.dh.norm_sqr() + w.dg.norm_sqr())
}

pub fn classify_order(params: &FamilyParams, z: Complex64, opts: &CensusOptions) -> Result<i32> {
    let det = family::jacobian(params, z)?.det;
    let tol = opts.tol_det_rel * singularity_scale(params, z)?;
    if det.abs() <= tol {
        return Err(Error::SingularPoint {
            re: z.re,
            im: z.im,
            det,
        });
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// Two-dimensional Newton iteration on `(u, v)`.
pub fn refine_zero(
    params: &FamilyParams,
    seed: Complex64,
    opts: &CensusOptions,
) -> Result<ZeroCertificate> {
    let tol_f = opts.tol_f(params);
    let mut z = seed;
    let mut history = Vec::new();
    for it in 0..=opts.max_iters {
        let f = family::evaluate(params, z)?;
        let residual = f.norm();
        history.push(residual);
        let jac = family::jacobian(params, z)?;
        let tol_det = opts.tol_det_rel * singularity_scale(params, z)?;
        if jac.det.abs() <= tol_det {
            return Err(if residual < tol_f {
                Error::SingularZeroSuspected {
                    re: z.re,
                    im: z.im,
                    det: jac.det,
                }
            } else {
                Error::SingularJacobian {
                    re: z.re,
                    im: z.im,
                    det: jac.det,
                }
            });
        }
        let step = jac.solve([-f.re, -f.im]).ok_or(Error::SingularJacobian {
            re: z.re,
            im: z.im,
            det: jac.det,
        })?;
        let step = Complex64::new(step[0], step[1]);
        if residual < tol_f && step.norm() < opts.tol_z {
            let next = z + step;
            let next_residual = family::evaluate(params, next)?.norm();
            let (location, residual) = if next_residual <= residual {
                (next, next_residual)
            } else {
                (z, residual)
            };
            let det = family::jacobian(params, location)?.det;
            return Ok(ZeroCertificate {
                location,
                order: if det > 0.0 { 1 } else { -1 },
                residual,
                jacobian_det: det,
                cell: None,
                iterations: it,
                residual_history: history,
            });
        }
        z += step;
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > 1e6 || z.norm() < 1e-6 {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iters,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

#[derive(Default)]
struct Outcome {
    zeros: Vec<ZeroCertificate>,
    leaves: Vec<Leaf>,
    warnings: Vec<String>,
    cells: usize,
}

struct Ctx<'a> {
    params: &'a FamilyParams,
    opts: &'a CensusOptions,
    winding: WindingOptions,
    cell_min: f64,
    merge_tol: f64,
}

fn crosses_unit_circle(rect: &Rect) -> bool {
    rect.min_modulus() <= 1.0 && rect.max_modulus() >= 1.0
}

fn fmt_rect(r: &Rect) -> String {
    format!("[{:.6}, {:.6}]x[{:.6}, {:.6}]", r.x0, r.x1, r.y0, r.y1)
}

impl Ctx<'_> {
    fn winding(&self, rect: &Rect) -> Option<i64> {
        match box_boundary_winding_with(self.params, rect, &self.winding) {
            Ok(w) if w.is_certified() => Some(w.value),
            _ => None,
        }
    }

    /// True when `|f(center)|` exceeds the largest change `f` can make across the cell.
    fn provably_zero_free(&self, rect: &Rect) -> bool {
        let Ok(fc) = family::evaluate(self.params, rect.center()) else {
            return false;
        };
        let bound = derivative_bound(self.params, rect.min_modulus(), rect.max_modulus());
        fc.norm() > bound * 0.5 * rect.diameter() * (1.0 + 1e-9)
    }

    /// Newton from a 3×3 seed grid; keeps distinct zeros that land inside `rect`.
    fn zeros_in_cell(
        &self,
        rect: &Rect,
        stop_after: Option<usize>,
    ) -> Result<Vec<ZeroCertificate>> {
        let mut found: Vec<ZeroCertificate> = Vec::new();
        let slack = 1e-9 * rect.diameter();
        let fractions = [0.5, 1.0 / 6.0, 5.0 / 6.0];
        for &fy in &fractions {
            for &fx in &fractions {
                let seed =
                    Complex64::new(rect.x0 + fx * rect.width(), rect.y0 + fy * rect.height());
                match refine_zero(self.params, seed, self.opts) {
                    Ok(mut cert) => {
                        if !rect.contains(cert.location, slack) {
                            continue;
                        }
                        if found
                            .iter()
                            .all(|z| (z.location - cert.location).norm() > self.merge_tol)
                        {
                            cert.cell = Some(*rect);
                            found.push(cert);
                            if stop_after.is_some_and(|k| found.len() >= k) {
                                return Ok(found);
                            }
                        }
                    }
                    Err(e @ Error::SingularZeroSuspected { .. }) => {
                        if rect.contains(seed, 0.0) {
                            return Err(e);
                        }
                    }
                    Err(_) => {}
                }
            }
        }
        Ok(found)
    }

    fn leaf(&self, rect: &Rect, winding: i64, zeros: Vec<ZeroCertificate>, out: &mut Outcome) {
        let plus_found = zeros.iter().filter(|z| z.order > 0).count();
        let minus_found = zeros.len() - plus_found;
        out.leaves.push(Leaf {
            rect: *rect,
            winding,
            crosses_circle: crosses_unit_circle(rect),
            plus_found,
            minus_found,
        });
        out.zeros.extend(zeros);
    }

    fn check_leaf_sum(
        &self,
        rect: &Rect,
        winding: i64,
        zeros: &[ZeroCertificate],
        out: &mut Outcome,
    ) {
        let sum: i64 = zeros.iter().map(|z| i64::from(z.order)).sum();
        if sum != winding {
            out.warnings.push(format!(
                "cell {} has winding {winding} but its zeros sum to {sum}",
                fmt_rect(rect)
            ));
        }
    }

    fn children(&self, rect: &Rect, attempt: usize) -> Vec<Rect> {
        let diam = rect.diameter();
        let jitter = attempt as f64 * 1e-7 * diam;
        let mx = 0.5 * (rect.x0 + rect.x1) + jitter;
        let my = 0.5 * (rect.y0 + rect.y1) + 0.618 * jitter;
        if rect.width() > 2.0 * rect.height() {
            vec![
                Rect::new(rect.x0, mx, rect.y0, rect.y1),
                Rect::new(mx, rect.x1, rect.y0, rect.y1),
            ]
        } else if rect.height() > 2.0 * rect.width() {
            vec![
                Rect::new(rect.x0, rect.x1, rect.y0, my),
                Rect::new(rect.x0, rect.x1, my, rect.y1),
            ]
        } else {
            vec![
                Rect::new(rect.x0, mx, rect.y0, my),
                Rect::new(mx, rect.x1, rect.y0, my),
                Rect::new(rect.x0, mx, my, rect.y1),
                Rect::new(mx, rect.x1, my, rect.y1),
            ]
        }
    }

    fn subdivide(&self, rect: &Rect, winding: i64, out: &mut Outcome) -> Result<()> {
        for attempt in 0..=self.opts.max_jitter {
            let kids = self.children(rect, attempt);
            let windings: Option<Vec<i64>> = kids.iter().map(|k| self.winding(k)).collect();
            let Some(windings) = windings else { continue };
            if windings.iter().sum::<i64>() != winding {
                continue;
            }
            for (kid, w) in kids.iter().zip(windings) {
                self.process(kid, w, out)?;
            }
            return Ok(());
        }
        out.warnings.push(format!(
            "could not certify an additive split of cell {} (winding {winding})",
            fmt_rect(rect)
        ));
        let zeros = self.zeros_in_cell(rect, None)?;
        self.leaf(rect, winding, zeros, out);
        Ok(())
    }

    fn process(&self, rect: &Rect, winding: i64, out: &mut Outcome) -> Result<()> {
        out.cells += 1;
        if out.cells > self.opts.max_cells {
            return Err(Error::BudgetExceeded {
                max_points: self.opts.max_cells,
            });
        }
        let small = rect.diameter() <= self.cell_min;

        if !crosses_unit_circle(rect) {
            if winding == 0 {
                self.leaf(rect, 0, Vec::new(), out);
                return Ok(());
            }
            let expected = self.params.expected_order_at_modulus(rect.center().norm());
            if winding.signum() != i64::from(expected) {
                out.warnings.push(format!(
                    "cell {} has winding {winding} of the wrong sign for its region",
                    fmt_rect(rect)
                ));
                self.leaf(rect, winding, Vec::new(), out);
                return Ok(());
            }
            if winding.abs() == 1 {
                let zeros = self.zeros_in_cell(rect, Some(1))?;
                if zeros.len() == 1 {
                    self.leaf(rect, winding, zeros, out);
                    return Ok(());
                }
            }
            if small {
                let zeros = self.zeros_in_cell(rect, None)?;
                self.check_leaf_sum(rect, winding, &zeros, out);
                self.leaf(rect, winding, zeros, out);
                return Ok(());
            }
            return self.subdivide(rect, winding, out);
        }

        if self.provably_zero_free(rect) {
            if winding != 0 {
                out.warnings.push(format!(
                    "cell {} is provably zero-free but has winding {winding}",
                    fmt_rect(rect)
                ));
            }
            self.leaf(rect, winding, Vec::new(), out);
            return Ok(());
        }
        if small {
            let zeros = self.zeros_in_cell(rect, None)?;
            self.check_leaf_sum(rect, winding, &zeros, out);
            self.leaf(rect, winding, zeros, out);
            return Ok(());
        }
        self.subdivide(rect, winding, out)
    }
}

/// Eight rectangles tiling the square annulus `inner < max(|x|, |y|) < outer`.
pub fn root_tiling(inner: f64, outer: f64) -> Vec<Rect> {
    let g = [-outer, -inner, inner, outer];
    let mut cells = Vec::with_capacity(8);
    for j in 0..3 {
        for i in 0..3 {
            if i == 1 && j == 1 {
                continue;
            }
            cells.push(Rect::new(g[i], g[i + 1], g[j], g[j + 1]));
        }
    }
    cells
}

/// Finds every zero of `f_a` with its order.
pub fn certify_zeros(params: &FamilyParams, opts: &CensusOptions) -> Result<CensusReport> {
    if params.a() > 1.0 {
        theorem::check_exclusion(params.n(), params.a(), opts.critical_exclusion)?;
    }
    let radii = containment_radii(params);
    let ctx = Ctx {
        params,
        opts,
        winding: opts.winding.unwrap_or_else(|| box_winding_options(params)),
        cell_min: opts.cell_min_rel * radii.r_max,
        merge_tol: 10.0 * opts.tol_z,
    };

    let mut warnings = Vec::new();
    let mut roots = None;
    for attempt in 0..=opts.max_jitter {
        let inner = 0.5 * radii.rho_min * (1.0 - 0.05 * attempt as f64);
        let cells = root_tiling(inner, radii.r_max);
        let windings: Vec<Option<i64>> = cells.par_iter().map(|c| ctx.winding(c)).collect();
        if let Some(ws) = windings.into_iter().collect::<Option<Vec<i64>>>() {
            roots = Some((cells, ws));
            break;
        }
    }
    let Some((cells, root_windings)) = roots else {
        return Err(Error::InconsistentCensus(Box::new(CensusReport {
            params: *params,
            zeros: Vec::new(),
            z_plus: 0,
            z_minus: 0,
            total: 0,
            order_sum: 0,
            consistent: false,
            predicted_total: None,
            root_winding_sum: 0,
            leaves: Vec::new(),
            cells_visited: 0,
            warnings: vec!["could not certify the windings of the root tiling".into()],
        })));
    };

    let outcomes: Vec<Result<Outcome>> = cells
        .par_iter()
        .zip(root_windings.par_iter())
        .map(|(cell, &w)| {
            let mut out = Outcome::default();
            ctx.process(cell, w, &mut out)?;
            Ok(out)
        })
        .collect();

    let mut zeros: Vec<ZeroCertificate> = Vec::new();
    let mut leaves = Vec::new();
    let mut cells_visited = 0;
    for outcome in outcomes {
        let outcome = outcome?;
        cells_visited += outcome.cells;
        warnings.extend(outcome.warnings);
        leaves.extend(outcome.leaves);
        for z in outcome.zeros {
            match zeros
                .iter_mut()
                .find(|q| (q.location - z.location).norm() <= ctx.merge_tol)
            {
                Some(q) => q.residual = q.residual.min(z.residual),
                None => zeros.push(z),
            }
        }
    }
    zeros.sort_by(|p, q| {
        p.location
            .re
            .total_cmp(&q.location.re)
            .then(p.location.im.total_cmp(&q.location.im))
    });

    let tol_f = opts.tol_f(params);
    for z in &zeros {
        if z.residual >= tol_f {
            warnings.push(format!(
                "zero at {} has residual {:e}",
                z.location, z.residual
            ));
        }
        if z.order != params.expected_order_at_modulus(z.location.norm()) {
            warnings.push(format!(
                "zero at {} has order {} inconsistent with its region",
                z.location, z.order
            ));
        }
    }

    let z_plus = zeros.iter().filter(|z| z.order > 0).count();
    let z_minus = zeros.len() - z_plus;
    let order_sum = z_plus as i64 - z_minus as i64;
    let root_winding_sum: i64 = root_windings.iter().sum();
    if root_winding_sum != order_sum {
        warnings.push(format!(
            "root cells wind {root_winding_sum} times but the zeros' orders sum to {order_sum}"
        ));
    }

    let predicted_total = theorem::predicted_count_winding(params).ok();
    let total = zeros.len();
    let consistent = predicted_total == Some(total as u32);

    let report = CensusReport {
        params: *params,
        zeros,
        z_plus,
        z_minus,
        total,
        order_sum,
        consistent,
        predicted_total,
        root_winding_sum,
        leaves,
        cells_visited,
        warnings,
    };
    if report.warnings.is_empty() {
        Ok(report)
    } else {
        Err(Error::InconsistentCensus(Box::new(report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, a: f64) -> FamilyParams {
        FamilyParams::new(n, a).unwrap()
    }

    #[test]
    fn classify_by_region() {
        let opts = CensusOptions::default();
        let params = p(4, 2.0);
        assert_eq!(
            classify_order(&params, Complex64::new(1.3, 0.4), &opts).unwrap(),
            1
        );
        assert_eq!(
            classify_order(&params, Complex64::new(0.3, -0.4), &opts).unwrap(),
            -1
        );
        assert!(matches!(
            classify_order(&params, Complex64::from_polar(1.0, 0.77), &opts),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn newton_fixed_point() {
        let params = p(4, 3.54);
        let opts = CensusOptions::default();
        let z = refine_zero(&params, Complex64::new(1.1, 0.0), &opts).unwrap();
        let again = refine_zero(&params, z.location, &opts).unwrap();
        assert!((again.location - z.location).norm() < 1e-14);
        assert_eq!(again.iterations, 0);
    }

    #[test]
    fn newton_converges_quadratically() {
        let params = p(4, 3.54);
        let z = refine_zero(&params, Complex64::new(1.3, 0.2), &CensusOptions::default()).unwrap();
        let h = &z.residual_history;
        assert!(h.len() >= 3);
        // Once in the asymptotic regime, r_{k+1} <= C r_k^2.
        let ratios: Vec<f64> = h
            .windows(2)
            .filter(|w| w[0] < 1e-2 && w[1] > 1e-14)
            .map(|w| w[1] / (w[0] * w[0]))
            .collect();
        assert!(!ratios.is_empty());
        assert!(ratios.iter().all(|&r| r < 100.0), "{ratios:?}");
    }

    #[test]
    fn newton_on_critical_curve_is_singular() {
        let err = refine_zero(
            &p(4, 3.0),
            Complex64::new(1.0, 0.0),
            &CensusOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::SingularJacobian { .. }));
    }

    #[test]
    fn root_tiling_covers_square_annulus() {
        let cells = root_tiling(0.2, 2.0);
        assert_eq!(cells.len(), 8);
        assert!(cells.iter().all(|c| c.min_modulus() > 0.0));
        let area: f64 = cells.iter().map(|c| c.width() * c.height()).sum();
        assert!((area - (16.0 - 0.16)).abs() < 1e-12);
    }

    #[test]
    fn census_n4_large_a() {
        let r = certify_zeros(&p(4, 3.54), &CensusOptions::default()).unwrap();
        assert_eq!((r.total, r.z_plus, r.z_minus), (1, 1, 0));
        assert!(r.consistent);
        assert_eq!(r.order_sum, 1);
    }

    #[test]
    fn census_refuses_critical_value() {
        let a_1 = crate::caustic::right_side_intersections(4).unwrap()[1].critical_a();
        let err = certify_zeros(&p(4, a_1 + 1e-8), &CensusOptions::default()).unwrap_err();
        assert!(matches!(err, Error::AtCriticalValue { .. }));
    }
}
