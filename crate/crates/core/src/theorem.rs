//! Critical parameter values and the three independent zero counts.
//!
//! A right-side crossing `x(a) = -(a+1)c - 1` of the caustic passes through the
//! origin at `a = -1/c - 1`. Crossings are ordered outermost first, so the
//! `j`-th record gives the `j`-th smallest critical value. Each double crossing
//! raises the caustic winding by 2, the single crossing (odd `n` only) by 1,
//! and the total number of zeros is `2(n - W) + 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caustic::{right_side_intersections, IntersectionRecord};
use crate::census::{certify_zeros, CensusOptions};
use crate::family::FamilyParams;
use crate::winding::{caustic_winding, WindingStatus};
use crate::{Error, Result};

/// Window around each `a_j` inside which no prediction is made.
pub const PREDICTION_EXCLUSION: f64 = 1e-9;
/// Allowed gap between the closed form and the winding-jump bisection.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

/// Below this value of `a` the caustic misses the origin (`R + 2r < 1`).
pub fn lower_winding_bound(n: u32) -> f64 {
    let n = f64::from(n);
    n * (n + 1.0) / (2.0 * n + 1.0) - 1.0
}

/// Above this value of `a` the origin lies inside the fixed circle (`R > 1`).
pub fn upper_winding_bound(n: u32) -> f64 {
    let n = f64::from(n);
    n * (n + 1.0) - 1.0
}

pub fn crossing_count(n: u32) -> usize {
    (n as usize).div_ceil(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    /// 1-based.
    pub index: usize,
    pub value: f64,
    pub source: IntersectionRecord,
    /// Location of the winding jump found by bisection, when cross-checked.
    pub bisection: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub n: u32,
    pub values: Vec<CriticalValue>,
}

impl CriticalValueTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn critical_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|v| v.value)
    }

    /// Number of critical values strictly below `a`.
    pub fn passed(&self, a: f64) -> usize {
        self.values.iter().filter(|v| v.value < a).count()
    }

    fn closest(&self, a: f64) -> Option<&CriticalValue> {
        self.values
            .iter()
            .min_by(|p, q| (p.value - a).abs().total_cmp(&(q.value - a).abs()))
    }

    pub fn check_exclusion(&self, a: f64, window: f64) -> Result<()> {
        match self.closest(a) {
            Some(cv) if (cv.value - a).abs() < window => Err(Error::AtCriticalValue {
                a,
                index: cv.index,
                critical: cv.value,
                window,
            }),
            _ => Ok(()),
        }
    }
}

/// Critical values from the closed form only.
pub fn critical_values_closed_form(n: u32) -> Result<CriticalValueTable> {
    let records = right_side_intersections(n)?;
    let values: Vec<CriticalValue> = records
        .into_iter()
        .enumerate()
        .map(|(i, source)| CriticalValue {
            index: i + 1,
            value: source.critical_a(),
            source,
            bisection: None,
        })
        .collect();
    if let Some(w) = values.windows(2).find(|w| w[0].value >= w[1].value) {
        return Err(Error::RootSolverFailure(format!(
            "critical values not strictly increasing: a_{} = {} >= a_{} = {}",
            w[0].index, w[0].value, w[1].index, w[1].value
        )));
    }
    if values.first().is_some_and(|v| v.value <= 1.0) {
        return Err(Error::RootSolverFailure("a_1 <= 1".into()));
    }
    Ok(CriticalValueTable { n, values })
}

pub fn check_exclusion(n: u32, a: f64, window: f64) -> Result<()> {
    critical_values_closed_form(n)?.check_exclusion(a, window)
}

fn winding_at(n: u32, a: f64) -> Result<(i64, WindingStatus)> {
    let w = caustic_winding(&FamilyParams::new(n, a)?)?;
    Ok((w.value, w.status))
}

/// Locates the jump of the caustic winding number inside `(lo, hi)` by bisection.
pub fn winding_jump_bisection(n: u32, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (w_lo, s_lo) = winding_at(n, lo)?;
    let (w_hi, s_hi) = winding_at(n, hi)?;
    if s_lo != WindingStatus::Certified || s_hi != WindingStatus::Certified || w_hi <= w_lo {
        return Err(Error::RootSolverFailure(format!(
            "no certified winding jump in ({lo}, {hi}): W = {w_lo} .. {w_hi}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (w, status) = winding_at(n, mid)?;
        if status == WindingStatus::NearOrigin {
            return Ok(mid);
        }
        if w == w_lo {
            lo = mid;
        } else if w == w_hi {
            hi = mid;
        } else {
            return Err(Error::RootSolverFailure(format!(
                "winding {w} at a = {mid} lies strictly between {w_lo} and {w_hi}"
            )));
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Critical values from the closed form, each confirmed by bisection on the
/// jump of the caustic winding number.
pub fn critical_values(n: u32) -> Result<CriticalValueTable> {
    let mut table = critical_values_closed_form(n)?;
    let values: Vec<f64> = table.critical_values().collect();
    let cap = f64::from(n) * (f64::from(n) + 1.0);
    let located: Vec<Result<f64>> = (0..values.len())
        .into_par_iter()
        .map(|i| {
            let lo = if i == 0 {
                0.5 * (1.0 + values[0])
            } else {
                0.5 * (values[i - 1] + values[i])
            };
            let hi = if i + 1 == values.len() {
                0.5 * (values[i] + cap)
            } else {
                0.5 * (values[i] + values[i + 1])
            };
            winding_jump_bisection(n, lo, hi, 1e-9)
        })
        .collect();
    for (cv, found) in table.values.iter_mut().zip(located) {
        let found = found?;
        if (found - cv.value).abs() > CROSS_CHECK_TOL {
            return Err(Error::CrossCheckFailure {
                index: cv.index,
                closed_form: cv.value,
                bisection: found,
            });
        }
        cv.bisection = Some(found);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Case1,
    Case2Even,
    Case2Odd,
    Case3,
    SmallA,
}

pub fn regime(n: u32, a: f64, table: &CriticalValueTable) -> Regime {
    if a < 1.0 {
        return Regime::SmallA;
    }
    let j = table.passed(a);
    if j == 0 {
        Regime::Case1
    } else if j == table.len() {
        Regime::Case3
    } else if n.is_multiple_of(2) {
        Regime::Case2Even
    } else {
        Regime::Case2Odd
    }
}

/// Zero count from the case analysis on the critical values.
pub fn predicted_count_theorem(n: u32, a: f64, table: &CriticalValueTable) -> Result<u32> {
    if a.is_nan() || a <= 1.0 {
        return Err(Error::InvalidParams(format!(
            "the case analysis needs a > 1, got {a}"
        )));
    }
    table.check_exclusion(a, PREDICTION_EXCLUSION)?;
    let j = table.passed(a) as i64;
    let n = i64::from(n);
    let count = if j == 0 {
        2 * n + 1
    } else if j as usize == table.len() {
        1
    } else if n % 2 == 0 {
        2 * n - 4 * j + 1
    } else {
        2 * n - 4 * j + 3
    };
    Ok(count as u32)
}

/// `2(n - W) + 1` for `a > 1`. For `0 < a < 1` the caustic is traversed
/// clockwise and the sense-preserving region is the disk, giving `2(n + W) + 1`.
pub fn count_from_winding(n: u32, winding: i64, a: f64) -> Result<u32> {
    let n = i64::from(n);
    let count = if a > 1.0 {
        2 * (n - winding) + 1
    } else {
        2 * (n + winding) + 1
    };
    if !(1..=2 * n + 1).contains(&count) {
        return Err(Error::InvalidParams(format!(
            "winding {winding} out of range for n = {n}"
        )));
    }
    Ok(count as u32)
}

pub fn predicted_count_winding(params: &FamilyParams) -> Result<u32> {
    let w = caustic_winding(params)?;
    if !w.is_certified() {
        return Err(Error::NearCriticalValue {
            min_distance: w.min_distance,
        });
    }
    count_from_winding(params.n(), w.value, params.a())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub params: FamilyParams,
    /// `None` for `a < 1`, where the case analysis does not apply.
    pub predicted_theorem: Option<u32>,
    pub predicted_winding: u32,
    pub winding: i64,
    pub census_total: usize,
    pub z_plus: usize,
    pub z_minus: usize,
    pub agree: bool,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub census: CensusOptions,
}

pub fn verify(params: &FamilyParams, opts: &VerifyOptions) -> Result<VerificationReport> {
    let table = critical_values_closed_form(params.n())?;
    verify_with_table(params, &table, opts)
}

pub fn verify_with_table(
    params: &FamilyParams,
    table: &CriticalValueTable,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let (n, a) = (params.n(), params.a());
    let regime = regime(n, a, table);
    let predicted_theorem = if a > 1.0 {
        Some(predicted_count_theorem(n, a, table)?)
    } else {
        None
    };
    let w = caustic_winding(params)?;
    if !w.is_certified() {
        return Err(Error::NearCriticalValue {
            min_distance: w.min_distance,
        });
    }
    let predicted_winding = count_from_winding(n, w.value, a)?;
    let census = certify_zeros(params, &opts.census)?;
    let agree = predicted_theorem.is_none_or(|t| t == predicted_winding)
        && predicted_winding as usize == census.total;
    Ok(VerificationReport {
        params: *params,
        predicted_theorem,
        predicted_winding,
        winding: w.value,
        census_total: census.total,
        z_plus: census.z_plus,
        z_minus: census.z_minus,
        agree,
        regime,
    })
}

#[derive(Debug)]
pub struct SweepEntry {
    pub a: f64,
    pub outcome: Result<VerificationReport>,
}

/// One verification per `a`, in input order; failures are kept per entry.
pub fn sweep(n: u32, a_values: &[f64], opts: &VerifyOptions) -> Result<Vec<SweepEntry>> {
    let table = critical_values_closed_form(n)?;
    Ok(a_values
        .par_iter()
        .map(|&a| SweepEntry {
            a,
            outcome: FamilyParams::new(n, a).and_then(|p| verify_with_table(&p, &table, opts)),
        })
        .collect())
}
