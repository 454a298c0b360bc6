//! JSON and CSV documents emitted by the command-line tool.
//!
//! Every JSON document carries `"schema_version": 1`. CSV floats are written
//! with 17 significant digits.

use serde::{Deserialize, Serialize};

use crate::caustic::{AffineMap, CausticCurve, EpicycloidSpec, Multiplicity};
use crate::census::CensusReport;
use crate::theorem::{CriticalValueTable, Regime, SweepEntry, VerificationReport};
use crate::winding::{WindingReport, WindingStatus};

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_version(v: u32) -> Result<(), String> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(format!("unsupported schema_version {v}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausticRow {
    pub phi: f64,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausticDocument {
    pub schema_version: u32,
    pub n: u32,
    pub a: f64,
    pub epicycloid: EpicycloidSpec,
    pub affine: AffineMap,
    pub samples: Vec<CausticRow>,
}

impl CausticDocument {
    pub fn new(curve: &CausticCurve, epicycloid: EpicycloidSpec, affine: AffineMap) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n: curve.params.n(),
            a: curve.params.a(),
            epicycloid,
            affine,
            samples: curve
                .samples
                .iter()
                .map(|s| CausticRow {
                    phi: s.phi,
                    u: s.point[0],
                    v: s.point[1],
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        check_version(self.schema_version)?;
        if self.samples.len() < 2 {
            return Err("caustic needs at least two samples".into());
        }
        if self.samples.windows(2).any(|w| w[0].phi >= w[1].phi) {
            return Err("caustic samples must be ordered by phi".into());
        }
        Ok(())
    }
}

pub fn caustic_csv(curve: &CausticCurve) -> String {
    let mut s = String::from("phi,u,v\n");
    for p in &curve.samples {
        s.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(p.phi),
            fmt_f64(p.point[0]),
            fmt_f64(p.point[1])
        ));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingDocument {
    pub schema_version: u32,
    pub n: u32,
    pub a: f64,
    pub value: i64,
    pub min_distance: f64,
    pub refinements: usize,
    pub status: WindingStatus,
}

impl WindingDocument {
    pub fn new(n: u32, a: f64, w: &WindingReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n,
            a,
            value: w.value,
            min_distance: w.min_distance,
            refinements: w.refinements,
            status: w.status,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        check_version(self.schema_version)?;
        if self.min_distance < 0.0 {
            return Err("negative min_distance".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueRow {
    pub j: usize,
    pub a: f64,
    pub phi: f64,
    pub multiplicity: Multiplicity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisection: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValuesDocument {
    pub schema_version: u32,
    pub n: u32,
    #[serde(rename = "N")]
    pub count: usize,
    pub values: Vec<CriticalValueRow>,
}

impl CriticalValuesDocument {
    pub fn new(table: &CriticalValueTable) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n: table.n,
            count: table.len(),
            values: table
                .values
                .iter()
                .map(|v| CriticalValueRow {
                    j: v.index,
                    a: v.value,
                    phi: v.source.phi,
                    multiplicity: v.source.multiplicity,
                    bisection: v.bisection,
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        check_version(self.schema_version)?;
        if self.count != (self.n as usize).div_ceil(2) || self.values.len() != self.count {
            return Err(format!("expected {} critical values", self.n.div_ceil(2)));
        }
        if self.values.windows(2).any(|w| w[0].a >= w[1].a) {
            return Err("critical values must be strictly increasing".into());
        }
        if self.values.iter().enumerate().any(|(i, v)| v.j != i + 1) {
            return Err("critical values must be indexed 1..N".into());
        }
        Ok(())
    }
}

pub fn critical_values_csv(table: &CriticalValueTable) -> String {
    let mut s = String::from("j,a,phi,multiplicity\n");
    for v in &table.values {
        let m = match v.source.multiplicity {
            Multiplicity::Double => "double",
            Multiplicity::Single => "single",
        };
        s.push_str(&format!(
            "{},{},{},{m}\n",
            v.index,
            fmt_f64(v.value),
            fmt_f64(v.source.phi)
        ));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRow {
    pub re: f64,
    pub im: f64,
    pub order: i32,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusDocument {
    pub schema_version: u32,
    pub n: u32,
    pub a: f64,
    pub zeros: Vec<ZeroRow>,
    pub z_plus: usize,
    pub z_minus: usize,
    pub total: usize,
    pub order_sum: i64,
    pub consistent: bool,
    pub warnings: Vec<String>,
}

impl CensusDocument {
    pub fn new(report: &CensusReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n: report.params.n(),
            a: report.params.a(),
            zeros: report
                .zeros
                .iter()
                .map(|z| ZeroRow {
                    re: z.location.re,
                    im: z.location.im,
                    order: z.order,
                    residual: z.residual,
                })
                .collect(),
            z_plus: report.z_plus,
            z_minus: report.z_minus,
            total: report.total,
            order_sum: report.order_sum,
            consistent: report.consistent,
            warnings: report.warnings.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        check_version(self.schema_version)?;
        if self.total != self.z_plus + self.z_minus || self.total != self.zeros.len() {
            return Err("total must equal z_plus + z_minus and the number of zeros".into());
        }
        if self.order_sum != self.z_plus as i64 - self.z_minus as i64 {
            return Err("order_sum must equal z_plus - z_minus".into());
        }
        if self.zeros.iter().any(|z| z.order != 1 && z.order != -1) {
            return Err("orders must be +1 or -1".into());
        }
        if self.zeros.iter().filter(|z| z.order == 1).count() != self.z_plus {
            return Err("z_plus disagrees with the zero list".into());
        }
        let sorted = self
            .zeros
            .windows(2)
            .all(|w| w[0].re < w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im));
        if !sorted {
            return Err("zeros must be sorted by real then imaginary part".into());
        }
        Ok(())
    }
}

pub fn census_csv(report: &CensusReport) -> String {
    let mut s = String::from("re,im,order,residual\n");
    for z in &report.zeros {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(z.location.re),
            fmt_f64(z.location.im),
            z.order,
            fmt_f64(z.residual)
        ));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDocument {
    pub schema_version: u32,
    pub n: u32,
    pub a: f64,
    pub count: u32,
    pub regime: Regime,
}

impl CountDocument {
    pub fn validate(&self) -> Result<(), String> {
        check_version(self.schema_version)?;
        if self.count.is_multiple_of(2) || self.count > 2 * self.n + 1 {
            return Err(format!(
                "count {} impossible for n = {}",
                self.count, self.n
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub schema_version: u32,
    pub n: u32,
    pub a: f64,
    pub predicted_theorem: Option<u32>,
    pub predicted_winding: u32,
    pub winding: i64,
    pub census_total: usize,
    /// Same as `census_total`.
    pub total: usize,
    pub z_plus: usize,
    pub z_minus: usize,
    pub agree: bool,
    pub regime: Regime,
}

impl VerifyDocument {
    pub fn new(r: &VerificationReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n: r.params.n(),
            a: r.params.a(),
            predicted_theorem: r.predicted_theorem,
            predicted_winding: r.predicted_winding,
            winding: r.winding,
            census_total: r.census_total,
            total: r.census_total,
            z_plus: r.z_plus,
            z_minus: r.z_minus,
            agree: r.agree,
            regime: r.regime,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        check_version(self.schema_version)?;
        if self.total != self.census_total || self.total != self.z_plus + self.z_minus {
            return Err("inconsistent totals".into());
        }
        let agree = self
            .predicted_theorem
            .is_none_or(|t| t == self.predicted_winding)
            && self.predicted_winding as usize == self.census_total;
        if agree != self.agree {
            return Err("agree flag disagrees with the counts".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerifyDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub schema_version: u32,
    pub n: u32,
    pub entries: Vec<SweepRow>,
}

impl SweepDocument {
    pub fn new(n: u32, entries: &[SweepEntry]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n,
            entries: entries
                .iter()
                .map(|e| match &e.outcome {
                    Ok(r) => SweepRow {
                        a: e.a,
                        report: Some(VerifyDocument::new(r)),
                        error: None,
                    },
                    Err(err) => SweepRow {
                        a: e.a,
                        report: None,
                        error: Some(err.to_string()),
                    },
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        check_version(self.schema_version)?;
        for row in &self.entries {
            match (&row.report, &row.error) {
                (Some(r), None) => r.validate()?,
                (None, Some(_)) => {}
                _ => return Err("each sweep entry needs exactly one of report or error".into()),
            }
        }
        Ok(())
    }
}

pub fn sweep_csv(doc: &SweepDocument) -> String {
    let mut s = String::from("a,predicted_theorem,predicted_winding,census_total,agree,error\n");
    for row in &doc.entries {
        match (&row.report, &row.error) {
            (Some(r), _) => s.push_str(&format!(
                "{},{},{},{},{},\n",
                fmt_f64(row.a),
                r.predicted_theorem
                    .map(|t| t.to_string())
                    .unwrap_or_default(),
                r.predicted_winding,
                r.census_total,
                r.agree
            )),
            (None, e) => s.push_str(&format!(
                "{},,,,,\"{}\"\n",
                fmt_f64(row.a),
                e.as_deref().unwrap_or("").replace('"', "'")
            )),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = fmt_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
