//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use harmonic_census::caustic::{
    caustic_point, caustic_point_via_family, right_side_intersections, Multiplicity,
};
use harmonic_census::census::{certify_zeros, CensusOptions};
use harmonic_census::family::{containment_radii, dilatation_modulus, evaluate, jacobian};
use harmonic_census::theorem::{
    critical_values, critical_values_closed_form, lower_winding_bound, predicted_count_theorem,
    verify, VerifyOptions,
};
use harmonic_census::winding::caustic_winding;
use harmonic_census::FamilyParams;
use num_complex::Complex64;
use rand::Rng;

mod common;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(n: u32, a: f64) -> Result<FamilyParams, String> {
    FamilyParams::new(n, a).map_err(|e| e.to_string())
}

fn winding(n: u32, a: f64) -> Result<i64, String> {
    let r = caustic_winding(&params(n, a)?).map_err(|e| e.to_string())?;
    ensure(r.is_certified(), || {
        format!("winding not certified at n={n} a={a}")
    })?;
    Ok(r.value)
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.1?}, limit {limit:?}")
    })
}

fn reference_counts_n4() -> Outcome {
    let start = Instant::now();
    let table = critical_values_closed_form(4).map_err(|e| e.to_string())?;
    for (a, total, w) in [(1.1, 9, 0), (1.37, 5, 2), (3.54, 1, 4)] {
        let p = params(4, a)?;
        let census = certify_zeros(&p, &CensusOptions::default()).map_err(|e| e.to_string())?;
        ensure(census.total == total, || {
            format!("a={a}: census {} != {total}", census.total)
        })?;
        let got = winding(4, a)?;
        ensure(got == w, || format!("a={a}: winding {got} != {w}"))?;
        let t = predicted_count_theorem(4, a, &table).map_err(|e| e.to_string())?;
        ensure(t as usize == total, || {
            format!("a={a}: theorem {t} != {total}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "totals 9/5/1, windings 0/2/4 in {:.2?}",
        start.elapsed()
    ))
}

fn full_verification() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 4..=7u32 {
        let table = critical_values_closed_form(n).map_err(|e| e.to_string())?;
        ensure(table.len() as u32 == n.div_ceil(2), || {
            format!("n={n}: table length {}", table.len())
        })?;
        for a in common::interval_samples(n) {
            let r = verify(&params(n, a)?, &VerifyOptions::default()).map_err(|e| e.to_string())?;
            ensure(r.agree && r.predicted_theorem.is_some(), || {
                format!("n={n} a={a}: {r:?}")
            })?;
            checked += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "{checked} intervals in agreement in {:.2?}",
        start.elapsed()
    ))
}

fn count_winding_identity() -> Outcome {
    let mut rng = common::rng(2024);
    for _ in 0..30 {
        let n = rng.gen_range(4..=8);
        let a = common::non_critical_a(&mut rng, n, 1e-3);
        let p = params(n, a)?;
        let w = winding(n, a)?;
        let census = certify_zeros(&p, &CensusOptions::default()).map_err(|e| e.to_string())?;
        ensure(census.total as i64 == 2 * (i64::from(n) - w) + 1, || {
            format!("n={n} a={a}: total {} with winding {w}", census.total)
        })?;
        ensure(census.order_sum == 1, || {
            format!("n={n} a={a}: order sum {}", census.order_sum)
        })?;
    }
    Ok("30 random parameters".into())
}

fn winding_bounds() -> Outcome {
    for n in 4..=8u32 {
        let low = lower_winding_bound(n) * 0.999;
        if low > 1.0 {
            let w = winding(n, low)?;
            ensure(w == 0, || format!("n={n} a={low}: winding {w}"))?;
        }
        let high = (f64::from(n * (n + 1)) - 1.0) * 1.001;
        let w = winding(n, high)?;
        ensure(w == i64::from(n), || format!("n={n} a={high}: winding {w}"))?;
    }
    Ok("n = 4..8".into())
}

fn intersection_structure() -> Outcome {
    for n in 4..=12u32 {
        let recs = right_side_intersections(n).map_err(|e| e.to_string())?;
        ensure(recs.len() as u32 == n.div_ceil(2), || {
            format!("n={n}: {} records", recs.len())
        })?;
        let singles: Vec<_> = recs
            .iter()
            .filter(|r| r.multiplicity == Multiplicity::Single)
            .collect();
        if n % 2 == 1 {
            ensure(singles.len() == 1, || {
                format!("n={n}: {} single records", singles.len())
            })?;
            let phi = singles[0].phi;
            ensure((phi - f64::from(n) * PI).abs() < 1e-10, || {
                format!("n={n}: single at {phi}")
            })?;
        } else {
            ensure(singles.is_empty(), || {
                format!("n={n}: unexpected single record")
            })?;
        }
    }
    Ok("n = 4..12".into())
}

fn critical_cross_check() -> Outcome {
    let mut worst = 0.0f64;
    for n in 4..=8u32 {
        let table = critical_values(n).map_err(|e| e.to_string())?;
        for cv in &table.values {
            let b = cv
                .bisection
                .ok_or_else(|| format!("n={n}: missing bisection"))?;
            worst = worst.max((b - cv.value).abs());
        }
        if n == 4 {
            let v: Vec<f64> = table.critical_values().collect();
            let b: Vec<f64> = table.values.iter().filter_map(|c| c.bisection).collect();
            for x in [v[0], b[0]] {
                ensure(x > 1.1 && x < 1.37, || format!("a_1 = {x}"))?;
            }
            for x in [v[1], b[1]] {
                ensure(x > 1.37 && x < 3.54, || format!("a_2 = {x}"))?;
            }
        }
    }
    ensure(worst <= 1e-6, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn small_a_constancy() -> Outcome {
    let mut totals = Vec::new();
    for n in [4u32, 5] {
        let t: Vec<usize> = [0.2, 0.5, 0.9]
            .iter()
            .map(|&a| {
                let p = params(n, a)?;
                certify_zeros(&p, &CensusOptions::default())
                    .map(|c| c.total)
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        ensure(t.iter().all(|&x| x == t[0]), || {
            format!("n={n}: totals {t:?}")
        })?;
        totals.push(format!("n={n}: {}", t[0]));
    }
    Ok(totals.join(", "))
}

fn numerical_hygiene() -> Outcome {
    let mut rng = common::rng(8);
    let h = 1e-6;
    let mut worst_fd = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.gen_range(4..=8);
        let a = if rng.gen_bool(0.8) {
            rng.gen_range(1.01..72.0)
        } else {
            rng.gen_range(0.05..0.99)
        };
        let p = params(n, a)?;
        let radii = containment_radii(&p);
        let z = Complex64::from_polar(
            rng.gen_range(radii.rho_min..radii.r_max),
            rng.gen_range(0.0..TAU),
        );
        let f = |w: Complex64| evaluate(&p, w).map_err(|e| e.to_string());
        let dx = (f(z + h)? - f(z - h)?) / (2.0 * h);
        let i = Complex64::new(0.0, h);
        let dy = (f(z + i)? - f(z - i)?) / (2.0 * h);
        let j = jacobian(&p, z).map_err(|e| e.to_string())?.entries;
        let err = [
            j[0][0] - dx.re,
            j[1][0] - dx.im,
            j[0][1] - dy.re,
            j[1][1] - dy.im,
        ]
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
        let norm = j.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        worst_fd = worst_fd.max(err / norm);
    }
    ensure(worst_fd < 1e-5, || {
        format!("finite-difference error {worst_fd:e}")
    })?;

    let mut worst_dil = 0.0f64;
    for _ in 0..1_000 {
        let p = params(rng.gen_range(4..=8), rng.gen_range(1.01..72.0))?;
        let z = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
        let m = dilatation_modulus(&p, z).map_err(|e| e.to_string())?;
        worst_dil = worst_dil.max((m - 1.0).abs());
    }
    ensure(worst_dil <= 1e-9, || {
        format!("dilatation error {worst_dil:e}")
    })?;

    let mut worst_route = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.gen_range(4..=8);
        let p = params(n, rng.gen_range(1.01..72.0))?;
        let phi = rng.gen_range(0.0..2.0 * f64::from(n) * PI);
        let (u, v) = (caustic_point(&p, phi), caustic_point_via_family(&p, phi));
        worst_route = worst_route.max((u[0] - v[0]).abs().max((u[1] - v[1]).abs()));
    }
    ensure(worst_route <= 1e-10, || {
        format!("route deviation {worst_route:e}")
    })?;
    Ok(format!(
        "fd {worst_fd:.1e}, dilatation {worst_dil:.1e}, routes {worst_route:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("reference counts for n = 4", reference_counts_n4),
        (
            "theorem, winding and census agree for n = 4..7",
            full_verification,
        ),
        (
            "total = 2(n - W) + 1 and order sum 1",
            count_winding_identity,
        ),
        (
            "winding vanishes below and saturates above the bounds",
            winding_bounds,
        ),
        ("right-side intersection structure", intersection_structure),
        (
            "closed-form critical values match winding jumps",
            critical_cross_check,
        ),
        ("constant count for 0 < a < 1", small_a_constancy),
        ("numerical hygiene", numerical_hygiene),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
