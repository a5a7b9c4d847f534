//! Statistical verification harness: uniformity reports against a
//! rejection-sampling oracle, autocorrelation-based mixing proxies, the
//! direct-product scaling experiment, and startup checks.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::sync::Arc;

use crate::barrier;
use crate::body::{BarrierWeights, BodySpec};
use crate::chain::{AggregateModel, ChainConfig, ChainState};
use crate::error::{Error, Result};
use crate::geometry;
use crate::linalg;

/// Minimum sample count the uniformity report accepts.
pub const MIN_SAMPLES: usize = 1_000;

// --- autocorrelation ------------------------------------------------------

/// Integrated autocorrelation time of a scalar series with a Sokal-style
/// relative error bar, using Geyer's initial-positive-sequence
/// truncation. The laziness floor makes τ ≥ ½ (an iid series hits ½).
pub fn integrated_autocorrelation_time(series: &[f64]) -> MixingProxy {
    let n = series.len();
    if n < 8 {
        return MixingProxy {
            tau_int: f64::NAN,
            error: f64::NAN,
            samples: n,
        };
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let c0: f64 = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return MixingProxy {
            tau_int: f64::NAN,
            error: f64::NAN,
            samples: n,
        };
    }
    let cov = |lag: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..n - lag {
            s += (series[i] - mean) * (series[i + lag] - mean);
        }
        s / n as f64
    };
    // Sum of paired autocovariances Γ_k = c_{2k} + c_{2k+1} while positive.
    let mut sigma_sq = -c0;
    let mut window = 0usize;
    let max_pair = (n / 2).saturating_sub(1);
    for k in 0..max_pair {
        let gamma = cov(2 * k) + cov(2 * k + 1);
        if gamma <= 0.0 {
            break;
        }
        sigma_sq += 2.0 * gamma;
        window = 2 * k + 1;
    }
    let tau = (sigma_sq / (2.0 * c0)).max(0.5);
    let error = tau * ((4.0 * window as f64 + 2.0) / n as f64).sqrt();
    MixingProxy {
        tau_int: tau,
        error,
        samples: n,
    }
}

/// Integrated autocorrelation time of one scalar functional of the
/// chain, with an error bar.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MixingProxy {
    pub tau_int: f64,
    pub error: f64,
    pub samples: usize,
}

/// Effective sample size `N / (2 τ_int)`, capped at `N`.
pub fn effective_sample_size(series: &[f64]) -> f64 {
    let proxy = integrated_autocorrelation_time(series);
    if proxy.tau_int.is_finite() {
        (series.len() as f64 / (2.0 * proxy.tau_int)).min(series.len() as f64)
    } else {
        f64::NAN
    }
}

/// Normalized autocorrelation `ρ_1..ρ_maxlag` of a scalar series, for
/// plotting.
pub fn autocorrelation_curve(series: &[f64], max_lag: usize) -> Vec<f64> {
    let n = series.len();
    if n < 2 {
        return Vec::new();
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let c0: f64 = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return Vec::new();
    }
    (1..=max_lag.min(n - 1))
        .map(|lag| {
            let mut s = 0.0;
            for i in 0..n - lag {
                s += (series[i] - mean) * (series[i + lag] - mean);
            }
            s / (n as f64 * c0)
        })
        .collect()
}

// --- bounding box + rejection oracle ---------------------------------------

/// Axis-aligned box around the body from axis and random chords, inflated
/// by 5 %. Rejection sampling stays exact whatever the inflation.
pub fn bounding_box(spec: &BodySpec, seed: u64) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = spec.dim();
    let origin = DVector::zeros(n);
    let mut lo = DVector::from_element(n, f64::INFINITY);
    let mut hi = DVector::from_element(n, f64::NEG_INFINITY);
    let mut absorb = |p: &DVector<f64>| {
        for i in 0..n {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    };
    for i in 0..n {
        let mut dir = DVector::zeros(n);
        dir[i] = 1.0;
        let chord = geometry::chord_endpoints(spec, &origin, &dir)?;
        absorb(&chord.p);
        absorb(&chord.q);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..256 {
        let dir = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0f64));
        if dir.norm() < 1e-9 {
            continue;
        }
        let chord = geometry::chord_endpoints(spec, &origin, &dir)?;
        absorb(&chord.p);
        absorb(&chord.q);
    }
    let span = &hi - &lo;
    Ok((&lo - &span * 0.05, &hi + &span * 0.05))
}

/// Uniform interior points by rejection from the box.
pub fn rejection_oracle(
    spec: &BodySpec,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<DVector<f64>> {
    let n = spec.dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = DVector::from_fn(n, |i, _| rng.random_range(lo[i]..hi[i]));
        if spec.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Histogram over a regular grid on the box, restricted to the first
/// `min(n, 3)` coordinates.
pub fn grid_histogram(
    samples: &[DVector<f64>],
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    resolution: usize,
    dims: usize,
) -> Vec<f64> {
    let cells = resolution.pow(dims as u32);
    let mut counts = vec![0.0; cells];
    for s in samples {
        let mut idx = 0usize;
        for d in 0..dims {
            let w = (hi[d] - lo[d]) / resolution as f64;
            let k = (((s[d] - lo[d]) / w).floor() as isize).clamp(0, resolution as isize - 1);
            idx = idx * resolution + k as usize;
        }
        counts[idx] += 1.0;
    }
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        for c in &mut counts {
            *c /= total;
        }
    }
    counts
}

/// Total-variation distance between two histograms on the same grid.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Pearson chi-square of `observed` against `expected` cell frequencies,
/// with counts rescaled to the effective sample size so autocorrelated
/// chains are not over-penalized. Cells empty on both sides are dropped.
fn chi_square_vs_oracle(
    observed: &[f64],
    expected: &[f64],
    ess: f64,
) -> Option<(f64, usize, f64)> {
    let mut stat = 0.0;
    let mut dof = 0usize;
    for (o, e) in observed.iter().zip(expected) {
        if *e <= 0.0 && *o <= 0.0 {
            continue;
        }
        dof += 1;
        let e_floor = e.max(1e-12);
        let diff = o - e;
        stat += ess * diff * diff / e_floor;
    }
    if dof <= 1 {
        return None;
    }
    let dist = ChiSquared::new((dof - 1) as f64).ok()?;
    let p = 1.0 - dist.cdf(stat);
    Some((stat, dof - 1, p))
}

/// Moment, grid and autocorrelation summary of a sample set against the
/// uniform distribution on the body.
#[derive(Clone, Debug, Serialize)]
pub struct UniformityReport {
    pub schema_version: u32,
    pub sample_count: usize,
    pub coordinate_means: Vec<f64>,
    pub coordinate_mean_se: Vec<f64>,
    pub coordinate_second_moments: Vec<f64>,
    pub coordinate_second_moment_se: Vec<f64>,
    pub effective_sample_sizes: Vec<f64>,
    /// Grid statistics; present only for `n ≤ 3`.
    pub grid_resolution: Option<usize>,
    pub chi_square: Option<f64>,
    pub chi_square_dof: Option<usize>,
    pub p_value: Option<f64>,
    pub tv_to_oracle: Option<f64>,
    pub oracle_samples: usize,
    /// Cell frequencies of the walker and oracle histograms, row-major
    /// over the grid; present only for `n ≤ 3`.
    pub walker_histogram: Option<Vec<f64>>,
    pub oracle_histogram: Option<Vec<f64>>,
}

/// Builds the uniformity report; refuses fewer than `MIN_SAMPLES` points.
pub fn uniformity_report(
    samples: &[DVector<f64>],
    spec: &BodySpec,
    grid_resolution: usize,
    oracle_count: usize,
    seed: u64,
) -> Result<UniformityReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            found: samples.len(),
            need: MIN_SAMPLES,
        });
    }
    let n = spec.dim();
    let count = samples.len() as f64;
    let mut means = Vec::with_capacity(n);
    let mut mean_se = Vec::with_capacity(n);
    let mut seconds = Vec::with_capacity(n);
    let mut second_se = Vec::with_capacity(n);
    let mut esses = Vec::with_capacity(n);
    for d in 0..n {
        let series: Vec<f64> = samples.iter().map(|s| s[d]).collect();
        let mean = series.iter().sum::<f64>() / count;
        let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count;
        let ess = effective_sample_size(&series).max(1.0);
        means.push(mean);
        mean_se.push((var / ess).sqrt());
        let sq_series: Vec<f64> = series.iter().map(|x| x * x).collect();
        let sq_mean = sq_series.iter().sum::<f64>() / count;
        let sq_var = sq_series.iter().map(|x| (x - sq_mean).powi(2)).sum::<f64>() / count;
        seconds.push(sq_mean);
        second_se.push((sq_var / ess).sqrt());
        esses.push(ess);
    }

    let (grid_resolution, chi_square, dof, p_value, tv, oracle_samples, hists) = if n <= 3 {
        let (lo, hi) = bounding_box(spec, seed ^ 0x9e37_79b9)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let oracle = rejection_oracle(spec, &lo, &hi, oracle_count, &mut rng);
        let walker_hist = grid_histogram(samples, &lo, &hi, grid_resolution, n);
        let oracle_hist = grid_histogram(&oracle, &lo, &hi, grid_resolution, n);
        let ess_total = esses.iter().cloned().fold(f64::INFINITY, f64::min);
        let chi = chi_square_vs_oracle(&walker_hist, &oracle_hist, ess_total);
        let tv = tv_distance(&walker_hist, &oracle_hist);
        (
            Some(grid_resolution),
            chi.map(|c| c.0),
            chi.map(|c| c.1),
            chi.map(|c| c.2),
            Some(tv),
            oracle.len(),
            Some((walker_hist, oracle_hist)),
        )
    } else {
        (None, None, None, None, None, 0, None)
    };
    let (walker_histogram, oracle_histogram) = match hists {
        Some((w, o)) => (Some(w), Some(o)),
        None => (None, None),
    };

    Ok(UniformityReport {
        schema_version: 1,
        sample_count: samples.len(),
        coordinate_means: means,
        coordinate_mean_se: mean_se,
        coordinate_second_moments: seconds,
        coordinate_second_moment_se: second_se,
        effective_sample_sizes: esses,
        grid_resolution,
        chi_square,
        chi_square_dof: dof,
        p_value,
        tv_to_oracle: tv,
        oracle_samples,
        walker_histogram,
        oracle_histogram,
    })
}

// --- product experiment -----------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ProductMixingRow {
    pub copies: usize,
    pub dimension: usize,
    pub proxy: MixingProxy,
    pub acceptance_rate: f64,
}

/// Runs the walk on `h`-fold products of the factor body and reports the
/// integrated autocorrelation time of the first coordinate for each `h`.
pub fn product_mixing_experiment(
    factor: &BodySpec,
    copies: &[usize],
    config: &ChainConfig,
) -> Result<Vec<ProductMixingRow>> {
    let mut rows = Vec::with_capacity(copies.len());
    for &h in copies {
        let body = factor.direct_product(h)?;
        let weights = body.weights();
        let run = crate::chain::run_chain(&body, &weights, config, &DVector::zeros(body.dim()))?;
        let series: Vec<f64> = run.samples.iter().map(|s| s[0]).collect();
        rows.push(ProductMixingRow {
            copies: h,
            dimension: body.dim(),
            proxy: integrated_autocorrelation_time(&series),
            acceptance_rate: run.summary.acceptance_rate,
        });
    }
    Ok(rows)
}

// --- startup checks ---------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct StartupReport {
    pub schema_version: u32,
    pub proposal_tail_samples: usize,
    pub proposal_tail: f64,
    pub proposal_tail_required: f64,
    pub proposal_tail_pass: bool,
    pub sc_points: usize,
    pub sc_max_d3_ratio: f64,
    pub sc_max_lipschitz_ratio: f64,
    pub sc_tolerance: f64,
    pub sc_pass: bool,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Monte Carlo tail of the proposal's local step length at the origin
/// plus a self-concordance sweep over random interior points.
pub fn startup_checks(
    spec: &BodySpec,
    weights: &BarrierWeights,
    config: &ChainConfig,
) -> Result<StartupReport> {
    config.validate()?;
    let n = spec.dim();
    let origin = DVector::zeros(n);

    // Tail of ‖x−z‖_x over proposals from the origin.
    let proposals = 100_000usize;
    let model = AggregateModel::new(Arc::new(spec.clone()), *weights);
    let mut state = ChainState::new(model, config.clone(), origin.clone())?;
    let hessian = state.eval().hessian.clone();
    let mut inside = 0usize;
    for _ in 0..proposals {
        let z = state.propose();
        if linalg::local_norm(&hessian, &(&z - &origin)) <= 0.5 {
            inside += 1;
        }
    }
    let tail = inside as f64 / proposals as f64;
    let required = 0.998;
    let tail_pass = tail >= required;

    // Self-concordance sweep: random interior points from short
    // Hit-and-Run prefixes, random directions, 1 % tolerance.
    let sc_points = 20usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(2);
    let mut x = origin.clone();
    let mut max_d3 = 0.0f64;
    let mut max_lip = 0.0f64;
    let mut failures = Vec::new();
    for k in 0..sc_points {
        for _ in 0..25 {
            x = crate::baselines::hit_and_run_step(spec, &x, &mut rng)?;
        }
        let h = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0f64));
        if h.norm() < 1e-9 {
            continue;
        }
        let report =
            barrier::self_concordance_check(spec, weights, &x, &h, barrier::FD_STEP_DEFAULT)?;
        max_d3 = max_d3.max(report.d3_ratio);
        max_lip = max_lip.max(report.lipschitz_ratio);
        if report.d3_ratio > 1.0 + barrier::SC_RATIO_TOL {
            failures.push(format!("point {k}: d3 ratio {:.4}", report.d3_ratio));
        }
        if report.lipschitz_ratio > 1.0 + barrier::SC_RATIO_TOL {
            failures.push(format!("point {k}: Lipschitz ratio {:.4}", report.lipschitz_ratio));
        }
    }
    if !tail_pass {
        failures.insert(0, format!("proposal tail {tail:.5} below {required}"));
    }
    let sc_pass = max_d3 <= 1.0 + barrier::SC_RATIO_TOL && max_lip <= 1.0 + barrier::SC_RATIO_TOL;
    Ok(StartupReport {
        schema_version: 1,
        proposal_tail_samples: proposals,
        proposal_tail: tail,
        proposal_tail_required: required,
        proposal_tail_pass: tail_pass,
        sc_points,
        sc_max_d3_ratio: max_d3,
        sc_max_lipschitz_ratio: max_lip,
        sc_tolerance: barrier::SC_RATIO_TOL,
        sc_pass,
        pass: tail_pass && sc_pass,
        failures,
    })
}
