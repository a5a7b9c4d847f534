//! Reference walks for head-to-head diagnostics: Hit-and-Run and the
//! Ball walk.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::body::BodySpec;
use crate::chain::{ChainRun, RunSummary};
use crate::error::{Error, Result};
use crate::geometry;

/// Keeps chord samples strictly off the endpoints.
const CHORD_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    HitAndRun,
    Ball,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    /// Ball-walk step radius; required for the ball walk.
    pub ball_delta: Option<f64>,
    pub seed: u64,
    pub steps: u64,
    pub burn_in: u64,
    pub thinning: u64,
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kind == BaselineKind::Ball {
            match self.ball_delta {
                Some(d) if d > 0.0 => {}
                _ => {
                    return Err(Error::InvalidConfig(
                        "the ball walk needs an explicit positive delta".into(),
                    ))
                }
            }
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning stride must be positive".into()));
        }
        Ok(())
    }
}

fn random_unit_direction<R: Rng>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let g = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm > 1e-12 {
            return g / norm;
        }
    }
}

/// One Hit-and-Run move: uniform direction, then a uniform point on the
/// open chord through `x`.
pub fn hit_and_run_step<R: Rng>(
    spec: &BodySpec,
    x: &DVector<f64>,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let dir = random_unit_direction(spec.dim(), rng);
    let chord = geometry::chord_endpoints(spec, x, &dir)?;
    let u: f64 = rng.random_range(CHORD_MARGIN..(1.0 - CHORD_MARGIN));
    let t = chord.t_backward + u * chord.length();
    Ok(chord.at(t))
}

/// One Ball-walk move: uniform point in `B(x, delta)`, kept only if it
/// stays in the body.
pub fn ball_walk_step<R: Rng>(
    spec: &BodySpec,
    x: &DVector<f64>,
    delta: f64,
    rng: &mut R,
) -> DVector<f64> {
    let n = spec.dim();
    let dir = random_unit_direction(n, rng);
    let radius = delta * rng.random::<f64>().powf(1.0 / n as f64);
    let z = x + dir * radius;
    if spec.contains(&z) {
        z
    } else {
        x.clone()
    }
}

/// Runs a baseline walk with the same stream/summary conventions as the
/// Dikin chain (`accepted`/`outside` partition the ball walk's moves;
/// Hit-and-Run always moves).
pub fn run_baseline(spec: &BodySpec, config: &BaselineConfig, start: &DVector<f64>) -> Result<ChainRun> {
    config.validate()?;
    if !spec.membership(start)? {
        return Err(Error::InfeasiblePoint { what: "the body (baseline start)" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut x = start.clone();
    let mut samples = Vec::new();
    let mut accepted = 0u64;
    let mut outside = 0u64;
    for step in 1..=config.steps {
        match config.kind {
            BaselineKind::HitAndRun => {
                x = hit_and_run_step(spec, &x, &mut rng)?;
                accepted += 1;
            }
            BaselineKind::Ball => {
                let delta = config.ball_delta.expect("validated");
                let z = ball_walk_step(spec, &x, delta, &mut rng);
                if z == x {
                    outside += 1;
                } else {
                    accepted += 1;
                    x = z;
                }
            }
        }
        debug_assert!(spec.contains(&x));
        if step > config.burn_in && (step - config.burn_in) % config.thinning == 0 {
            samples.push(x.clone());
        }
    }
    let summary = RunSummary {
        schema_version: 1,
        steps: config.steps,
        accepted,
        outside,
        lazy: 0,
        filtered: 0,
        acceptance_rate: if config.steps > 0 {
            accepted as f64 / config.steps as f64
        } else {
            0.0
        },
        mean_step_local_norm: 0.0,
    };
    Ok(ChainRun { samples, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn hit_and_run_interval_moments() {
        // Uniform on (−1,1): mean 0, second moment 1/3.
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x0 = dvector![0.0];
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = hit_and_run_step(&interval, &x0, &mut rng).unwrap();
            assert!(interval.contains(&x));
            sum += x[0];
            sum_sq += x[0] * x[0];
        }
        let mean = sum / n as f64;
        let second = sum_sq / n as f64;
        // std of the mean is (1/√3)/√n ≈ 0.0018
        assert!(mean.abs() < 3.0 * (1.0 / 3.0f64).sqrt() / (n as f64).sqrt());
        assert!((second - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn ball_walk_rejects_outside_moves() {
        let square = BodySpec::cube(2, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // A huge delta forces frequent rejections; the point never leaves.
        let mut x = dvector![0.9, 0.9];
        let mut stayed = 0;
        for _ in 0..1000 {
            let z = ball_walk_step(&square, &x, 3.0, &mut rng);
            if z == x {
                stayed += 1;
            }
            assert!(square.contains(&z));
            x = z;
        }
        assert!(stayed > 0);
    }

    #[test]
    fn ball_walk_tiny_delta_rarely_rejects() {
        let square = BodySpec::cube(2, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = dvector![0.0, 0.0];
        for _ in 0..1000 {
            let z = ball_walk_step(&square, &x, 1e-3, &mut rng);
            assert_ne!(z, x, "interior moves with tiny delta never reject");
        }
    }

    #[test]
    fn ball_walk_long_run_mean_is_centered() {
        let square = BodySpec::cube(2, 1.0).unwrap();
        let config = BaselineConfig {
            kind: BaselineKind::Ball,
            ball_delta: Some(0.5),
            seed: 5,
            steps: 100_000,
            burn_in: 1_000,
            thinning: 1,
        };
        let run = run_baseline(&square, &config, &dvector![0.0, 0.0]).unwrap();
        let n = run.samples.len() as f64;
        for coord in 0..2 {
            let mean = run.samples.iter().map(|s| s[coord]).sum::<f64>() / n;
            assert!(mean.abs() < 0.03, "coordinate {coord} mean {mean}");
        }
    }

    #[test]
    fn ball_walk_requires_delta() {
        let config = BaselineConfig {
            kind: BaselineKind::Ball,
            ball_delta: None,
            seed: 0,
            steps: 10,
            burn_in: 0,
            thinning: 1,
        };
        assert!(config.validate().is_err());
    }
}
