//! Maximization of `‖game(s,t)‖` over the anticommutation square `[-1,1]²`.
//!
//! A uniform coarse grid is followed by multi-start local refinement: around
//! each promising coarse local maximum a 21x21 grid with one tenth of the
//! previous spacing is laid out, recentred on its best sample, and so on for
//! `refine_iters` levels.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::format_sig17;
use crate::realize::{assemble_with, AnticommPoint, Realization, StandardRealization};
use crate::spectral::operator_norm;
use crate::word::{BiasPolynomial, CompiledPolynomial};

/// Samples per axis of each refinement grid; odd so the centre is included.
const LOCAL_GRID: usize = 21;
/// Upper bound on refinement start points taken from the coarse grid. Flat
/// ridges make every sample on them a local maximum, and a nearby isolated
/// peak may only be reachable from one of them, so the cap is generous.
const MAX_STARTS: usize = 256;
/// Minimum number of collinear best-set samples reported as a segment.
const MIN_INTERVAL_SAMPLES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub grid_n: usize,
    pub refine_iters: usize,
    /// Absolute tie tolerance for membership in the best set.
    pub tol: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            grid_n: 101,
            refine_iters: 6,
            tol: 1e-8,
        }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 {
            return Err(Error::Config(format!(
                "grid_n must be at least 2 (got {})",
                self.grid_n
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tol must be positive (got {})",
                self.tol
            )));
        }
        Ok(())
    }

    /// Spatial resolution below which best points are merged: `√tol`.
    pub fn dedup_radius(&self) -> f64 {
        self.tol.sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub point: AnticommPoint,
    pub norm: f64,
}

/// Which coordinate a best-set segment holds fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedAxis {
    /// `t` fixed, `s` ranging over `[from, to]`.
    T,
    /// `s` fixed, `t` ranging over `[from, to]`.
    S,
}

/// An axis-aligned segment of the best set detected on the coarse grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestInterval {
    pub fixed_axis: FixedAxis,
    pub fixed: f64,
    pub from: f64,
    pub to: f64,
    pub samples: usize,
}

impl BestInterval {
    /// Whether `point` lies on the segment, up to `slack` in each coordinate.
    pub fn contains(&self, point: &AnticommPoint, slack: f64) -> bool {
        let (fixed, moving) = match self.fixed_axis {
            FixedAxis::T => (point.t, point.s),
            FixedAxis::S => (point.s, point.t),
        };
        (fixed - self.fixed).abs() <= slack
            && moving >= self.from - slack
            && moving <= self.to + slack
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub value: f64,
    pub best_points: Vec<AnticommPoint>,
    #[serde(default)]
    pub best_intervals: Vec<BestInterval>,
    /// Coarse surface; omitted from serialized output when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<SurfaceSample>,
    pub refinement_depth: usize,
    pub tolerance: f64,
    /// Running maximum after the coarse pass and after each refinement level.
    pub history: Vec<f64>,
}

impl OptimizationResult {
    /// Drops the coarse surface, e.g. before serializing a compact summary.
    pub fn without_grid(mut self) -> Self {
        self.grid.clear();
        self
    }
}

/// Norm evaluator for one polynomial under a fixed pair of realizations.
pub struct NormSurface<'a> {
    compiled: CompiledPolynomial,
    alice: &'a dyn Realization,
    bob: &'a dyn Realization,
}

impl<'a> NormSurface<'a> {
    pub fn new(poly: &BiasPolynomial) -> NormSurface<'static> {
        NormSurface {
            compiled: CompiledPolynomial::new(poly),
            alice: &StandardRealization,
            bob: &StandardRealization,
        }
    }

    pub fn with_realizations(
        poly: &BiasPolynomial,
        alice: &'a dyn Realization,
        bob: &'a dyn Realization,
    ) -> Self {
        NormSurface {
            compiled: CompiledPolynomial::new(poly),
            alice,
            bob,
        }
    }

    /// `‖game(s,t)‖`; the point must lie in `[-1,1]²`.
    pub fn norm_at(&self, point: AnticommPoint) -> f64 {
        let form = self.compiled.reduce_at(point);
        operator_norm(&assemble_with(&form, self.alice, self.bob).entries)
    }

    /// Row-major `grid_n × grid_n` samples (`s` outer, `t` inner).
    pub fn grid(&self, grid_n: usize) -> Result<Vec<SurfaceSample>> {
        if grid_n < 2 {
            return Err(Error::Config(format!(
                "grid_n must be at least 2 (got {grid_n})"
            )));
        }
        let samples = (0..grid_n * grid_n)
            .into_par_iter()
            .map(|k| {
                let point = AnticommPoint {
                    s: grid_coord(k / grid_n, grid_n),
                    t: grid_coord(k % grid_n, grid_n),
                };
                SurfaceSample {
                    point,
                    norm: self.norm_at(point),
                }
            })
            .collect();
        Ok(samples)
    }

    /// Sup of the norm over a uniform grid, without refinement.
    pub fn grid_max(&self, grid_n: usize) -> Result<f64> {
        Ok(self
            .grid(grid_n)?
            .iter()
            .map(|s| s.norm)
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn optimize(&self, config: &OptimizeConfig) -> Result<OptimizationResult> {
        config.validate()?;
        let n = config.grid_n;
        let coarse = self.grid(n)?;
        let coarse_max = coarse
            .iter()
            .map(|s| s.norm)
            .fold(f64::NEG_INFINITY, f64::max);

        let starts = coarse_local_maxima(&coarse, n);
        let mut runs: Vec<SurfaceSample> = starts.iter().map(|&k| coarse[k]).collect();
        let mut half_width = 2.0 / (n - 1) as f64;
        let mut history = vec![coarse_max];
        for _ in 0..config.refine_iters {
            let step = half_width / ((LOCAL_GRID - 1) / 2) as f64;
            runs = runs.iter().map(|run| self.refine_once(run, step)).collect();
            let level_max = runs
                .iter()
                .map(|r| r.norm)
                .fold(f64::NEG_INFINITY, f64::max);
            let prev = *history.last().expect("history starts non-empty");
            history.push(prev.max(level_max));
            half_width = step;
        }
        let value = *history.last().expect("history starts non-empty");

        let threshold = value - config.tol;
        let best_intervals = detect_intervals(&coarse, n, threshold);
        let mut candidates: Vec<SurfaceSample> = runs
            .iter()
            .chain(coarse.iter())
            .filter(|s| s.norm >= threshold)
            .copied()
            .collect();
        candidates.sort_by(|a, b| {
            b.norm
                .total_cmp(&a.norm)
                .then(a.point.s.total_cmp(&b.point.s))
                .then(a.point.t.total_cmp(&b.point.t))
        });
        let radius = config.dedup_radius();
        let mut best_points: Vec<AnticommPoint> = Vec::new();
        for c in &candidates {
            // Points on a reported segment are represented by it; the top point is always kept.
            let on_segment = best_intervals.iter().any(|i| i.contains(&c.point, radius));
            if (best_points.is_empty() || !on_segment)
                && best_points.iter().all(|p| p.distance(&c.point) > radius)
            {
                best_points.push(c.point);
            }
        }

        Ok(OptimizationResult {
            value,
            best_points,
            best_intervals,
            grid: coarse,
            refinement_depth: config.refine_iters,
            tolerance: config.tol,
            history,
        })
    }

    /// One refinement level: a `LOCAL_GRID²` patch of spacing `step` centred
    /// on `run`, clamped to the square. The centre itself is re-used, so the
    /// returned norm never decreases.
    fn refine_once(&self, run: &SurfaceSample, step: f64) -> SurfaceSample {
        let half = (LOCAL_GRID / 2) as isize;
        let mut best = *run;
        for i in -half..=half {
            for j in -half..=half {
                if i == 0 && j == 0 {
                    continue;
                }
                let point = AnticommPoint {
                    s: (run.point.s + i as f64 * step).clamp(-1.0, 1.0),
                    t: (run.point.t + j as f64 * step).clamp(-1.0, 1.0),
                };
                let norm = self.norm_at(point);
                if norm > best.norm {
                    best = SurfaceSample { point, norm };
                }
            }
        }
        best
    }
}

fn grid_coord(i: usize, n: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (n - 1) as f64
}

/// Indices of coarse samples not exceeded by any 8-neighbour, best first.
fn coarse_local_maxima(coarse: &[SurfaceSample], n: usize) -> Vec<usize> {
    let mut maxima: Vec<usize> = (0..coarse.len())
        .filter(|&k| {
            let (i, j) = ((k / n) as isize, (k % n) as isize);
            let here = coarse[k].norm;
            (-1..=1).all(|di| {
                (-1..=1).all(|dj| {
                    let (a, b) = (i + di, j + dj);
                    if (di == 0 && dj == 0) || a < 0 || b < 0 || a >= n as isize || b >= n as isize
                    {
                        return true;
                    }
                    coarse[a as usize * n + b as usize].norm <= here
                })
            })
        })
        .collect();
    maxima.sort_by(|&a, &b| coarse[b].norm.total_cmp(&coarse[a].norm).then(a.cmp(&b)));
    maxima.truncate(MAX_STARTS);
    maxima
}

/// Maximal contiguous runs of at least `MIN_INTERVAL_SAMPLES` best-set samples
/// along grid rows, then along columns. A column run whose samples all lie on
/// row runs adds nothing and is dropped.
fn detect_intervals(coarse: &[SurfaceSample], n: usize, threshold: f64) -> Vec<BestInterval> {
    let mut out = Vec::new();
    let mut covered = vec![false; coarse.len()];
    for fixed_axis in [FixedAxis::T, FixedAxis::S] {
        let mut added = Vec::new();
        for fixed_index in 0..n {
            let index = |moving: usize| match fixed_axis {
                FixedAxis::T => moving * n + fixed_index,
                FixedAxis::S => fixed_index * n + moving,
            };
            let mut moving = 0;
            while moving < n {
                if coarse[index(moving)].norm < threshold {
                    moving += 1;
                    continue;
                }
                let first = moving;
                while moving < n && coarse[index(moving)].norm >= threshold {
                    moving += 1;
                }
                let run: Vec<usize> = (first..moving).map(index).collect();
                if run.len() < MIN_INTERVAL_SAMPLES || run.iter().all(|&k| covered[k]) {
                    continue;
                }
                added.extend_from_slice(&run);
                out.push(BestInterval {
                    fixed_axis,
                    fixed: grid_coord(fixed_index, n),
                    from: grid_coord(first, n),
                    to: grid_coord(moving - 1, n),
                    samples: run.len(),
                });
            }
        }
        for k in added {
            covered[k] = true;
        }
    }
    out
}

/// `‖game(s,t)‖` in the standard realization.
pub fn game_norm(poly: &BiasPolynomial, point: AnticommPoint) -> Result<f64> {
    point.validate()?;
    Ok(NormSurface::new(poly).norm_at(point))
}

pub fn evaluate_surface(poly: &BiasPolynomial, grid_n: usize) -> Result<Vec<SurfaceSample>> {
    NormSurface::new(poly).grid(grid_n)
}

pub fn optimize(poly: &BiasPolynomial, config: &OptimizeConfig) -> Result<OptimizationResult> {
    NormSurface::new(poly).optimize(config)
}

/// CSV with header `s,t,norm`, one row per sample, floats at 17 significant digits.
pub fn write_surface_csv<W: Write>(samples: &[SurfaceSample], mut out: W) -> Result<()> {
    writeln!(out, "s,t,norm")?;
    for sample in samples {
        writeln!(
            out,
            "{},{},{}",
            format_sig17(sample.point.s),
            format_sig17(sample.point.t),
            format_sig17(sample.norm)
        )?;
    }
    Ok(())
}
