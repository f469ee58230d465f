//! Waiting- and idle-time distributions on a grid.
//!
//! With `U = S − T` the waiting-time CDF obeys
//! `F_{n+1}(x) = ∫₀^∞ F_n(v) p_U(x − v) dv`. Integrating by parts gives the
//! Stieltjes form `F_{n+1}(x) = H(x)` with
//!
//! ```text
//! H(y) = F_n(0) P(U ≤ y) + ∫_{0+}^∞ P(U ≤ y − v) dF_n(v) = P(W_n + U ≤ y)
//! ```
//!
//! which carries the atom `F_n(0)` exactly and only needs the closed-form CDF
//! of `U`. The idle-time CDF is `G_{n+1}(x) = 1 − H(−x)`.
//!
//! Mass of `F_n` above the last grid point is lumped onto that point, which
//! amounts to capping the waiting time at `x_max`; the iteration then
//! conserves probability and has a proper stationary point.

use alloc::vec;
use alloc::vec::Vec;

use crate::distributions::{DifferenceLaw, DistributionSpec};
use crate::error::{invalid, Error, Result};
use crate::queue::utilization;

pub const DEFAULT_INTERVALS: usize = 2000;
pub const DEFAULT_TAIL_FACTOR: f64 = 10.0;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 10_000;

/// A CDF tabulated on `0 = x_0 < x_1 < … < x_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfGrid {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl CdfGrid {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(invalid("grid and values differ in length"));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(invalid("CDF values must lie in [0, 1]"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("CDF values must be nondecreasing"));
        }
        Ok(CdfGrid { grid, values })
    }

    /// The CDF of the point mass at zero, `F ≡ 1`.
    pub fn point_mass_at_zero(grid: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![1.0; n])
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `F(0)`, the probability of a zero time.
    pub fn atom_at_zero(&self) -> f64 {
        self.values[0]
    }

    /// Step interpolation (right-continuous) at an arbitrary `x ≥ 0`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let k = self.grid.partition_point(|&g| g <= x);
        if k == 0 {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    /// `max_k |F(x_k) − G(x_k)|` on a shared grid.
    pub fn sup_distance(&self, other: &CdfGrid) -> Result<f64> {
        if self.grid != other.grid {
            return Err(invalid("CDFs live on different grids"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max))
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(invalid("grid needs at least two points"));
    }
    if grid[0] != 0.0 {
        return Err(invalid("grid must start at 0"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(invalid("grid must be strictly increasing and finite"));
    }
    Ok(())
}

/// Uniform grid `x_k = k · x_max / intervals`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_max: f64,
    pub intervals: usize,
}

impl GridSpec {
    pub fn new(x_max: f64, intervals: usize) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) || intervals == 0 {
            return Err(invalid("grid needs x_max > 0 and at least one interval"));
        }
        Ok(GridSpec { x_max, intervals })
    }

    /// `x_max = 10/(μ − λ)` with 2000 intervals.
    pub fn default_for(arrival: &DistributionSpec, service: &DistributionSpec) -> Result<Self> {
        let lambda = 1.0 / arrival.mean();
        let mu = 1.0 / service.mean();
        if !(mu > lambda) {
            return Err(Error::NoStationaryDistribution {
                utilization: lambda / mu,
            });
        }
        Self::new(DEFAULT_TAIL_FACTOR / (mu - lambda), DEFAULT_INTERVALS)
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.x_max / self.intervals as f64;
        (0..=self.intervals).map(|k| k as f64 * h).collect()
    }
}

// Evaluates H(y) = P(W + U ≤ y) for a tabulated W.
struct Convolver<'a> {
    law: DifferenceLaw,
    grid: &'a [f64],
    // Uniform grids: table[m + 2M] = P(U ≤ m h) for m in [-2M, M].
    table: Option<Vec<f64>>,
}

impl<'a> Convolver<'a> {
    fn new(law: DifferenceLaw, grid: &'a [f64]) -> Self {
        let m = grid.len() - 1;
        let h = grid[m] / m as f64;
        let uniform = grid
            .iter()
            .enumerate()
            .all(|(k, &x)| libm::fabs(x - k as f64 * h) <= 1e-9 * h);
        let table = uniform.then(|| (0..=3 * m).map(|i| law.cdf((i as f64 - 2.0 * m as f64) * h)).collect());
        Convolver { law, grid, table }
    }

    // Trapezoid weights of the Stieltjes measure dF, with the zero atom at
    // node 0 and the mass beyond the grid at node M.
    fn weights(values: &[f64]) -> Vec<f64> {
        let m = values.len() - 1;
        let mut w = vec![0.0; m + 1];
        w[0] = values[0];
        for j in 0..m {
            let d = 0.5 * (values[j + 1] - values[j]);
            w[j] += d;
            w[j + 1] += d;
        }
        w[m] += 1.0 - values[m];
        w
    }

    // H at y = sign · x_k.
    fn eval(&self, w: &[f64], k: usize, negate: bool) -> f64 {
        let m = self.grid.len() - 1;
        match &self.table {
            Some(t) => {
                // argument index (±k − j) + 2M
                let base = if negate { 2 * m - k } else { 2 * m + k };
                w.iter().enumerate().map(|(j, wj)| wj * t[base - j]).sum()
            }
            None => {
                let y = if negate { -self.grid[k] } else { self.grid[k] };
                w.iter().zip(self.grid).map(|(wj, v)| wj * self.law.cdf(y - v)).sum()
            }
        }
    }
}

fn tidy(mut values: Vec<f64>) -> Vec<f64> {
    let mut run = 0.0f64;
    for v in values.iter_mut() {
        *v = v.clamp(0.0, 1.0).max(run);
        run = *v;
    }
    values
}

fn iterate_with(conv: &Convolver<'_>, f: &CdfGrid) -> CdfGrid {
    let w = Convolver::weights(&f.values);
    let values = (0..f.grid.len()).map(|k| conv.eval(&w, k, false)).collect();
    CdfGrid {
        grid: f.grid.clone(),
        values: tidy(values),
    }
}

/// One step of the Lindley equation on `f`'s grid.
pub fn lindley_iterate(f: &CdfGrid, arrival: &DistributionSpec, service: &DistributionSpec) -> Result<CdfGrid> {
    let law = DifferenceLaw::new(service, arrival)?;
    Ok(iterate_with(&Convolver::new(law, &f.grid), f))
}

/// Idle-time CDF `G(x) = 1 − ∫₀^∞ p_U(−x − v) F(v) dv` of the customer after
/// one whose waiting time has CDF `f`.
pub fn idle_cdf(f: &CdfGrid, arrival: &DistributionSpec, service: &DistributionSpec) -> Result<CdfGrid> {
    let law = DifferenceLaw::new(service, arrival)?;
    let conv = Convolver::new(law, &f.grid);
    let w = Convolver::weights(&f.values);
    let values = (0..f.grid.len()).map(|k| 1.0 - conv.eval(&w, k, true)).collect();
    Ok(CdfGrid {
        grid: f.grid.clone(),
        values: tidy(values),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindleySolution {
    pub cdf: CdfGrid,
    pub iterations: usize,
    /// Sup-norm change of the final iteration.
    pub residual: f64,
}

/// Stationary waiting-time CDF, iterating from `F ≡ 1` until the sup-norm
/// change drops below `tol`.
pub fn lindley_fixed_point(
    arrival: &DistributionSpec,
    service: &DistributionSpec,
    grid: &GridSpec,
    tol: f64,
) -> Result<LindleySolution> {
    let r = utilization(arrival, service)?;
    if !(r < 1.0) {
        return Err(Error::NoStationaryDistribution { utilization: r });
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be > 0"));
    }
    let law = DifferenceLaw::new(service, arrival)?;
    let nodes = grid.nodes();
    let conv = Convolver::new(law, &nodes);
    let mut f = CdfGrid::point_mass_at_zero(nodes.clone())?;
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let next = iterate_with(&conv, &f);
        residual = next.sup_distance(&f)?;
        f = next;
        if residual < tol {
            return Ok(LindleySolution {
                cdf: f,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// Right-continuous empirical CDF of nonnegative samples on `grid`.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Result<CdfGrid> {
    validate_grid(grid)?;
    if samples.is_empty() {
        return Err(invalid("empirical CDF needs at least one sample"));
    }
    if samples.iter().any(|x| !(*x >= 0.0)) {
        return Err(invalid("samples must be nonnegative"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let values = grid
        .iter()
        .map(|&x| sorted.partition_point(|&s| s <= x) as f64 / n)
        .collect();
    CdfGrid::new(grid.to_vec(), values)
}
