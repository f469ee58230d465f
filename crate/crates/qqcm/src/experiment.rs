//! The computations behind each command. Everything here is a pure function
//! of the configuration; parallel parts run on the ambient rayon pool and
//! aggregate in a fixed order, so results do not depend on thread count.

use qqcm_core::{
    coherence, empirical_cdf, idle_cdf, lindley_fixed_point, lindley_iterate, long_run_stats, simulate_queue,
    utilization, CdfGrid, CollisionEngine, FixedPoint, FixedPointMode, LindleyWalk, LongRunStats, QueueTrace,
    RngStream, TrajectoryRecord,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, LindleyMode, SweepAxis};
use crate::error::{Error, Result};

/// One run: the queue trace on stream `(base_seed, 0)` and the trajectory
/// it drives.
pub fn simulate(cfg: &ExperimentConfig) -> Result<(QueueTrace, TrajectoryRecord)> {
    let engine = CollisionEngine::new(cfg.model()?)?;
    let model = engine.model();
    let trace = simulate_queue(
        &model.arrival,
        &model.service,
        cfg.n_ancillas,
        &mut RngStream::new(cfg.base_seed, 0),
    )?;
    let record = engine.run_trajectory(&trace)?;
    Ok((trace, record))
}

/// Long-run coherence statistics at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub value: f64,
    /// Mean over runs of the single-run means `E(C)`.
    pub mean: f64,
    /// Mean over runs of the single-run variances `Var(C)`.
    pub variance: f64,
    /// `sqrt(Var(C) / samples)` with every post-burn-in collision counted
    /// as independent. Ignores autocorrelation, so it understates the
    /// uncertainty of correlated series.
    pub naive_stderr: f64,
    /// Standard error of `mean` from the spread of independent runs;
    /// `None` for a single run.
    pub run_stderr: Option<f64>,
    pub runs: Vec<LongRunStats>,
}

impl PointStats {
    fn from_runs(value: f64, runs: Vec<LongRunStats>) -> Self {
        let k = runs.len() as f64;
        let mean = runs.iter().map(|s| s.mean).sum::<f64>() / k;
        let variance = runs.iter().map(|s| s.variance).sum::<f64>() / k;
        let samples: usize = runs.iter().map(|s| s.count).sum();
        let naive_stderr = (variance / samples as f64).sqrt();
        let run_stderr = (runs.len() > 1).then(|| {
            let v = runs.iter().map(|s| (s.mean - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (v / k).sqrt()
        });
        PointStats {
            value,
            mean,
            variance,
            naive_stderr,
            run_stderr,
            runs,
        }
    }
}

/// Runs `cfg.n_runs` trajectories (run `k` on stream `k`) and collects
/// their long-run statistics.
pub fn run_point(cfg: &ExperimentConfig, value: f64) -> Result<PointStats> {
    let engine = CollisionEngine::new(cfg.model()?)?;
    let runs = (0..cfg.n_runs as u64)
        .into_par_iter()
        .map(|k| {
            let record = engine.run_indexed(cfg.n_ancillas, cfg.base_seed, k)?;
            Ok(long_run_stats(&record, cfg.burn_in_fraction)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointStats::from_runs(value, runs))
}

/// Every sweep point, in sweep order. All points share the same streams.
pub fn sweep(cfg: &ExperimentConfig) -> Result<(SweepAxis, Vec<PointStats>)> {
    cfg.validate_for_statistics()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep command needs a \"sweep\" section".into()))?;
    let engines = sweep
        .values
        .par_iter()
        .map(|&v| Ok(CollisionEngine::new(cfg.at(sweep.axis, v).model()?)?))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, u64)> = (0..engines.len())
        .flat_map(|p| (0..cfg.n_runs as u64).map(move |k| (p, k)))
        .collect();
    let stats = tasks
        .par_iter()
        .map(|&(p, k)| {
            let record = engines[p].run_indexed(cfg.n_ancillas, cfg.base_seed, k)?;
            Ok(long_run_stats(&record, cfg.burn_in_fraction)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let points = stats
        .chunks(cfg.n_runs)
        .zip(&sweep.values)
        .map(|(runs, &v)| PointStats::from_runs(v, runs.to_vec()))
        .collect();
    Ok((sweep.axis, points))
}

/// A numeric CDF next to an empirical one on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfComparison {
    pub numeric: CdfGrid,
    pub empirical: CdfGrid,
    pub sup_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindleyReport {
    pub waiting: CdfComparison,
    pub idle: CdfComparison,
    pub iterations: usize,
    pub residual: f64,
}

/// Thinning stride for roughly independent long-run queue samples.
pub fn default_stride(r: f64) -> usize {
    (10.0 / (1.0 - r.sqrt()).powi(2)).ceil() as usize
}

/// Stationary waiting/idle CDFs against thinned long-run samples drawn on
/// stream `(base_seed, 0)`.
pub fn lindley_compare(cfg: &ExperimentConfig) -> Result<LindleyReport> {
    let (arrival, service) = (cfg.arrival()?, cfg.service()?);
    let r = utilization(&arrival, &service)?;
    if !(r < 1.0) {
        return Err(qqcm_core::Error::NoStationaryDistribution { utilization: r }.into());
    }
    let grid = cfg.lindley_grid()?;
    let stride = cfg.lindley.stride.unwrap_or_else(|| default_stride(r));
    let walk = LindleyWalk::new(arrival, service, RngStream::new(cfg.base_seed, 0))?;
    let samples = cfg.lindley.samples;
    let (sol, (ws, is)): (_, (Vec<f64>, Vec<f64>)) = rayon::join(
        || lindley_fixed_point(&arrival, &service, &grid, cfg.lindley.tol),
        move || walk.skip(100 * stride).step_by(stride).take(samples).unzip(),
    );
    let sol = sol?;
    let idle = idle_cdf(&sol.cdf, &arrival, &service)?;
    Ok(LindleyReport {
        waiting: compare(sol.cdf, &ws)?,
        idle: compare(idle, &is)?,
        iterations: sol.iterations,
        residual: sol.residual,
    })
}

fn compare(numeric: CdfGrid, samples: &[f64]) -> Result<CdfComparison> {
    let empirical = empirical_cdf(samples, numeric.grid())?;
    let sup_distance = numeric.sup_distance(&empirical)?;
    Ok(CdfComparison {
        numeric,
        empirical,
        sup_distance,
    })
}

/// `(F_{k+1}, G_{k+1})` after `k = steps` iterations from an empty queue.
pub fn lindley_transient(cfg: &ExperimentConfig) -> Result<(CdfGrid, CdfGrid)> {
    let (arrival, service) = (cfg.arrival()?, cfg.service()?);
    let grid = cfg.lindley_grid()?;
    let mut f = CdfGrid::point_mass_at_zero(grid.nodes())?;
    let mut g = f.clone();
    for _ in 0..cfg.lindley.steps {
        g = idle_cdf(&f, &arrival, &service)?;
        f = lindley_iterate(&f, &arrival, &service)?;
    }
    Ok((f, g))
}

pub enum LindleyOutput {
    Comparison(LindleyReport),
    Transient(CdfGrid, CdfGrid),
}

pub fn lindley(cfg: &ExperimentConfig) -> Result<LindleyOutput> {
    match cfg.lindley.mode {
        LindleyMode::FixedPoint => lindley_compare(cfg).map(LindleyOutput::Comparison),
        LindleyMode::Iterate => lindley_transient(cfg).map(|(f, g)| LindleyOutput::Transient(f, g)),
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub mode: FixedPointMode,
    pub fixed_point: FixedPoint,
    pub coherence: f64,
}

pub fn fixed_point(cfg: &ExperimentConfig) -> Result<FixedPointReport> {
    let engine = CollisionEngine::new(cfg.model()?)?;
    let mode = cfg.fixed_point.mode;
    let fixed_point = engine.averaged_map_fixed_point(mode)?;
    let coherence = coherence(&fixed_point.state)?;
    Ok(FixedPointReport {
        mode,
        fixed_point,
        coherence,
    })
}

/// Runs `f` on a pool with `threads` workers, or the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
