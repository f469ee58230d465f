//! The queued collision map and everything built on top of it.
//!
//! One collision takes the system state left by ancilla `n − 1` to the
//! state after ancilla `n` leaves:
//!
//! ```text
//! ρ_S^n = Tr_A{ E_SA(S_n)[ E_S(I_n)[ρ_S^{n−1}] ⊗ E_A(W_n)[ρ_A] ] }
//! ```
//!
//! so the recursion only sees `(W_n, I_n, S_n)` and the previous state.

use alloc::vec::Vec;

use crate::distributions::DistributionSpec;
use crate::error::{invalid, Error, Result};
use crate::linalg::{null_space, CMatrix, C64};
use crate::quadrature::GaussLegendre;
use crate::quantum::{coherence, partial_trace_ancilla_matrix, Channel, ChannelSpec, DensityMatrix, Superoperator};
use crate::queue::{simulate_queue, QueueTrace};
use crate::rng::RngStream;

pub const DEFAULT_BURN_IN: f64 = 0.2;
pub const DEFAULT_N_ANCILLAS: usize = 100_000;
/// Gauss–Legendre nodes used to average channels over an exponential law.
pub const AVERAGING_NODES: usize = 200;
/// Upper quantile at which exponential laws are truncated for averaging.
pub const AVERAGING_QUANTILE: f64 = 1.0 - 1e-8;
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// Full definition of a queued collision model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub arrival: DistributionSpec,
    pub service: DistributionSpec,
    /// Acts on the system during the idle time `I_n`.
    pub idle_channel: ChannelSpec,
    /// Acts on the ancilla during its waiting time `W_n`.
    pub waiting_channel: ChannelSpec,
    /// Acts on system ⊗ ancilla during the service time `S_n`.
    pub interaction_channel: ChannelSpec,
    pub ancilla_state: DensityMatrix,
    pub initial_system_state: DensityMatrix,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        self.arrival.validate()?;
        self.service.validate()?;
        for (ch, want, what) in [
            (&self.idle_channel, 2, "idle channel"),
            (&self.waiting_channel, 2, "waiting channel"),
            (&self.interaction_channel, 4, "interaction channel"),
        ] {
            ch.validate()?;
            if let Some(d) = ch.hilbert_dim() {
                if d != want {
                    return Err(invalid(alloc::format!("{what} must act on dimension {want}, not {d}")));
                }
            }
        }
        for st in [&self.ancilla_state, &self.initial_system_state] {
            if st.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: st.dim(),
                });
            }
        }
        Ok(())
    }
}

/// State of the system right after one ancilla leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionSample {
    /// 1-based ancilla index.
    pub n: usize,
    pub departure: f64,
    pub state: DensityMatrix,
    pub coherence: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub samples: Vec<CollisionSample>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn coherences(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.coherence)
    }

    pub fn final_state(&self) -> Option<&DensityMatrix> {
        self.samples.last().map(|s| &s.state)
    }

    fn window(&self, burn_in_fraction: f64) -> Result<&[CollisionSample]> {
        if !(0.0..1.0).contains(&burn_in_fraction) {
            return Err(invalid("burn-in fraction must lie in [0, 1)"));
        }
        let skip = libm::floor(burn_in_fraction * self.samples.len() as f64) as usize;
        let w = &self.samples[skip.min(self.samples.len())..];
        if w.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(w)
    }

    /// The last `count` samples.
    pub fn tail(&self, count: usize) -> &[CollisionSample] {
        &self.samples[self.samples.len().saturating_sub(count)..]
    }
}

/// Single-run statistics of the coherence over the departure epochs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongRunStats {
    pub mean: f64,
    /// `E(C²) − E(C)²` over the window.
    pub variance: f64,
    pub count: usize,
}

impl LongRunStats {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        // Welford
        let (mut n, mut mean, mut m2) = (0usize, 0.0f64, 0.0f64);
        for x in values {
            n += 1;
            let d = x - mean;
            mean += d / n as f64;
            m2 += d * (x - mean);
        }
        if n == 0 {
            return Err(Error::EmptyWindow);
        }
        Ok(LongRunStats {
            mean,
            variance: (m2 / n as f64).max(0.0),
            count: n,
        })
    }

    /// `sqrt(Var / n)`, treating the samples as uncorrelated.
    pub fn naive_stderr(&self) -> f64 {
        libm::sqrt(self.variance / self.count as f64)
    }
}

/// Mean and variance of `C[n]` for `n > burn_in_fraction · N`.
pub fn long_run_stats(record: &TrajectoryRecord, burn_in_fraction: f64) -> Result<LongRunStats> {
    LongRunStats::from_values(record.window(burn_in_fraction)?.iter().map(|s| s.coherence))
}

/// Time-averaged state over the window together with the naive standard
/// error of each real component `(Re ρ00, Re ρ01, Im ρ01)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanState {
    pub mean: CMatrix,
    pub stderr: [f64; 3],
    pub count: usize,
}

impl MeanState {
    /// Components `(Re ρ00, Re ρ01, Im ρ01)` of the mean.
    pub fn components(&self) -> [f64; 3] {
        state_components(&self.mean)
    }
}

fn state_components(m: &CMatrix) -> [f64; 3] {
    [m[(0, 0)].re, m[(0, 1)].re, m[(0, 1)].im]
}

pub fn mean_state(record: &TrajectoryRecord, burn_in_fraction: f64) -> Result<MeanState> {
    let w = record.window(burn_in_fraction)?;
    let mut stats = [(0.0f64, 0.0f64); 3];
    let mut mean = CMatrix::zeros(2);
    let n = w.len() as f64;
    for s in w {
        let c = state_components(s.state.matrix());
        for (k, x) in c.iter().enumerate() {
            stats[k].0 += x;
            stats[k].1 += x * x;
        }
        for (m, z) in mean.as_mut_slice().iter_mut().zip(s.state.matrix().as_slice()) {
            *m += z;
        }
    }
    let mean = mean.scale_re(1.0 / n);
    let stderr = stats.map(|(s, s2)| {
        let mu = s / n;
        libm::sqrt(((s2 / n - mu * mu).max(0.0)) / n)
    });
    Ok(MeanState {
        mean,
        stderr,
        count: w.len(),
    })
}

/// A model with its channels compiled for repeated use.
#[derive(Debug, Clone)]
pub struct CollisionEngine {
    model: ModelSpec,
    idle: Channel,
    waiting: Channel,
    interaction: Channel,
}

impl CollisionEngine {
    pub fn new(model: ModelSpec) -> Result<Self> {
        model.validate()?;
        let idle = Channel::new(model.idle_channel)?;
        let waiting = Channel::new(model.waiting_channel)?;
        let mut interaction = Channel::new(model.interaction_channel)?;
        if let DistributionSpec::Deterministic { value } = model.service {
            interaction = interaction.with_cached_time(value);
        }
        Ok(CollisionEngine {
            model,
            idle,
            waiting,
            interaction,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    /// One application of the queued map with waiting time `w`, idle time
    /// `i` and service time `s`.
    pub fn collision_step(&self, rho_s: &DensityMatrix, w: f64, i: f64, s: f64) -> Result<DensityMatrix> {
        if !(w >= 0.0 && i >= 0.0 && s >= 0.0) {
            return Err(invalid("collision times must be nonnegative"));
        }
        let sys = self.idle.apply_matrix(i, rho_s.matrix())?;
        let anc = self.waiting.apply_matrix(w, self.model.ancilla_state.matrix())?;
        self.interact(&sys, &anc, s)
    }

    /// The map with identity idle/waiting dynamics and service time `tau`:
    /// `Tr_A{E_SA(τ)[ρ ⊗ ρ_A]}`.
    pub fn deterministic_limit_step(&self, rho_s: &DensityMatrix, tau: f64) -> Result<DensityMatrix> {
        self.interact(rho_s.matrix(), self.model.ancilla_state.matrix(), tau)
    }

    fn interact(&self, sys: &CMatrix, anc: &CMatrix, s: f64) -> Result<DensityMatrix> {
        let joint = self.interaction.apply_matrix(s, &sys.kron(anc))?;
        DensityMatrix::from_propagated(&partial_trace_ancilla_matrix(&joint))
    }

    /// Iterates the map over a queue trace from the initial system state.
    pub fn run_trajectory(&self, trace: &QueueTrace) -> Result<TrajectoryRecord> {
        let mut rho = self.model.initial_system_state.clone();
        let mut samples = Vec::with_capacity(trace.len());
        for k in 0..trace.len() {
            rho = self.collision_step(&rho, trace.waiting[k], trace.idle[k], trace.service[k])?;
            samples.push(CollisionSample {
                n: k + 1,
                departure: trace.departure[k],
                coherence: coherence(&rho)?,
                state: rho.clone(),
            });
        }
        Ok(TrajectoryRecord { samples })
    }

    /// Simulates a fresh queue on `stream` and runs the trajectory over it.
    pub fn run_seeded(&self, n_ancillas: usize, stream: &mut RngStream) -> Result<TrajectoryRecord> {
        let trace = simulate_queue(&self.model.arrival, &self.model.service, n_ancillas, stream)?;
        self.run_trajectory(&trace)
    }

    /// Run `run_index` of an ensemble: stream index equals the run index.
    pub fn run_indexed(&self, n_ancillas: usize, base_seed: u64, run_index: u64) -> Result<TrajectoryRecord> {
        self.run_seeded(n_ancillas, &mut RngStream::new(base_seed, run_index))
    }

    /// Average of the interaction channel over the service law.
    pub fn averaged_interaction(&self) -> Result<Superoperator> {
        average_over(&self.model.service, 4, |t| self.interaction.superoperator(t, 4))
    }

    /// Average of the idle channel over the interarrival law.
    pub fn averaged_idle(&self) -> Result<Superoperator> {
        average_over(&self.model.arrival, 2, |t| self.idle.superoperator(t, 2))
    }

    /// The 4×4 superoperator of the averaged map selected by `mode`.
    pub fn averaged_map(&self, mode: FixedPointMode) -> Result<Superoperator> {
        let e_sa = self.averaged_interaction()?;
        let (e_s, anc) = match mode {
            FixedPointMode::DeterministicLimit => (Superoperator::identity(2), self.model.ancilla_state.clone()),
            FixedPointMode::StochasticLimit => (self.averaged_idle()?, self.model.ancilla_state.clone()),
            FixedPointMode::MixedAncilla => (Superoperator::identity(2), DensityMatrix::maximally_mixed(2)),
        };
        Ok(Superoperator::from_map(2, |x| {
            let sys = e_s.apply(x);
            partial_trace_ancilla_matrix(&e_sa.apply(&sys.kron(anc.matrix())))
        }))
    }

    /// Unit-trace fixed point of the averaged map.
    pub fn averaged_map_fixed_point(&self, mode: FixedPointMode) -> Result<FixedPoint> {
        fixed_point(&self.averaged_map(mode)?)
    }
}

/// Which averaged channel to solve for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FixedPointMode {
    /// `Φ[ρ] = ∫ p_S(s) Tr_A{E_SA(s)[ρ ⊗ ρ_A]} ds`; a single point for
    /// deterministic service.
    DeterministicLimit,
    /// `Tr_A{Ē_SA[Ē_S[ρ] ⊗ ρ_A]}` with the idle channel averaged over the
    /// interarrival law.
    StochasticLimit,
    /// As the deterministic limit, with ancillas replaced by I/2.
    MixedAncilla,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub state: DensityMatrix,
    /// `max |Φ[ρ*] − ρ*|` entrywise.
    pub residual: f64,
}

/// Unit-trace fixed point of a trace-preserving qubit map, from the null
/// space of `M − I`.
pub fn fixed_point(map: &Superoperator) -> Result<FixedPoint> {
    if map.hilbert_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: map.hilbert_dim(),
        });
    }
    let shifted = map.matrix() - &CMatrix::identity(4);
    let basis = null_space(&shifted, FIXED_POINT_TOL);
    match basis.len() {
        1 => {}
        0 => return Err(Error::Numerical("averaged map has no eigenvalue 1".into())),
        d => return Err(Error::AmbiguousFixedPoint { dimension: d }),
    }
    let v = CMatrix::from_row_major(basis.into_iter().next().unwrap());
    let tr = v.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::Numerical("fixed point is traceless".into()));
    }
    let rho = v.scale(C64::new(1.0, 0.0) / tr);
    let state = DensityMatrix::from_propagated(&rho)?;
    let residual = map.apply(state.matrix()).max_abs_diff(state.matrix());
    if !(residual <= FIXED_POINT_TOL) {
        return Err(Error::Numerical(alloc::format!("fixed point residual {residual:e}")));
    }
    Ok(FixedPoint { state, residual })
}

fn average_over(
    law: &DistributionSpec,
    dim: usize,
    mut channel_at: impl FnMut(f64) -> Result<Superoperator>,
) -> Result<Superoperator> {
    match *law {
        DistributionSpec::Deterministic { value } => channel_at(value),
        DistributionSpec::Exponential { .. } => {
            let upper = law.quantile(AVERAGING_QUANTILE);
            let gl = GaussLegendre::new(AVERAGING_NODES);
            let mut acc = Superoperator::zeros(dim);
            let mut total = 0.0;
            for (t, w) in gl.on_interval(0.0, upper) {
                let weight = w * law.pdf(t).expect("exponential has a density");
                total += weight;
                acc = acc.add(&channel_at(t)?.scale(weight));
            }
            // Renormalize the truncated weight so the average stays trace preserving.
            Ok(acc.scale(1.0 / total))
        }
    }
}

/// Across-run statistics of `C[n]` at matched collision index.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub mean: Vec<f64>,
    /// Unbiased sample variance across runs.
    pub variance: Vec<f64>,
    pub n_runs: usize,
}

impl EnsembleStats {
    pub fn from_records(records: &[TrajectoryRecord]) -> Result<Self> {
        if records.len() < 2 {
            return Err(invalid("ensemble statistics need at least two runs"));
        }
        let n = records[0].len();
        if records.iter().any(|r| r.len() != n) {
            return Err(invalid("runs have different lengths"));
        }
        let runs = records.len() as f64;
        let mut mean = Vec::with_capacity(n);
        let mut variance = Vec::with_capacity(n);
        for k in 0..n {
            // shifted by the first run so identical runs give exactly zero variance
            let x0 = records[0].samples[k].coherence;
            let m = x0 + records.iter().map(|r| r.samples[k].coherence - x0).sum::<f64>() / runs;
            let v = records
                .iter()
                .map(|r| {
                    let d = r.samples[k].coherence - m;
                    d * d
                })
                .sum::<f64>()
                / (runs - 1.0);
            mean.push(m);
            variance.push(v);
        }
        Ok(EnsembleStats {
            mean,
            variance,
            n_runs: records.len(),
        })
    }
}

/// Serial ensemble: run `r` uses stream index `r`.
pub fn ensemble_average(
    engine: &CollisionEngine,
    n_ancillas: usize,
    n_runs: usize,
    base_seed: u64,
) -> Result<EnsembleStats> {
    if n_runs < 2 {
        return Err(invalid("n_runs must be >= 2"));
    }
    let records = (0..n_runs as u64)
        .map(|r| engine.run_indexed(n_ancillas, base_seed, r))
        .collect::<Result<Vec<_>>>()?;
    EnsembleStats::from_records(&records)
}
