//! Level traces of `H(s)`, minimum gaps and gap-vs-size sweeps.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::evolve::{self, EvolutionPlan, EvolveError};
use crate::operators::{
    database_operator, initial_hamiltonian, mix, problem_hamiltonian, CouplingStrength, HermitianOperator,
};
use crate::database::EncodedDatabase;
use crate::evolve::DEGENERACY_TOL;

pub const DEFAULT_GRID_POINTS: usize = 1001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("need at least 2 grid points, got {0}")]
    TooFewGridPoints(usize),
    #[error("operators act on {0} and {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("qubit count {0} outside the supported sweep range 1..=10")]
    UnsupportedSize(usize),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

/// Sorted eigenvalues of `H(s)` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTrace {
    pub s_grid: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub min_gap: f64,
    pub s_at_min: f64,
    pub ground_degeneracy_at_end: usize,
    /// Interior grid points where `E_1 − E_0 < 1e-9`; a level crossing on
    /// the ground level. Reported, not treated as an error.
    pub interior_crossings: Vec<f64>,
}

fn uniform_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| k as f64 / (points - 1) as f64).collect()
}

pub fn trace_spectrum(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    grid_points: usize,
) -> Result<SpectrumTrace, SpectrumError> {
    if grid_points < 2 {
        return Err(SpectrumError::TooFewGridPoints(grid_points));
    }
    if hi.n_qubits() != hp.n_qubits() {
        return Err(SpectrumError::DimensionMismatch(hi.n_qubits(), hp.n_qubits()));
    }
    let s_grid = uniform_grid(grid_points);
    let levels = s_grid.par_iter().map(|&s| mix(hi, hp, s).eigenvalues()).collect();
    Ok(SpectrumTrace { s_grid, levels })
}

impl SpectrumTrace {
    /// CSV with header `s,E0,…,E{N−1}`; reals carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s");
        let width = self.levels.first().map_or(0, Vec::len);
        for k in 0..width {
            write!(out, ",E{k}").unwrap();
        }
        out.push('\n');
        for (s, row) in self.s_grid.iter().zip(&self.levels) {
            write!(out, "{}", fmt_real(*s)).unwrap();
            for e in row {
                write!(out, ",{}", fmt_real(*e)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn min_gap(trace: &SpectrumTrace) -> GapReport {
    let mut best = (f64::INFINITY, 0.0);
    let mut interior_crossings = Vec::new();
    let last = trace.s_grid.len().saturating_sub(1);
    for (k, (s, row)) in trace.s_grid.iter().zip(&trace.levels).enumerate() {
        let gap = if row.len() > 1 { row[1] - row[0] } else { f64::INFINITY };
        if gap < best.0 {
            best = (gap, *s);
        }
        if k > 0 && k < last && gap < DEGENERACY_TOL {
            interior_crossings.push(*s);
        }
    }
    let end = trace.levels.last().map(Vec::as_slice).unwrap_or(&[]);
    let ground_degeneracy_at_end = end
        .iter()
        .take_while(|e| **e - end[0] <= DEGENERACY_TOL)
        .count()
        .max(1);
    GapReport {
        min_gap: best.0.max(0.0),
        s_at_min: best.1,
        ground_degeneracy_at_end,
        interior_crossings,
    }
}

/// Produces `(values, target)` instances for a qubit count.
pub trait InstanceGenerator {
    fn generate(&self, n_qubits: usize) -> (Vec<f64>, f64);
}

/// Seeded random permutations of `1..=N` searched for a fixed target code.
/// With `anchor_example` set, `n = 2` yields the phone-book instance
/// `(4, 3, 1, 2)` searched for 2.
#[derive(Debug, Clone)]
pub struct PermutationInstances {
    pub seed: u64,
    pub target: f64,
    pub anchor_example: bool,
}

impl InstanceGenerator for PermutationInstances {
    fn generate(&self, n_qubits: usize) -> (Vec<f64>, f64) {
        if self.anchor_example && n_qubits == 2 {
            return (vec![4.0, 3.0, 1.0, 2.0], 2.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (n_qubits as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut values: Vec<f64> = (1..=(1usize << n_qubits)).map(|v| v as f64).collect();
        values.shuffle(&mut rng);
        (values, self.target)
    }
}

/// The identity permutation `(1, …, N)` with a fixed target.
#[derive(Debug, Clone)]
pub struct IdentityInstances {
    pub target: f64,
}

impl InstanceGenerator for IdentityInstances {
    fn generate(&self, n_qubits: usize) -> (Vec<f64>, f64) {
        ((1..=(1usize << n_qubits)).map(|v| v as f64).collect(), self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub min_gap: f64,
    /// `None` if no `T ≤ max_time` reached the success threshold.
    pub t_to_success: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub coupling: CouplingStrength,
    pub grid_points: usize,
    pub success_threshold: f64,
    pub max_time: f64,
    pub instance_timeout: Option<Duration>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            coupling: CouplingStrength::default(),
            grid_points: DEFAULT_GRID_POINTS,
            success_threshold: 0.9,
            max_time: 4096.0,
            instance_timeout: Some(Duration::from_secs(60)),
        }
    }
}

/// Final population on the solution index(es) after continuous evolution
/// for time `total_time`.
pub fn success_probability(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    total_time: f64,
    deadline: Option<Instant>,
) -> Result<f64, EvolveError> {
    let plan = EvolutionPlan::new(total_time, 1, CouplingStrength::default())?;
    let report = evolve::evolve_continuous_until(hi, hp, &plan, plan.default_dt(hi, hp), deadline)?;
    Ok(report.final_ground_population())
}

/// Rounds up to two significant figures.
fn ceil_sig2(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(1 - x.abs().log10().floor() as i32);
    ((x * scale) - 1e-9).ceil() / scale
}

/// First-crossing search: double `T` from 1 until success, then bisect the
/// last bracket and report its upper end rounded up to two significant
/// figures.
pub fn time_to_success(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    options: &SweepOptions,
    deadline: Option<Instant>,
) -> Result<Option<f64>, EvolveError> {
    let ok = |t: f64| -> Result<bool, EvolveError> {
        Ok(success_probability(hi, hp, t, deadline)? >= options.success_threshold)
    };
    let mut hi_t = 1.0;
    if ok(hi_t)? {
        return Ok(Some(hi_t));
    }
    let mut lo_t;
    loop {
        lo_t = hi_t;
        hi_t *= 2.0;
        if hi_t > options.max_time {
            return Ok(None);
        }
        if ok(hi_t)? {
            break;
        }
    }
    while hi_t - lo_t > 0.005 * hi_t {
        let mid = 0.5 * (lo_t + hi_t);
        if ok(mid)? {
            hi_t = mid;
        } else {
            lo_t = mid;
        }
    }
    Ok(Some(ceil_sig2(hi_t)))
}

/// One row per qubit count: the instance's minimum gap and the time the
/// linear schedule needs to reach the success threshold.
pub fn gap_scaling_sweep(
    n_range: &[usize],
    generator: &dyn InstanceGenerator,
    options: &SweepOptions,
) -> Result<Vec<ScalingRow>, SpectrumError> {
    let mut rows = Vec::with_capacity(n_range.len());
    for &n in n_range {
        if !(1..=10).contains(&n) {
            return Err(SpectrumError::UnsupportedSize(n));
        }
        let deadline = options.instance_timeout.map(|d| Instant::now() + d);
        let (values, target) = generator.generate(n);
        let db = EncodedDatabase::from_values(&values).expect("generator yields 2^n values");
        let hp = problem_hamiltonian(&database_operator(&db), target).expect("database operator is diagonal");
        let hi = initial_hamiltonian(n, options.coupling);
        let gap = min_gap(&trace_spectrum(&hi, &hp, options.grid_points)?);
        if deadline.is_some_and(|d| Instant::now() > d) {
            return Err(EvolveError::Timeout.into());
        }
        rows.push(ScalingRow {
            n,
            size: 1 << n,
            min_gap: gap.min_gap,
            t_to_success: time_to_success(&hi, &hp, options, deadline)?,
        });
    }
    Ok(rows)
}

/// CSV with header `n,N,min_gap,T_to_success`.
pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("n,N,min_gap,T_to_success\n");
    for r in rows {
        let t = r.t_to_success.map_or_else(|| "inf".to_string(), fmt_real);
        writeln!(out, "{},{},{},{}", r.n, r.size, fmt_real(r.min_gap), t).unwrap();
    }
    out
}
