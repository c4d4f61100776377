//! State evolution under `H(s) = (1 − s)·H_i + s·H_p`.
//!
//! Three routes are provided: continuous integration of the Schrödinger
//! equation (ħ = 1) with fixed-step RK4, the exact discrete product
//! `Π_s exp(−i·H(s/S)·τ)`, and the symmetric second-order Trotter product
//! that replaces each factor by
//! `exp(−i(1−s/S)H_i τ/2)·exp(−i(s/S)H_p τ)·exp(−i(1−s/S)H_i τ/2)`.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{self, CMatrix, CVector};
use crate::operators::{mix, CouplingStrength, HermitianOperator};

/// Tolerance used to decide which levels belong to the ground eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("step {step} outside 0..={steps}")]
    SOutOfRange { step: usize, steps: usize },
    #[error("integration step too large: norm drift {drift:e} in one step of {dt}")]
    StepTooLarge { dt: f64, drift: f64 },
    #[error("invalid evolution plan: {0}")]
    InvalidPlan(String),
    #[error("evolution exceeded its time budget")]
    Timeout,
}

/// Normalized state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amplitudes: CVector,
}

impl QuantumState {
    pub fn new(n_qubits: usize, amplitudes: CVector) -> Result<Self, EvolveError> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(EvolveError::DimensionMismatch(amplitudes.len(), 1 << n_qubits));
        }
        let norm = amplitudes.norm();
        if (norm * norm - 1.0).abs() > 1e-9 {
            return Err(EvolveError::NotNormalized(norm));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = CVector::zeros(1 << n_qubits);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn apply(&self, u: &CMatrix) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amplitudes: u * &self.amplitudes,
        }
    }
}

/// Ground state of `g·Σσ_x`: amplitude `(−1)^popcount(j)/√N` at `|j⟩`.
pub fn initial_ground_state(n_qubits: usize) -> QuantumState {
    let dim = 1usize << n_qubits;
    let a = 1.0 / (dim as f64).sqrt();
    let amplitudes = CVector::from_iterator(
        dim,
        (0..dim).map(|j| Complex64::from(if j.count_ones() % 2 == 0 { a } else { -a })),
    );
    QuantumState { n_qubits, amplitudes }
}

/// Born-rule populations `|a_j|²`.
pub fn measure_probabilities(psi: &QuantumState) -> Vec<f64> {
    psi.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// `|⟨ψ|φ⟩|²`.
pub fn state_overlap(psi: &QuantumState, phi: &QuantumState) -> Result<f64, EvolveError> {
    if psi.n_qubits != phi.n_qubits {
        return Err(EvolveError::DimensionMismatch(psi.n_qubits, phi.n_qubits));
    }
    Ok(psi.amplitudes.dotc(&phi.amplitudes).norm_sqr().min(1.0))
}

/// `|Tr(U†V)|/d`; equals 1 exactly when `U` and `V` agree up to a global
/// phase.
pub fn operator_fidelity(u: &CMatrix, v: &CMatrix) -> Result<f64, EvolveError> {
    if u.shape() != v.shape() {
        return Err(EvolveError::DimensionMismatch(u.nrows(), v.nrows()));
    }
    let d = u.nrows() as f64;
    let tr: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok((tr.norm() / d).min(1.0))
}

/// Smallest `‖U − e^{iφ}V‖` over the phase that aligns `Tr(U†V)`; a
/// phase-free operator distance.
pub fn phase_aligned_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    let tr: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    let phase = if tr.norm() > 0.0 { tr.conj() / tr.norm() } else { Complex64::new(1.0, 0.0) };
    linalg::operator_norm(&(u - v * phase))
}

/// Monotone map from normalized time `t/T ∈ [0,1]` onto `s ∈ [0,1]`.
pub trait Schedule: Send + Sync + fmt::Debug {
    fn at(&self, u: f64) -> f64;
    fn name(&self) -> &str;
}

/// `s(t) = t/T`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Linear;

impl Schedule for Linear {
    fn at(&self, u: f64) -> f64 {
        u.clamp(0.0, 1.0)
    }

    fn name(&self) -> &str {
        "linear"
    }
}

/// Total time `T`, step parameter `S` (there are `S + 1` steps of length
/// `τ = T/(S+1)`), coupling `g` and schedule.
#[derive(Debug, Clone)]
pub struct EvolutionPlan {
    total_time: f64,
    steps: usize,
    coupling: CouplingStrength,
    schedule: Arc<dyn Schedule>,
}

impl EvolutionPlan {
    pub fn new(total_time: f64, steps: usize, coupling: CouplingStrength) -> Result<Self, EvolveError> {
        Self::with_schedule(total_time, steps, coupling, Arc::new(Linear))
    }

    pub fn with_schedule(
        total_time: f64,
        steps: usize,
        coupling: CouplingStrength,
        schedule: Arc<dyn Schedule>,
    ) -> Result<Self, EvolveError> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(EvolveError::InvalidPlan(format!("total time must be positive, got {total_time}")));
        }
        if steps < 1 {
            return Err(EvolveError::InvalidPlan("step count must be at least 1".into()));
        }
        let samples: Vec<f64> = (0..=1000).map(|k| schedule.at(k as f64 / 1000.0)).collect();
        if samples[0] != 0.0 || samples[1000] != 1.0 {
            return Err(EvolveError::InvalidPlan("schedule must map 0 to 0 and 1 to 1".into()));
        }
        if samples.windows(2).any(|w| w[1] < w[0]) || samples.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(EvolveError::InvalidPlan("schedule must be monotone into [0, 1]".into()));
        }
        Ok(Self {
            total_time,
            steps,
            coupling,
            schedule,
        })
    }

    /// `g = 1`, `T = 10.45`, `S = 10`, giving `τ = 0.95`.
    pub fn reference() -> Self {
        Self::new(10.45, 10, CouplingStrength::default()).expect("valid reference plan")
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.total_time / (self.steps + 1) as f64
    }

    pub fn coupling(&self) -> CouplingStrength {
        self.coupling
    }

    pub fn schedule(&self) -> &dyn Schedule {
        self.schedule.as_ref()
    }

    /// Interpolation parameter of discrete step `s`.
    pub fn step_s(&self, step: usize) -> f64 {
        self.schedule.at(step as f64 / self.steps as f64)
    }

    /// Default RK4 step: `T/10000`, further limited so that `dt·‖H‖` stays
    /// well inside the stability region.
    pub fn default_dt(&self, hi: &HermitianOperator, hp: &HermitianOperator) -> f64 {
        let bound = hi.norm_bound().max(hp.norm_bound()).max(1e-12);
        (self.total_time / 10_000.0).min(0.2 / bound)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "continuous")]
    Continuous,
    #[serde(rename = "discrete-exact")]
    DiscreteExact,
    #[serde(rename = "trotter2")]
    Trotter2,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Continuous => "continuous",
            Method::DiscreteExact => "discrete-exact",
            Method::Trotter2 => "trotter2",
        })
    }
}

/// Per-step `fidelity(U_s, U'_s)` and the fidelity of the full products.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityAudit {
    pub per_step: Vec<f64>,
    pub overall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionReport {
    pub method: Method,
    #[serde(serialize_with = "serialize_state")]
    pub final_state: QuantumState,
    pub probabilities: Vec<f64>,
    pub ground_population_trace: Vec<(f64, f64)>,
    pub fidelity_audit: Option<FidelityAudit>,
}

fn serialize_state<S: Serializer>(psi: &QuantumState, ser: S) -> Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = psi.amplitudes.iter().map(|a| [a.re, a.im]).collect();
    pairs.serialize(ser)
}

impl EvolutionReport {
    fn new(method: Method, final_state: QuantumState, trace: Vec<(f64, f64)>, audit: Option<FidelityAudit>) -> Self {
        Self {
            method,
            probabilities: measure_probabilities(&final_state),
            final_state,
            ground_population_trace: trace,
            fidelity_audit: audit,
        }
    }

    /// Population in the ground eigenspace of `H(1) = H_p`.
    pub fn final_ground_population(&self) -> f64 {
        self.ground_population_trace.last().map_or(0.0, |&(_, p)| p)
    }

    pub fn argmax(&self) -> usize {
        argmax(&self.probabilities)
    }
}

pub(crate) fn argmax(p: &[f64]) -> usize {
    p.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
        .0
}

/// Population of `psi` in the lowest eigenspace of `h`.
pub fn ground_population(h: &HermitianOperator, psi: &QuantumState) -> f64 {
    if let Some(d) = h.diagonal() {
        let e0 = d.iter().copied().fold(f64::INFINITY, f64::min);
        return d
            .iter()
            .zip(psi.amplitudes.iter())
            .filter(|(e, _)| **e - e0 <= DEGENERACY_TOL)
            .map(|(_, a)| a.norm_sqr())
            .sum();
    }
    let (values, vectors) = linalg::eigh(h.matrix());
    values
        .iter()
        .enumerate()
        .take_while(|(_, e)| **e - values[0] <= DEGENERACY_TOL)
        .map(|(k, _)| vectors.column(k).dotc(&psi.amplitudes).norm_sqr())
        .sum()
}

fn check_pair(hi: &HermitianOperator, hp: &HermitianOperator) -> Result<(), EvolveError> {
    if hi.n_qubits() != hp.n_qubits() {
        return Err(EvolveError::DimensionMismatch(hi.n_qubits(), hp.n_qubits()));
    }
    Ok(())
}

/// Number of points on which continuous runs record the ground population.
pub const TRACE_POINTS: usize = 101;

/// RK4 integration from the initial ground state over `[0, T]`.
///
/// The step count is rounded up to a multiple of 100 so that the 101-point
/// trace falls on integration steps; the state is renormalized after every
/// step and a drift above `1e-6` is reported as [`EvolveError::StepTooLarge`].
pub fn evolve_continuous(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
    dt: f64,
) -> Result<EvolutionReport, EvolveError> {
    evolve_continuous_until(hi, hp, plan, dt, None)
}

/// [`evolve_continuous`] with an optional wall-clock deadline.
pub fn evolve_continuous_until(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
    dt: f64,
    deadline: Option<Instant>,
) -> Result<EvolutionReport, EvolveError> {
    check_pair(hi, hp)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(EvolveError::InvalidPlan(format!("dt must be positive, got {dt}")));
    }
    let total = plan.total_time();
    let intervals = TRACE_POINTS - 1;
    let per_interval = ((total / dt) / intervals as f64).ceil().max(1.0) as usize;
    let n_steps = per_interval * intervals;
    let h = total / n_steps as f64;

    let s_of = |t: f64| plan.schedule().at(t / total);
    let a = SparseRows::new(hi);
    let b = SparseRows::new(hp);
    let dim = a.rows.len();
    let zero = Complex64::new(0.0, 0.0);
    // out = -i·H(s)·psi
    let rhs = |s: f64, psi: &[Complex64], out: &mut [Complex64]| {
        let (wa, wb) = (1.0 - s, s);
        for (r, o) in out.iter_mut().enumerate() {
            let h = wa * a.row_dot(r, psi) + wb * b.row_dot(r, psi);
            *o = Complex64::new(h.im, -h.re);
        }
    };

    let mut psi = initial_ground_state(hi.n_qubits());
    let mut trace = Vec::with_capacity(TRACE_POINTS);
    trace.push((0.0, ground_population(hi, &psi)));

    let mut amps: Vec<Complex64> = psi.amplitudes.iter().copied().collect();
    let mut k = [vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]];
    let mut tmp = vec![zero; dim];
    for step in 0..n_steps {
        if step % 1024 == 0 && deadline.is_some_and(|d| Instant::now() > d) {
            return Err(EvolveError::Timeout);
        }
        let t = step as f64 * h;
        let [k1, k2, k3, k4] = &mut k;
        rhs(s_of(t), &amps, k1);
        axpy(&amps, h / 2.0, k1, &mut tmp);
        rhs(s_of(t + h / 2.0), &tmp, k2);
        axpy(&amps, h / 2.0, k2, &mut tmp);
        rhs(s_of(t + h / 2.0), &tmp, k3);
        axpy(&amps, h, k3, &mut tmp);
        rhs(s_of(t + h), &tmp, k4);
        let mut norm_sq = 0.0;
        for i in 0..dim {
            amps[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
            norm_sq += amps[i].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        let drift = (norm - 1.0).abs();
        if drift > 1e-6 || !norm.is_finite() {
            return Err(EvolveError::StepTooLarge { dt: h, drift });
        }
        amps.iter_mut().for_each(|x| *x /= norm);

        if (step + 1) % per_interval == 0 {
            let s = s_of((step + 1) as f64 * h);
            psi.amplitudes = CVector::from_column_slice(&amps);
            trace.push((s, ground_population(&mix(hi, hp, s), &psi)));
        }
    }
    let amps = CVector::from_vec(amps);
    psi.amplitudes = amps;
    Ok(EvolutionReport::new(Method::Continuous, psi, trace, None))
}

/// Row-wise nonzero entries of an operator, used by the integrator.
struct SparseRows {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseRows {
    fn new(op: &HermitianOperator) -> Self {
        let m = op.matrix();
        let rows = (0..m.nrows())
            .map(|r| {
                (0..m.ncols())
                    .filter(|&c| m[(r, c)] != Complex64::new(0.0, 0.0))
                    .map(|c| (c, m[(r, c)]))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    fn row_dot(&self, r: usize, psi: &[Complex64]) -> Complex64 {
        self.rows[r].iter().map(|&(c, v)| v * psi[c]).sum()
    }
}

/// `out = x + alpha·y`.
fn axpy(x: &[Complex64], alpha: f64, y: &[Complex64], out: &mut [Complex64]) {
    for ((o, a), b) in out.iter_mut().zip(x).zip(y) {
        *o = a + b * alpha;
    }
}

fn check_step(plan: &EvolutionPlan, step: usize) -> Result<(), EvolveError> {
    if step > plan.steps() {
        return Err(EvolveError::SOutOfRange {
            step,
            steps: plan.steps(),
        });
    }
    Ok(())
}

/// `U_s = exp(−i·H(s/S)·τ)`.
pub fn exact_step(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
    step: usize,
) -> Result<CMatrix, EvolveError> {
    check_pair(hi, hp)?;
    check_step(plan, step)?;
    let h = mix(hi, hp, plan.step_s(step));
    Ok(match h.diagonal() {
        Some(d) => linalg::diagonal_propagator(d, plan.tau()),
        None => linalg::propagator(h.matrix(), plan.tau()),
    })
}

fn propagate(h: &HermitianOperator, scale: f64, t: f64) -> CMatrix {
    let scaled = t * scale;
    if scaled == 0.0 {
        return CMatrix::identity(h.dim(), h.dim());
    }
    match h.diagonal() {
        Some(d) => linalg::diagonal_propagator(d, scaled),
        None => linalg::propagator(h.matrix(), scaled),
    }
}

/// Symmetric split `U'_s`: half a step of `H_i`, a full step of `H_p`, then
/// the other half step of `H_i`.
pub fn trotter_step(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
    step: usize,
) -> Result<CMatrix, EvolveError> {
    check_pair(hi, hp)?;
    check_step(plan, step)?;
    let s = plan.step_s(step);
    let tau = plan.tau();
    let half = propagate(hi, 1.0 - s, tau / 2.0);
    let full = propagate(hp, s, tau);
    Ok(&half * full * &half)
}

/// Compares every `U_s` with `U'_s` and the two ordered products.
pub fn trotter_audit(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
) -> Result<FidelityAudit, EvolveError> {
    let (exact, split) = step_products(hi, hp, plan)?;
    Ok(FidelityAudit {
        per_step: exact.per_step,
        overall: operator_fidelity(&exact.product, &split.product)?,
    })
}

struct Products {
    per_step: Vec<f64>,
    product: CMatrix,
}

fn step_products(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
) -> Result<(Products, Products), EvolveError> {
    check_pair(hi, hp)?;
    let dim = hi.dim();
    let mut exact = CMatrix::identity(dim, dim);
    let mut split = CMatrix::identity(dim, dim);
    let mut per_step = Vec::with_capacity(plan.steps() + 1);
    for step in 0..=plan.steps() {
        let u = exact_step(hi, hp, plan, step)?;
        let v = trotter_step(hi, hp, plan, step)?;
        per_step.push(operator_fidelity(&u, &v)?);
        exact = u * exact;
        split = v * split;
    }
    Ok((
        Products {
            per_step: per_step.clone(),
            product: exact,
        },
        Products {
            per_step,
            product: split,
        },
    ))
}

/// Ordered products `(Π U_s, Π U'_s)`, with `s = 0` applied first.
pub fn step_product_pair(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
) -> Result<(CMatrix, CMatrix), EvolveError> {
    let (a, b) = step_products(hi, hp, plan)?;
    Ok((a.product, b.product))
}

fn evolve_steps(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
    method: Method,
) -> Result<EvolutionReport, EvolveError> {
    check_pair(hi, hp)?;
    let mut psi = initial_ground_state(hi.n_qubits());
    let mut trace = Vec::with_capacity(plan.steps() + 2);
    trace.push((0.0, ground_population(hi, &psi)));
    for step in 0..=plan.steps() {
        let u = match method {
            Method::Trotter2 => trotter_step(hi, hp, plan, step)?,
            _ => exact_step(hi, hp, plan, step)?,
        };
        psi = psi.apply(&u);
        let s = plan.step_s(step);
        trace.push((s, ground_population(&mix(hi, hp, s), &psi)));
    }
    let audit = trotter_audit(hi, hp, plan)?;
    Ok(EvolutionReport::new(method, psi, trace, Some(audit)))
}

/// Applies `U_0, U_1, …, U_S` to the initial ground state.
pub fn evolve_discrete_exact(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
) -> Result<EvolutionReport, EvolveError> {
    evolve_steps(hi, hp, plan, Method::DiscreteExact)
}

/// Applies `U'_0, U'_1, …, U'_S` to the initial ground state.
pub fn evolve_trotter(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    plan: &EvolutionPlan,
) -> Result<EvolutionReport, EvolveError> {
    evolve_steps(hi, hp, plan, Method::Trotter2)
}
