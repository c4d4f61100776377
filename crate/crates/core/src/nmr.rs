//! Two-spin NMR realisation of the Trotter steps.
//!
//! Each step `U'_s` of a two-qubit instance with diagonal `H_p` becomes
//! an x pulse on both spins, z rotations for the single-spin `σ_z` terms, a
//! free evolution under the scalar coupling for the `σ_z⊗σ_z` term, and a
//! closing x pulse. Spin `k` is qubit `k`.
//!
//! Rotations follow `rot_x(θ) = exp(−i·θ/2·σ_x)` and
//! `rot_z(φ) = exp(−i·φ/2·σ_z)`; free evolution is
//! `exp(−i·t·(ω₁I_z¹ + ω₂I_z² + 2πJ·I_z¹I_z²))` with `I_z = σ_z/2`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::evolve::{operator_fidelity, EvolutionPlan, EvolveError};
use crate::linalg::{max_abs_diff, CMatrix, I};
use crate::operators::{Pauli, PauliString};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NmrError {
    #[error("pulse compilation needs a diagonal problem Hamiltonian; found term {0}")]
    UnsupportedHamiltonian(String),
    #[error("pulse compilation supports exactly 2 qubits, got {0}")]
    WrongQubitCount(usize),
    #[error("step {step} outside 0..={steps}")]
    SOutOfRange { step: usize, steps: usize },
    #[error("coupling constant must be positive, got {0}")]
    BadCoupling(f64),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

/// Scalar coupling `J` (Hz) and rotating-frame offsets `ω₁, ω₂` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinSystem {
    coupling_hz: f64,
    offsets: [f64; 2],
}

impl SpinSystem {
    pub fn new(coupling_hz: f64, offsets: [f64; 2]) -> Result<Self, NmrError> {
        if !(coupling_hz > 0.0 && coupling_hz.is_finite()) {
            return Err(NmrError::BadCoupling(coupling_hz));
        }
        Ok(Self { coupling_hz, offsets })
    }

    /// ¹³C/¹H in chloroform, `J = 214.5 Hz`, on resonance.
    pub fn chloroform() -> Self {
        Self {
            coupling_hz: 214.5,
            offsets: [0.0, 0.0],
        }
    }

    pub fn coupling_hz(&self) -> f64 {
        self.coupling_hz
    }

    pub fn offsets(&self) -> [f64; 2] {
        self.offsets
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PulseOp {
    RotX { angle: f64, spins: Vec<usize> },
    RotZ { angle: f64, spins: Vec<usize> },
    /// Acts on both spins.
    FreeEvolve { duration: f64 },
}

fn round_sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

impl Serialize for PulseOp {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(Some(3))?;
        match self {
            PulseOp::RotX { angle, spins } => {
                map.serialize_entry("kind", "rot_x")?;
                map.serialize_entry("spins", spins)?;
                map.serialize_entry("angle_rad", &round_sig12(*angle))?;
            }
            PulseOp::RotZ { angle, spins } => {
                map.serialize_entry("kind", "rot_z")?;
                map.serialize_entry("spins", spins)?;
                map.serialize_entry("angle_rad", &round_sig12(*angle))?;
            }
            PulseOp::FreeEvolve { duration } => {
                map.serialize_entry("kind", "free_evolve")?;
                map.serialize_entry("spins", &[0, 1])?;
                map.serialize_entry("duration_s", duration)?;
            }
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseSequence {
    #[serde(skip)]
    pub system: SpinSystem,
    pub step: usize,
    pub ops: Vec<PulseOp>,
    /// `U'_s = exp(i·global_phase)·simulate_sequence(self)`. Collects the
    /// dropped identity term and any wrapping of the coupling phase.
    #[serde(skip)]
    pub global_phase: f64,
}

impl PulseSequence {
    pub fn x_angle(&self) -> f64 {
        self.ops
            .iter()
            .find_map(|op| match op {
                PulseOp::RotX { angle, .. } => Some(*angle),
                _ => None,
            })
            .unwrap_or(0.0)
    }

    pub fn free_evolution_time(&self) -> f64 {
        self.ops
            .iter()
            .map(|op| match op {
                PulseOp::FreeEvolve { duration } => *duration,
                _ => 0.0,
            })
            .sum()
    }

    /// Angle of the z rotation on `spin`, or 0 if none is emitted.
    pub fn z_angle(&self, spin: usize) -> f64 {
        self.ops
            .iter()
            .map(|op| match op {
                PulseOp::RotZ { angle, spins } if spins.contains(&spin) => *angle,
                _ => 0.0,
            })
            .sum()
    }
}

/// Coefficients `(II, IZ, ZI, ZZ)` of a diagonal two-qubit operator.
fn diagonal_coefficients(terms: &[PauliString]) -> Result<[f64; 4], NmrError> {
    let mut c = [0.0; 4];
    for t in terms {
        if t.n_qubits() != 2 {
            return Err(NmrError::WrongQubitCount(t.n_qubits()));
        }
        let slot = match (t.axes[0], t.axes[1]) {
            (Pauli::I, Pauli::I) => 0,
            (Pauli::Z, Pauli::I) => 1,
            (Pauli::I, Pauli::Z) => 2,
            (Pauli::Z, Pauli::Z) => 3,
            _ => return Err(NmrError::UnsupportedHamiltonian(t.label())),
        };
        c[slot] += t.coefficient;
    }
    Ok(c)
}

/// Compiles step `s` of the Trotterized evolution.
///
/// With `b = s/S`: `θ = (1 − b)·τ·g` on both spins, `φ_k = 2·b·τ·c_Z(k)`
/// (minus the offset precession during free evolution), and free evolution
/// for `t = 2·b·τ·c_ZZ/(πJ)` after wrapping the coupling phase into
/// `[0, π)`. Rotations with zero angle and zero-length free evolution are
/// omitted.
pub fn compile_step(
    plan: &EvolutionPlan,
    hp_paulis: &[PauliString],
    step: usize,
    system: &SpinSystem,
) -> Result<PulseSequence, NmrError> {
    if step > plan.steps() {
        return Err(NmrError::SOutOfRange {
            step,
            steps: plan.steps(),
        });
    }
    let [c_id, c_z0, c_z1, c_zz] = diagonal_coefficients(hp_paulis)?;
    let b = plan.step_s(step);
    let tau = plan.tau();

    let theta = (1.0 - b) * tau * plan.coupling().value();
    let mut global_phase = -b * tau * c_id;

    let zz_phase = b * tau * c_zz;
    let wrapped = zz_phase.rem_euclid(PI);
    global_phase -= zz_phase - wrapped;
    let duration = 2.0 * wrapped / (PI * system.coupling_hz);

    let [w0, w1] = system.offsets;
    let phi0 = 2.0 * b * tau * c_z0 - w0 * duration;
    let phi1 = 2.0 * b * tau * c_z1 - w1 * duration;

    let mut ops = Vec::with_capacity(5);
    if theta != 0.0 {
        ops.push(PulseOp::RotX {
            angle: theta,
            spins: vec![0, 1],
        });
    }
    if phi0 != 0.0 {
        ops.push(PulseOp::RotZ {
            angle: phi0,
            spins: vec![0],
        });
    }
    if phi1 != 0.0 {
        ops.push(PulseOp::RotZ {
            angle: phi1,
            spins: vec![1],
        });
    }
    if duration > 0.0 {
        ops.push(PulseOp::FreeEvolve { duration });
    }
    if theta != 0.0 {
        ops.push(PulseOp::RotX {
            angle: theta,
            spins: vec![0, 1],
        });
    }
    Ok(PulseSequence {
        system: *system,
        step,
        ops,
        global_phase,
    })
}

/// Sequences for `s = 0..=S`, in application order.
pub fn compile_full(
    plan: &EvolutionPlan,
    hp_paulis: &[PauliString],
    system: &SpinSystem,
) -> Result<Vec<PulseSequence>, NmrError> {
    (0..=plan.steps()).map(|s| compile_step(plan, hp_paulis, s, system)).collect()
}

fn on_spin(single: Matrix2<Complex64>, spin: usize) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    let single = CMatrix::from_iterator(2, 2, single.iter().copied());
    match spin {
        0 => id.kronecker(&single),
        _ => single.kronecker(&id),
    }
}

fn rx(angle: f64) -> Matrix2<Complex64> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Matrix2::new(c.into(), -I * s, -I * s, c.into())
}

fn rz(angle: f64) -> Matrix2<Complex64> {
    Matrix2::new((-I * angle / 2.0).exp(), 0.0.into(), 0.0.into(), (I * angle / 2.0).exp())
}

fn free_evolution(system: &SpinSystem, t: f64) -> CMatrix {
    let [w0, w1] = system.offsets;
    let j = system.coupling_hz;
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        4,
        (0..4usize).map(|idx| {
            let z0 = if idx & 1 == 0 { 1.0 } else { -1.0 };
            let z1 = if idx & 2 == 0 { 1.0 } else { -1.0 };
            let energy = w0 * z0 / 2.0 + w1 * z1 / 2.0 + 2.0 * PI * j * z0 * z1 / 4.0;
            (-I * energy * t).exp()
        }),
    ))
}

/// Exact 4×4 unitary of a pulse sequence.
pub fn simulate_sequence(seq: &PulseSequence) -> CMatrix {
    let mut u = CMatrix::identity(4, 4);
    for op in &seq.ops {
        let factor = match op {
            PulseOp::RotX { angle, spins } => spins
                .iter()
                .fold(CMatrix::identity(4, 4), |acc, &k| on_spin(rx(*angle), k) * acc),
            PulseOp::RotZ { angle, spins } => spins
                .iter()
                .fold(CMatrix::identity(4, 4), |acc, &k| on_spin(rz(*angle), k) * acc),
            PulseOp::FreeEvolve { duration } => free_evolution(&seq.system, *duration),
        };
        u = factor * u;
    }
    u
}

/// Agreement of one compiled step with its Trotter factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepVerification {
    pub step: usize,
    pub fidelity: f64,
    /// Largest entry of `|U'_s − e^{iφ}·V|` with the tracked phase `φ`.
    pub phase_exact_error: f64,
}

pub fn verify_step(seq: &PulseSequence, reference: &CMatrix) -> Result<StepVerification, NmrError> {
    let v = simulate_sequence(seq);
    let phased = &v * Complex64::from_polar(1.0, seq.global_phase);
    Ok(StepVerification {
        step: seq.step,
        fidelity: operator_fidelity(reference, &v)?,
        phase_exact_error: max_abs_diff(reference, &phased),
    })
}

/// One JSON object per line: `{step, ops: [...]}`.
pub fn pulse_program_jsonl(sequences: &[PulseSequence]) -> String {
    sequences
        .iter()
        .map(|s| serde_json::to_string(s).expect("sequence serializes") + "\n")
        .collect()
}
