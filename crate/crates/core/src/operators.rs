//! Hamiltonians of the search: the database operator, the problem and
//! initial Hamiltonians, their interpolation, and Pauli-string conversion.
//!
//! Qubit 0 is the least significant bit of a basis index. In Pauli strings
//! written as text the leftmost character acts on the most significant
//! qubit, so `"ZI"` is `σ_z` on qubit 1.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::database::EncodedDatabase;
use crate::linalg::{CMatrix, CVector};

/// Elementwise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("matrix is {rows}x{cols}, expected {dim}x{dim}")]
    BadShape { rows: usize, cols: usize, dim: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not diagonal")]
    NonDiagonalInput,
    #[error("operators act on {0} and {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("interpolation parameter {0} outside [0, 1]")]
    SOutOfRange(f64),
    #[error("Pauli string has {got} axes, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("coupling strength must be positive and finite, got {0}")]
    BadCoupling(f64),
    #[error("invalid Pauli label {0:?}")]
    BadPauliLabel(String),
}

/// Strength `g` of the transverse field in the initial Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingStrength(f64);

impl CouplingStrength {
    pub fn new(g: f64) -> Result<Self, OperatorError> {
        if g > 0.0 && g.is_finite() {
            Ok(Self(g))
        } else {
            Err(OperatorError::BadCoupling(g))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for CouplingStrength {
    fn default() -> Self {
        Self(1.0)
    }
}

/// Dense Hermitian operator on `n` qubits. Diagonal operators also keep
/// their real diagonal for cheap matrix-vector products.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n_qubits: usize,
    matrix: CMatrix,
    diagonal: Option<Vec<f64>>,
}

impl HermitianOperator {
    pub fn new(n_qubits: usize, matrix: CMatrix) -> Result<Self, OperatorError> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(OperatorError::BadShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim,
            });
        }
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((matrix[(r, c)] - matrix[(c, r)].conj()).norm());
            }
        }
        if worst > HERMITIAN_TOL {
            return Err(OperatorError::NotHermitian(worst));
        }
        let is_diag = (0..dim).all(|r| (0..dim).all(|c| r == c || matrix[(r, c)] == Complex64::default()));
        let diagonal = is_diag.then(|| (0..dim).map(|k| matrix[(k, k)].re).collect());
        Ok(Self {
            n_qubits,
            matrix,
            diagonal,
        })
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self, OperatorError> {
        let dim = values.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(OperatorError::BadShape { rows: dim, cols: dim, dim: dim.next_power_of_two().max(2) });
        }
        let n = dim.trailing_zeros() as usize;
        let matrix = CMatrix::from_diagonal(&CVector::from_iterator(dim, values.iter().map(|&v| v.into())));
        Ok(Self {
            n_qubits: n,
            matrix,
            diagonal: Some(values.to_vec()),
        })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        Self::from_diagonal(&vec![0.0; 1 << n_qubits]).expect("power of two")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn diagonal(&self) -> Option<&[f64]> {
        self.diagonal.as_deref()
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal.is_some()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Upper bound on the spectral norm (largest absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `self · ψ`, using the diagonal fast path when available.
    pub fn apply(&self, psi: &CVector) -> CVector {
        match &self.diagonal {
            Some(d) => CVector::from_iterator(psi.len(), psi.iter().zip(d).map(|(a, &v)| a * v)),
            None => &self.matrix * psi,
        }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match &self.diagonal {
            Some(d) => {
                let mut v = d.clone();
                v.sort_by(f64::total_cmp);
                v
            }
            None => crate::linalg::eigvalsh(&self.matrix),
        }
    }

    fn check_same_size(&self, other: &Self) -> Result<(), OperatorError> {
        if self.n_qubits != other.n_qubits {
            return Err(OperatorError::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(())
    }
}

/// `𝒟 = Σ value_i |i⟩⟨i|`.
pub fn database_operator(db: &EncodedDatabase) -> HermitianOperator {
    HermitianOperator::from_diagonal(db.values()).expect("database size is a power of two")
}

/// `(𝒟 − target·I)²`. Its zero-energy ground states are the indices whose
/// value equals the target.
pub fn problem_hamiltonian(d: &HermitianOperator, target: f64) -> Result<HermitianOperator, OperatorError> {
    let diag = d.diagonal().ok_or(OperatorError::NonDiagonalInput)?;
    let squared: Vec<f64> = diag.iter().map(|v| (v - target).powi(2)).collect();
    HermitianOperator::from_diagonal(&squared)
}

/// `g·Σ_k σ_x^(k)`.
pub fn initial_hamiltonian(n_qubits: usize, g: CouplingStrength) -> HermitianOperator {
    assert!(n_qubits >= 1, "initial Hamiltonian needs at least one qubit");
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for k in 0..n_qubits {
            m[(j ^ (1 << k), j)] += Complex64::from(g.value());
        }
    }
    HermitianOperator::new(n_qubits, m).expect("σ_x sum is Hermitian")
}

/// `(1 − s)·H_i + s·H_p`.
pub fn interpolate(
    hi: &HermitianOperator,
    hp: &HermitianOperator,
    s: f64,
) -> Result<HermitianOperator, OperatorError> {
    hi.check_same_size(hp)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(OperatorError::SOutOfRange(s));
    }
    Ok(mix(hi, hp, s))
}

/// Unchecked convex combination for callers that already validated inputs.
pub(crate) fn mix(hi: &HermitianOperator, hp: &HermitianOperator, s: f64) -> HermitianOperator {
    let matrix = hi.matrix() * Complex64::from(1.0 - s) + hp.matrix() * Complex64::from(s);
    let diagonal = match (hi.diagonal(), hp.diagonal()) {
        (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| (1.0 - s) * x + s * y).collect()),
        _ => None,
    };
    HermitianOperator {
        n_qubits: hi.n_qubits,
        matrix,
        diagonal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// `⟨b XOR flip| P |b⟩` for input bit `b`.
    fn amplitude(self, bit: bool) -> Complex64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) => Complex64::new(1.0, 0.0),
            (Pauli::Y, false) => Complex64::new(0.0, 1.0),
            (Pauli::Y, true) => Complex64::new(0.0, -1.0),
            (Pauli::Z, false) => Complex64::new(1.0, 0.0),
            (Pauli::Z, true) => Complex64::new(-1.0, 0.0),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A real multiple of a tensor product of single-qubit Paulis. `axes[k]`
/// acts on qubit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub coefficient: f64,
    pub axes: Vec<Pauli>,
}

impl PauliString {
    pub fn new(coefficient: f64, axes: Vec<Pauli>) -> Self {
        Self { coefficient, axes }
    }

    /// Parses a label such as `"ZI"` (leftmost = most significant qubit).
    pub fn from_label(coefficient: f64, label: &str) -> Result<Self, OperatorError> {
        let axes = label
            .chars()
            .rev()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(OperatorError::BadPauliLabel(label.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if axes.is_empty() {
            return Err(OperatorError::BadPauliLabel(label.to_string()));
        }
        Ok(Self { coefficient, axes })
    }

    pub fn label(&self) -> String {
        self.axes.iter().rev().map(|p| p.symbol()).collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn is_diagonal(&self) -> bool {
        self.axes.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    fn flip_mask(&self) -> usize {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (k, _)| m | (1 << k))
    }

    /// Returns `(row, amplitude)` such that `P|col⟩ = amplitude·|row⟩`
    /// (without the coefficient).
    fn column_entry(&self, col: usize) -> (usize, Complex64) {
        let amp = self
            .axes
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (k, p)| acc * p.amplitude(col >> k & 1 == 1));
        (col ^ self.flip_mask(), amp)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}", self.coefficient, self.label())
    }
}

impl FromStr for PauliString {
    type Err = OperatorError;

    /// `"1.5*ZZ"` or a bare label (coefficient 1).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('*') {
            Some((c, label)) => {
                let c: f64 = c.trim().parse().map_err(|_| OperatorError::BadPauliLabel(s.to_string()))?;
                Self::from_label(c, label.trim())
            }
            None => Self::from_label(1.0, s.trim()),
        }
    }
}

/// Coefficients `Tr(P·H)/2^n` over all `4^n` Pauli strings, dropping those
/// below `1e-12` in magnitude. Output is in lexicographic label order.
pub fn pauli_decompose(h: &HermitianOperator) -> Vec<PauliString> {
    let n = h.n_qubits();
    let dim = h.dim();
    let m = h.matrix();
    let mut terms = Vec::new();
    for code in 0..(1usize << (2 * n)) {
        // most significant qubit varies slowest, giving label order
        let axes: Vec<Pauli> = (0..n).map(|k| Pauli::ALL[(code >> (2 * k)) & 3]).collect();
        let p = PauliString::new(1.0, axes);
        // Tr(P H) = Σ_j ⟨j|P|m⟩ H[m, j] with P|m⟩ = amp·|j⟩
        let mut tr = Complex64::default();
        for col in 0..dim {
            let (row, amp) = p.column_entry(col);
            tr += amp * m[(col, row)];
        }
        let c = tr.re / dim as f64;
        if c.abs() >= 1e-12 {
            terms.push(PauliString::new(c, p.axes));
        }
    }
    terms.sort_by_key(|t| t.label());
    terms
}

/// Dense `Σ c_P·P`.
pub fn pauli_compose(terms: &[PauliString], n_qubits: usize) -> Result<HermitianOperator, OperatorError> {
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for t in terms {
        if t.n_qubits() != n_qubits {
            return Err(OperatorError::LengthMismatch {
                expected: n_qubits,
                got: t.n_qubits(),
            });
        }
        for col in 0..dim {
            let (row, amp) = t.column_entry(col);
            m[(row, col)] += amp * t.coefficient;
        }
    }
    HermitianOperator::new(n_qubits, m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTermJson {
    pub coeff: f64,
    pub axes: String,
}

/// JSON shape `{n_qubits, pauli_terms: [{coeff, axes}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub n_qubits: usize,
    pub pauli_terms: Vec<PauliTermJson>,
}

impl From<&HermitianOperator> for OperatorJson {
    fn from(h: &HermitianOperator) -> Self {
        Self {
            n_qubits: h.n_qubits(),
            pauli_terms: pauli_decompose(h)
                .into_iter()
                .map(|t| PauliTermJson {
                    coeff: t.coefficient,
                    axes: t.label(),
                })
                .collect(),
        }
    }
}

impl OperatorJson {
    pub fn to_operator(&self) -> Result<HermitianOperator, OperatorError> {
        let terms = self
            .pauli_terms
            .iter()
            .map(|t| PauliString::from_label(t.coeff, &t.axes))
            .collect::<Result<Vec<_>, _>>()?;
        pauli_compose(&terms, self.n_qubits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::phone_book;
    use crate::linalg::max_abs_diff;

    fn labels(terms: &[PauliString]) -> Vec<(String, f64)> {
        terms.iter().map(|t| (t.label(), t.coefficient)).collect()
    }

    #[test]
    fn database_operator_is_diagonal() {
        let d = database_operator(&phone_book());
        assert_eq!(d.diagonal().unwrap(), &[4.0, 3.0, 1.0, 2.0]);
        let m = d.matrix();
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    assert_eq!(m[(r, c)], Complex64::default());
                }
            }
        }
        let two = database_operator(&EncodedDatabase::from_values(&[5.0, 7.0]).unwrap());
        assert_eq!(two.diagonal().unwrap(), &[5.0, 7.0]);
        let flat = database_operator(&EncodedDatabase::from_values(&[3.0; 4]).unwrap());
        assert!(max_abs_diff(flat.matrix(), &(CMatrix::identity(4, 4) * Complex64::from(3.0))) == 0.0);
    }

    #[test]
    fn problem_hamiltonian_examples() {
        let d = HermitianOperator::from_diagonal(&[4.0, 3.0, 1.0, 2.0]).unwrap();
        assert_eq!(problem_hamiltonian(&d, 2.0).unwrap().diagonal().unwrap(), &[4.0, 1.0, 1.0, 0.0]);
        assert_eq!(problem_hamiltonian(&d, 3.0).unwrap().diagonal().unwrap(), &[1.0, 0.0, 4.0, 1.0]);
        let flat = HermitianOperator::from_diagonal(&[2.5; 4]).unwrap();
        assert_eq!(problem_hamiltonian(&flat, 2.5).unwrap(), HermitianOperator::zeros(2));
        let hi = initial_hamiltonian(2, CouplingStrength::default());
        assert_eq!(problem_hamiltonian(&hi, 1.0), Err(OperatorError::NonDiagonalInput));
    }

    #[test]
    fn initial_hamiltonian_examples() {
        let h1 = initial_hamiltonian(1, CouplingStrength::default());
        assert_eq!(h1.matrix(), &CMatrix::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()]));
        let h2 = initial_hamiltonian(2, CouplingStrength::default());
        let ev = h2.eigenvalues();
        for (a, b) in ev.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(h2.trace(), 0.0);
        // spectrum g(n − 2k) with binomial multiplicities
        let g = CouplingStrength::new(0.7).unwrap();
        let ev = initial_hamiltonian(3, g).eigenvalues();
        let expected = [-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0].map(|x| 0.7 * x);
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(CouplingStrength::new(0.0).is_err());
    }

    #[test]
    fn interpolation() {
        let hi = initial_hamiltonian(2, CouplingStrength::default());
        let hp = HermitianOperator::from_diagonal(&[4.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(interpolate(&hi, &hp, 0.0).unwrap().matrix(), hi.matrix());
        assert_eq!(interpolate(&hi, &hp, 1.0).unwrap().matrix(), hp.matrix());
        let half = interpolate(&hi, &hp, 0.5).unwrap();
        let avg = (hi.matrix() + hp.matrix()) * Complex64::from(0.5);
        assert!(max_abs_diff(half.matrix(), &avg) < 1e-15);
        assert_eq!(interpolate(&hi, &hp, 1.5), Err(OperatorError::SOutOfRange(1.5)));
        let h1 = initial_hamiltonian(1, CouplingStrength::default());
        assert_eq!(interpolate(&h1, &hp, 0.5), Err(OperatorError::DimensionMismatch(1, 2)));
    }

    #[test]
    fn decompose_examples() {
        let hp = HermitianOperator::from_diagonal(&[4.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(
            labels(&pauli_decompose(&hp)),
            vec![("II".into(), 1.5), ("IZ".into(), 1.0), ("ZI".into(), 1.0), ("ZZ".into(), 0.5)]
        );
        let id = HermitianOperator::from_diagonal(&[1.0; 4]).unwrap();
        assert_eq!(labels(&pauli_decompose(&id)), vec![("II".into(), 1.0)]);
        let hi = initial_hamiltonian(2, CouplingStrength::default());
        assert_eq!(
            labels(&pauli_decompose(&hi)),
            vec![("IX".into(), 1.0), ("XI".into(), 1.0)]
        );
    }

    #[test]
    fn qubit_order_is_little_endian() {
        // σ_z on qubit 0 flips sign on odd indices
        let z0 = pauli_compose(&[PauliString::from_label(1.0, "IZ").unwrap()], 2).unwrap();
        assert_eq!(z0.diagonal().unwrap(), &[1.0, -1.0, 1.0, -1.0]);
        let y = pauli_compose(&[PauliString::from_label(1.0, "Y").unwrap()], 1).unwrap();
        assert_eq!(y.matrix()[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(y.matrix()[(0, 1)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn compose_examples() {
        let terms: Vec<PauliString> = ["1.5*II", "1*IZ", "1*ZI", "0.5*ZZ"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(pauli_compose(&terms, 2).unwrap().diagonal().unwrap(), &[4.0, 1.0, 1.0, 0.0]);
        assert_eq!(pauli_compose(&[], 2).unwrap(), HermitianOperator::zeros(2));
        let x2 = pauli_compose(&[PauliString::from_label(2.0, "X").unwrap()], 1).unwrap();
        assert_eq!(x2.matrix()[(0, 1)], Complex64::from(2.0));
        assert_eq!(x2.matrix()[(1, 0)], Complex64::from(2.0));
        assert_eq!(
            pauli_compose(&terms, 3),
            Err(OperatorError::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn json_roundtrip() {
        let hp = HermitianOperator::from_diagonal(&[4.0, 1.0, 1.0, 0.0]).unwrap();
        let json = serde_json::to_string(&OperatorJson::from(&hp)).unwrap();
        assert!(json.contains(r#"{"coeff":0.5,"axes":"ZZ"}"#));
        let back: OperatorJson = serde_json::from_str(&json).unwrap();
        assert!(max_abs_diff(back.to_operator().unwrap().matrix(), hp.matrix()) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), 2.0.into(), 0.0.into()]);
        assert!(matches!(HermitianOperator::new(1, m), Err(OperatorError::NotHermitian(_))));
    }
}
