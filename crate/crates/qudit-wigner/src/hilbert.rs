//! State vectors, density matrices and the density-matrix teleportation
//! oracle.
//!
//! Everything in this module works directly on complex amplitudes and
//! matrices. It provides the eigenstate and Bell-state constructors, the
//! outcome-dependent correction unitary, and [`oracle_teleport`] — an
//! independent simulation of the protocol that the phase-space pipeline in
//! [`crate::teleport`] is validated against.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::Error;
use crate::phase_space::PrimeDimension;
use crate::Result;

const TAU: f64 = std::f64::consts::TAU;

/// e^{2πi·num/den}
#[inline]
pub(crate) fn phase(num: i64, den: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * num as f64 / den as f64)
}

/// A normalized pure state of `parties` qudits of dimension N.
#[derive(Debug, Clone)]
pub struct StateVector {
    dim: PrimeDimension,
    parties: usize,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, checking length and unit norm
    /// (tolerance 1e-12 on Σ|ψ|²).
    pub fn new(dim: PrimeDimension, parties: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expect = dim.size().pow(parties as u32);
        if parties == 0 || amplitudes.len() != expect {
            return Err(Error::ShapeMismatch(format!(
                "expected {expect} amplitudes for {parties} parties of dimension {dim}, got {}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized((norm_sq - 1.0).abs()));
        }
        Ok(Self {
            dim,
            parties,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// The position eigenstate |k⟩.
    pub fn position_eigenstate(dim: PrimeDimension, k: u64) -> Self {
        let k = (k % dim.n()) as usize;
        let mut amplitudes = DVector::from_element(dim.size(), Complex64::ZERO);
        amplitudes[k] = Complex64::ONE;
        Self {
            dim,
            parties: 1,
            amplitudes,
        }
    }

    /// The momentum eigenstate with amplitudes e^{2πi·kl/N}/√N over the
    /// position basis.
    pub fn momentum_eigenstate(dim: PrimeDimension, l: u64) -> Self {
        let n = dim.n();
        let l = l % n;
        let scale = 1.0 / (n as f64).sqrt();
        let amplitudes = DVector::from_iterator(
            dim.size(),
            (0..n).map(|k| phase((k * l) as i64, n) * scale),
        );
        Self {
            dim,
            parties: 1,
            amplitudes,
        }
    }

    /// The two-party Bell state with momentum-sum label `p_sum` and
    /// position-difference label `q_diff`:
    /// (1/√N) Σ_k e^{2πi·k·p_sum/N} |k⟩|k−q_diff⟩.
    pub fn bell_state(dim: PrimeDimension, p_sum: u64, q_diff: u64) -> Self {
        let n = dim.n();
        let p_sum = p_sum % n;
        let q_diff = q_diff % n;
        let size = dim.size();
        let scale = 1.0 / (n as f64).sqrt();
        let mut amplitudes = DVector::from_element(size * size, Complex64::ZERO);
        for k in 0..n {
            let partner = dim.sub(k, q_diff);
            amplitudes[(k * n + partner) as usize] = phase((k * p_sum) as i64, n) * scale;
        }
        Self {
            dim,
            parties: 2,
            amplitudes,
        }
    }

    /// The maximally entangled state with perfectly correlated positions and
    /// anti-correlated momenta: the Bell state with both labels zero.
    pub fn epr(dim: PrimeDimension) -> Self {
        Self::bell_state(dim, 0, 0)
    }

    /// A Haar-like random pure state: independent standard-normal real and
    /// imaginary parts for every amplitude, then normalized.
    pub fn random_pure<R: Rng + ?Sized>(dim: PrimeDimension, parties: usize, rng: &mut R) -> Self {
        let len = dim.size().pow(parties as u32);
        let mut amplitudes = DVector::from_element(len, Complex64::ZERO);
        for a in amplitudes.iter_mut() {
            *a = Complex64::new(standard_normal(rng), standard_normal(rng));
        }
        let norm = amplitudes.norm();
        amplitudes /= Complex64::new(norm, 0.0);
        Self {
            dim,
            parties,
            amplitudes,
        }
    }

    /// Hilbert-space dimension of one party.
    pub fn dim(&self) -> PrimeDimension {
        self.dim
    }

    /// Number of parties.
    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Amplitudes in the position product basis, party 1 most significant.
    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// |self⟩ ⊗ |other⟩, with self's parties more significant.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "tensor product across dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            parties: self.parties + other.parties,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }

    /// The rank-one density matrix |self⟩⟨self|.
    pub fn to_density(&self) -> DensityMatrix {
        let mat = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix {
            dim: self.dim,
            parties: self.parties,
            entries: mat,
        }
    }
}

/// Box–Muller draw from the standard normal distribution.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// A mixed (or pure) state of `parties` qudits: Hermitian, unit-trace,
/// positive-semidefinite matrix in the position product basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim: PrimeDimension,
    parties: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Builds and fully validates a density matrix: Hermitian within 1e-12,
    /// trace 1 within 1e-12, eigenvalues ≥ −1e-10.
    pub fn new(dim: PrimeDimension, parties: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        let dm = Self::from_parts_unchecked(dim, parties, entries)?;
        dm.validate()?;
        Ok(dm)
    }

    /// Builds a density matrix checking only the shape. Used by the inverse
    /// Wigner transform, whose output is Hermitian and unit-trace by
    /// construction but not necessarily positive; call [`Self::validate`]
    /// when positivity matters.
    pub fn from_parts_unchecked(
        dim: PrimeDimension,
        parties: usize,
        entries: DMatrix<Complex64>,
    ) -> Result<Self> {
        let expect = dim.size().pow(parties as u32);
        if parties == 0 || entries.nrows() != expect || entries.ncols() != expect {
            return Err(Error::ShapeMismatch(format!(
                "expected a {expect}×{expect} matrix for {parties} parties of dimension {dim}, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self {
            dim,
            parties,
            entries,
        })
    }

    /// The maximally mixed state, identity/N^parties.
    pub fn maximally_mixed(dim: PrimeDimension, parties: usize) -> Self {
        let size = dim.size().pow(parties as u32);
        let scale = Complex64::new(1.0 / size as f64, 0.0);
        Self {
            dim,
            parties,
            entries: DMatrix::identity(size, size) * scale,
        }
    }

    /// Checks the density-matrix invariants: Hermitian within 1e-12, trace 1
    /// within 1e-12, minimum eigenvalue ≥ −1e-10.
    pub fn validate(&self) -> Result<()> {
        let herm_dev = hermiticity_deviation(&self.entries);
        if herm_dev > 1e-12 {
            return Err(Error::NotHermitian(herm_dev));
        }
        let trace_dev = (self.trace() - Complex64::ONE).norm();
        if trace_dev > 1e-12 {
            return Err(Error::BadTrace(trace_dev));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -1e-10 {
            return Err(Error::NotPositiveSemidefinite(min_eig));
        }
        Ok(())
    }

    /// Hilbert-space dimension of one party.
    pub fn dim(&self) -> PrimeDimension {
        self.dim
    }

    /// Number of parties.
    pub fn parties(&self) -> usize {
        self.parties
    }

    /// The underlying matrix, party 1 most significant in the index.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Tr ρ
    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().sum()
    }

    /// Smallest eigenvalue of the (Hermitian) matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.entries)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Kronecker product, with self's parties more significant.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "tensor product across dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            parties: self.parties + other.parties,
            entries: self.entries.kronecker(&other.entries),
        })
    }

    /// Partial trace keeping the listed parties (0-based, party 0 most
    /// significant), in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let k = self.parties;
        if keep.is_empty() || keep.iter().any(|&i| i >= k) || !is_strictly_increasing(keep) {
            return Err(Error::ShapeMismatch(format!(
                "keep list {keep:?} invalid for {k} parties"
            )));
        }
        let n = self.dim.size();
        let traced: Vec<usize> = (0..k).filter(|i| !keep.contains(i)).collect();
        let kept_size = n.pow(keep.len() as u32);
        let traced_size = n.pow(traced.len() as u32);

        // digit weight of party i in a k-party row/column index
        let weight = |party: usize| n.pow((k - 1 - party) as u32);

        let mut out = DMatrix::from_element(kept_size, kept_size, Complex64::ZERO);
        for row_kept in 0..kept_size {
            for col_kept in 0..kept_size {
                let mut acc = Complex64::ZERO;
                for t in 0..traced_size {
                    let mut row = 0usize;
                    let mut col = 0usize;
                    // scatter kept digits
                    let mut rk = row_kept;
                    let mut ck = col_kept;
                    for &party in keep.iter().rev() {
                        row += (rk % n) * weight(party);
                        col += (ck % n) * weight(party);
                        rk /= n;
                        ck /= n;
                    }
                    // scatter traced digits (equal on row and column)
                    let mut tt = t;
                    for &party in traced.iter().rev() {
                        let d = tt % n;
                        row += d * weight(party);
                        col += d * weight(party);
                        tt /= n;
                    }
                    acc += self.entries[(row, col)];
                }
                out[(row_kept, col_kept)] = acc;
            }
        }
        Ok(Self {
            dim: self.dim,
            parties: keep.len(),
            entries: out,
        })
    }

    /// Tr(self · other) as a real number; the imaginary part is a round-off
    /// artifact for Hermitian inputs and is discarded.
    pub fn overlap(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.entries.nrows(), other.entries.nrows());
        let mut acc = Complex64::ZERO;
        for i in 0..self.entries.nrows() {
            for j in 0..self.entries.ncols() {
                acc += self.entries[(i, j)] * other.entries[(j, i)];
            }
        }
        acc.re
    }
}

fn is_strictly_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// max |M − M†| entry
pub(crate) fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi rotations.
///
/// Sizes here stay small (N^parties ≤ a few thousand), so an O(n³)-per-sweep
/// Jacobi iteration with quadratic convergence is plenty, and it has no
/// external solver dependency.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    // enforce exact Hermitian symmetry so the rotations stay stable
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let off = |a: &DMatrix<Complex64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        s
    };
    let scale: f64 = (0..n).map(|i| a[(i, i)].re.abs()).sum::<f64>().max(1.0);
    let tol = (1e-15 * scale).powi(2);
    for _sweep in 0..60 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm_sqr() <= tol / (n * n) as f64 {
                    continue;
                }
                // unitary 2×2 rotation that zeroes a[(p,q)]:
                // diagonalize [[app, apq], [apq*, aqq]]
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let abs = apq.norm();
                let u = apq / Complex64::new(abs, 0.0); // phase of apq
                let theta = 0.5 * (2.0 * abs).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                // columns: apply rotation on the right
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c + aiq * u.conj() * s;
                    a[(i, q)] = -aip * u * s + aiq * c;
                }
                // rows: apply conjugate transpose on the left
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c + aqj * u * s;
                    a[(q, j)] = -apj * u.conj() * s + aqj * c;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)].re).collect()
}

/// The outcome-dependent correction: the displacement unitary
/// Σ_k e^{2πi·p1·k/N} |k⟩⟨k−x2| that undoes the phase-space shift left by a
/// Bell measurement with outcome (x2, p1).
#[derive(Debug, Clone)]
pub struct UnitaryCorrection {
    dim: PrimeDimension,
    x_shift: u64,
    p_shift: u64,
    matrix: DMatrix<Complex64>,
}

impl UnitaryCorrection {
    /// Builds the correction for measured position-difference `x2` and
    /// momentum-sum `p1`.
    pub fn new(dim: PrimeDimension, x2: u64, p1: u64) -> Self {
        let n = dim.n();
        let x2 = x2 % n;
        let p1 = p1 % n;
        let mut matrix = DMatrix::from_element(dim.size(), dim.size(), Complex64::ZERO);
        for k in 0..n {
            let from = dim.sub(k, x2);
            matrix[(k as usize, from as usize)] = phase((p1 * k) as i64, n);
        }
        Self {
            dim,
            x_shift: x2,
            p_shift: p1,
            matrix,
        }
    }

    /// Position shift x2 the unitary applies.
    pub fn x_shift(&self) -> u64 {
        self.x_shift
    }

    /// Momentum shift p1 the unitary applies.
    pub fn p_shift(&self) -> u64 {
        self.p_shift
    }

    /// The N×N matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// U ρ U†
    pub fn apply(&self, state: &DensityMatrix) -> Result<DensityMatrix> {
        if state.parties() != 1 || state.dim() != self.dim {
            return Err(Error::ShapeMismatch(
                "correction unitary applies to a single party".into(),
            ));
        }
        let entries = &self.matrix * state.matrix() * self.matrix.adjoint();
        DensityMatrix::from_parts_unchecked(self.dim, 1, entries)
    }

    /// U |ψ⟩
    pub fn apply_state(&self, state: &StateVector) -> Result<StateVector> {
        if state.parties() != 1 || state.dim() != self.dim {
            return Err(Error::ShapeMismatch(
                "correction unitary applies to a single party".into(),
            ));
        }
        Ok(StateVector {
            dim: self.dim,
            parties: 1,
            amplitudes: &self.matrix * &state.amplitudes,
        })
    }

    /// U† U, for unitarity checks.
    pub fn gram(&self) -> DMatrix<Complex64> {
        self.matrix.adjoint() * &self.matrix
    }
}

/// Density-matrix simulation of one teleportation branch: projects
/// input ⊗ EPR onto the Bell state with labels (q_diff = x2, p_sum = p1) on
/// parties 1–2 and returns the outcome probability together with the
/// normalized conditional state of party 3, before correction.
///
/// This is the oracle the phase-space pipeline is checked against. It is
/// computed by contracting the projected pure components
/// (⟨Bell| ⊗ I)(|i⟩ ⊗ |EPR⟩), which is the exact projection written without
/// materializing the N³×N³ joint matrix.
pub fn oracle_teleport(
    input: &DensityMatrix,
    x2: u64,
    p1: u64,
) -> Result<(f64, DensityMatrix)> {
    if input.parties() != 1 {
        return Err(Error::ShapeMismatch(
            "oracle input must be a single-party state".into(),
        ));
    }
    let dim = input.dim();
    let n = dim.size();
    let bell = StateVector::bell_state(dim, p1, x2);
    let epr = StateVector::epr(dim);
    let bell_amp = bell.amplitudes();
    let epr_amp = epr.amplitudes();

    // v_i = (⟨Bell|₁₂ ⊗ I₃)(|i⟩₁ ⊗ |EPR⟩₂₃), an N-vector for each basis i
    let mut projected = vec![vec![Complex64::ZERO; n]; n];
    for (i, v) in projected.iter_mut().enumerate() {
        for k2 in 0..n {
            let b = bell_amp[i * n + k2].conj();
            if b == Complex64::ZERO {
                continue;
            }
            for (k3, slot) in v.iter_mut().enumerate() {
                *slot += b * epr_amp[k2 * n + k3];
            }
        }
    }

    // ρ₃ ∝ Σ_{ij} ρ_in[i,j] · v_i v_j†
    let mut conditional = DMatrix::from_element(n, n, Complex64::ZERO);
    for i in 0..n {
        for j in 0..n {
            let w = input.matrix()[(i, j)];
            if w == Complex64::ZERO {
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    conditional[(a, b)] += w * projected[i][a] * projected[j][b].conj();
                }
            }
        }
    }
    let probability: f64 = conditional.diagonal().sum().re;
    if probability < 1e-15 {
        return Err(Error::ZeroProbability(probability));
    }
    conditional /= Complex64::new(probability, 0.0);
    let state = DensityMatrix::from_parts_unchecked(dim, 1, conditional)?;
    Ok((probability, state))
}
