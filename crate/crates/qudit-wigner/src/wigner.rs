//! Discrete Wigner transforms: forward, inverse, marginals, partial sums
//! and phase-space translations.
//!
//! For odd prime N the phase-space kernel at the point (q, p) is the
//! Hermitian matrix with entries
//!
//! ```text
//! A(q,p)[r,s] = e^{2πi·p(r−s)/N}   when r + s ≡ 2q (mod N), else 0.
//! ```
//!
//! A state ρ of k parties maps to the real grid
//! `W(α₁,…,α_k) = Tr(ρ · A(α₁)⊗…⊗A(α_k)) / N^k`, which sums to one and may
//! take negative values. The kernels satisfy `Tr(A(α)A(β)) = N·δ_{αβ}`, so
//! the map inverts as `ρ = Σ_α W(α)·A(α)` — [`from_wigner`] relies on that
//! and the round-trip is exercised heavily in the tests before anything
//! else is built on top of it.
//!
//! Grid storage order is fixed for serialization: party-major nesting with
//! party 1 most significant, and `q` varying fastest within each party, so
//! `index = Σ_i (p_i·N + q_i) · N^{2(k−1−i)}` for 0-based party i.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Error;
use crate::hilbert::{phase, DensityMatrix};
use crate::phase_space::{PhasePoint, PrimeDimension};
use crate::Result;

/// A real quasiprobability distribution over (ℤ_N × ℤ_N)^k.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    dim: PrimeDimension,
    parties: usize,
    values: Vec<f64>,
}

impl WignerGrid {
    /// Builds a grid from raw values, checking the length and that the
    /// values sum to one within 1e-9.
    pub fn new(dim: PrimeDimension, parties: usize, values: Vec<f64>) -> Result<Self> {
        let expect = grid_len(dim, parties);
        if parties == 0 || values.len() != expect {
            return Err(Error::ShapeMismatch(format!(
                "expected {expect} grid values for {parties} parties of dimension {dim}, got {}",
                values.len()
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::GridNotNormalized(sum));
        }
        Ok(Self {
            dim,
            parties,
            values,
        })
    }

    pub(crate) fn from_values_unchecked(
        dim: PrimeDimension,
        parties: usize,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(values.len(), grid_len(dim, parties));
        Self {
            dim,
            parties,
            values,
        }
    }

    /// The constant grid 1/N^{2k}: the Wigner function of the maximally
    /// mixed k-party state.
    pub fn constant(dim: PrimeDimension, parties: usize) -> Self {
        let len = grid_len(dim, parties);
        Self {
            dim,
            parties,
            values: vec![1.0 / len as f64; len],
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

    /// Values in storage order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of grid points, N^{2k}.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True only for the degenerate zero-length case, which constructors
    /// reject; present for completeness.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Σ over all points.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Linear index of a tuple of per-party phase-space points.
    pub fn index_of(&self, points: &[PhasePoint]) -> usize {
        assert_eq!(points.len(), self.parties, "one phase point per party");
        let block = self.dim.size() * self.dim.size();
        points
            .iter()
            .fold(0usize, |acc, pt| acc * block + pt.index(self.dim))
    }

    /// Value at a tuple of per-party phase-space points.
    pub fn value_at(&self, points: &[PhasePoint]) -> f64 {
        self.values[self.index_of(points)]
    }

    /// Per-party phase points of a linear index (inverse of [`Self::index_of`]).
    pub fn points_of(&self, mut index: usize) -> Vec<PhasePoint> {
        let block = self.dim.size() * self.dim.size();
        let mut out = vec![PhasePoint { q: 0, p: 0 }; self.parties];
        for slot in out.iter_mut().rev() {
            *slot = PhasePoint::from_index(index % block, self.dim);
            index /= block;
        }
        out
    }

    /// Product grid W(α, β) = self(α)·other(β); the Wigner function of a
    /// tensor-product state, with self's parties more significant.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "grid product across dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let mut values = Vec::with_capacity(self.len() * other.len());
        for a in &self.values {
            for b in &other.values {
                values.push(a * b);
            }
        }
        Ok(Self {
            dim: self.dim,
            parties: self.parties + other.parties,
            values,
        })
    }

    /// Largest |self − other| over all points, for comparisons in tests and
    /// validation reports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn grid_len(dim: PrimeDimension, parties: usize) -> usize {
    (dim.size() * dim.size()).pow(parties as u32)
}

/// The phase-space kernel A(q,p) as a dense N×N matrix.
pub fn wigner_operator(dim: PrimeDimension, point: PhasePoint) -> DMatrix<Complex64> {
    let n = dim.n();
    let size = dim.size();
    let mut m = DMatrix::from_element(size, size, Complex64::ZERO);
    let two_q = dim.add(point.q, point.q);
    for r in 0..n {
        let s = dim.sub(two_q, r);
        // r − s may be negative; reduce in ℤ_N before taking the phase
        let diff = dim.sub(r, s);
        m[(r as usize, s as usize)] = phase((point.p * diff) as i64, n);
    }
    m
}

/// All N² phase-space kernels for one dimension, built once and shared.
#[derive(Debug)]
pub struct WignerOperatorSet {
    dim: PrimeDimension,
    operators: Vec<DMatrix<Complex64>>,
}

impl WignerOperatorSet {
    /// The cached operator set for `dim`, built on first use.
    pub fn get(dim: PrimeDimension) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<WignerOperatorSet>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("operator cache poisoned");
        map.entry(dim.n())
            .or_insert_with(|| {
                let operators = (0..grid_len(dim, 1))
                    .map(|i| wigner_operator(dim, PhasePoint::from_index(i, dim)))
                    .collect();
                Arc::new(Self { dim, operators })
            })
            .clone()
    }

    /// Dimension the set was built for.
    pub fn dim(&self) -> PrimeDimension {
        self.dim
    }

    /// The kernel at one phase-space point.
    pub fn operator(&self, point: PhasePoint) -> &DMatrix<Complex64> {
        &self.operators[point.index(self.dim)]
    }

    /// All kernels in phase-point index order.
    pub fn operators(&self) -> &[DMatrix<Complex64>] {
        &self.operators
    }
}

fn wigner_values_recursive(
    m: &DMatrix<Complex64>,
    dim: PrimeDimension,
    parties_left: usize,
    out: &mut Vec<Complex64>,
) {
    if parties_left == 0 {
        debug_assert_eq!(m.nrows(), 1);
        out.push(m[(0, 0)]);
        return;
    }
    // this party's phase point is the most significant remaining index, so
    // iterate it in storage order and recurse
    for i in 0..grid_len(dim, 1) {
        let point = PhasePoint::from_index(i, dim);
        let reduced = contract_first_party(m, dim, point, parties_left);
        wigner_values_recursive(&reduced, dim, parties_left - 1, out);
    }
}

/// Like [`contract_last_party`] but for the most-significant party, which is
/// the one that must advance slowest to emit values in storage order.
fn contract_first_party(
    m: &DMatrix<Complex64>,
    dim: PrimeDimension,
    point: PhasePoint,
    parties: usize,
) -> DMatrix<Complex64> {
    let n = dim.size();
    let rest = n.pow((parties - 1) as u32);
    let two_q = dim.add(point.q, point.q);
    let mut out = DMatrix::from_element(rest, rest, Complex64::ZERO);
    for r in 0..n as u64 {
        let s = dim.sub(two_q, r);
        let w = phase((point.p * dim.sub(s, r)) as i64, dim.n());
        let (ru, su) = (r as usize, s as usize);
        for big_r in 0..rest {
            let row = ru * rest + big_r;
            for big_s in 0..rest {
                out[(big_r, big_s)] += m[(row, su * rest + big_s)] * w;
            }
        }
    }
    out
}

/// Forward Wigner transform of a k-party density matrix.
///
/// Returns the normalized real grid; fails with
/// [`Error::NonHermitianInput`] if any value keeps an imaginary residue
/// above 1e-9 after the trace.
pub fn to_wigner(state: &DensityMatrix) -> Result<WignerGrid> {
    let dim = state.dim();
    let parties = state.parties();
    let mut raw = Vec::with_capacity(grid_len(dim, parties));
    wigner_values_recursive(state.matrix(), dim, parties, &mut raw);
    let scale = 1.0 / (dim.size().pow(parties as u32) as f64);
    let mut max_imag: f64 = 0.0;
    let values: Vec<f64> = raw
        .iter()
        .map(|v| {
            max_imag = max_imag.max((v.im * scale).abs());
            v.re * scale
        })
        .collect();
    if max_imag > 1e-9 {
        return Err(Error::NonHermitianInput(max_imag));
    }
    Ok(WignerGrid::from_values_unchecked(dim, parties, values))
}

/// Largest imaginary residue the forward transform would discard; exposed
/// for the reality checks in the test suites.
pub fn imaginary_residue(state: &DensityMatrix) -> f64 {
    let dim = state.dim();
    let parties = state.parties();
    let mut raw = Vec::with_capacity(grid_len(dim, parties));
    wigner_values_recursive(state.matrix(), dim, parties, &mut raw);
    let scale = 1.0 / (dim.size().pow(parties as u32) as f64);
    raw.iter().map(|v| (v.im * scale).abs()).fold(0.0, f64::max)
}

/// Inverse Wigner transform: ρ = Σ_α W(α)·A(α₁)⊗…⊗A(α_k).
///
/// The result is Hermitian with unit trace by construction, but positivity
/// is not guaranteed for arbitrary grids — validate the returned matrix
/// where that matters.
pub fn from_wigner(grid: &WignerGrid) -> DensityMatrix {
    let dim = grid.dim();
    let n = dim.size();
    let parties = grid.parties();
    let size = n.pow(parties as u32);
    let mut entries = DMatrix::from_element(size, size, Complex64::ZERO);

    let mut points = vec![PhasePoint { q: 0, p: 0 }; parties];
    for (idx, &w) in grid.values().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        decompose_index(idx, dim, parties, &mut points);
        let wc = Complex64::new(w, 0.0);
        // every nonzero entry of ⊗A has the row digits r_i free and the
        // column digits pinned to s_i = 2q_i − r_i
        for combo in 0..size {
            let mut rest = combo;
            let mut row = 0usize;
            let mut col = 0usize;
            let mut phase_num = 0u64;
            let mut weight = 1usize;
            for pt in points.iter().rev() {
                let r = (rest % n) as u64;
                rest /= n;
                let s = dim.sub(dim.add(pt.q, pt.q), r);
                row += r as usize * weight;
                col += s as usize * weight;
                phase_num += pt.p * dim.sub(r, s);
                weight *= n;
            }
            entries[(row, col)] += wc * phase(phase_num as i64, dim.n());
        }
    }
    DensityMatrix::from_parts_unchecked(dim, parties, entries)
        .expect("grid shape fixes the matrix shape")
}

fn decompose_index(
    index: usize,
    dim: PrimeDimension,
    parties: usize,
    out: &mut [PhasePoint],
) {
    let block = dim.size() * dim.size();
    let mut rest = index;
    for slot in out.iter_mut().rev().take(parties) {
        *slot = PhasePoint::from_index(rest % block, dim);
        rest /= block;
    }
}

/// Position marginal P_q(q) = Σ_p W(q,p) of a single-party grid, equal to
/// the position-basis diagonal of the state.
///
/// Panics if the grid has more than one party; take a [`partial_sum`] first.
pub fn marginal_q(grid: &WignerGrid) -> Vec<f64> {
    assert_eq!(grid.parties(), 1, "marginals are defined per party");
    let n = grid.dim().size();
    let mut out = vec![0.0; n];
    for p in 0..n {
        for q in 0..n {
            out[q] += grid.values()[p * n + q];
        }
    }
    out
}

/// Momentum marginal P_p(p) = Σ_q W(q,p) of a single-party grid, equal to
/// the momentum-basis diagonal of the state.
///
/// Panics if the grid has more than one party; take a [`partial_sum`] first.
pub fn marginal_p(grid: &WignerGrid) -> Vec<f64> {
    assert_eq!(grid.parties(), 1, "marginals are defined per party");
    let n = grid.dim().size();
    let mut out = vec![0.0; n];
    for p in 0..n {
        for q in 0..n {
            out[p] += grid.values()[p * n + q];
        }
    }
    out
}

/// Sums a k-party grid over the phase-space variables of every party not in
/// `keep` (0-based, strictly increasing), producing the reduced grid of the
/// kept subsystems — the phase-space analogue of the partial trace.
pub fn partial_sum(grid: &WignerGrid, keep: &[usize]) -> Result<WignerGrid> {
    let k = grid.parties();
    if keep.is_empty()
        || keep.iter().any(|&i| i >= k)
        || !keep.windows(2).all(|w| w[0] < w[1])
    {
        return Err(Error::ShapeMismatch(format!(
            "keep list {keep:?} invalid for {k} parties"
        )));
    }
    let dim = grid.dim();
    let block = dim.size() * dim.size();
    if keep.len() == k {
        return Ok(grid.clone());
    }
    // weight of party i's block in the full index
    let weight = |party: usize| block.pow((k - 1 - party) as u32);
    let mut out = vec![0.0; grid_len(dim, keep.len())];
    for (idx, &v) in grid.values().iter().enumerate() {
        let mut reduced = 0usize;
        for &party in keep {
            reduced = reduced * block + (idx / weight(party)) % block;
        }
        out[reduced] += v;
    }
    Ok(WignerGrid::from_values_unchecked(dim, keep.len(), out))
}

/// Cyclic translation of a single-party grid: out(q, p) = in(q−dq, p−dp),
/// all coordinates mod N. This is exactly how conjugation by the
/// displacement unitary of [`crate::hilbert::UnitaryCorrection`] acts on a
/// Wigner function.
///
/// Panics if the grid has more than one party.
pub fn shift_grid(grid: &WignerGrid, dq: u64, dp: u64) -> WignerGrid {
    assert_eq!(grid.parties(), 1, "shifts are defined for one party");
    let dim = grid.dim();
    let n = dim.size();
    let dq = (dq % dim.n()) as usize;
    let dp = (dp % dim.n()) as usize;
    let mut out = vec![0.0; grid.len()];
    for (p, row) in out.chunks_mut(n).enumerate() {
        let src_p = (p + n - dp) % n;
        for (q, slot) in row.iter_mut().enumerate() {
            let src_q = (q + n - dq) % n;
            *slot = grid.values()[src_p * n + src_q];
        }
    }
    WignerGrid::from_values_unchecked(dim, 1, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{oracle_teleport, StateVector, UnitaryCorrection};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dim(n: u64) -> PrimeDimension {
        PrimeDimension::new(n).unwrap()
    }

    /// Random mixed state: convex mixture of a few random pure states.
    fn random_mixed(d: PrimeDimension, parties: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        use rand::Rng;
        let terms = 3;
        let mut weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.1).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let size = d.size().pow(parties as u32);
        let mut m = nalgebra::DMatrix::from_element(size, size, Complex64::ZERO);
        for w in weights {
            let pure = StateVector::random_pure(d, parties, rng).to_density();
            m += pure.matrix() * Complex64::new(w, 0.0);
        }
        DensityMatrix::new(d, parties, m).unwrap()
    }

    #[test]
    fn operator_entries_at_origin() {
        let d = dim(3);
        let a = wigner_operator(d, PhasePoint { q: 0, p: 0 });
        // r+s ≡ 0 (mod 3): (0,0), (1,2), (2,1); phase is 1 because p = 0
        for r in 0..3usize {
            for s in 0..3usize {
                let expect = if (r + s) % 3 == 0 {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                assert_eq!(a[(r, s)], expect, "entry ({r},{s})");
            }
        }
    }

    #[test]
    fn operators_hermitian_unit_trace() {
        let d = dim(7);
        let set = WignerOperatorSet::get(d);
        for op in set.operators() {
            assert!(crate::hilbert::hermiticity_deviation(op) < 1e-12);
            let tr: Complex64 = op.diagonal().sum();
            assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn operators_orthogonal() {
        // Tr(A(α)A(β)) = N·δ_{αβ}; this is what justifies the inverse map
        let d = dim(5);
        let set = WignerOperatorSet::get(d);
        for (i, a) in set.operators().iter().enumerate() {
            for (j, b) in set.operators().iter().enumerate() {
                let tr = (a * b).diagonal().sum();
                let expect = if i == j { 5.0 } else { 0.0 };
                assert_abs_diff_eq!(tr.re, expect, epsilon = 1e-10);
                assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn operators_sum_to_n_times_identity() {
        let d = dim(5);
        let set = WignerOperatorSet::get(d);
        let mut total = nalgebra::DMatrix::from_element(5, 5, Complex64::ZERO);
        for op in set.operators() {
            total += op;
        }
        let expect = nalgebra::DMatrix::<Complex64>::identity(5, 5) * Complex64::new(5.0, 0.0);
        assert!((total - expect).norm() < 1e-12);
    }

    #[test]
    fn position_eigenstate_grid_is_a_column() {
        for n in [3u64, 5, 7] {
            let d = dim(n);
            for k in 0..n {
                let grid =
                    to_wigner(&StateVector::position_eigenstate(d, k).to_density()).unwrap();
                for pt in crate::phase_space::all_points(d) {
                    let expect = if pt.q == k { 1.0 / n as f64 } else { 0.0 };
                    assert_abs_diff_eq!(grid.value_at(&[pt]), expect, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn momentum_eigenstate_grid_is_a_row() {
        for n in [3u64, 5] {
            let d = dim(n);
            for l in 0..n {
                let grid =
                    to_wigner(&StateVector::momentum_eigenstate(d, l).to_density()).unwrap();
                for pt in crate::phase_space::all_points(d) {
                    let expect = if pt.p == l { 1.0 / n as f64 } else { 0.0 };
                    assert_abs_diff_eq!(grid.value_at(&[pt]), expect, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn epr_grid_has_delta_correlations() {
        // W(q₂,p₂,q₃,p₃) = δ_{q₂,q₃}·δ_{p₂,−p₃}/N²
        for n in [3u64, 5] {
            let d = dim(n);
            let grid = to_wigner(&StateVector::epr(d).to_density()).unwrap();
            for idx in 0..grid.len() {
                let pts = grid.points_of(idx);
                let (a, b) = (pts[0], pts[1]);
                let expect = if a.q == b.q && b.p == d.neg(a.p) {
                    1.0 / (n * n) as f64
                } else {
                    0.0
                };
                assert_abs_diff_eq!(grid.values()[idx], expect, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn normalization_and_reality_for_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [3u64, 5, 7, 11, 13] {
            let d = dim(n);
            let state = random_mixed(d, 1, &mut rng);
            assert!(imaginary_residue(&state) < 1e-12);
            let grid = to_wigner(&state).unwrap();
            assert_abs_diff_eq!(grid.sum(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn roundtrip_identity_on_density_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [3u64, 5, 7] {
            let d = dim(n);
            for _ in 0..5 {
                let state = random_mixed(d, 1, &mut rng);
                let grid = to_wigner(&state).unwrap();
                let back = from_wigner(&grid);
                assert!(
                    (back.matrix() - state.matrix()).norm() < 1e-12,
                    "N={n} roundtrip"
                );
            }
        }
    }

    #[test]
    fn roundtrip_two_party() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = dim(5);
        let state = random_mixed(d, 2, &mut rng);
        let grid = to_wigner(&state).unwrap();
        let back = from_wigner(&grid);
        assert!((back.matrix() - state.matrix()).norm() < 1e-11);
    }

    #[test]
    fn grid_to_state_roundtrip_on_random_grid() {
        // to_wigner ∘ from_wigner is also the identity, even on grids that
        // are not valid states; this pins the operator-basis orthogonality
        let d = dim(5);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        use rand::Rng;
        let mut values: Vec<f64> = (0..grid_len(d, 1)).map(|_| rng.random::<f64>() - 0.3).collect();
        let total: f64 = values.iter().sum();
        values.iter_mut().for_each(|v| *v /= total);
        let grid = WignerGrid::new(d, 1, values).unwrap();
        let state = from_wigner(&grid);
        let back = to_wigner(&state).unwrap();
        assert!(grid.max_abs_diff(&back) < 1e-12);
    }

    #[test]
    fn constant_grid_maps_to_maximally_mixed() {
        let d = dim(7);
        let grid = WignerGrid::constant(d, 1);
        let state = from_wigner(&grid);
        let expect = DensityMatrix::maximally_mixed(d, 1);
        assert!((state.matrix() - expect.matrix()).norm() < 1e-13);
    }

    #[test]
    fn marginals_match_born_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [3u64, 5, 7, 11, 13] {
            let d = dim(n);
            let state = random_mixed(d, 1, &mut rng);
            let grid = to_wigner(&state).unwrap();
            let pq = marginal_q(&grid);
            let pp = marginal_p(&grid);
            assert_abs_diff_eq!(pq.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pp.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            for k in 0..n {
                let born = state.matrix()[(k as usize, k as usize)].re;
                assert_abs_diff_eq!(pq[k as usize], born, epsilon = 1e-12);
            }
            for l in 0..n {
                let basis = StateVector::momentum_eigenstate(d, l);
                let amp = nalgebra::DVector::from_column_slice(basis.amplitudes());
                let born = (amp.adjoint() * state.matrix() * &amp)[(0, 0)].re;
                assert_abs_diff_eq!(pp[l as usize], born, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn marginal_examples() {
        let d = dim(5);
        let pos = to_wigner(&StateVector::position_eigenstate(d, 0).to_density()).unwrap();
        let pq = marginal_q(&pos);
        assert_abs_diff_eq!(pq[0], 1.0, epsilon = 1e-13);
        for v in &pq[1..] {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-13);
        }
        let mom = to_wigner(&StateVector::momentum_eigenstate(d, 2).to_density()).unwrap();
        for v in marginal_q(&mom) {
            assert_abs_diff_eq!(v, 0.2, epsilon = 1e-13);
        }
    }

    #[test]
    fn partial_sum_of_epr_is_uniform() {
        let d = dim(3);
        let grid = to_wigner(&StateVector::epr(d).to_density()).unwrap();
        for keep in [[0usize], [1usize]] {
            let reduced = partial_sum(&grid, &keep).unwrap();
            for v in reduced.values() {
                assert_abs_diff_eq!(*v, 1.0 / 9.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn partial_sum_of_product_recovers_factor() {
        let d = dim(5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = to_wigner(&random_mixed(d, 1, &mut rng)).unwrap();
        let b = to_wigner(&random_mixed(d, 1, &mut rng)).unwrap();
        let ab = a.product(&b).unwrap();
        assert!(partial_sum(&ab, &[0]).unwrap().max_abs_diff(&a) < 1e-12);
        assert!(partial_sum(&ab, &[1]).unwrap().max_abs_diff(&b) < 1e-12);
        assert!(partial_sum(&ab, &[0, 1]).unwrap().max_abs_diff(&ab) < 1e-15);
    }

    #[test]
    fn partial_sum_commutes_with_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3u64, 5] {
            let d = dim(n);
            let state = random_mixed(d, 2, &mut rng);
            let grid = to_wigner(&state).unwrap();
            for keep in [[0usize], [1usize]] {
                let via_grid = partial_sum(&grid, &keep).unwrap();
                let via_matrix = to_wigner(&state.partial_trace(&keep).unwrap()).unwrap();
                assert!(via_grid.max_abs_diff(&via_matrix) < 1e-12, "N={n}");
            }
        }
    }

    #[test]
    fn shift_identity_and_basis_states() {
        let d = dim(5);
        let g0 = to_wigner(&StateVector::position_eigenstate(d, 0).to_density()).unwrap();
        assert!(shift_grid(&g0, 0, 0).max_abs_diff(&g0) < 1e-15);
        let g1 = to_wigner(&StateVector::position_eigenstate(d, 1).to_density()).unwrap();
        assert!(shift_grid(&g0, 1, 0).max_abs_diff(&g1) < 1e-13);
    }

    #[test]
    fn shift_matches_unitary_conjugation() {
        // translation of the grid = conjugation by the displacement unitary
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = dim(5);
        let state = random_mixed(d, 1, &mut rng);
        let grid = to_wigner(&state).unwrap();
        for dq in 0..5 {
            for dp in 0..5 {
                let u = UnitaryCorrection::new(d, dq, dp);
                let conjugated = to_wigner(&u.apply(&state).unwrap()).unwrap();
                let shifted = shift_grid(&grid, dq, dp);
                assert!(
                    shifted.max_abs_diff(&conjugated) < 1e-12,
                    "dq={dq} dp={dp}"
                );
            }
        }
    }

    #[test]
    fn oracle_conditional_is_shifted_input_grid() {
        // ties the wigner and hilbert modules together ahead of the full
        // pipeline: conditioning shifts the grid by (−x2, −p1)
        let d = dim(5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let input = StateVector::random_pure(d, 1, &mut rng).to_density();
        let grid = to_wigner(&input).unwrap();
        for x2 in 0..5 {
            for p1 in 0..5 {
                let (_, cond) = oracle_teleport(&input, x2, p1).unwrap();
                let cond_grid = to_wigner(&cond).unwrap();
                let expect = shift_grid(&grid, d.neg(x2), d.neg(p1));
                assert!(cond_grid.max_abs_diff(&expect) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_denormalized_grid() {
        let d = dim(3);
        let values = vec![0.5; 9];
        assert!(matches!(
            WignerGrid::new(d, 1, values),
            Err(Error::GridNotNormalized(_))
        ));
    }

    #[test]
    fn non_hermitian_input_detected() {
        let d = dim(3);
        let mut m = nalgebra::DMatrix::from_element(3, 3, Complex64::ZERO);
        m[(0, 0)] = Complex64::ONE;
        m[(0, 2)] = Complex64::new(0.0, 0.4);
        let bad = DensityMatrix::from_parts_unchecked(d, 1, m).unwrap();
        assert!(matches!(
            to_wigner(&bad),
            Err(Error::NonHermitianInput(_))
        ));
    }
}
