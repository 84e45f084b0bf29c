//! The teleportation protocol executed purely on Wigner grids.
//!
//! The pipeline mirrors the protocol step by step, never leaving phase
//! space:
//!
//! 1. [`epr_grid`] — the shared entangled resource, ideally
//!    `δ_{q₂,q₃}·δ_{p₂,−p₃}/N²`; a noisy resource replaces the deltas with a
//!    probability kernel over (q₂−q₃, p₂+p₃).
//! 2. [`assemble_joint`] — product with the sender's input grid.
//! 3. [`canonical_transform`] — relabels the sender's four coordinates to
//!    sum/difference variables (X₁, P₁, X₂, P₂). The inverse change of
//!    variables needs a division by two, which is exact in ℤ_N thanks to
//!    [`PrimeDimension::half`], so the transform is a permutation of grid
//!    points.
//! 4. [`outcome_distribution`] / [`condition_on_outcome`] — the Bell
//!    measurement: (X₂, P₁) is read off, the unobserved X₁ and P₂ are
//!    summed out, and the slice is renormalized. An unsharp measurement
//!    mixes neighbouring outcome slices with a filter kernel first.
//! 5. [`correct`] — the receiver undoes the outcome-dependent displacement
//!    with a cyclic grid translation.
//!
//! With the ideal resource and filter the corrected output equals the input
//! grid exactly; every claim in this chain is cross-checked against the
//! density-matrix oracle in [`crate::hilbert`].

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::phase_space::PrimeDimension;
use crate::wigner::{from_wigner, grid_len, shift_grid, WignerGrid};
use crate::Result;

/// One Bell-measurement record: the measured position difference `x2`,
/// momentum sum `p1`, and the probability of registering that pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellOutcome {
    /// Eigenvalue of the position difference q̂₁ − q̂₂, mod N.
    pub x2: u64,
    /// Eigenvalue of the momentum sum p̂₁ + p̂₂, mod N.
    pub p1: u64,
    /// Probability of registering this outcome.
    pub probability: f64,
}

/// Probability kernels describing an imperfect resource and an unsharp
/// measurement.
///
/// `epr_kernel` is indexed by the correlation deviations
/// (Δq = q₂−q₃, Σp = p₂+p₃) and replaces the resource's ideal point mass at
/// (0, 0). `measurement_filter` is indexed by the deviation of the true
/// outcome slice from the registered (x2, p1). Both use the single-party
/// grid layout `index = Δ_p·N + Δ_q` and must be normalized, nonnegative
/// distributions.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    dim: PrimeDimension,
    epr_kernel: Vec<f64>,
    measurement_filter: Vec<f64>,
}

/// A probability distribution over (ℤ_N)², nonnegative and summing to one
/// within 1e-9.
fn validate_kernel(dim: PrimeDimension, kernel: &[f64], what: &str) -> Result<()> {
    if kernel.len() != grid_len(dim, 1) {
        return Err(Error::InvalidKernel(format!(
            "{what} must have N² = {} entries, got {}",
            grid_len(dim, 1),
            kernel.len()
        )));
    }
    if kernel.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidKernel(format!(
            "{what} entries must be finite and nonnegative"
        )));
    }
    let sum: f64 = kernel.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidKernel(format!(
            "{what} must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

/// The kernel concentrated at deviation (0, 0); both ideal limits.
pub fn point_mass_kernel(dim: PrimeDimension) -> Vec<f64> {
    let mut k = vec![0.0; grid_len(dim, 1)];
    k[0] = 1.0;
    k
}

/// The flat kernel 1/N².
pub fn uniform_kernel(dim: PrimeDimension) -> Vec<f64> {
    let len = grid_len(dim, 1);
    vec![1.0 / len as f64; len]
}

/// A periodized product Gaussian over the deviations, width `sigma` in grid
/// units. Each factor sums the images at x, x±N, which is accurate to well
/// below 1e-12 for σ ≤ N/6. `sigma = 0` degenerates to the point mass;
/// widths much larger than N approach the uniform kernel.
pub fn gaussian_kernel(dim: PrimeDimension, sigma: f64) -> Result<Vec<f64>> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidKernel(format!(
            "gaussian width must be finite and nonnegative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(point_mass_kernel(dim));
    }
    let n = dim.size();
    let factor: Vec<f64> = (0..n)
        .map(|x| {
            [-1i64, 0, 1]
                .iter()
                .map(|&j| {
                    let d = x as f64 + j as f64 * n as f64;
                    (-d * d / (2.0 * sigma * sigma)).exp()
                })
                .sum()
        })
        .collect();
    let mut kernel = vec![0.0; n * n];
    for dp in 0..n {
        for dq in 0..n {
            kernel[dp * n + dq] = factor[dq] * factor[dp];
        }
    }
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|v| *v /= total);
    Ok(kernel)
}

impl NoiseModel {
    /// The noiseless model: point-mass resource kernel and projective
    /// measurement filter.
    pub fn ideal(dim: PrimeDimension) -> Self {
        Self {
            dim,
            epr_kernel: point_mass_kernel(dim),
            measurement_filter: point_mass_kernel(dim),
        }
    }

    /// Builds and validates a noise model. Both kernels must be normalized
    /// nonnegative distributions, and the smeared entangled resource the
    /// `epr_kernel` generates must correspond to a valid density matrix
    /// (checked through the inverse Wigner transform).
    pub fn new(
        dim: PrimeDimension,
        epr_kernel: Vec<f64>,
        measurement_filter: Vec<f64>,
    ) -> Result<Self> {
        validate_kernel(dim, &epr_kernel, "EPR kernel")?;
        validate_kernel(dim, &measurement_filter, "measurement filter")?;
        let model = Self {
            dim,
            epr_kernel,
            measurement_filter,
        };
        let resource = build_resource(dim, &model.epr_kernel);
        validate_resource(&resource)?;
        Ok(model)
    }

    /// Noise model with a smeared resource but a projective measurement.
    pub fn with_epr_kernel(dim: PrimeDimension, epr_kernel: Vec<f64>) -> Result<Self> {
        Self::new(dim, epr_kernel, point_mass_kernel(dim))
    }

    /// Dimension the kernels are defined over.
    pub fn dim(&self) -> PrimeDimension {
        self.dim
    }

    /// The resource kernel over (Δq, Σp).
    pub fn epr_kernel(&self) -> &[f64] {
        &self.epr_kernel
    }

    /// The outcome filter over deviations from the registered outcome.
    pub fn measurement_filter(&self) -> &[f64] {
        &self.measurement_filter
    }

    /// True when the filter is the exact point mass, i.e. the measurement
    /// is projective.
    pub fn has_projective_filter(&self) -> bool {
        self.measurement_filter[0] == 1.0
            && self.measurement_filter[1..].iter().all(|&v| v == 0.0)
    }
}

fn build_resource(dim: PrimeDimension, epr_kernel: &[f64]) -> WignerGrid {
    let n = dim.n();
    let scale = 1.0 / grid_len(dim, 1) as f64;
    let mut values = vec![0.0; grid_len(dim, 2)];
    let block = dim.size() * dim.size();
    for p2 in 0..n {
        for q2 in 0..n {
            let b2 = (p2 * n + q2) as usize;
            for p3 in 0..n {
                for q3 in 0..n {
                    let b3 = (p3 * n + q3) as usize;
                    let dq = dim.sub(q2, q3);
                    let sp = dim.add(p2, p3);
                    values[b2 * block + b3] = scale * epr_kernel[(sp * n + dq) as usize];
                }
            }
        }
    }
    WignerGrid::from_values_unchecked(dim, 2, values)
}

/// Checks that a two-party grid is the Wigner function of a valid density
/// matrix: correct shape and normalization, and the inverse transform is
/// Hermitian, unit-trace and positive semidefinite.
pub fn validate_resource(resource: &WignerGrid) -> Result<()> {
    if resource.parties() != 2 {
        return Err(Error::InvalidResource(format!(
            "resource must be a two-party grid, got {} parties",
            resource.parties()
        )));
    }
    let sum = resource.sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidResource(format!(
            "resource grid sums to {sum}, expected 1"
        )));
    }
    let state = from_wigner(resource);
    state
        .validate()
        .map_err(|e| Error::InvalidResource(e.to_string()))
}

/// The entangled-resource grid for the given noise model:
/// `W(q₂,p₂,q₃,p₃) = epr_kernel(q₂−q₃, p₂+p₃)/N²`. The ideal kernel
/// reproduces the delta-correlated resource exactly.
pub fn epr_grid(dim: PrimeDimension, noise: &NoiseModel) -> Result<WignerGrid> {
    if noise.dim() != dim {
        return Err(Error::ShapeMismatch(format!(
            "noise model built for dimension {}, requested {}",
            noise.dim(),
            dim
        )));
    }
    Ok(build_resource(dim, noise.epr_kernel()))
}

/// Joint three-party grid: the product of the sender's single-party input
/// with the two-party resource, parties ordered (input, sender half,
/// receiver half).
pub fn assemble_joint(input: &WignerGrid, resource: &WignerGrid) -> Result<WignerGrid> {
    if input.parties() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "input must be a single-party grid, got {} parties",
            input.parties()
        )));
    }
    if resource.parties() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "resource must be a two-party grid, got {} parties",
            resource.parties()
        )));
    }
    input.product(resource)
}

/// Change of variables to the Bell-measurement coordinates: the returned
/// grid holds `W'(X₁,P₁,X₂,P₂,q₃,p₃) = W(q₁,p₁,q₂,p₂,q₃,p₃)` with
/// `q₁ = half(X₁+X₂)`, `p₁ = half(P₁+P₂)`, `q₂ = half(X₁−X₂)`,
/// `p₂ = half(P₁−P₂)`. Party slots in the result are (X₁,P₁), (X₂,P₂) and
/// the untouched receiver pair. The relabeling permutes grid points, so
/// sums are preserved exactly.
///
/// Panics if the grid does not have three parties.
pub fn canonical_transform(joint: &WignerGrid) -> WignerGrid {
    transform_sender_coordinates(joint, false)
}

/// Inverse of [`canonical_transform`], recovering the original coordinates
/// via `X₁ = q₁+q₂`, `X₂ = q₁−q₂`, `P₁ = p₁+p₂`, `P₂ = p₁−p₂`.
pub fn inverse_canonical_transform(transformed: &WignerGrid) -> WignerGrid {
    transform_sender_coordinates(transformed, true)
}

fn transform_sender_coordinates(grid: &WignerGrid, inverse: bool) -> WignerGrid {
    assert_eq!(grid.parties(), 3, "the protocol state has three parties");
    let dim = grid.dim();
    let n = dim.n();
    let block = dim.size() * dim.size();
    let mut values = vec![0.0; grid.len()];
    for a1 in 0..n {
        for b1 in 0..n {
            for a2 in 0..n {
                for b2 in 0..n {
                    // output coordinates (a, b) = (q-slot, p-slot) per party
                    let (src_q1, src_p1, src_q2, src_p2) = if inverse {
                        (dim.add(a1, a2), dim.add(b1, b2), dim.sub(a1, a2), dim.sub(b1, b2))
                    } else {
                        (
                            dim.half(dim.add(a1, a2)),
                            dim.half(dim.add(b1, b2)),
                            dim.half(dim.sub(a1, a2)),
                            dim.half(dim.sub(b1, b2)),
                        )
                    };
                    let dst = ((b1 * n + a1) * n as u64 * n as u64 + (b2 * n + a2)) as usize;
                    let src = ((src_p1 * n + src_q1) * n as u64 * n as u64
                        + (src_p2 * n + src_q2)) as usize;
                    let dst_base = dst * block;
                    let src_base = src * block;
                    values[dst_base..dst_base + block]
                        .copy_from_slice(&grid.values()[src_base..src_base + block]);
                }
            }
        }
    }
    WignerGrid::from_values_unchecked(dim, 3, values)
}

/// Probability of each Bell outcome: the transformed grid summed over
/// everything except (X₂, P₁). Outcomes are returned in x2-major order.
/// With the ideal resource every probability is exactly 1/N², independent
/// of the input.
pub fn outcome_distribution(transformed: &WignerGrid) -> Result<Vec<BellOutcome>> {
    assert_eq!(transformed.parties(), 3, "the protocol state has three parties");
    let dim = transformed.dim();
    let n = dim.size();
    let block = n * n;
    let mut probs = vec![0.0; block];
    // party 1 block index b1 = P₁·N + X₁, party 2 block b2 = P₂·N + X₂
    for b1 in 0..block {
        let p1 = b1 / n;
        for b2 in 0..block {
            let x2 = b2 % n;
            let base = (b1 * block + b2) * block;
            let slice_sum: f64 = transformed.values()[base..base + block].iter().sum();
            probs[x2 * n + p1] += slice_sum;
        }
    }
    let mut outcomes = Vec::with_capacity(block);
    for x2 in 0..n {
        for p1 in 0..n {
            let probability = probs[x2 * n + p1];
            if probability < -1e-10 {
                return Err(Error::NegativeProbability(probability));
            }
            outcomes.push(BellOutcome {
                x2: x2 as u64,
                p1: p1 as u64,
                probability,
            });
        }
    }
    Ok(outcomes)
}

/// Unnormalized conditional slice for a single projective outcome:
/// Σ_{X₁,P₂} W'(X₁, p1, x2, P₂, ·, ·) as a single-party vector over the
/// receiver's coordinates.
fn projective_slice(transformed: &WignerGrid, x2: u64, p1: u64) -> Vec<f64> {
    let dim = transformed.dim();
    let n = dim.size();
    let block = n * n;
    let mut out = vec![0.0; block];
    for x1 in 0..n {
        let b1 = p1 as usize * n + x1;
        for p2 in 0..n {
            let b2 = p2 * n + x2 as usize;
            let base = (b1 * block + b2) * block;
            let slice = &transformed.values()[base..base + block];
            for (slot, v) in out.iter_mut().zip(slice) {
                *slot += v;
            }
        }
    }
    out
}

/// Conditions the transformed grid on a registered outcome: keeps
/// (X₂ = x2, P₁ = p1) fixed, sums out X₁ and P₂, and renormalizes. With an
/// unsharp filter the registered slice is the filter-weighted mixture of
/// the slices at (x2+δx, p1+δp) before renormalization.
pub fn condition_on_outcome(
    transformed: &WignerGrid,
    outcome: &BellOutcome,
    noise: &NoiseModel,
) -> Result<WignerGrid> {
    let dim = transformed.dim();
    let n = dim.n();
    let mut acc = vec![0.0; grid_len(dim, 1)];
    for dp in 0..n {
        for dq in 0..n {
            let w = noise.measurement_filter()[(dp * n + dq) as usize];
            if w == 0.0 {
                continue;
            }
            let slice =
                projective_slice(transformed, dim.add(outcome.x2, dq), dim.add(outcome.p1, dp));
            for (slot, v) in acc.iter_mut().zip(slice) {
                *slot += w * v;
            }
        }
    }
    let total: f64 = acc.iter().sum();
    if total < 1e-15 {
        return Err(Error::ZeroProbability(total));
    }
    acc.iter_mut().for_each(|v| *v /= total);
    Ok(WignerGrid::from_values_unchecked(dim, 1, acc))
}

/// The receiver's correction: translate the conditional grid by
/// (x2, p1), undoing the displacement the measurement left behind.
pub fn correct(conditional: &WignerGrid, outcome: &BellOutcome) -> WignerGrid {
    shift_grid(conditional, outcome.x2, outcome.p1)
}

/// Overlap fidelity Tr(ρ_a·ρ_b) of two single-party grids, computed through
/// the inverse Wigner transform and clamped to [0, 1] against round-off.
pub fn fidelity(a: &WignerGrid, b: &WignerGrid) -> f64 {
    let ra = from_wigner(a);
    let rb = from_wigner(b);
    ra.overlap(&rb).clamp(0.0, 1.0)
}

/// Which Bell outcomes a protocol run should evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeSelection {
    /// All N² outcomes, in x2-major order.
    Exhaustive,
    /// `count` outcomes drawn from the registered-outcome distribution with
    /// a seeded generator; repeats are possible, exactly as in a run of
    /// actual measurements.
    Sampled {
        /// RNG seed, recorded in each trace.
        seed: u64,
        /// Number of measurements to simulate.
        count: usize,
    },
}

/// Step-by-step record of one teleportation branch. The input, joint and
/// transformed grids are shared between the traces of a run.
#[derive(Debug, Clone)]
pub struct TeleportTrace {
    /// The sender's input grid.
    pub input: Arc<WignerGrid>,
    /// Input ⊗ resource, before the variable change.
    pub joint: Arc<WignerGrid>,
    /// The joint grid in measurement coordinates.
    pub transformed: Arc<WignerGrid>,
    /// Renormalized conditional grid of the receiver, before correction.
    pub conditional: WignerGrid,
    /// The receiver's grid after the correction shift.
    pub output: WignerGrid,
    /// The registered outcome and its probability.
    pub outcome: BellOutcome,
    /// Overlap fidelity between input and output.
    pub fidelity: f64,
    /// Seed of the sampling generator, when outcomes were sampled.
    pub seed: Option<u64>,
}

/// Runs the full pipeline for the selected outcomes and returns one trace
/// per outcome. Probabilities in the traces are registered-outcome
/// probabilities, i.e. filter-weighted when the measurement is unsharp.
pub fn run_teleport(
    input: &WignerGrid,
    noise: &NoiseModel,
    selection: OutcomeSelection,
) -> Result<Vec<TeleportTrace>> {
    let dim = input.dim();
    let resource = epr_grid(dim, noise)?;
    let input = Arc::new(input.clone());
    let joint = Arc::new(assemble_joint(&input, &resource)?);
    let transformed = Arc::new(canonical_transform(&joint));
    let projective = outcome_distribution(&transformed)?;

    let n = dim.n();
    // probability of *registering* (x2, p1): filter-weighted slice sums
    let registered: Vec<f64> = (0..n * n)
        .map(|i| {
            let (x2, p1) = (i / n, i % n);
            let mut acc = 0.0;
            for dp in 0..n {
                for dq in 0..n {
                    let w = noise.measurement_filter()[(dp * n + dq) as usize];
                    if w == 0.0 {
                        continue;
                    }
                    let sx = dim.add(x2, dq);
                    let sp = dim.add(p1, dp);
                    acc += w * projective[(sx * n + sp) as usize].probability;
                }
            }
            acc
        })
        .collect();

    let selected: Vec<(u64, u64, Option<u64>)> = match selection {
        OutcomeSelection::Exhaustive => (0..n * n).map(|i| (i / n, i % n, None)).collect(),
        OutcomeSelection::Sampled { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let u: f64 = rng.random();
                    let mut cum = 0.0;
                    let mut pick = n * n - 1;
                    for (i, &p) in registered.iter().enumerate() {
                        cum += p;
                        if u < cum {
                            pick = i as u64;
                            break;
                        }
                    }
                    (pick / n, pick % n, Some(seed))
                })
                .collect()
        }
    };

    let mut traces = Vec::with_capacity(selected.len());
    for (x2, p1, seed) in selected {
        let outcome = BellOutcome {
            x2,
            p1,
            probability: registered[(x2 * n + p1) as usize],
        };
        let conditional = condition_on_outcome(&transformed, &outcome, noise)?;
        let output = correct(&conditional, &outcome);
        let fid = fidelity(&input, &output);
        traces.push(TeleportTrace {
            input: Arc::clone(&input),
            joint: Arc::clone(&joint),
            transformed: Arc::clone(&transformed),
            conditional,
            output,
            outcome,
            fidelity: fid,
            seed,
        });
    }
    Ok(traces)
}
