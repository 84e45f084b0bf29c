//! Modular arithmetic over ℤ_N for odd prime N, and phase-space point indexing.
//!
//! Every coordinate in the discrete phase space is a residue in `[0, N)`.
//! All additions, subtractions and multiplications are taken modulo N, and
//! because N is odd, 2 has a multiplicative inverse, which makes the
//! generalized halving [`PrimeDimension::half`] well defined.

use crate::error::Error;

/// Default cap on the Hilbert-space dimension. Three-party grids scale as
/// N^6, so anything beyond this is impractical to simulate anyway.
pub const DEFAULT_MAX_DIM: u64 = 97;

/// Environment variable that overrides the supported-dimension cap.
pub const MAX_DIM_ENV: &str = "QUDIT_WIGNER_MAX_DIM";

/// A validated odd-prime Hilbert-space dimension N ≥ 3.
///
/// All residue arithmetic used by the library hangs off this type, so a
/// `PrimeDimension` in hand is proof that N is an odd prime within the
/// supported range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeDimension {
    n: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeDimension {
    /// Validates that `n` is an odd prime with 3 ≤ n ≤ [`Self::max_supported`].
    pub fn new(n: u64) -> Result<Self, Error> {
        if n < 3 || n % 2 == 0 || !is_prime(n) {
            return Err(Error::InvalidDimension(n));
        }
        let cap = Self::max_supported();
        if n > cap {
            return Err(Error::DimensionCapExceeded { n, cap });
        }
        Ok(Self { n })
    }

    /// The current cap on N: [`MAX_DIM_ENV`] if set and parseable, else
    /// [`DEFAULT_MAX_DIM`].
    pub fn max_supported() -> u64 {
        std::env::var(MAX_DIM_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MAX_DIM)
    }

    /// The dimension N.
    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    /// N as a usize, for array sizing.
    #[inline]
    pub fn size(&self) -> usize {
        self.n as usize
    }

    /// Iterator over the residues 0, 1, …, N−1.
    pub fn residues(&self) -> impl Iterator<Item = u64> {
        0..self.n
    }

    /// (a+b) mod N
    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.n && b < self.n);
        let c = a + b;
        if c >= self.n {
            c - self.n
        } else {
            c
        }
    }

    /// (a−b) mod N
    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.n && b < self.n);
        let c = a + self.n - b;
        if c >= self.n {
            c - self.n
        } else {
            c
        }
    }

    /// (−a) mod N
    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.n);
        if a == 0 {
            0
        } else {
            self.n - a
        }
    }

    /// (a·b) mod N
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.n && b < self.n);
        (a as u128 * b as u128 % self.n as u128) as u64
    }

    /// Canonical residue of a signed integer.
    #[inline]
    pub fn reduce(&self, a: i64) -> u64 {
        let n = self.n as i64;
        (a.rem_euclid(n)) as u64
    }

    /// Generalized division by two: the unique residue h with 2h ≡ k (mod N).
    ///
    /// For even k this is k/2; for odd k it is (k+N)/2, which is an integer
    /// because N is odd.
    #[inline]
    pub fn half(&self, k: u64) -> u64 {
        debug_assert!(k < self.n);
        if k % 2 == 0 {
            k / 2
        } else {
            (k + self.n) / 2
        }
    }
}

impl std::fmt::Display for PrimeDimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.n)
    }
}

/// A point (q, p) of the N×N discrete phase space.
///
/// Coordinates are canonical residues; constructors reduce their inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    /// Position coordinate in ℤ_N.
    pub q: u64,
    /// Momentum coordinate in ℤ_N.
    pub p: u64,
}

impl PhasePoint {
    /// A phase-space point with both coordinates reduced mod N.
    pub fn new(q: u64, p: u64, dim: PrimeDimension) -> Self {
        Self {
            q: q % dim.n(),
            p: p % dim.n(),
        }
    }

    /// Linear index of the point in a single-party grid: `p·N + q`
    /// (q varies fastest).
    #[inline]
    pub fn index(&self, dim: PrimeDimension) -> usize {
        (self.p * dim.n() + self.q) as usize
    }

    /// Inverse of [`Self::index`].
    #[inline]
    pub fn from_index(index: usize, dim: PrimeDimension) -> Self {
        let n = dim.n() as usize;
        debug_assert!(index < n * n);
        Self {
            q: (index % n) as u64,
            p: (index / n) as u64,
        }
    }
}

/// All N² phase-space points in index order (q fastest within each p row).
pub fn all_points(dim: PrimeDimension) -> impl Iterator<Item = PhasePoint> {
    let n = dim.size();
    (0..n * n).map(move |i| PhasePoint::from_index(i, dim))
}
