//! Hollow symmetric matrices and the encoding frame `{m mᵀ}`.
//!
//! A [`HollowSymmetric`] stores only the strict upper triangle in row-major
//! order, so an `n`-qubit matrix is a vector of `n(n-1)/2` reals. Inner
//! products are taken over that triangle, each pair counted once.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of strict upper-triangle entries of an `n × n` matrix.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of pair `(i, j)`, `i < j`, in the row-major upper triangle.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)` with `i < j`, in storage order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHollow")]
pub struct HollowSymmetric {
    n: usize,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawHollow {
    n: usize,
    upper: Vec<f64>,
}

impl TryFrom<RawHollow> for HollowSymmetric {
    type Error = Error;
    fn try_from(raw: RawHollow) -> Result<Self> {
        HollowSymmetric::new(raw.n, raw.upper)
    }
}

impl HollowSymmetric {
    pub fn new(n: usize, upper: Vec<f64>) -> Result<Self> {
        let expected = pair_count(n);
        if upper.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: upper.len() });
        }
        if let Some(v) = upper.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry {v}")));
        }
        Ok(Self { n, upper })
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, upper: vec![0.0; pair_count(n)] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self { n, upper: pairs(n).map(|(i, j)| f(i, j)).collect() }
    }

    /// Build from a full square matrix. The diagonal must vanish and the
    /// matrix must be symmetric to within `1e-12` relative.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: r.len() });
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::InvalidInput(format!("diagonal entry {} is nonzero", i + 1)));
            }
            for j in i + 1..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::InvalidInput(format!("matrix not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Self::new(n, pairs(n).map(|(i, j)| rows[i][j]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn upper_mut(&mut self) -> &mut [f64] {
        &mut self.upper
    }

    /// Entry `(i, j)`, symmetric, zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[pair_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.upper[pair_index(self.n, j, i)],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j, "diagonal of a hollow matrix is fixed at zero");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let k = pair_index(self.n, a, b);
        self.upper[k] = v;
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Upper-triangle inner product (each pair once).
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.upper.iter().zip(&other.upper).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&v| v == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n: self.n, upper: self.upper.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let upper = self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect();
        Self { n: self.n, upper }
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let upper = self.upper.iter().zip(&other.upper).map(|(a, b)| a * b).collect();
        Self { n: self.n, upper }
    }

    /// Sum of the strict upper triangle.
    pub fn upper_sum(&self) -> f64 {
        self.upper.iter().sum()
    }

    /// Row sum `Σ_j A_ij`.
    pub fn row_sum(&self, i: usize) -> f64 {
        (0..self.n).map(|j| self.get(i, j)).sum()
    }

    /// Embed into a larger matrix with the block starting at qubit `offset`.
    pub fn embed(&self, n: usize, offset: usize) -> Self {
        assert!(offset + self.n <= n);
        let mut out = Self::zeros(n);
        for (i, j) in pairs(self.n) {
            out.set(i + offset, j + offset, self.get(i, j));
        }
        out
    }

    /// Pairs with a nonzero entry.
    pub fn support(&self) -> Vec<(usize, usize)> {
        pairs(self.n).zip(&self.upper).filter(|(_, &v)| v != 0.0).map(|(p, _)| p).collect()
    }
}

/// A sign vector `m ∈ {±1}ⁿ` with `m_n = +1`, keyed by its `(n-1)`-bit
/// pattern: bit `q` of `index` set means `m_q = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoding {
    n: usize,
    index: u64,
}

impl Encoding {
    pub fn new(n: usize, index: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("encodings need n >= 2, got {n}")));
        }
        if n > 63 || index >> (n - 1) != 0 {
            return Err(Error::InvalidInput(format!("index {index} out of range for n = {n}")));
        }
        Ok(Self { n, index })
    }

    /// Canonical encoding of an arbitrary sign vector (the global sign is
    /// dropped so that the last entry becomes `+1`).
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let n = signs.len();
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("signs must be +1 or -1".into()));
        }
        let flip = signs.last() == Some(&-1);
        let mut index = 0u64;
        for (q, &s) in signs.iter().take(n.saturating_sub(1)).enumerate() {
            if (s == -1) != flip {
                index |= 1 << q;
            }
        }
        Self::new(n, index)
    }

    pub fn all_plus(n: usize) -> Self {
        Self { n, index: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    #[inline]
    pub fn sign(&self, q: usize) -> f64 {
        if q + 1 < self.n && (self.index >> q) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n).map(|q| self.sign(q) as i8).collect()
    }

    /// The X-flip pattern `s` with `m = (-1)^s`, as a bit string over all
    /// `n` qubits (qubit 1 first).
    pub fn flip_string(&self) -> String {
        (0..self.n).map(|q| if self.sign(q) < 0.0 { '1' } else { '0' }).collect()
    }

    pub fn hamming(&self, other: &Self) -> u32 {
        (self.index ^ other.index).count_ones()
    }
}

/// `m mᵀ` with the diagonal dropped.
pub fn outer_product(m: &Encoding) -> HollowSymmetric {
    HollowSymmetric::from_fn(m.n, |i, j| m.sign(i) * m.sign(j))
}

/// All `2^{n-1}` canonical encodings in index order.
pub fn frame_columns(n: usize) -> Result<Vec<Encoding>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("frame needs n >= 2, got {n}")));
    }
    if n > 30 {
        return Err(Error::CapExceeded { n, cap: 30 });
    }
    Ok((0..1u64 << (n - 1)).map(|index| Encoding { n, index }).collect())
}

/// Gram matrix entry `⟨m mᵀ, m′m′ᵀ⟩` from the Hamming distance alone.
pub fn gram_entry(a: &Encoding, b: &Encoding) -> Result<i64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, got: b.n });
    }
    let n = a.n as i64;
    let d = a.hamming(b) as i64;
    Ok(n * (n - 1) / 2 - 2 * d * (n - d))
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub n: usize,
    /// Every off-diagonal entry of `Σ_m m mᵀ` vanishes.
    pub balanced: bool,
    /// Frame constant with upper-triangle inner products.
    pub constant_min: f64,
    pub constant_max: f64,
    /// The same constant under the full-matrix Frobenius product, which
    /// counts every pair twice in each factor: twice the upper value.
    pub constant_full: f64,
}

/// Empirical check of balance and tightness on random unit-norm targets.
pub fn frame_bound_check(n: usize, samples: usize, rng: &mut impl Rng) -> Result<FrameReport> {
    if !(2..=12).contains(&n) {
        return Err(Error::InvalidInput(format!("frame check supports 2 <= n <= 12, got {n}")));
    }
    let cols = frame_columns(n)?;
    let mut sums = vec![0i64; pair_count(n)];
    for m in &cols {
        for (k, (i, j)) in pairs(n).enumerate() {
            sums[k] += (m.sign(i) * m.sign(j)) as i64;
        }
    }
    let balanced = sums.iter().all(|&s| s == 0);

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..samples.max(1) {
        let raw = HollowSymmetric::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let target = raw.scale(1.0 / raw.norm());
        let c: f64 = cols.iter().map(|m| outer_product(m).inner(&target).powi(2)).sum();
        lo = lo.min(c);
        hi = hi.max(c);
    }
    Ok(FrameReport { n, balanced, constant_min: lo, constant_max: hi, constant_full: 2.0 * hi })
}
