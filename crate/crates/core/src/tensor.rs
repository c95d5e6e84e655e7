//! Dense real tensors.
//!
//! [`SymTensor`] holds an order-m, dimension-n symmetric tensor as the full
//! `n^m` row-major array; [`GenTensor`] holds a `d₁×⋯×d_m` tensor with no
//! symmetry. Both are immutable after construction. Indices are 0-based here;
//! the file formats in [`crate::format`] use 1-based indices.
//!
//! Contractions are performed by repeatedly folding the last mode, so
//! `T x^{m-1}` costs one pass over the data per contracted mode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute/relative tolerance used when verifying symmetric input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Largest dimension accepted by the subset-enumeration irreducibility test.
pub const MAX_IRREDUCIBLE_DIM: usize = 20;

/// A Z-eigenpair `(λ, x)` with `T x^{m-1} = λ x`, `‖x‖ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZEigenpair {
    pub lambda: f64,
    pub x: Vec<f64>,
    /// `‖T x^{m-1} − λ x‖`.
    pub residual: f64,
}

/// A singular value with one unit vector per mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularTuple {
    pub sigma: f64,
    pub vectors: Vec<Vec<f64>>,
    /// Euclidean norm of the stacked mode residuals `A(…x^{(k)} omitted…) − σ x^{(k)}`.
    pub residual: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Folds the last (fastest) mode of a row-major array against `x`.
fn fold_last(data: &[f64], x: &[f64]) -> Vec<f64> {
    data.chunks_exact(x.len()).map(|c| dot(c, x)).collect()
}

/// Row-major odometer over `dims`.
#[derive(Debug, Clone)]
pub struct IndexIter {
    dims: Vec<usize>,
    cur: Vec<usize>,
    done: bool,
}

impl IndexIter {
    pub fn new(dims: &[usize]) -> Self {
        IndexIter {
            dims: dims.to_vec(),
            cur: vec![0; dims.len()],
            done: dims.iter().any(|&d| d == 0),
        }
    }
}

impl Iterator for IndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut k = self.dims.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.cur[k] += 1;
            if self.cur[k] < self.dims[k] {
                break;
            }
            self.cur[k] = 0;
        }
        Some(out)
    }
}

fn offset(dims: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// All permutations of `0..m`, in lexicographic order.
pub(crate) fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), &mut vec![false; m], &mut out);
    out
}

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(p) => Err(Error::NonFinite(format!("tensor entry at flat offset {p}"))),
        None => Ok(()),
    }
}

fn first_negative(dims: &[usize], data: &[f64]) -> Option<(Vec<usize>, f64)> {
    IndexIter::new(dims)
        .zip(data)
        .find(|(_, &v)| v < 0.0)
        .map(|(idx, &v)| (idx, v))
}

fn frobenius(data: &[f64]) -> f64 {
    norm(data)
}

/// Subset enumeration over a cubical array of the given order and dimension.
fn irreducible_dense(order: usize, n: usize, data: &[f64]) -> Result<bool> {
    if n > MAX_IRREDUCIBLE_DIM {
        return Err(Error::Unsupported(format!(
            "irreducibility check enumerates 2^n subsets and is capped at n = {MAX_IRREDUCIBLE_DIM} \
             (got n = {n}); run the power method anyway and treat the result with care"
        )));
    }
    let dims = vec![n; order];
    let full: u32 = (1u32 << n) - 1;
    for mask in 1..full {
        let inside: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let outside: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        let mut reducing = true;
        'scan: for &first in &inside {
            for tail in IndexIter::new(&vec![outside.len(); order - 1]) {
                let mut idx = Vec::with_capacity(order);
                idx.push(first);
                idx.extend(tail.iter().map(|&t| outside[t]));
                if data[offset(&dims, &idx)] != 0.0 {
                    reducing = false;
                    break 'scan;
                }
            }
        }
        if reducing {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Order-m, dimension-n real symmetric tensor stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl SymTensor {
    /// Builds a tensor from the full row-major array. The array must already be
    /// symmetric to within [`SYMMETRY_TOL`]; asymmetric input is rejected.
    pub fn new(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if order < 2 || dim < 2 {
            return Err(Error::Shape(format!(
                "symmetric tensor needs order ≥ 2 and dimension ≥ 2 (got order {order}, dimension {dim})"
            )));
        }
        let len = dim.pow(order as u32);
        if data.len() != len {
            return Err(Error::Shape(format!(
                "expected {len} entries for order {order} dimension {dim}, got {}",
                data.len()
            )));
        }
        check_finite(&data)?;
        let dims = vec![dim; order];
        let scale = data.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for idx in IndexIter::new(&dims) {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            let dev = (data[offset(&dims, &idx)] - data[offset(&dims, &sorted)]).abs();
            if dev > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric {
                    idx,
                    deviation: dev,
                });
            }
        }
        Ok(SymTensor { order, dim, data })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        SymTensor::new(order, dim, vec![0.0; dim.pow(order as u32)])
    }

    /// Fills every permutation of each listed index with its value. Two
    /// representatives of the same orbit must agree.
    pub fn from_orbits<I>(order: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let dims = vec![dim; order];
        let mut data = vec![0.0; dim.pow(order as u32)];
        let mut seen = std::collections::HashMap::new();
        for (idx, value) in entries {
            if idx.len() != order {
                return Err(Error::Shape(format!(
                    "index {idx:?} has {} components, tensor order is {order}",
                    idx.len()
                )));
            }
            if let Some(mode) = idx.iter().position(|&i| i >= dim) {
                return Err(Error::DimensionMismatch {
                    mode,
                    expected: dim,
                    found: idx[mode] + 1,
                });
            }
            let mut key = idx.clone();
            key.sort_unstable();
            if let Some(&prev) = seen.get(&key) {
                if prev != value {
                    return Err(Error::InvalidArgument(format!(
                        "conflicting values {prev} and {value} for the orbit of {idx:?}"
                    )));
                }
            }
            seen.insert(key, value);
            for p in permutations(order) {
                let permuted: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                data[offset(&dims, &permuted)] = value;
            }
        }
        SymTensor::new(order, dim, data)
    }

    /// Evaluates `f` on every index tuple and verifies the result is symmetric.
    pub fn from_fn(order: usize, dim: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let data = IndexIter::new(&vec![dim; order]).map(|i| f(&i)).collect();
        SymTensor::new(order, dim, data)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[offset(&vec![self.dim; self.order], idx)]
    }

    fn check_vector(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                mode: 0,
                expected: self.dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("contraction vector".into()));
        }
        Ok(())
    }

    /// `T x^{times}`: contracts the trailing `times` modes with `x`, returning
    /// the remaining order-`(m − times)` tensor as a flat row-major array.
    pub fn contract_power(&self, x: &[f64], times: usize) -> Result<Vec<f64>> {
        self.check_vector(x)?;
        if times > self.order {
            return Err(Error::InvalidArgument(format!(
                "cannot contract {times} modes of an order-{} tensor",
                self.order
            )));
        }
        Ok(self.contract_power_unchecked(x, times))
    }

    pub(crate) fn contract_power_unchecked(&self, x: &[f64], times: usize) -> Vec<f64> {
        if times == 0 {
            return self.data.clone();
        }
        let mut cur = fold_last(&self.data, x);
        for _ in 1..times {
            cur = fold_last(&cur, x);
        }
        cur
    }

    /// `T x^{m-1}`.
    pub fn contract_once(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.contract_power(x, self.order - 1)
    }

    /// `T x^m`.
    pub fn contract_full(&self, x: &[f64]) -> Result<f64> {
        Ok(self.contract_power(x, self.order)?[0])
    }

    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.contract_power_unchecked(x, self.order - 1)
    }

    /// `‖T x^{m-1} − λ x‖`.
    pub fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let y = self.apply(x);
        y.iter()
            .zip(x)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    pub fn first_negative(&self) -> Option<(Vec<usize>, f64)> {
        first_negative(&vec![self.dim; self.order], &self.data)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// False iff some nonempty proper `I` has `t_{i₁…i_m} = 0` for all
    /// `i₁ ∈ I` and `i₂,…,i_m ∉ I`.
    pub fn is_irreducible(&self) -> Result<bool> {
        irreducible_dense(self.order, self.dim, &self.data)
    }

    pub fn scaled(&self, c: f64) -> SymTensor {
        SymTensor {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn to_general(&self) -> GenTensor {
        GenTensor {
            dims: vec![self.dim; self.order],
            data: self.data.clone(),
        }
    }
}

/// `d₁×⋯×d_m` real tensor stored densely in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct GenTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl GenTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Shape(format!(
                "tensor dimensions must be positive and nonempty, got {dims:?}"
            )));
        }
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::Shape(format!(
                "expected {len} entries for dims {dims:?}, got {}",
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(GenTensor { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = dims.iter().product();
        GenTensor::new(dims, vec![0.0; len])
    }

    /// Sparse construction; unlisted entries are zero.
    pub fn from_entries<I>(dims: Vec<usize>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut t = GenTensor::zeros(dims)?;
        for (idx, value) in entries {
            t.check_index(&idx)?;
            let o = offset(&t.dims, &idx);
            t.data[o] = value;
        }
        check_finite(&t.data)?;
        Ok(t)
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.dims.len() {
            return Err(Error::Shape(format!(
                "index {idx:?} has {} components, tensor order is {}",
                idx.len(),
                self.dims.len()
            )));
        }
        for (mode, (&i, &d)) in idx.iter().zip(&self.dims).enumerate() {
            if i >= d {
                return Err(Error::DimensionMismatch {
                    mode,
                    expected: d,
                    found: i + 1,
                });
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[offset(&self.dims, idx)]
    }

    fn check_vectors<V: AsRef<[f64]>>(&self, vectors: &[V]) -> Result<()> {
        if vectors.len() != self.dims.len() {
            return Err(Error::Shape(format!(
                "expected {} mode vectors, got {}",
                self.dims.len(),
                vectors.len()
            )));
        }
        for (mode, (v, &d)) in vectors.iter().zip(&self.dims).enumerate() {
            let v = v.as_ref();
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    mode,
                    expected: d,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("mode-{mode} vector")));
            }
        }
        Ok(())
    }

    /// `A x⁽¹⁾⋯x⁽ᵐ⁾`.
    pub fn contract_full<V: AsRef<[f64]>>(&self, vectors: &[V]) -> Result<f64> {
        self.check_vectors(vectors)?;
        let mut cur = self.data.clone();
        for v in vectors.iter().rev() {
            cur = fold_last(&cur, v.as_ref());
        }
        Ok(cur[0])
    }

    /// Contracts every mode except `skip`, returning a vector of length `d_skip`.
    pub fn contract_except<V: AsRef<[f64]>>(&self, vectors: &[V], skip: usize) -> Result<Vec<f64>> {
        self.check_vectors(vectors)?;
        if skip >= self.dims.len() {
            return Err(Error::InvalidArgument(format!(
                "mode {skip} out of range for order {}",
                self.dims.len()
            )));
        }
        let mut out = vec![0.0; self.dims[skip]];
        for (idx, &a) in IndexIter::new(&self.dims).zip(&self.data) {
            if a == 0.0 {
                continue;
            }
            let mut w = a;
            for (k, (&i, v)) in idx.iter().zip(vectors).enumerate() {
                if k != skip {
                    w *= v.as_ref()[i];
                }
            }
            out[idx[skip]] += w;
        }
        Ok(out)
    }

    /// Stacked residual of the singular-value system for `(σ, x⁽¹⁾,…,x⁽ᵐ⁾)`.
    pub fn singular_residual<V: AsRef<[f64]>>(&self, sigma: f64, vectors: &[V]) -> Result<f64> {
        let mut acc = 0.0;
        for k in 0..self.dims.len() {
            let y = self.contract_except(vectors, k)?;
            acc += y
                .iter()
                .zip(vectors[k].as_ref())
                .map(|(a, b)| (a - sigma * b).powi(2))
                .sum::<f64>();
        }
        Ok(acc.sqrt())
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    pub fn first_negative(&self) -> Option<(Vec<usize>, f64)> {
        first_negative(&self.dims, &self.data)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Irreducibility is only defined for cubical tensors (all dims equal).
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = self.dims[0];
        if self.dims.iter().any(|&d| d != n) || self.dims.len() < 2 {
            return Err(Error::Shape(format!(
                "irreducibility needs equal dimensions in every mode, got {:?}",
                self.dims
            )));
        }
        irreducible_dense(self.dims.len(), n, &self.data)
    }

    /// Reinterprets a cubical tensor as symmetric, failing if it is not.
    pub fn to_symmetric(&self) -> Result<SymTensor> {
        let n = self.dims[0];
        if self.dims.iter().any(|&d| d != n) {
            return Err(Error::Shape(format!(
                "symmetric tensors need equal dimensions, got {:?}",
                self.dims
            )));
        }
        SymTensor::new(self.dims.len(), n, self.data.clone())
    }

    /// Offsets of each mode's block inside the embedding space of dimension `∑ d_k`.
    pub fn block_offsets(&self) -> Vec<usize> {
        self.dims
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect()
    }

    /// The symmetric embedding `S_A`: an order-m tensor of dimension
    /// `N = ∑ d_k` that carries `a_{i₁…i_m}` at every position obtained by
    /// distributing the m mode-blocks over the m slots, and zero elsewhere.
    ///
    /// For `y = (y⁽¹⁾,…,y⁽ᵐ⁾)` split by blocks, `S_A yᵐ = m!·A y⁽¹⁾⋯y⁽ᵐ⁾`.
    pub fn symmetric_embedding(&self) -> Result<SymTensor> {
        let m = self.order();
        if m < 3 {
            return Err(Error::Unsupported(format!(
                "symmetric embedding is implemented for order ≥ 3 (got {m})"
            )));
        }
        let offs = self.block_offsets();
        let big: usize = self.dims.iter().sum();
        let big_dims = vec![big; m];
        let mut data = vec![0.0; big.pow(m as u32)];
        let perms = permutations(m);
        let mut pos = vec![0usize; m];
        for (idx, &a) in IndexIter::new(&self.dims).zip(&self.data) {
            if a == 0.0 {
                continue;
            }
            for p in &perms {
                for k in 0..m {
                    pos[p[k]] = offs[k] + idx[k];
                }
                data[offset(&big_dims, &pos)] = a;
            }
        }
        SymTensor::new(m, big, data)
    }
}

/// A tensor that is either known to be symmetric or held without symmetry.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTensor {
    Symmetric(SymTensor),
    General(GenTensor),
}

impl AnyTensor {
    /// Classifies a general tensor, preferring the symmetric form when valid.
    pub fn classify(t: GenTensor) -> AnyTensor {
        match t.to_symmetric() {
            Ok(s) => AnyTensor::Symmetric(s),
            Err(_) => AnyTensor::General(t),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            AnyTensor::Symmetric(s) => vec![s.dim(); s.order()],
            AnyTensor::General(g) => g.dims().to_vec(),
        }
    }

    pub fn general(&self) -> GenTensor {
        match self {
            AnyTensor::Symmetric(s) => s.to_general(),
            AnyTensor::General(g) => g.clone(),
        }
    }
}

impl From<&SymTensor> for GenTensor {
    fn from(t: &SymTensor) -> GenTensor {
        t.to_general()
    }
}
