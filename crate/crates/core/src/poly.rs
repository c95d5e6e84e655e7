//! Univariate real polynomials, nonnegative real-root isolation, Sylvester
//! matrices over `ℝ[v]` and their determinants.
//!
//! Root isolation splits `[0, B]` (B the Cauchy bound) at the real critical
//! points of `p`, found recursively from `p'`. On each piece `p` is monotone,
//! so a sign change brackets exactly one root, which is bisected to width
//! `1e-13·max(1,|r|)` and Newton-polished. Critical points and endpoints where
//! `|p|` is within tolerance of zero are reported as (even-multiplicity or
//! boundary) roots, which is how tangential roots of resultants are caught.
//! [`sturm_count`] gives an independent count of distinct roots for
//! square-free input.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than this (relative to `max(1,|r|)`).
pub const BISECTION_WIDTH: f64 = 1e-13;

/// Roots closer than this (relative to `max(1,|r|)`) are merged.
pub const MERGE_TOL: f64 = 1e-9;

/// Determinant coefficients below this fraction of the largest one are dropped.
pub const DET_TRUNCATION: f64 = 1e-10;

/// Univariate polynomial with real coefficients in ascending degree.
/// Trailing zeros are stripped, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `c·tᵏ`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut v = vec![0.0; k + 1];
        v[k] = c;
        Polynomial::new(v)
    }

    /// `∏ (t − rᵢ)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Polynomial::constant(1.0), |acc, &r| {
            &acc * &Polynomial::new(vec![-r, 1.0])
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `∑ |cᵢ| |t|ⁱ`, the natural magnitude against which `p(t)` is judged.
    pub fn scale_at(&self, t: f64) -> f64 {
        let a = t.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * a + c.abs())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Zeroes every coefficient below `rel·max|cᵢ|`.
    pub fn truncate_relative(&self, rel: f64) -> Polynomial {
        let cut = rel * self.max_abs_coeff();
        Polynomial::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() < cut { 0.0 } else { c })
                .collect(),
        )
    }

    /// `1 + maxᵢ |cᵢ / c_deg|`; every real root lies in `[-B, B]`.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading();
        if lead == 0.0 {
            return 1.0;
        }
        let n = self.coeffs.len() - 1;
        1.0 + self.coeffs[..n]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / lead).abs()))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; rem.len() - dd];
        let lead = d.leading();
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= c * dc;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + rhs.coeffs.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Mul<f64> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }
}

/// A real root with its estimated multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

fn near_zero(p: &Polynomial, t: f64, tol: f64) -> bool {
    p.eval(t).abs() <= tol * p.scale_at(t)
}

fn bisect(p: &Polynomial, mut a: f64, mut b: f64) -> f64 {
    let mut fa = p.eval(a);
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if b - a <= BISECTION_WIDTH * mid.abs().max(1.0) || mid <= a || mid >= b {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let (lo, hi) = (a, b);
    let mut r = 0.5 * (a + b);
    let dp = p.derivative();
    for _ in 0..5 {
        let d = dp.eval(r);
        if d == 0.0 {
            break;
        }
        let next = r - p.eval(r) / d;
        if !(lo..=hi).contains(&next) || p.eval(next).abs() >= p.eval(r).abs() {
            break;
        }
        r = next;
    }
    r
}

/// Candidate roots of `p` in `[lo, hi]`, possibly with near-duplicates.
fn isolate(p: &Polynomial, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    match p.degree() {
        None | Some(0) => return Vec::new(),
        _ => {}
    }
    let crit = isolate(&p.derivative(), lo, hi, tol);
    let mut pts = vec![lo];
    pts.extend(crit.into_iter().filter(|&c| c > lo && c < hi));
    pts.push(hi);
    pts.dedup();

    let mut roots: Vec<f64> = pts.iter().copied().filter(|&t| near_zero(p, t, tol)).collect();
    for w in pts.windows(2) {
        let (fa, fb) = (p.eval(w[0]), p.eval(w[1]));
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect(p, w[0], w[1]));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn multiplicity(p: &Polynomial, r: f64) -> usize {
    let deg = p.degree().unwrap_or(0);
    let mut k = 1;
    let mut d = p.derivative();
    while k < deg && near_zero(&d, r, 1e-6) {
        k += 1;
        d = d.derivative();
    }
    k
}

fn merge(p: &Polynomial, mut roots: Vec<f64>) -> Vec<RealRoot> {
    roots.sort_by(f64::total_cmp);
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for r in roots {
        match groups.last_mut() {
            Some(g) if r - *g.last().unwrap() <= MERGE_TOL * r.abs().max(1.0) => g.push(r),
            _ => groups.push(vec![r]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let value = g
                .into_iter()
                .min_by(|a, b| p.eval(*a).abs().total_cmp(&p.eval(*b).abs()))
                .unwrap();
            RealRoot {
                value,
                multiplicity: multiplicity(p, value),
            }
        })
        .collect()
}

/// All real roots of `p` in `[0, B]`, sorted ascending, each reported once.
///
/// A reported root `r` satisfies `|p(r)| ≤ tol·∑|cᵢ||r|ⁱ` or brackets a sign
/// change of width `1e-13·max(1,|r|)`.
pub fn real_roots_nonneg(p: &Polynomial, tol: f64) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let bound = p.cauchy_bound();
    Ok(merge(p, isolate(p, 0.0, bound, tol)))
}

/// Nonnegative roots shared by `p` and `q`.
///
/// If one polynomial is identically zero the other's roots are returned. A
/// root of `p` is kept when `|q(r)| ≤ tol·scale` or it lies within
/// `√tol·max(1,|r|)` of a root of `q`; callers verify candidates against the
/// system they came from.
pub fn common_nonneg_roots(p: &Polynomial, q: &Polynomial, tol: f64) -> Result<Vec<f64>> {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => {
            return Err(Error::DegenerateResultant(
                "both polynomials are identically zero".into(),
            ))
        }
        (true, false) => return Ok(real_roots_nonneg(q, tol)?.iter().map(|r| r.value).collect()),
        (false, true) => return Ok(real_roots_nonneg(p, tol)?.iter().map(|r| r.value).collect()),
        _ => {}
    }
    let rp = real_roots_nonneg(p, tol)?;
    let rq = real_roots_nonneg(q, tol)?;
    let close = tol.sqrt();
    Ok(rp
        .iter()
        .map(|r| r.value)
        .filter(|&r| {
            near_zero(q, r, tol)
                || rq
                    .iter()
                    .any(|s| (s.value - r).abs() <= close * r.abs().max(1.0))
        })
        .collect())
}

/// Sturm chain `p₀ = p, p₁ = p', p_{k+1} = −rem(p_{k−1}, p_k)`, stopped when the
/// remainder vanishes to working precision.
pub fn sturm_sequence(p: &Polynomial) -> Vec<Polynomial> {
    let mut seq = vec![p.clone()];
    if p.degree().unwrap_or(0) == 0 {
        return seq;
    }
    seq.push(p.derivative());
    loop {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        let r = -&r;
        if r.is_zero() || r.max_abs_coeff() <= 1e-12 * seq[n - 2].max_abs_coeff() {
            break;
        }
        seq.push(r);
    }
    seq
}

fn sign_changes(seq: &[Polynomial], t: f64) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|q| q.eval(t))
        .filter(|v| *v != 0.0)
        .map(|v| v > 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of `p` in `(a, b]` by Sturm's theorem.
pub fn sturm_count(p: &Polynomial, a: f64, b: f64) -> usize {
    let seq = sturm_sequence(p);
    sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b))
}

/// Rectangular matrix of polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Polynomial>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}×{cols} polynomial matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(PolyMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Polynomial::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.entries[i * self.cols + j] = p;
    }

    /// `∑_rows max_j deg M_ij`, an upper bound on the determinant degree.
    pub fn degree_bound(&self) -> usize {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter_map(|j| self.get(i, j).degree())
                    .max()
                    .unwrap_or(0)
            })
            .sum()
    }

    pub fn eval(&self, v: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(v))
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval_complex(z))
    }

    /// `∏_rows ∑_j ‖M_ij‖₁`: bounds `|det M(z)|` on the unit circle.
    fn hadamard_bound(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).coeffs().iter().map(|c| c.abs()).sum::<f64>())
                    .sum::<f64>()
            })
            .product()
    }
}

/// Polynomial in `u` whose coefficients are polynomials in `v`, ascending in `u`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BiPoly {
    pub coeffs: Vec<Polynomial>,
}

impl BiPoly {
    pub fn new(coeffs: Vec<Polynomial>) -> Self {
        BiPoly { coeffs }
    }

    /// Declared `u`-degree (`coeffs.len() − 1`), even if the leading entry is zero.
    pub fn declared_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Drops leading `u`-coefficients that are the zero polynomial.
    pub fn trimmed(&self) -> BiPoly {
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(Polynomial::is_zero) {
            c.pop();
        }
        BiPoly { coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_zero)
    }

    /// Specializes `v = v₀`, returning the polynomial in `u` together with the
    /// per-coefficient magnitude scale used to judge cancellation.
    pub fn eval_v(&self, v0: f64) -> (Vec<f64>, Vec<f64>) {
        self.coeffs
            .iter()
            .map(|c| (c.eval(v0), c.scale_at(v0)))
            .unzip()
    }
}

/// Sylvester matrix of `f` (declared `u`-degree `p`) and `g` (declared
/// `u`-degree `q`): `q` shifted rows of `f`'s coefficients, leading first, then
/// `p` shifted rows of `g`'s. For `p = m`, `q = m − 1` this is the
/// `(2m−1)×(2m−1)` layout with rows `a₀(v)…a_m(v)` followed by `b₀(v)…b_{m−1}(v)`.
pub fn sylvester(f: &BiPoly, g: &BiPoly) -> Result<PolyMatrix> {
    subresultant_matrix(f, g, 0)
}

/// Matrix whose determinant is the `j`-th principal subresultant coefficient
/// `psc_j(v)`: `q − j` shifted rows of `f` and `p − j` shifted rows of `g`,
/// truncated to the first `p + q − 2j` columns. `j = 0` is the Sylvester matrix.
///
/// If `f` and `g` share a factor of `u`-degree `k`, then `psc_j ≡ 0` for
/// `j < k` and `psc_k ≢ 0`; at a specialization `v₀` with `psc_k(v₀) ≠ 0`
/// the two polynomials have a gcd of degree exactly `k`.
pub fn subresultant_matrix(f: &BiPoly, g: &BiPoly, j: usize) -> Result<PolyMatrix> {
    if f.coeffs.is_empty() || g.coeffs.is_empty() {
        return Err(Error::InvalidArgument(
            "Sylvester matrix needs at least one coefficient in each polynomial".into(),
        ));
    }
    let p = f.declared_degree();
    let q = g.declared_degree();
    if p + q == 0 {
        return Err(Error::InvalidArgument(
            "both polynomials are constant in u; the Sylvester matrix is empty".into(),
        ));
    }
    if j > 0 && j >= p.min(q) {
        return Err(Error::InvalidArgument(format!(
            "subresultant index {j} needs both u-degrees above it (got {p} and {q})"
        )));
    }
    let size = p + q - 2 * j;
    let mut m = PolyMatrix::zeros(size, size);
    for r in 0..q - j {
        for c in 0..=p {
            if r + c < size {
                m.set(r, r + c, f.coeffs[p - c].clone());
            }
        }
    }
    for r in 0..p - j {
        for c in 0..=q {
            if r + c < size {
                m.set(q - j + r, r + c, g.coeffs[q - c].clone());
            }
        }
    }
    Ok(m)
}

/// Numerical diagnostics from [`det_polymatrix_with_diagnostics`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetDiagnostics {
    pub degree_bound: usize,
    pub samples: usize,
    /// Ratio of the largest to smallest nonzero sample magnitude.
    pub sample_span: f64,
    pub warning: Option<String>,
}

/// `det M(v)` as a polynomial.
pub fn det_polymatrix(m: &PolyMatrix) -> Result<Polynomial> {
    det_polymatrix_with_diagnostics(m).map(|(d, _)| d)
}

/// Determinant by evaluation and interpolation.
///
/// `det M` is sampled at the `D+1` roots of unity (`D` the row-degree bound)
/// and the coefficients are recovered by an inverse discrete Fourier transform,
/// which is perfectly conditioned in the monomial basis. Coefficients below
/// `1e-10·‖d‖∞` are truncated, and a result below `1e-12` of the Hadamard bound
/// is reported as the zero polynomial.
pub fn det_polymatrix_with_diagnostics(m: &PolyMatrix) -> Result<(Polynomial, DetDiagnostics)> {
    if m.rows != m.cols {
        return Err(Error::Shape(format!(
            "determinant of a non-square {}×{} matrix",
            m.rows, m.cols
        )));
    }
    if m.rows == 0 {
        let diag = DetDiagnostics {
            degree_bound: 0,
            samples: 0,
            sample_span: 1.0,
            warning: None,
        };
        return Ok((Polynomial::constant(1.0), diag));
    }
    let bound = m.degree_bound();
    let k = bound + 1;
    let step = 2.0 * std::f64::consts::PI / k as f64;
    let samples: Vec<Complex<f64>> = (0..k)
        .map(|i| m.eval_complex(Complex::from_polar(1.0, step * i as f64)).determinant())
        .collect();
    let coeffs: Vec<f64> = (0..k)
        .map(|j| {
            let s: Complex<f64> = samples
                .iter()
                .enumerate()
                .map(|(i, d)| d * Complex::from_polar(1.0, -step * ((i * j) % k) as f64))
                .sum();
            s.re / k as f64
        })
        .collect();

    let mags: Vec<f64> = samples.iter().map(|s| s.norm()).filter(|&a| a > 0.0).collect();
    let span = match (
        mags.iter().cloned().fold(f64::NAN, f64::max),
        mags.iter().cloned().fold(f64::NAN, f64::min),
    ) {
        (hi, lo) if hi.is_finite() && lo.is_finite() => hi / lo,
        _ => 1.0,
    };
    let warning = (span > 1e12).then(|| {
        format!("determinant samples span {span:.3e} in magnitude; interpolated coefficients may be ill-conditioned")
    });

    let d = Polynomial::new(coeffs);
    let d = if d.max_abs_coeff() <= 1e-12 * m.hadamard_bound() {
        Polynomial::zero()
    } else {
        d.truncate_relative(DET_TRUNCATION)
    };
    Ok((
        d,
        DetDiagnostics {
            degree_bound: bound,
            samples: k,
            sample_span: span,
            warning,
        },
    ))
}
