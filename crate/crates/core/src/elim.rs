//! Exact enumeration of the nonnegative Z-eigenpairs of nonnegative symmetric
//! tensors of dimension 2 and 3 by variable elimination.
//!
//! Dimension 3 follows the three-branch scheme: `x = e₁`; `x₃ = 0, x₂ ≠ 0`
//! through the ratio `t = x₁/x₂`; `x₃ ≠ 0` through `u = x₁/x₃, v = x₂/x₃`, a
//! Sylvester resultant in `u` and back-substitution of each nonnegative root
//! of `d(v)`. Dimension 2 is the first two branches of the same scheme.
//!
//! Every candidate is Newton-polished on the full system
//! `T x^{m-1} = λx, xᵀx = 1` and admitted only if its residual is at most
//! [`ADMISSION_TOL`]`·max(1, λ)`. Resultant roots are therefore allowed to be
//! approximate and even spurious; the residual is the final word.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::poly::{
    common_nonneg_roots, det_polymatrix_with_diagnostics, real_roots_nonneg, subresultant_matrix, BiPoly,
    Polynomial,
};
use crate::tensor::{norm, IndexIter, SymTensor, ZEigenpair};

/// Residual bound for admitting a candidate, relative to `max(1, λ)`.
pub const ADMISSION_TOL: f64 = 1e-8;

/// Tolerance handed to the univariate root finder for `d(v)` and `p(t)`.
pub const ROOT_TOL: f64 = 1e-10;

/// Looser tolerance for back-substitution, where `v₀` is only approximate.
const BACKSUB_TOL: f64 = 1e-8;

/// Specializations of `v` probed for a continuum when `f` and `g` share a factor.
const CONTINUUM_PROBES: usize = 64;

/// Eigenvectors closer than this are the same pair.
const DEDUP_TOL: f64 = 1e-7;

/// The nonnegative Z-spectrum `Π(T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZSpectrum {
    /// Descending by λ; ties broken by descending lexicographic `x`.
    pub pairs: Vec<ZEigenpair>,
    pub radius: f64,
    /// True when produced by elimination, i.e. every nonnegative eigenpair is listed.
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ZSpectrum {
    /// Distinct eigenvalues, descending, merged within `tol`.
    pub fn distinct_eigenvalues(&self, tol: f64) -> Vec<f64> {
        distinct_descending(self.pairs.iter().map(|p| p.lambda), tol)
    }

    /// Pairs attaining the radius (within `1e-9`).
    pub fn maximizers(&self) -> impl Iterator<Item = &ZEigenpair> {
        let r = self.radius;
        self.pairs
            .iter()
            .filter(move |p| (p.lambda - r).abs() <= 1e-9 * r.max(1.0))
    }
}

pub(crate) fn distinct_descending(values: impl Iterator<Item = f64>, tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        if out.last().is_none_or(|&l| l - x > tol * l.abs().max(1.0)) {
            out.push(x);
        }
    }
    out
}

/// Upper bound `((m−1)ⁿ − 1)/(m − 2)` on the number of Z-eigenvalues of a
/// generic symmetric tensor (`n` when `m = 2`).
pub fn count_bound(order: usize, dim: usize) -> u128 {
    if order == 2 {
        return dim as u128;
    }
    let base = (order - 1) as u128;
    (base.pow(dim as u32) - 1) / (order as u128 - 2)
}

fn validate(t: &SymTensor, n: usize) -> Result<()> {
    if t.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "expected a dimension-{n} tensor, got dimension {}",
            t.dim()
        )));
    }
    if let Some((idx, value)) = t.first_negative() {
        return Err(Error::Negative { idx, value });
    }
    Ok(())
}

/// Coefficients of `row_i(x) = ∑ t_{i i₂…i_m} x_{i₂}⋯x_{i_m}` keyed by the
/// exponent of each coordinate.
fn row_monomials(t: &SymTensor, i: usize) -> HashMap<Vec<usize>, f64> {
    let n = t.dim();
    let mut out: HashMap<Vec<usize>, f64> = HashMap::new();
    for tail in IndexIter::new(&vec![n; t.order() - 1]) {
        let mut idx = Vec::with_capacity(t.order());
        idx.push(i);
        idx.extend_from_slice(&tail);
        let a = t.get(&idx);
        if a == 0.0 {
            continue;
        }
        let mut exps = vec![0usize; n];
        for &j in &tail {
            exps[j] += 1;
        }
        *out.entry(exps).or_insert(0.0) += a;
    }
    out
}

/// `row_i` restricted to `x = (t, 1, 0, …)` as a polynomial in `t`.
fn row_in_ratio(t: &SymTensor, i: usize) -> Polynomial {
    let mut c = vec![0.0; t.order()];
    for (exps, a) in row_monomials(t, i) {
        if exps[2..].iter().all(|&e| e == 0) {
            c[exps[0]] += a;
        }
    }
    Polynomial::new(c)
}

/// `row_i` at `x = (u, v, 1)` as a polynomial in `u` over `ℝ[v]`, padded to `len` coefficients.
fn row_in_uv(t: &SymTensor, i: usize, len: usize) -> Vec<Vec<f64>> {
    let m = t.order();
    let mut grid = vec![vec![0.0; m + 1]; len];
    for (exps, a) in row_monomials(t, i) {
        grid[exps[0]][exps[1]] += a;
    }
    grid
}

fn to_bipoly(grid: Vec<Vec<f64>>) -> BiPoly {
    BiPoly::new(grid.into_iter().map(Polynomial::new).collect())
}

fn unit(x: &[f64]) -> Vec<f64> {
    let n = norm(x);
    x.iter().map(|v| v / n).collect()
}

/// Newton on `F(x, λ) = (T x^{m-1} − λx, (xᵀx − 1)/2)`, keeping the best iterate.
fn newton_polish(t: &SymTensor, x0: &[f64]) -> (Vec<f64>, f64) {
    let n = t.dim();
    let m = t.order();
    let mut x = unit(x0);
    let mut lambda = t.contract_power_unchecked(&x, m)[0];
    let mut best = (x.clone(), lambda, t.residual(lambda, &x));
    for _ in 0..12 {
        if best.2 <= 1e-15 {
            break;
        }
        let y = t.apply(&x);
        let hess = t.contract_power_unchecked(&x, m - 2);
        let mut jac = DMatrix::<f64>::zeros(n + 1, n + 1);
        let mut rhs = DVector::<f64>::zeros(n + 1);
        for i in 0..n {
            for j in 0..n {
                jac[(i, j)] = (m - 1) as f64 * hess[i * n + j];
            }
            jac[(i, i)] -= lambda;
            jac[(i, n)] = -x[i];
            jac[(n, i)] = x[i];
            rhs[i] = -(y[i] - lambda * x[i]);
        }
        rhs[n] = -0.5 * (x.iter().map(|v| v * v).sum::<f64>() - 1.0);
        let Some(step) = jac.lu().solve(&rhs) else {
            break;
        };
        let cand: Vec<f64> = (0..n).map(|i| x[i] + step[i]).collect();
        if cand.iter().any(|v| !v.is_finite()) || norm(&cand) == 0.0 {
            break;
        }
        x = unit(&cand);
        lambda = t.contract_power_unchecked(&x, m)[0];
        let r = t.residual(lambda, &x);
        if r < best.2 {
            best = (x.clone(), lambda, r);
        } else {
            break;
        }
    }
    (best.0, best.1)
}

/// Polishes a candidate direction and admits it if it is a nonnegative eigenpair.
fn admit(t: &SymTensor, x0: &[f64], tol: f64) -> Option<ZEigenpair> {
    if x0.iter().any(|v| !v.is_finite()) || norm(x0) == 0.0 {
        return None;
    }
    let (x, _) = newton_polish(t, x0);
    if x.iter().any(|&v| v < -1e-9) {
        return None;
    }
    let x = unit(&x.iter().map(|&v| v.max(0.0)).collect::<Vec<_>>());
    let lambda = t.contract_power_unchecked(&x, t.order())[0];
    let residual = t.residual(lambda, &x);
    (residual <= tol * lambda.abs().max(1.0)).then_some(ZEigenpair {
        lambda,
        x,
        residual,
    })
}

fn quantize(l: f64) -> i64 {
    (l * 1e9).round() as i64
}

fn lex_desc(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

pub(crate) fn sort_pairs(pairs: &mut [ZEigenpair]) {
    pairs.sort_by(|a, b| {
        quantize(b.lambda)
            .cmp(&quantize(a.lambda))
            .then_with(|| lex_desc(&a.x, &b.x))
    });
}

fn finish(candidates: Vec<ZEigenpair>, warnings: Vec<String>) -> Result<ZSpectrum> {
    let mut pairs: Vec<ZEigenpair> = Vec::new();
    for c in candidates {
        match pairs.iter_mut().find(|p| {
            p.x.iter().zip(&c.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= DEDUP_TOL
        }) {
            Some(p) if c.residual < p.residual => *p = c,
            Some(_) => {}
            None => pairs.push(c),
        }
    }
    if pairs.is_empty() {
        return Err(Error::DegenerateResultant(
            "no nonnegative eigenpair survived residual verification".into(),
        ));
    }
    sort_pairs(&mut pairs);
    let radius = pairs[0].lambda;
    Ok(ZSpectrum {
        pairs,
        radius,
        complete: true,
        warnings,
    })
}

fn zero_spectrum(n: usize) -> ZSpectrum {
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    ZSpectrum {
        pairs: vec![ZEigenpair {
            lambda: 0.0,
            x,
            residual: 0.0,
        }],
        radius: 0.0,
        complete: true,
        warnings: vec!["zero tensor: every unit vector is an eigenvector; e₁ reported".into()],
    }
}

fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Candidates with `x = (t, 1, 0, …)/‖·‖`, `t ≥ 0`, from
/// `x₂·row₁ = x₁·row₂` divided by `x₂ᵐ`, intersected with `row_k = 0` for `k ≥ 3`.
fn ratio_branch(t: &SymTensor, tol: f64) -> Result<Vec<ZEigenpair>> {
    let n = t.dim();
    let r1 = row_in_ratio(t, 0);
    let r2 = row_in_ratio(t, 1);
    let p = &r1 - &(&Polynomial::new(vec![0.0, 1.0]) * &r2);
    let roots: Vec<f64> = if n == 2 {
        if p.is_zero() {
            return Err(Error::DegenerateResultant(
                "cross-multiplied qubit equation is identically zero (continuum of eigenvectors)"
                    .into(),
            ));
        }
        real_roots_nonneg(&p, ROOT_TOL)?.into_iter().map(|r| r.value).collect()
    } else {
        let h = row_in_ratio(t, 2);
        common_nonneg_roots(&p, &h, ROOT_TOL).map_err(|_| {
            Error::DegenerateResultant(
                "x₃ = 0 branch: both reduced equations vanish identically".into(),
            )
        })?
    };
    Ok(roots
        .into_iter()
        .filter_map(|r| {
            let mut x = vec![0.0; n];
            x[0] = r;
            x[1] = 1.0;
            admit(t, &x, tol)
        })
        .collect())
}

/// Nonnegative Z-spectrum of a dimension-2 nonnegative symmetric tensor.
pub fn qubit_spectrum(t: &SymTensor) -> Result<ZSpectrum> {
    qubit_spectrum_tol(t, ADMISSION_TOL)
}

fn qubit_spectrum_tol(t: &SymTensor, tol: f64) -> Result<ZSpectrum> {
    validate(t, 2)?;
    if t.is_zero() {
        return Ok(zero_spectrum(2));
    }
    let mut cands: Vec<ZEigenpair> = admit(t, &basis(2, 0), tol).into_iter().collect();
    cands.extend(ratio_branch(t, tol)?);
    finish(cands, Vec::new())
}

fn approx_zero(values: &[f64], scales: &[f64], rel: f64) -> bool {
    values.iter().zip(scales).all(|(v, s)| v.abs() <= rel * s)
}

fn specialize(values: Vec<f64>, scales: &[f64]) -> Polynomial {
    Polynomial::new(
        values
            .into_iter()
            .zip(scales)
            .map(|(v, s)| if v.abs() <= 1e-12 * s { 0.0 } else { v })
            .collect(),
    )
}

/// Nonnegative Z-spectrum of a dimension-3 nonnegative symmetric tensor.
///
/// When `e₁` is an eigenvector the homogenized `u`-system has a common root
/// at infinity for every `v`, so both leading coefficients vanish
/// identically; those zero leading terms are trimmed before forming the
/// Sylvester matrix. A continuum of nonnegative eigenvectors is reported as
/// [`Error::DegenerateResultant`].
pub fn qutrit_spectrum(t: &SymTensor) -> Result<ZSpectrum> {
    qutrit_spectrum_tol(t, ADMISSION_TOL)
}

fn qutrit_spectrum_tol(t: &SymTensor, tol: f64) -> Result<ZSpectrum> {
    validate(t, 3)?;
    if t.is_zero() {
        return Ok(zero_spectrum(3));
    }
    let m = t.order();
    let mut warnings = Vec::new();

    // x = e₁, checked by residual rather than the zero pattern alone.
    let mut cands: Vec<ZEigenpair> = admit(t, &basis(3, 0), tol).into_iter().collect();

    cands.extend(ratio_branch(t, tol)?);

    // x₃ ≠ 0: f = row₁ − u·row₃, g = row₂ − v·row₃ at x = (u, v, 1).
    let r1 = row_in_uv(t, 0, m + 1);
    let r2 = row_in_uv(t, 1, m + 1);
    let r3 = row_in_uv(t, 2, m + 1);
    let mut f = r1.clone();
    for j in 0..m {
        for k in 0..=m {
            f[j + 1][k] -= r3[j][k];
        }
    }
    let mut g = r2;
    for j in 0..m {
        for k in 0..m {
            g[j][k + 1] -= r3[j][k];
        }
    }
    g.truncate(m); // u-degree of g is at most m − 1
    let f = to_bipoly(f).trimmed();
    let g = to_bipoly(g).trimmed();
    if f.is_zero() || g.is_zero() {
        return Err(Error::DegenerateResultant(
            "x₃ ≠ 0 branch: one eliminated equation vanishes identically".into(),
        ));
    }

    if f.declared_degree() == 0 && g.declared_degree() == 0 {
        // Neither equation involves u: any common v-root would leave u free.
        if !common_nonneg_roots(&f.coeffs[0], &g.coeffs[0], ROOT_TOL)?.is_empty() {
            return Err(Error::DegenerateResultant(
                "x₃ ≠ 0 branch: u is unconstrained".into(),
            ));
        }
        return finish(cands, warnings);
    }

    // A common factor h(u, v) of f and g makes the resultant vanish
    // identically. Its zero set is then a curve of solutions; if that curve
    // meets the open orthant it is a continuum of eigenvectors, otherwise the
    // isolated solutions are the roots of the first nonvanishing principal
    // subresultant coefficient.
    let max_k = f.declared_degree().min(g.declared_degree());
    let mut k = 0;
    let d = loop {
        if k > 0 && k >= max_k {
            break None;
        }
        let (d, diag) = det_polymatrix_with_diagnostics(&subresultant_matrix(&f, &g, k)?)?;
        warnings.extend(diag.warning);
        if !d.is_zero() {
            break Some(d);
        }
        k += 1;
    };
    if k > 0 {
        for i in 0..CONTINUUM_PROBES {
            let v0 = (std::f64::consts::FRAC_PI_2 * (i as f64 + 0.5) / CONTINUUM_PROBES as f64).tan();
            if !back_substitute(t, &f, &g, v0, tol)?.is_empty() {
                return Err(Error::DegenerateResultant(format!(
                    "f and g share a factor of u-degree {k} whose zero set meets the nonnegative orthant \
                     (continuum of eigenvectors near v = {v0:.4})"
                )));
            }
        }
        warnings.push(format!(
            "eliminated equations share a factor of u-degree {k} with no nonnegative zeros; \
             used subresultant coefficient {k}"
        ));
    }
    // Where every coefficient of f (or g) vanishes, the other equation alone
    // constrains u; these v lie outside what the subresultant captures once a
    // common factor has been divided out.
    let mut v_roots: Vec<f64> = match d {
        Some(d) => real_roots_nonneg(&d, ROOT_TOL)?.into_iter().map(|r| r.value).collect(),
        None => Vec::new(),
    };
    v_roots.extend(content_roots(&f)?);
    v_roots.extend(content_roots(&g)?);
    for v0 in v_roots {
        cands.extend(back_substitute(t, &f, &g, v0, tol)?);
    }
    finish(cands, warnings)
}

/// Nonnegative common roots of all `u`-coefficients of `b`.
fn content_roots(b: &BiPoly) -> Result<Vec<f64>> {
    let mut polys: Vec<&Polynomial> = b.coeffs.iter().filter(|c| !c.is_zero()).collect();
    polys.sort_by_key(|c| c.degree());
    let Some((first, rest)) = polys.split_first() else {
        return Ok(Vec::new());
    };
    Ok(real_roots_nonneg(first, ROOT_TOL)?
        .into_iter()
        .map(|r| r.value)
        .filter(|&v| rest.iter().all(|c| c.eval(v).abs() <= BACKSUB_TOL * c.scale_at(v).max(f64::MIN_POSITIVE)))
        .collect())
}

/// Solves `f(u, v₀) = g(u, v₀) = 0` for `u ≥ 0` and admits each `(u, v₀, 1)`.
fn back_substitute(t: &SymTensor, f: &BiPoly, g: &BiPoly, v0: f64, tol: f64) -> Result<Vec<ZEigenpair>> {
    let (fv, fs) = f.eval_v(v0);
    let (gv, gs) = g.eval_v(v0);
    let fp = if approx_zero(&fv, &fs, 1e-4) { Polynomial::zero() } else { specialize(fv, &fs) };
    let gp = if approx_zero(&gv, &gs, 1e-4) { Polynomial::zero() } else { specialize(gv, &gs) };
    let us = common_nonneg_roots(&fp, &gp, BACKSUB_TOL).map_err(|_| {
        Error::DegenerateResultant(format!(
            "both eliminated equations vanish at v = {v0:.6e}; u is unconstrained"
        ))
    })?;
    Ok(us.into_iter().filter_map(|u0| admit(t, &[u0, v0, 1.0], tol)).collect())
}

/// Dispatches to [`qubit_spectrum`] or [`qutrit_spectrum`].
pub fn z_spectrum(t: &SymTensor) -> Result<ZSpectrum> {
    z_spectrum_with_tol(t, ADMISSION_TOL)
}

/// [`z_spectrum`] with a custom residual bound for admitting candidates.
pub fn z_spectrum_with_tol(t: &SymTensor, admission_tol: f64) -> Result<ZSpectrum> {
    if !(admission_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {admission_tol}")));
    }
    match t.dim() {
        2 => qubit_spectrum_tol(t, admission_tol),
        3 => qutrit_spectrum_tol(t, admission_tol),
        n => Err(Error::Unsupported(format!(
            "elimination is available for dimensions 2 and 3 only (got {n}); use the shifted power method"
        ))),
    }
}

/// `ϱ(T) = max Π(T)` for dimensions 2 and 3.
pub fn radius_elim(t: &SymTensor) -> Result<f64> {
    z_spectrum(t).map(|s| s.radius)
}
