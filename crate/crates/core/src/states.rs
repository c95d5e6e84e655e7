//! Pure states with nonnegative amplitudes and their geometric measure of
//! entanglement.
//!
//! The amplitude array of an m-partite state is an order-m tensor. For a
//! symmetric state the entanglement eigenvalue `G` equals the Z-spectral
//! radius of that tensor; in general it is the largest singular value
//! `σ(A)`, computed here through the symmetric embedding
//! `σ(A) = √(mᵐ)/m! · ϱ(S_A)`. The measure itself is `E_G = 1 − G²`.

use serde::{Deserialize, Serialize};

use crate::elim::{z_spectrum, ZSpectrum};
use crate::error::{Error, Result};
use crate::shopm::{restart_radius, RestartAudit, RestartConfig, ShopmConfig};
use crate::tensor::{norm, AnyTensor, GenTensor, IndexIter, SingularTuple, SymTensor};

/// Squared norms within this distance of 1 are accepted as they are.
pub const NORM_EXACT_TOL: f64 = 1e-10;

/// Squared norms within this distance of 1 are renormalized with a warning.
pub const NORM_RENORMALIZE_TOL: f64 = 1e-6;

/// `G` may exceed 1 by this much through rounding and is then clamped.
const CLAMP_TOL: f64 = 1e-12;

/// A pure state `∑ a_{i₁…i_m} |i₁…i_m⟩` with `a ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<f64>,
    label: Option<String>,
    warnings: Vec<String>,
}

impl PureState {
    /// Builds a state from a dense row-major amplitude array.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<f64>, label: Option<String>) -> Result<Self> {
        if dims.len() < 3 {
            return Err(Error::Shape(format!(
                "states need at least three parties, got {}",
                dims.len()
            )));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Shape(format!("every party needs dimension ≥ 2, got {d}")));
        }
        let tensor = GenTensor::new(dims.clone(), amplitudes)?;
        if let Some((idx, value)) = tensor.first_negative() {
            return Err(Error::NegativeAmplitude { idx, value });
        }
        let mut amplitudes = tensor.data().to_vec();
        let norm_sq: f64 = amplitudes.iter().map(|a| a * a).sum();
        let mut warnings = Vec::new();
        let dev = (norm_sq - 1.0).abs();
        if dev > NORM_RENORMALIZE_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        if dev > NORM_EXACT_TOL {
            let s = norm_sq.sqrt();
            amplitudes.iter_mut().for_each(|a| *a /= s);
            warnings.push(format!("renormalized: sum of squared amplitudes was {norm_sq:.12}"));
        }
        Ok(PureState {
            dims,
            amplitudes,
            label,
            warnings,
        })
    }

    /// Sparse construction; unlisted amplitudes are zero.
    pub fn from_entries<I>(dims: Vec<usize>, entries: I, label: Option<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let t = GenTensor::from_entries(dims.clone(), entries)?;
        PureState::new(dims, t.data().to_vec(), label)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The amplitude tensor, symmetric when all parties share a dimension
    /// and the amplitudes are permutation invariant.
    pub fn to_tensor(&self) -> AnyTensor {
        AnyTensor::classify(
            GenTensor::new(self.dims.clone(), self.amplitudes.clone()).expect("validated at construction"),
        )
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Dicke state on `m` qubits with `k` parties in `|0⟩` and `m − k` in `|1⟩`.
pub fn dicke(m: usize, k: usize) -> Result<PureState> {
    if k > m {
        return Err(Error::InvalidArgument(format!("Dicke state needs k ≤ m, got k={k}, m={m}")));
    }
    let dims = vec![2; m];
    let c = 1.0 / binomial(m, k).sqrt();
    let amps = IndexIter::new(&dims)
        .map(|idx| if idx.iter().filter(|&&i| i == 0).count() == k { c } else { 0.0 })
        .collect();
    PureState::new(dims, amps, Some(format!("dicke({m},{k})")))
}

/// `|W⟩ = (|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w() -> PureState {
    let mut s = dicke(3, 2).expect("valid Dicke parameters");
    s.label = Some("w".into());
    s
}

/// `(|011⟩ + |101⟩ + |110⟩)/√3`.
pub fn inverted_w() -> PureState {
    let mut s = dicke(3, 1).expect("valid Dicke parameters");
    s.label = Some("inverted-w".into());
    s
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `m` qubits.
pub fn ghz(m: usize) -> Result<PureState> {
    let c = 1.0 / 2f64.sqrt();
    PureState::from_entries(vec![2; m], [(vec![0; m], c), (vec![1; m], c)], Some(format!("ghz({m})")))
}

/// `α|000⟩ + β|111⟩ + γ|222⟩` on three qutrits.
pub fn general_ghz_qutrit(alpha: f64, beta: f64, gamma: f64) -> Result<PureState> {
    PureState::from_entries(
        vec![3; 3],
        [(vec![0; 3], alpha), (vec![1; 3], beta), (vec![2; 3], gamma)],
        Some(format!("qutrit-ghz({alpha},{beta},{gamma})")),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Elimination for symmetric n ≤ 3, restarts otherwise, embedding for nonsymmetric states.
    #[default]
    Auto,
    Elim,
    Power,
    Embed,
}

/// The computation that produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    ElimQubit,
    ElimQutrit,
    ShopmRestart,
    Embedding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureOptions {
    pub method: Method,
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub alpha: Option<f64>,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        let s = ShopmConfig::default();
        Self {
            method: Method::Auto,
            restarts: crate::shopm::DEFAULT_STARTS,
            tol: s.tol,
            seed: 0,
            max_iter: s.max_iter,
            alpha: None,
        }
    }
}

impl MeasureOptions {
    pub fn restart_config(&self) -> RestartConfig {
        RestartConfig {
            starts: self.restarts,
            seed: self.seed,
            shopm: ShopmConfig {
                alpha: self.alpha,
                tol: self.tol,
                max_iter: self.max_iter,
                record_trace: false,
            },
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    /// Entanglement eigenvalue `G = max |⟨φ|ψ⟩|` over product states `φ`.
    pub g: f64,
    /// `E_G = 1 − G²`.
    pub e_g: f64,
    /// One unit vector per party; their product state attains `G`.
    pub witness: Vec<Vec<f64>>,
    pub method: Route,
    /// Number of nonnegative eigenvectors attaining `G`; only known for elimination.
    pub maximizer_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<ZSpectrum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<RestartAudit>,
    pub warnings: Vec<String>,
}

fn clamp_g(g: f64, warnings: &mut Vec<String>) -> f64 {
    if g > 1.0 + CLAMP_TOL {
        warnings.push(format!("G = {g} exceeds 1; the input may not be normalized"));
        g
    } else {
        g.min(1.0)
    }
}

fn finish(g: f64, witness: Vec<Vec<f64>>, method: Route, mut warnings: Vec<String>) -> MeasureResult {
    let g = clamp_g(g, &mut warnings);
    MeasureResult {
        g,
        e_g: 1.0 - g * g,
        witness,
        method,
        maximizer_count: None,
        spectrum: None,
        audit: None,
        warnings,
    }
}

fn measure_elim(t: &SymTensor, warnings: Vec<String>) -> Result<MeasureResult> {
    let spec = z_spectrum(t)?;
    let route = if t.dim() == 2 { Route::ElimQubit } else { Route::ElimQutrit };
    let x = spec.pairs[0].x.clone();
    let mut warnings = warnings;
    warnings.extend(spec.warnings.iter().cloned());
    let mut r = finish(spec.radius, vec![x; t.order()], route, warnings);
    r.maximizer_count = Some(spec.maximizers().count());
    r.spectrum = Some(spec);
    Ok(r)
}

fn measure_power(t: &SymTensor, opts: &MeasureOptions, mut warnings: Vec<String>) -> Result<MeasureResult> {
    let res = restart_radius(t, &opts.restart_config())?;
    warnings.extend(res.audit.warnings.iter().cloned());
    let mut r = finish(res.radius, vec![res.pair.x; t.order()], Route::ShopmRestart, warnings);
    r.audit = Some(res.audit);
    Ok(r)
}

fn measure_embed(a: &GenTensor, opts: &MeasureOptions, mut warnings: Vec<String>) -> Result<MeasureResult> {
    let sr = singular_radius(a, &opts.restart_config())?;
    warnings.extend(sr.audit.warnings.iter().cloned());
    let mut r = finish(sr.tuple.sigma, sr.tuple.vectors, Route::Embedding, warnings);
    r.audit = Some(sr.audit);
    Ok(r)
}

/// Computes `G` and `E_G` for a nonnegative pure state.
pub fn geometric_measure(state: &PureState, opts: &MeasureOptions) -> Result<MeasureResult> {
    let warnings = state.warnings.clone();
    match (state.to_tensor(), opts.method) {
        (AnyTensor::Symmetric(t), Method::Auto) if t.dim() <= 3 => match measure_elim(&t, warnings.clone()) {
            Err(Error::DegenerateResultant(msg)) => {
                let mut w = warnings;
                w.push(format!("elimination degenerate ({msg}); fell back to restarts"));
                measure_power(&t, opts, w)
            }
            other => other,
        },
        (AnyTensor::Symmetric(t), Method::Auto | Method::Power) => measure_power(&t, opts, warnings),
        (AnyTensor::Symmetric(t), Method::Elim) => measure_elim(&t, warnings),
        (AnyTensor::Symmetric(t), Method::Embed) => measure_embed(&t.to_general(), opts, warnings),
        (AnyTensor::General(_), Method::Elim) => Err(Error::Unsupported(
            "elimination requires a symmetric state; use auto, power or embed".into(),
        )),
        (AnyTensor::General(a), _) => measure_embed(&a, opts, warnings),
    }
}

/// Largest singular value of a nonnegative tensor via its symmetric embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularRadius {
    pub tuple: SingularTuple,
    /// The tensor is zero; `σ = 0` and the vectors are arbitrary basis vectors.
    pub zero: bool,
    /// Restart audit for the embedded tensor.
    pub audit: RestartAudit,
}

/// `σ(A)` for a nonnegative order-m (`m ≥ 3`) tensor, from the Z-spectral
/// radius of `S_A`. The witness vectors are the normalized blocks of the
/// maximizing eigenvector of `S_A`.
pub fn singular_radius(a: &GenTensor, cfg: &RestartConfig) -> Result<SingularRadius> {
    let m = a.order();
    if m < 3 {
        return Err(Error::Unsupported(format!("singular radius needs order ≥ 3 (got {m})")));
    }
    if let Some((idx, value)) = a.first_negative() {
        return Err(Error::Negative { idx, value });
    }
    let s = a.symmetric_embedding()?;
    let res = restart_radius(&s, cfg)?;
    let offs = a.block_offsets();
    let basis = |d: usize| {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    };
    if a.is_zero() {
        let vectors: Vec<Vec<f64>> = a.dims().iter().map(|&d| basis(d)).collect();
        return Ok(SingularRadius {
            tuple: SingularTuple { sigma: 0.0, vectors, residual: 0.0 },
            zero: true,
            audit: res.audit,
        });
    }
    let vectors: Vec<Vec<f64>> = a
        .dims()
        .iter()
        .zip(&offs)
        .map(|(&d, &o)| {
            let block = &res.pair.x[o..o + d];
            let nb = norm(block);
            if nb > 0.0 {
                block.iter().map(|v| v / nb).collect()
            } else {
                basis(d)
            }
        })
        .collect();
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let sigma_embed = (m as f64).powf(m as f64 / 2.0) / factorial * res.radius;
    let sigma_direct = a.contract_full(&vectors)?;
    let sigma = sigma_embed.max(sigma_direct);
    let residual = a.singular_residual(sigma, &vectors)?;
    Ok(SingularRadius {
        tuple: SingularTuple { sigma, vectors, residual },
        zero: false,
        audit: res.audit,
    })
}
