//! Shifted symmetric higher-order power method (SHOPM) and the rescaling
//! restart scheme that drives it to the Z-spectral radius.
//!
//! One SHOPM step is `x ← (T x^{m-1} + αx)/‖·‖`, `λ = T x^m`. With
//! `α > (m−1)‖T‖_F` the objective `T x^m` is nondecreasing along the
//! iterates. Started from a positive vector, iterates stay in the
//! nonnegative orthant.
//!
//! [`restart_radius`] runs SHOPM from a random start, divides the tensor by
//! the eigenvalue found, and repeats rounds of random starts on the rescaled
//! tensor until no start exceeds 1 (up to the solver tolerance). The product
//! of the scale factors is then the spectral radius.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::elim::{z_spectrum, ZSpectrum};
use crate::error::{Error, Result};
use crate::tensor::{norm, SymTensor, ZEigenpair};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_STARTS: usize = 32;
pub const MAX_ROUNDS: usize = 50;

/// Added to `(m−1)‖T‖_F` by [`default_shift`] so the bound is strict.
const SHIFT_MARGIN: f64 = 1e-6;

/// Smallest shift for which monotonicity is guaranteed: `(m−1)‖T‖_F`.
pub fn guaranteed_shift_bound(t: &SymTensor) -> f64 {
    (t.order() - 1) as f64 * t.frobenius_norm()
}

/// `(m−1)‖T‖_F + 10⁻⁶`.
pub fn default_shift(t: &SymTensor) -> f64 {
    guaranteed_shift_bound(t) + SHIFT_MARGIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShopmConfig {
    /// Shift; `None` uses [`default_shift`].
    pub alpha: Option<f64>,
    /// Stop once `‖T x^{m-1} − λx‖ ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Keep the λ of every iterate.
    pub record_trace: bool,
}

impl Default for ShopmConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShopmRun {
    pub pair: ZEigenpair,
    pub alpha: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `λ₀, λ₁, …` when requested; `λ₀` is the value at the start vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
}

/// Runs SHOPM from `x0`, which must be entrywise positive.
pub fn shopm(t: &SymTensor, x0: &[f64], cfg: &ShopmConfig) -> Result<ShopmRun> {
    if let Some((idx, value)) = t.first_negative() {
        return Err(Error::Negative { idx, value });
    }
    if x0.len() != t.dim() {
        return Err(Error::DimensionMismatch {
            mode: 0,
            expected: t.dim(),
            found: x0.len(),
        });
    }
    if let Some(i) = x0.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "start vector must be entrywise positive; entry {i} is {}",
            x0[i]
        )));
    }
    let alpha = cfg.alpha.unwrap_or_else(|| default_shift(t));
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("shift must be positive, got {alpha}")));
    }

    let m = t.order();
    let n0 = norm(x0);
    let mut x: Vec<f64> = x0.iter().map(|v| v / n0).collect();
    let mut y = t.apply(&x);
    let mut lambda = crate::tensor::dot(&y, &x);
    let mut trace = cfg.record_trace.then(|| vec![lambda]);
    let residual_of = |y: &[f64], x: &[f64], l: f64| {
        y.iter().zip(x).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt()
    };
    let mut residual = residual_of(&y, &x, lambda);
    let mut iterations = 0;
    while residual > cfg.tol && iterations < cfg.max_iter {
        let mut next: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a + alpha * b).collect();
        let s = norm(&next);
        next.iter_mut().for_each(|v| *v /= s);
        x = next;
        y = t.apply(&x);
        lambda = crate::tensor::dot(&y, &x);
        residual = residual_of(&y, &x, lambda);
        iterations += 1;
        if let Some(tr) = trace.as_mut() {
            tr.push(lambda);
        }
    }
    debug_assert_eq!(t.contract_power_unchecked(&x, m).len(), 1);
    Ok(ShopmRun {
        pair: ZEigenpair { lambda, x, residual },
        alpha,
        iterations,
        converged: residual <= cfg.tol,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_rounds: usize,
    pub shopm: ShopmConfig,
}

impl Default for RestartConfig {
    fn default() -> Self {
        Self {
            starts: DEFAULT_STARTS,
            seed: 0,
            max_rounds: MAX_ROUNDS,
            shopm: ShopmConfig::default(),
        }
    }
}

/// One rescaling round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundAudit {
    pub round: usize,
    /// Scale factor in effect for this round (product of earlier eigenvalues).
    pub scale: f64,
    /// Eigenvalue of the rescaled tensor used for the next rescaling (`μ`).
    pub lambda: f64,
    /// Limits of every start, in the scale of the original tensor.
    pub limits: Vec<f64>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartAudit {
    pub seed: u64,
    pub starts: usize,
    pub rounds: Vec<RoundAudit>,
    /// Product of all rescaling eigenvalues.
    pub product: f64,
    /// True when the last round found no start above `1 + tol`.
    pub telescoped: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartResult {
    pub radius: f64,
    /// Best pair found, for the original tensor.
    pub pair: ZEigenpair,
    pub audit: RestartAudit,
}

fn random_start(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            z.abs().max(f64::MIN_POSITIVE)
        })
        .collect();
    let s = norm(&x);
    x.into_iter().map(|v| v / s).collect()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Estimates `ϱ(T)` by SHOPM with rescaling restarts.
///
/// Round `j ≥ 1` uses starts drawn from ChaCha8 streams `j·N + i`, so the
/// result depends only on the seed and the configuration.
pub fn restart_radius(t: &SymTensor, cfg: &RestartConfig) -> Result<RestartResult> {
    if let Some((idx, value)) = t.first_negative() {
        return Err(Error::Negative { idx, value });
    }
    if cfg.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let n = t.dim();
    let mut audit = RestartAudit {
        seed: cfg.seed,
        starts: cfg.starts,
        rounds: Vec::new(),
        product: 1.0,
        telescoped: false,
        warnings: Vec::new(),
    };
    if t.is_zero() {
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        audit.product = 0.0;
        audit.telescoped = true;
        audit.warnings.push("zero tensor: radius is 0".into());
        return Ok(RestartResult {
            radius: 0.0,
            pair: ZEigenpair { lambda: 0.0, x, residual: 0.0 },
            audit,
        });
    }

    let tol = cfg.shopm.tol;
    let run_scaled = |scaled: &SymTensor, product: f64, x0: &[f64]| {
        let mut c = cfg.shopm.clone();
        c.alpha = cfg.shopm.alpha.map(|a| a / product);
        shopm(scaled, x0, &c)
    };

    let first = run_scaled(t, 1.0, &random_start(&mut stream_rng(cfg.seed, 0), n))?;
    audit.rounds.push(RoundAudit {
        round: 0,
        scale: 1.0,
        lambda: first.pair.lambda,
        limits: vec![first.pair.lambda],
        iterations: vec![first.iterations],
        converged: vec![first.converged],
        traces: first.trace.clone().map(|tr| vec![tr]),
    });
    if first.pair.lambda <= tol {
        return Err(Error::RescalingUndefined { round: 0, lambda: first.pair.lambda });
    }
    let mut best = first.pair.x.clone();
    let mut best_value = first.pair.lambda;
    let mut product = first.pair.lambda;
    let mut scaled = t.scaled(1.0 / product);

    for round in 1..=cfg.max_rounds {
        let mut ra = RoundAudit {
            round,
            scale: product,
            lambda: 0.0,
            limits: Vec::with_capacity(cfg.starts),
            iterations: Vec::with_capacity(cfg.starts),
            converged: Vec::with_capacity(cfg.starts),
            traces: cfg.shopm.record_trace.then(Vec::new),
        };
        let mut mu = f64::NEG_INFINITY;
        for i in 0..cfg.starts {
            let stream = (round * cfg.starts + i) as u64;
            let x0 = random_start(&mut stream_rng(cfg.seed, stream), n);
            let run = run_scaled(&scaled, product, &x0)?;
            let l = run.pair.lambda;
            if l > mu {
                mu = l;
            }
            if l * product > best_value {
                best_value = l * product;
                best = run.pair.x.clone();
            }
            ra.limits.push(l * product);
            ra.iterations.push(run.iterations);
            ra.converged.push(run.converged);
            if let (Some(ts), Some(tr)) = (ra.traces.as_mut(), run.trace) {
                ts.push(tr.into_iter().map(|v| v * product).collect());
            }
        }
        ra.lambda = mu;
        audit.rounds.push(ra);
        if mu <= tol {
            return Err(Error::RescalingUndefined { round, lambda: mu });
        }
        if mu <= 1.0 + tol {
            audit.telescoped = true;
            break;
        }
        product *= mu;
        scaled = scaled.scaled(1.0 / mu);
    }
    if !audit.telescoped {
        audit.warnings.push(format!(
            "did not telescope within {} rounds; radius is the best value found",
            cfg.max_rounds
        ));
    }
    audit.product = product;

    let lambda = t.contract_power_unchecked(&best, t.order())[0];
    let residual = t.residual(lambda, &best);
    Ok(RestartResult {
        radius: lambda.max(best_value),
        pair: ZEigenpair { lambda, x: best, residual },
        audit,
    })
}

/// Spectral gap data for the local convergence radius of SHOPM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub rho: f64,
    /// Second largest distinct eigenvalue in `Π(T)`; 0 when `Π(T)` has one value.
    pub lambda2: f64,
    /// `(ϱ − λ₂)/2`.
    pub kappa: f64,
    /// `κ/(m‖T‖_F)`; infinite for a singleton spectrum.
    pub acc_radius: f64,
    pub singleton: bool,
    pub distinct: Vec<f64>,
}

/// Gap estimate from a complete spectrum.
pub fn gap_from_spectrum(t: &SymTensor, spectrum: &ZSpectrum) -> GapEstimate {
    let distinct = spectrum.distinct_eigenvalues(1e-9);
    let rho = distinct.first().copied().unwrap_or(0.0);
    let singleton = distinct.len() < 2;
    let lambda2 = if singleton { 0.0 } else { distinct[1] };
    let kappa = (rho - lambda2) / 2.0;
    let acc_radius = if singleton {
        f64::INFINITY
    } else {
        kappa / (t.order() as f64 * t.frobenius_norm())
    };
    GapEstimate {
        rho,
        lambda2,
        kappa,
        acc_radius,
        singleton,
        distinct,
    }
}

/// Gap estimate via elimination (dimensions 2 and 3).
pub fn gap_estimate(t: &SymTensor) -> Result<GapEstimate> {
    Ok(gap_from_spectrum(t, &z_spectrum(t)?))
}
