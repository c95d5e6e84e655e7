//! Independent oracles and random corpora shared by the integration and
//! acceptance tests. Nothing here calls the solvers under test; tensors are
//! read entry by entry through the public accessors.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use geomeas::{GenTensor, SymTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn odometer(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0usize; dims.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for k in (0..dims.len()).rev() {
            cur[k] += 1;
            if cur[k] < dims[k] {
                break;
            }
            cur[k] = 0;
        }
    }
    out
}

/// Nondecreasing index tuples, one per permutation orbit.
pub fn orbit_representatives(m: usize, n: usize) -> Vec<Vec<usize>> {
    odometer(&vec![n; m])
        .into_iter()
        .filter(|idx| idx.windows(2).all(|w| w[0] <= w[1]))
        .collect()
}

/// Random nonnegative symmetric tensor; each orbit is nonzero with
/// probability `density` and then uniform in `(0, 1)`.
pub fn random_sym(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> SymTensor {
    let entries: Vec<(Vec<usize>, f64)> = orbit_representatives(m, n)
        .into_iter()
        .map(|idx| {
            let v = if rng.random::<f64>() < density { rng.random::<f64>() } else { 0.0 };
            (idx, v)
        })
        .collect();
    SymTensor::from_orbits(m, n, entries).unwrap()
}

pub fn random_gen(rng: &mut ChaCha8Rng, dims: &[usize]) -> GenTensor {
    let len: usize = dims.iter().product();
    let data = (0..len).map(|_| rng.random::<f64>()).collect();
    GenTensor::new(dims.to_vec(), data).unwrap()
}

pub fn random_positive_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.into_iter().map(|v| v / s).collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.into_iter().map(|v| v / s).collect()
}

/// `T xᵐ` expanded as a polynomial: one term per distinct monomial.
pub struct Form {
    n: usize,
    order: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl Form {
    pub fn new(t: &SymTensor) -> Form {
        let n = t.dim();
        let mut terms: Vec<(Vec<u32>, f64)> = Vec::new();
        for idx in odometer(&vec![n; t.order()]) {
            let a = t.get(&idx);
            if a == 0.0 {
                continue;
            }
            let mut e = vec![0u32; n];
            for &i in &idx {
                e[i] += 1;
            }
            match terms.iter_mut().find(|(f, _)| *f == e) {
                Some((_, c)) => *c += a,
                None => terms.push((e, a)),
            }
        }
        Form { n, order: t.order(), terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let w = self.order + 1;
        let mut pow = vec![1.0; self.n * w];
        for (i, &xi) in x.iter().enumerate() {
            for k in 1..w {
                pow[i * w + k] = pow[i * w + k - 1] * xi;
            }
        }
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().enumerate().map(|(i, &k)| pow[i * w + k as usize]).product::<f64>())
            .sum()
    }
}

/// Point of the nonnegative unit sphere with hyperspherical angles in `[0, π/2]`.
fn sphere_point(angles: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(angles.len() + 1);
    let mut s = 1.0;
    for &a in angles {
        x.push(s * a.cos());
        s *= a.sin();
    }
    x.push(s);
    x
}

fn grid_axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).ceil() as usize;
    (0..=k).map(|i| (lo + i as f64 * step).min(hi)).collect()
}

fn search(form: &Form, lo: &[f64], hi: &[f64], step: f64) -> (f64, Vec<f64>) {
    let axes: Vec<Vec<f64>> = lo.iter().zip(hi).map(|(&a, &b)| grid_axis(a, b, step)).collect();
    let dims: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut angles = vec![0.0; lo.len()];
    for idx in odometer(&dims) {
        for (k, &i) in idx.iter().enumerate() {
            angles[k] = axes[k][i];
        }
        let v = form.eval(&sphere_point(&angles));
        if v > best.0 {
            best = (v, angles.clone());
        }
    }
    best
}

/// `max T xᵐ` over the nonnegative unit sphere on an angular grid of the
/// given resolution. Returns the value and the maximizing point.
pub fn grid_radius(t: &SymTensor, step: f64) -> (f64, Vec<f64>) {
    let form = Form::new(t);
    let k = form.n - 1;
    let (v, a) = search(&form, &vec![0.0; k], &vec![FRAC_PI_2; k], step);
    (v, sphere_point(&a))
}

/// Coarse grid followed by `levels` zooms, each a tenfold finer grid on a
/// window of ±2 coarse steps around the incumbent.
pub fn grid_radius_refined(t: &SymTensor, step: f64, levels: usize) -> (f64, Vec<f64>) {
    let form = Form::new(t);
    let k = form.n - 1;
    let (mut v, mut a) = search(&form, &vec![0.0; k], &vec![FRAC_PI_2; k], step);
    let mut h = step;
    for _ in 0..levels {
        let lo: Vec<f64> = a.iter().map(|x| (x - 2.0 * h).max(0.0)).collect();
        let hi: Vec<f64> = a.iter().map(|x| (x + 2.0 * h).min(FRAC_PI_2)).collect();
        h /= 10.0;
        let (nv, na) = search(&form, &lo, &hi, h);
        if nv >= v {
            v = nv;
            a = na;
        }
    }
    (v, sphere_point(&a))
}

fn full_contraction(a: &GenTensor, xs: &[Vec<f64>]) -> f64 {
    odometer(a.dims())
        .iter()
        .zip(a.data())
        .map(|(idx, &v)| v * idx.iter().enumerate().map(|(k, &i)| xs[k][i]).product::<f64>())
        .sum()
}

fn partial_contraction(a: &GenTensor, xs: &[Vec<f64>], skip: usize) -> Vec<f64> {
    let mut out = vec![0.0; a.dims()[skip]];
    for (idx, &v) in odometer(a.dims()).iter().zip(a.data()) {
        let p: f64 = idx
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .map(|(k, &i)| xs[k][i])
            .product();
        out[idx[skip]] += v * p;
    }
    out
}

/// Largest singular value of a nonnegative tensor by cyclic alternating
/// maximization (one mode at a time, the others fixed) from `starts` positive
/// starting points; the best value is returned.
pub fn alternating_sigma(a: &GenTensor, starts: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut best = 0.0f64;
    for s in 0..starts {
        let mut xs: Vec<Vec<f64>> = a
            .dims()
            .iter()
            .map(|&d| {
                if s == 0 {
                    vec![1.0 / (d as f64).sqrt(); d]
                } else {
                    random_positive_unit(&mut r, d)
                }
            })
            .collect();
        let mut sigma = full_contraction(a, &xs);
        for _ in 0..20_000 {
            for k in 0..xs.len() {
                let v = partial_contraction(a, &xs, k);
                let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if nv > 0.0 {
                    xs[k] = v.into_iter().map(|x| x / nv).collect();
                }
            }
            let next = full_contraction(a, &xs);
            let done = (next - sigma).abs() <= 1e-15 * next.abs().max(1.0);
            sigma = next;
            if done {
                break;
            }
        }
        best = best.max(sigma);
    }
    best
}
