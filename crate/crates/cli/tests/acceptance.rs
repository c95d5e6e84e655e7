//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use common::*;
use geomeas::elim::count_bound;
use geomeas::shopm::gap_estimate;
use geomeas::states::{general_ghz_qutrit, inverted_w, w};
use geomeas::{
    geometric_measure, restart_radius, shopm, singular_radius, z_spectrum, MeasureOptions, Method, RestartConfig,
    ShopmConfig, SymTensor,
};
use rand::Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_geomeas"))
        .args(args)
        .env_remove("GEOMEAS_SEED")
        .output()
        .expect("binary runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap_or(-1))
}

fn cli_result(args: &[&str]) -> Result<Value, String> {
    let (out, code) = cli(args);
    if code != 0 {
        return Err(format!("`geomeas {}` exited with {code}", args.join(" ")));
    }
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    Ok(v["result"].clone())
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn ghz_tensor(m: usize) -> SymTensor {
    let c = 1.0 / 2f64.sqrt();
    SymTensor::from_orbits(m, 2, [(vec![0; m], c), (vec![1; m], c)]).unwrap()
}

fn close_vec(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn criterion_1() -> Outcome {
    let h = 1.0 / 2f64.sqrt();
    for m in 3..=6 {
        let ms = m.to_string();
        for method in ["elim", "power"] {
            let r = cli_result(&["gm", "--builder", "ghz", "--m", &ms, "--method", method, "--seed", "1"])?;
            let g = r["g"].as_f64().unwrap();
            ensure((g - h).abs() <= 1e-9, || format!("m={m} {method}: G={g}"))?;
            if method == "elim" && m % 2 == 1 {
                let want = h.powi(m as i32 - 1);
                let found = r["spectrum"]["pairs"].as_array().unwrap().iter().any(|p| {
                    let x: Vec<f64> = p["x"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
                    (p["lambda"].as_f64().unwrap() - want).abs() <= 1e-8 && close_vec(&x, &[h, h], 1e-8)
                });
                ensure(found, || format!("m={m}: pair (1/√2^(m−1), (1/√2,1/√2)) missing"))?;
            }
        }
    }
    Ok("m = 3..6, elimination and power method via CLI; odd-m interior pair present".into())
}

fn criterion_2() -> Outcome {
    for (name, s) in [("W", w()), ("inverted-W", inverted_w())] {
        for method in [Method::Elim, Method::Power] {
            let r = geometric_measure(&s, &MeasureOptions { method, seed: 3, ..Default::default() })
                .map_err(|e| e.to_string())?;
            ensure((r.g - 2.0 / 3.0).abs() <= 1e-9, || format!("{name} {method:?}: G={}", r.g))?;
        }
    }
    let t = SymTensor::from_orbits(3, 2, [(vec![0, 0, 1], 1.0 / 3f64.sqrt())]).unwrap();
    let s = z_spectrum(&t).map_err(|e| e.to_string())?;
    let vals = s.distinct_eigenvalues(1e-9);
    ensure(vals.len() == 2 && (vals[0] - 2.0 / 3.0).abs() <= 1e-9 && vals[1].abs() <= 1e-9, || {
        format!("spectrum {vals:?}")
    })?;
    let expect = [(2.0 / 3.0, vec![(2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()]), (0.0, vec![0.0, 1.0])];
    for (l, x) in &expect {
        ensure(s.pairs.iter().any(|p| (p.lambda - l).abs() <= 1e-8 && close_vec(&p.x, x, 1e-8)), || {
            format!("pair ({l}, {x:?}) missing from {:?}", s.pairs)
        })?;
    }
    ensure(s.pairs.len() == 2, || format!("{} pairs", s.pairs.len()))?;
    Ok("G = 2/3 both paths; Π(A_W) = {0, 2/3} with the stated eigenvectors".into())
}

/// The seven nonnegative eigenpairs of α|000⟩ + β|111⟩ + γ|222⟩: vertices,
/// edge midpoints λ = ab/√(a² + b²) at (b, a, 0)/√(a² + b²), and the interior
/// point λ = (a⁻² + b⁻² + c⁻²)^(−1/2) at x ∝ (1/a, 1/b, 1/c).
fn qutrit_closed_form(c: [f64; 3]) -> Vec<(f64, Vec<f64>)> {
    let mut out = Vec::new();
    for i in 0..3 {
        let mut x = vec![0.0; 3];
        x[i] = 1.0;
        out.push((c[i], x));
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let n = (c[i] * c[i] + c[j] * c[j]).sqrt();
        let mut x = vec![0.0; 3];
        x[i] = c[j] / n;
        x[j] = c[i] / n;
        out.push((c[i] * c[j] / n, x));
    }
    let inv: Vec<f64> = c.iter().map(|v| 1.0 / v).collect();
    let n = inv.iter().map(|v| v * v).sum::<f64>().sqrt();
    out.push((1.0 / n, inv.iter().map(|v| v / n).collect()));
    out
}

fn criterion_3() -> Outcome {
    let mut r = rng(303);
    let mut triples = vec![[1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]];
    for _ in 0..20 {
        let x = random_positive_unit(&mut r, 3);
        triples.push([x[0], x[1], x[2]]);
    }
    for c in &triples {
        let t = SymTensor::from_orbits(3, 3, [(vec![0; 3], c[0]), (vec![1; 3], c[1]), (vec![2; 3], c[2])]).unwrap();
        let s = z_spectrum(&t).map_err(|e| format!("{c:?}: {e}"))?;
        ensure(s.pairs.len() == 7, || format!("{c:?}: {} pairs", s.pairs.len()))?;
        for (l, x) in qutrit_closed_form(*c) {
            ensure(s.pairs.iter().any(|p| (p.lambda - l).abs() <= 1e-7 && close_vec(&p.x, &x, 1e-7)), || {
                format!("{c:?}: pair ({l}, {x:?}) missing")
            })?;
        }
        let state = general_ghz_qutrit(c[0], c[1], c[2]).map_err(|e| e.to_string())?;
        let g = geometric_measure(&state, &MeasureOptions::default()).map_err(|e| e.to_string())?.g;
        let want = c.iter().cloned().fold(0.0, f64::max);
        ensure((g - want).abs() <= 1e-9, || format!("{c:?}: G={g}, max={want}"))?;
    }
    Ok(format!("{} triples, 7 pairs each, G = max amplitude", triples.len()))
}

fn criterion_4() -> Outcome {
    let mut r = rng(404);
    let shapes = [(3, 2), (3, 3), (4, 2), (4, 3), (5, 2), (5, 3)];
    let mut worst = 0.0f64;
    for i in 0..200 {
        let (m, n) = shapes[i % shapes.len()];
        let t = random_sym(&mut r, m, n, 0.8);
        let s = z_spectrum(&t).map_err(|e| format!("tensor {i} (m={m}, n={n}): {e}"))?;
        let bound = count_bound(m, n);
        ensure(s.pairs.len() as u128 <= bound, || {
            format!("tensor {i} (m={m}, n={n}): {} pairs > bound {bound}", s.pairs.len())
        })?;
        worst = worst.max(s.pairs.len() as f64 / bound as f64);
    }
    Ok(format!("200 tensors, 0 violations, max |Π|/bound = {worst:.3}"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(505);
    let cfg = ShopmConfig { record_trace: true, max_iter: 5_000, ..Default::default() };
    let mut min_step = f64::INFINITY;
    for i in 0..500 {
        let m = r.random_range(3..=5);
        let n = r.random_range(2..=4);
        let t = random_sym(&mut r, m, n, 0.7);
        let x0 = random_positive_unit(&mut r, n);
        let run = shopm(&t, &x0, &cfg).map_err(|e| format!("run {i}: {e}"))?;
        for wdw in run.trace.unwrap().windows(2) {
            min_step = min_step.min(wdw[1] - wdw[0]);
        }
    }
    ensure(min_step >= -1e-12, || format!("min_k (λ_(k+1) − λ_k) = {min_step:e}"))?;
    Ok(format!("500 runs, min_k (λ_(k+1) − λ_k) = {min_step:e}"))
}

fn criterion_6() -> Outcome {
    let mut r = rng(606);
    let mut worst_diff = 0.0f64;
    let mut worst_grid = f64::INFINITY;
    for i in 0..100 {
        let t = random_sym(&mut r, 3, 3, 1.0);
        let e = z_spectrum(&t).map_err(|e| format!("tensor {i}: {e}"))?.radius;
        let p = restart_radius(&t, &RestartConfig { seed: i, ..Default::default() })
            .map_err(|e| format!("tensor {i}: {e}"))?
            .radius;
        let (g, _) = grid_radius(&t, 1e-3);
        worst_diff = worst_diff.max((e - p).abs());
        worst_grid = worst_grid.min(e.min(p) - g);
        ensure((e - p).abs() <= 1e-7, || format!("tensor {i}: elim {e} vs restart {p}"))?;
        ensure(e >= g - 5e-4 && p >= g - 5e-4, || format!("tensor {i}: grid {g}, elim {e}, restart {p}"))?;
    }
    Ok(format!("100 tensors, max |elim − restart| = {worst_diff:.2e}, min (radius − grid) = {worst_grid:.2e}"))
}

fn criterion_7() -> Outcome {
    let mut r = rng(707);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..1000 {
        let m = r.random_range(3..=5);
        let n = r.random_range(2..=5);
        let k = r.random_range(1..m);
        let t = random_sym(&mut r, m, n, 0.8);
        let x = random_unit(&mut r, n);
        let y = random_unit(&mut r, n);
        let a = t.contract_power(&x, m - k).unwrap();
        let b = t.contract_power(&y, m - k).unwrap();
        let lhs = a.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let dist = x.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let rhs = (m - k) as f64 * t.frobenius_norm() * dist;
        worst = worst.max(lhs - rhs);
        ensure(lhs <= rhs + 1e-12, || format!("sample {i}: {lhs} > {rhs}"))?;
    }
    Ok(format!("1000 samples, max (lhs − bound) = {worst:.3e}"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut r = rng(808);
    let mut cases = Vec::new();
    for _ in 0..50 {
        let dims: Vec<usize> = (0..3).map(|_| r.random_range(2..=3)).collect();
        cases.push(random_gen(&mut r, &dims));
    }
    for i in 0..20 {
        cases.push(random_sym(&mut r, 3, 2 + i % 2, 0.8).to_general());
    }
    let mut worst = 0.0f64;
    for (i, a) in cases.iter().enumerate() {
        let sr = singular_radius(a, &RestartConfig { seed: i as u64, ..Default::default() })
            .map_err(|e| format!("case {i}: {e}"))?;
        let want = alternating_sigma(a, 50, i as u64);
        worst = worst.max((sr.tuple.sigma - want).abs());
        ensure((sr.tuple.sigma - want).abs() <= 1e-6, || {
            format!("case {i} dims {:?}: embedding {} vs oracle {want}", a.dims(), sr.tuple.sigma)
        })?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{} tensors, max deviation {worst:.2e}, {secs:.1} s", cases.len()))
}

fn criterion_9() -> Outcome {
    let mut corpus: Vec<(String, SymTensor)> = vec![
        ("W".into(), SymTensor::from_orbits(3, 2, [(vec![0, 0, 1], 1.0 / 3f64.sqrt())]).unwrap()),
        ("inverted-W".into(), SymTensor::from_orbits(3, 2, [(vec![0, 1, 1], 1.0 / 3f64.sqrt())]).unwrap()),
        (
            "qutrit-GHZ".into(),
            SymTensor::from_orbits(3, 3, [(vec![0; 3], 1.0 / 3.0), (vec![1; 3], 2.0 / 3.0), (vec![2; 3], 2.0 / 3.0)])
                .unwrap(),
        ),
    ];
    for m in 3..=6 {
        corpus.push((format!("GHZ{m}"), ghz_tensor(m)));
    }
    let mut r = rng(909);
    for i in 0..10 {
        corpus.push((format!("random{i}"), random_sym(&mut r, 3 + i % 2, 2 + i % 3 % 2, 0.8)));
    }
    let mut used = 0;
    let mut worst = 0.0f64;
    for (name, t) in &corpus {
        let gap = gap_estimate(t).map_err(|e| format!("{name}: {e}"))?;
        if gap.singleton {
            continue;
        }
        used += 1;
        let spec = z_spectrum(t).unwrap();
        let xs = &spec.pairs[0].x;
        let n = xs.len();
        for s in 0..100 {
            // Rotate x* towards a random tangent direction by a chord below the radius.
            let mut wv = random_unit(&mut r, n);
            let d: f64 = wv.iter().zip(xs).map(|(a, b)| a * b).sum();
            wv.iter_mut().zip(xs).for_each(|(a, b)| *a -= d * b);
            let nw = wv.iter().map(|v| v * v).sum::<f64>().sqrt();
            wv.iter_mut().for_each(|v| *v /= nw);
            let chord = gap.acc_radius * 0.98 * r.random::<f64>();
            let theta = 2.0 * (chord / 2.0).asin();
            let mut x0: Vec<f64> = xs
                .iter()
                .zip(&wv)
                .map(|(a, b)| (theta.cos() * a + theta.sin() * b).abs().max(1e-14))
                .collect();
            let nx = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
            x0.iter_mut().for_each(|v| *v /= nx);
            let dist = x0.iter().zip(xs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            ensure(dist < gap.acc_radius, || format!("{name} start {s}: distance {dist} ≥ radius"))?;
            let run = shopm(t, &x0, &ShopmConfig::default()).map_err(|e| e.to_string())?;
            worst = worst.max((run.pair.lambda - gap.rho).abs());
            ensure((run.pair.lambda - gap.rho).abs() <= 1e-8, || {
                format!("{name} start {s}: converged to {} instead of ϱ = {}", run.pair.lambda, gap.rho)
            })?;
        }
    }
    Ok(format!("{used} tensors × 100 starts, max |λ − ϱ| = {worst:.2e}"))
}

fn criterion_10() -> Outcome {
    let w_t = fixture("w_tensor.json");
    let q_t = fixture("qutrit_ghz_tensor.json");
    let z_t = fixture("zero_tensor.json");
    let r_t = fixture("random_4x4x4.json");
    let w_s = fixture("w_state.json");
    let n_s = fixture("nonsymmetric_state.json");
    let neg = fixture("negative_tensor.json");
    let goldens: Vec<Vec<&str>> = vec![
        vec!["gm", "--builder", "w"],
        vec!["gm", "--builder", "ghz", "--m", "4"],
        vec!["gm", "--builder", "ghz", "--m", "5", "--method", "power", "--seed", "11"],
        vec!["gm", "--builder", "qutrit-ghz", "--abc", "1/3,2/3,2/3"],
        vec!["gm", &n_s, "--seed", "3"],
        vec!["spectrum", &w_t],
        vec!["spectrum", &q_t],
        vec!["spectrum", &z_t],
        vec!["power", &w_t, "--seed", "7"],
        vec!["power", &w_t, "--alpha", "0.01", "--seed", "7", "--trace"],
        vec!["power", &r_t, "--seed", "7"],
        vec!["validate", &w_s],
        vec!["validate", &neg],
    ];
    for args in &goldens {
        let (a, ca) = cli(args);
        let (b, cb) = cli(args);
        let payload = |s: &str| -> Result<String, String> {
            let v: Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
            Ok(format!("{}|{}|{}|{}", v["result"], v["config"], v["input_digest"], v["seed"]))
        };
        ensure(ca == cb && payload(&a)? == payload(&b)?, || format!("`geomeas {}` differs between runs", args.join(" ")))?;
    }
    Ok(format!("{} golden commands byte-identical across two runs", goldens.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("GHZ family", criterion_1),
        ("W and inverted-W", criterion_2),
        ("qutrit GHZ closed forms", criterion_3),
        ("eigenpair count bound", criterion_4),
        ("SHOPM monotonicity", criterion_5),
        ("elimination vs restarts vs grid", criterion_6),
        ("Lipschitz bound", criterion_7),
        ("embedding vs alternating oracle", criterion_8),
        ("local convergence cap", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
