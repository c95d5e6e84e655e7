//! The oracles themselves checked against closed forms before they are
//! trusted elsewhere.

mod common;

use approx::assert_abs_diff_eq;
use common::*;
use geomeas::{GenTensor, SymTensor};

#[test]
fn form_matches_library_contraction() {
    let mut r = rng(1);
    for (m, n) in [(3, 2), (3, 3), (4, 3), (5, 2)] {
        let t = random_sym(&mut r, m, n, 0.8);
        let f = Form::new(&t);
        for _ in 0..10 {
            let x = random_unit(&mut r, n);
            assert_abs_diff_eq!(f.eval(&x), t.contract_full(&x).unwrap(), epsilon = 1e-12);
        }
    }
}

#[test]
fn grid_finds_w_radius() {
    let t = SymTensor::from_orbits(3, 2, [(vec![0, 0, 1], 1.0 / 3f64.sqrt())]).unwrap();
    let (v, x) = grid_radius(&t, 1e-4);
    assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-7);
    assert_abs_diff_eq!(x[0], (2.0f64 / 3.0).sqrt(), epsilon = 1e-3);
}

#[test]
fn grid_finds_qutrit_diagonal_radius() {
    let t = SymTensor::from_orbits(3, 3, [(vec![0; 3], 0.2), (vec![1; 3], 0.9), (vec![2; 3], 0.5)]).unwrap();
    assert_abs_diff_eq!(grid_radius(&t, 1e-2).0, 0.9, epsilon = 1e-12);
}

#[test]
fn refined_grid_on_four_dimensions() {
    // All-ones tensor: T xᵐ = (∑x)ᵐ, maximized at the uniform vector: nᵐ/²
    let t = SymTensor::from_fn(3, 4, |_| 1.0).unwrap();
    let (v, _) = grid_radius_refined(&t, 2e-2, 4);
    assert_abs_diff_eq!(v, 8.0, epsilon = 1e-8);
}

#[test]
fn alternating_on_rank_one() {
    // a ⊗ b ⊗ c has σ = ‖a‖‖b‖‖c‖.
    let (a, b, c) = ([1.0, 2.0], [0.5, 0.0, 1.0], [3.0, 1.0]);
    let entries = (0..2).flat_map(|i| {
        (0..3).flat_map(move |j| (0..2).map(move |k| (vec![i, j, k], a[i] * b[j] * c[k])))
    });
    let t = GenTensor::from_entries(vec![2, 3, 2], entries).unwrap();
    let expect = 5f64.sqrt() * 1.25f64.sqrt() * 10f64.sqrt();
    assert_abs_diff_eq!(alternating_sigma(&t, 5, 0), expect, epsilon = 1e-12);
}

#[test]
fn orbit_representatives_count() {
    // C(n + m − 1, m)
    assert_eq!(orbit_representatives(3, 3).len(), 10);
    assert_eq!(orbit_representatives(5, 2).len(), 6);
}
