//! Sanity checks of the reference values themselves.

mod common;

use common::*;

#[test]
fn potential_kernel_known_values() {
    assert!((potential_kernel(1, 0) - 1.0).abs() < 1e-10);
    assert!((potential_kernel(0, 1) - 1.0).abs() < 1e-10);
    let v = potential_kernel(1, 1);
    assert!((v - 4.0 / std::f64::consts::PI).abs() < 1e-10, "{v}");
    // a(2,0) = 4 - 8/pi
    assert!((potential_kernel(2, 0) - (4.0 - 8.0 / std::f64::consts::PI)).abs() < 1e-10);
}

#[test]
fn potential_kernel_is_harmonic_off_origin() {
    for (x1, x2) in [(3, 2), (7, -5), (20, 1), (0, 15)] {
        let mean = 0.25
            * (potential_kernel(x1 + 1, x2)
                + potential_kernel(x1 - 1, x2)
                + potential_kernel(x1, x2 + 1)
                + potential_kernel(x1, x2 - 1));
        assert!((mean - potential_kernel(x1, x2)).abs() < 1e-10, "({x1},{x2})");
    }
}

#[test]
fn enumeration_small_cases() {
    let e = enumerate(&half_line(), &[1], 3);
    let total: cone_walk::Rational = e.surviving.values().cloned().sum();
    assert_eq!(total, cone_walk::rational(3, 8));
    let e = enumerate(&quadrant(), &[1, 1], 2);
    assert_eq!(e.surviving[&vec![1, 1]], cone_walk::rational(1, 8));
}
