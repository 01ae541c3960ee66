use eplab_web::{audit, background, solve, Setup};

const SETUP: Setup = Setup { gamma: 1.4, flux: 0.5, rho0: 1.0, e0: 0.05, w: 1.0, b: 1.0 };

#[test]
fn background_arrays_line_up() {
    let v = background(SETUP, 20).unwrap();
    assert_eq!(v.x().len(), 21);
    assert!(v.mach().iter().all(|&m| m > 0.0 && m < 1.0));
}

#[test]
fn small_inflow_converges() {
    let v = solve(SETUP, false, 1e-2, 16, 8).unwrap();
    assert!(v.converged() && v.margin() > 0.0);
    assert_eq!(v.mach().len(), 17 * 9);
    let g = Setup { gamma: 3.0, w: -1.0, b: -1.0, ..SETUP };
    assert!(solve(g, true, 1e-2, 16, 8).unwrap().converged());
}

#[test]
fn audit_separates_gamma_two_and_three() {
    assert_eq!(audit(3.0, 0.1, 200, 1).unwrap()[1], 0.0);
    assert!(audit(2.0, 0.1, 200, 1).unwrap()[1] >= 1.0);
}

#[test]
fn sonic_background_is_reported() {
    let fast = Setup { flux: 5.0, ..SETUP };
    assert!(background(fast, 20).is_err());
}
