//! Acceptance suite: one PASS/FAIL line per criterion, each with its
//! tolerance and time budget.

mod common;

use std::time::{Duration, Instant};

use common::*;
use eplab::analysis::{convexity_audit_potential, convexity_audit_stream, multistart_uniqueness, AuditOptions};
use eplab::elliptic::{picard_solve, BoundaryData, Formulation, InitialGuess, PicardConfig, Thermo};
use eplab::stream::{self, StreamPoint};
use eplab::{integrate_background, BackgroundOptions, BackgroundProfile, DopingProfile, FieldCase, PressureLaw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn enthalpy_round_trip() -> Check {
    let mut worst = 0.0f64;
    for gamma in [1.0, 1.4, 2.0, 3.0] {
        let law = PressureLaw::polytropic(gamma).map_err(err)?;
        for k in 0..100 {
            let rho = 10f64.powf(-2.0 + 4.0 * k as f64 / 99.0);
            let back = law.enthalpy_inverse(law.enthalpy(rho).map_err(err)?).map_err(err)?;
            worst = worst.max((back - rho).abs() / rho);
        }
    }
    Ok((worst <= 1e-10, format!("max relative error {worst:.2e} (tol 1e-10)")))
}

fn equilibrium() -> Check {
    let mut worst = 0.0f64;
    for (gamma, w, rho0) in [(1.4, 1.0, 1.0), (3.0, -2.0, 0.7), (1.0, 0.5, 2.0)] {
        let law = PressureLaw::polytropic(gamma).map_err(err)?;
        let doping = DopingProfile::constant(w, w * rho0, 1.0).map_err(err)?;
        let p = integrate_background(&law, &doping, 0.3, rho0, 0.0, 1.0, 100, BackgroundOptions::default()).map_err(err)?;
        for i in 0..p.len() {
            worst = worst.max((p.rho[i] - rho0).abs()).max(p.e[i].abs()).max((p.phi[i] - p.phi[0]).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e} (tol 1e-12)")))
}

fn rk4_order() -> Check {
    let law = PressureLaw::polytropic(2.0).map_err(err)?;
    let doping = DopingProfile::constant(1.0, 0.0, 1.0).map_err(err)?;
    let end = |n: usize| -> Result<(f64, f64), String> {
        let p = integrate_background(&law, &doping, 0.5, 1.0, 0.1, 1.0, n, BackgroundOptions::default()).map_err(err)?;
        Ok((*p.rho.last().unwrap(), *p.e.last().unwrap()))
    };
    let reference = end(10 * 64)?;
    let e = |n: usize| -> Result<f64, String> {
        let (r, ee) = end(n)?;
        Ok((r - reference.0).abs().max((ee - reference.1).abs()))
    };
    let ratio = e(10)? / e(20)?;
    Ok(((12.0..=20.0).contains(&ratio), format!("error ratio {ratio:.3} (want [12, 20])")))
}

fn stream_roots() -> Check {
    let pt = StreamPoint::new(15.0 / 4.0, [3f64.sqrt(), 0.0], 0.0, 3.0);
    let roots = stream::solve_density_roots(&pt).map_err(err)?;
    let sup = roots.sup.ok_or("missing supersonic root")?;
    let oracle_err = (roots.sub - 2f64.sqrt()).abs().max((sup - 0.5f64.sqrt()).abs());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 1000 {
        let gamma = rng.random_range(1.2..4.0);
        let q = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let z = rng.random_range(0.0..4.0);
        let pt = StreamPoint::new(z, q, 0.5, gamma);
        if stream::lambda_margin(&pt).map_err(err)? <= 1e-6 {
            continue;
        }
        n += 1;
        let r = stream::solve_density_roots(&pt).map_err(err)?;
        let target = pt.k0 + pt.z;
        for rho in std::iter::once(r.sub).chain(r.sup) {
            worst = worst.max((stream::bernoulli(gamma, rho, pt.q2()) - target).abs() / target.max(1.0));
        }
    }
    Ok((
        oracle_err <= 1e-10 && worst <= 1e-12,
        format!("root error {oracle_err:.2e} (tol 1e-10), max scaled residual {worst:.2e} over 1000 points (tol 1e-12)"),
    ))
}

fn structural_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-6;
    let mut worst = [0.0f64; 2];
    for (slot, formulation) in [Formulation::Potential, Formulation::Stream].into_iter().enumerate() {
        let mut n = 0;
        while n < 1000 {
            let gamma = rng.random_range(1.2..4.0);
            let thermo = match formulation {
                Formulation::Potential => Thermo::Potential { law: PressureLaw::polytropic(gamma).map_err(err)?, k0: 0.3 },
                Formulation::Stream => Thermo::Stream { gamma, k0: 1.5, floor: stream::DEFAULT_DEGENERACY_FLOOR },
            };
            let z = rng.random_range(-0.5..1.5);
            let q = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let margin = match thermo.margin(z, q) {
                Ok(m) => m,
                Err(_) => continue,
            };
            if margin < 0.05 {
                continue;
            }
            n += 1;
            let a = |z: f64, q: [f64; 2]| thermo.flux_source(z, q).map_err(err);
            let (ap, _) = a(z + h, q)?;
            let (am, _) = a(z - h, q)?;
            for k in 0..2 {
                let mut qp = q;
                let mut qm = q;
                qp[k] += h;
                qm[k] -= h;
                let dzak = (ap[k] - am[k]) / (2.0 * h);
                let dqbk = (a(z, qp)?.1 - a(z, qm)?.1) / (2.0 * h);
                worst[slot] = worst[slot].max((dzak + dqbk).abs());
            }
        }
    }
    Ok((
        worst[0] <= 1e-6 && worst[1] <= 1e-6,
        format!("max |d_z A + d_q B|: potential {:.2e}, stream {:.2e} (tol 1e-6)", worst[0], worst[1]),
    ))
}

fn convexity_audits() -> Check {
    let law = PressureLaw::polytropic(1.4).map_err(err)?;
    let p = convexity_audit_potential(&law, 0.1, &AuditOptions::potential(10_000, 11, 6)).map_err(err)?;
    let s3 = convexity_audit_stream(3.0, 0.1, &AuditOptions::stream(10_000, 11, 6)).map_err(err)?;
    let s2 = convexity_audit_stream(2.0, 0.1, &AuditOptions::stream(10_000, 11, 6)).map_err(err)?;
    Ok((
        p.violations == 0 && s3.violations == 0 && s2.violations >= 1,
        format!(
            "P_0.1(1.4): {} violations; S_0.1(3): {} violations; S_0.1(2): {} violations (want 0, 0, >= 1)",
            p.violations, s3.violations, s2.violations
        ),
    ))
}

fn fixed_point() -> Check {
    let p = varying_problem(Formulation::Potential, FieldCase::Electric, 1.4, 64, 32, BoundaryData::zero(WIDTH));
    let (state, report) = picard_solve(&p, &PicardConfig::default()).map_err(err)?;
    let bg: &BackgroundProfile = &p.background;
    let mut dev = 0.0f64;
    for i in 0..=64 {
        for j in 0..=32 {
            dev = dev
                .max((state.rho.get(i, j) - bg.rho[i]).abs())
                .max((state.big_phi.get(i, j) - bg.phi[i]).abs())
                .max((state.primary.get(i, j) - bg.vel_potential[i]).abs())
                .max((state.u1.get(i, j) - bg.u[i]).abs())
                .max(state.u2.get(i, j).abs());
        }
    }
    Ok((
        report.converged && report.iterations <= 2 && report.final_residual <= 1e-10 && dev <= 1e-10,
        format!(
            "{} iterations, residual {:.2e}, max column deviation {dev:.2e} (want <= 2, 1e-10, 1e-10)",
            report.iterations, report.final_residual
        ),
    ))
}

fn manufactured() -> Check {
    let mut pass = true;
    let mut detail = Vec::new();
    for f in [Formulation::Potential, Formulation::Stream] {
        let m = Manufactured::new(f, 1.0);
        let e = [m.error(32, 16), m.error(64, 32), m.error(128, 64)];
        let r = [e[0] / e[1], e[1] / e[2]];
        pass &= r.iter().all(|x| (3.0..=5.0).contains(x));
        detail.push(format!("{}: ratios {:.3}, {:.3}", f.name(), r[0], r[1]));
    }
    Ok((pass, format!("{} (want [3, 5])", detail.join("; "))))
}

fn contraction() -> Check {
    let eps = 1e-2;
    let mut pass = true;
    let mut detail = Vec::new();
    for (f, case, gamma) in [(Formulation::Potential, FieldCase::Electric, 1.4), (Formulation::Stream, FieldCase::Gravitational, 3.0)] {
        let est = |e: f64| -> Result<f64, String> {
            let p = varying_problem(f, case, gamma, 64, 32, bump_data(e));
            let (_, r) = picard_solve(&p, &PicardConfig::default()).map_err(err)?;
            if !r.converged {
                return Err(format!("{} did not converge at eps {e}", f.name()));
            }
            r.contraction_estimate().ok_or_else(|| "no contraction ratio above round-off".to_string())
        };
        let (a, b) = (est(eps)?, est(eps / 2.0)?);
        pass &= a < 1.0 && b < 1.0 && b <= 0.75 * a;
        detail.push(format!("{}: {a:.3e} -> {b:.3e} (x{:.2})", f.name(), b / a));
    }
    Ok((pass, format!("{} (want < 1 and factor <= 0.75)", detail.join("; "))))
}

fn multistart() -> Check {
    let guesses = [
        InitialGuess::Background,
        InitialGuess::SmoothMode { amplitude: 2e-2 },
        // Nodal noise must stay small against the mesh width to keep gradients admissible.
        InitialGuess::Noise { amplitude: 2e-4, seed: 10 },
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (f, case, gamma) in [(Formulation::Potential, FieldCase::Electric, 1.4), (Formulation::Stream, FieldCase::Gravitational, 3.0)] {
        let p = varying_problem(f, case, gamma, 64, 32, bump_data(1e-2));
        let r = multistart_uniqueness(&p, &PicardConfig::default(), &guesses).map_err(err)?;
        let (d, e) = (r.max_distance(), r.max_energy());
        pass &= r.pairs.len() == 3 && r.pairs.iter().all(|p| p.energy.is_some());
        let (d, e) = (d.unwrap_or(f64::INFINITY), e.unwrap_or(f64::INFINITY));
        pass &= d <= 1e-8 && e <= 1e-9;
        detail.push(format!("{} (gamma {gamma}): distance {d:.2e}, energy {e:.2e}", case.name()));
    }
    Ok((pass, format!("{} (tol 1e-8, 1e-9)", detail.join("; "))))
}

fn mass_flux() -> Check {
    let eps = 1e-2;
    let (nx, ny) = (64, 32);
    let p = varying_problem(Formulation::Potential, FieldCase::Electric, 1.4, nx, ny, bump_data(eps));
    let (state, report) = picard_solve(&p, &PicardConfig::default()).map_err(err)?;
    let fluxes: Vec<f64> = (1..nx).map(|i| state.mass_flux(i)).collect();
    let hi = fluxes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = fluxes.iter().copied().fold(f64::INFINITY, f64::min);
    // Manufactured solution with amplitude matched to the data scale.
    let mms = Manufactured::new(Formulation::Potential, eps).error(nx, ny);
    Ok((
        report.converged && hi - lo <= 3.0 * mms,
        format!("flux variation {:.2e} vs 3 x manufactured error {:.2e}", hi - lo, 3.0 * mms),
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("enthalpy round trip", 1, enthalpy_round_trip),
        ("1D equilibrium", 1, equilibrium),
        ("RK4 order", 5, rk4_order),
        ("stream density roots", 5, stream_roots),
        ("structural identity", 5, structural_identity),
        ("convexity audits", 30, convexity_audits),
        ("fixed-point consistency", 10, fixed_point),
        ("manufactured-solution convergence", 60, manufactured),
        ("contraction behavior", 30, contraction),
        ("multistart uniqueness", 60, multistart),
        ("mass-flux conservation", 10, mass_flux),
    ];
    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} [{:>2}] {name}: {detail}; {:.2} s (budget {budget} s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
