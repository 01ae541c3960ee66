//! Second-order Taylor remainders of the constitutive relations about the
//! background.

use super::assembly::{vvar, BgPoint, Discretization};
use super::grid::Field2D;
use super::Thermo;
use crate::error::{LabError, Result};

/// Remainders at every x-face, y-face and node of the grid.
#[derive(Debug, Clone)]
pub struct Remainders {
    pub fx: Vec<[f64; 2]>,
    pub fy: Vec<[f64; 2]>,
    pub f: Vec<f64>,
}

/// `(F, f)` at one point: `F = lin(A) - [A]`, `f = [B] - lin(B)` where
/// `[.]` is the increment from `(z0, q0)` to `(z0 + dz, q0 + dq)` and
/// `lin` its linearization at `(z0, q0)`.
pub fn remainder_at(thermo: &Thermo, z0: f64, q0: [f64; 2], dz: f64, dq: [f64; 2]) -> Result<([f64; 2], f64)> {
    let bg = bg_point(thermo, z0, q0)?;
    remainder_about(thermo, &bg, dz, dq)
}

fn bg_point(thermo: &Thermo, z: f64, q: [f64; 2]) -> Result<BgPoint> {
    let (a, b) = thermo.flux_source(z, q)?;
    let jac = thermo.jacobians(z, q)?;
    Ok(BgPoint { z, q, a, b, jac })
}

pub(crate) fn remainder_about(thermo: &Thermo, bg: &BgPoint, dz: f64, dq: [f64; 2]) -> Result<([f64; 2], f64)> {
    let (a, b) = thermo.flux_source(bg.z + dz, [bg.q[0] + dq[0], bg.q[1] + dq[1]])?;
    let j = &bg.jac;
    let mut big_f = [0.0; 2];
    for k in 0..2 {
        let lin = j.dq_a[k][0] * dq[0] + j.dq_a[k][1] * dq[1] + j.dz_a[k] * dz;
        big_f[k] = lin - (a[k] - bg.a[k]);
    }
    let lin_b = j.dq_b[0] * dq[0] + j.dq_b[1] * dq[1] + j.dz_b * dz;
    Ok((big_f, (b - bg.b) - lin_b))
}

impl Discretization {
    /// Remainders of the perturbation `x` (indexed by variable) at faces and nodes.
    pub fn remainders(&self, x: &[f64]) -> Result<Remainders> {
        let g = &self.grid;
        let mut fx = Vec::with_capacity(self.xface.len());
        for i in 0..g.nx {
            for j in 0..=g.ny {
                let (dq, dz) = self.xface_pert(x, i, j);
                fx.push(
                    remainder_about(&self.thermo, &self.xface_bg[i], dz, dq)
                        .map_err(|e| e.at(g.x1(i) + 0.5 * g.hx, g.x2(j)))?
                        .0,
                );
            }
        }
        let mut fy = Vec::with_capacity(self.yface.len());
        for i in 0..=g.nx {
            for j in 0..g.ny {
                let (dq, dz) = self.yface_pert(x, i, j);
                fy.push(
                    remainder_about(&self.thermo, &self.node_bg[i], dz, dq)
                        .map_err(|e| e.at(g.x1(i), g.x2(j) + 0.5 * g.hy))?
                        .0,
                );
            }
        }
        let mut f = Vec::with_capacity(g.n_nodes());
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let n = g.node(i, j);
                let dq = self.node_gradient(x, n);
                let r = remainder_about(&self.thermo, &self.node_bg[i], x[vvar(n)], dq)
                    .map_err(|e| e.at(g.x1(i), g.x2(j)))?;
                f.push(r.1);
            }
        }
        Ok(Remainders { fx, fy, f })
    }
}

/// Nodal remainders `(F, f)` for a potential perturbation `psi` and a
/// perturbation gradient `grad`, both given at the grid nodes.
pub fn taylor_remainders(
    disc: &Discretization,
    psi: &Field2D,
    grad: [&Field2D; 2],
) -> Result<([Field2D; 2], Field2D)> {
    let g = &disc.grid;
    for fld in [psi, grad[0], grad[1]] {
        if fld.nx != g.nx || fld.ny != g.ny {
            return Err(LabError::InvalidInput("field shape does not match the grid".into()));
        }
    }
    let mut big_f = [Field2D::zeros(g), Field2D::zeros(g)];
    let mut f = Field2D::zeros(g);
    for i in 0..=g.nx {
        for j in 0..=g.ny {
            let dq = [grad[0].get(i, j), grad[1].get(i, j)];
            let (rf, rb) = remainder_about(&disc.thermo, &disc.node_bg[i], psi.get(i, j), dq)
                .map_err(|e| e.at(g.x1(i), g.x2(j)))?;
            big_f[0].set(i, j, rf[0]);
            big_f[1].set(i, j, rf[1]);
            f.set(i, j, rb);
        }
    }
    Ok((big_f, f))
}

impl Remainders {
    /// Vanishing remainders, for purely linear solves.
    pub fn zeros(disc: &Discretization) -> Self {
        Self {
            fx: vec![[0.0; 2]; disc.xface.len()],
            fy: vec![[0.0; 2]; disc.yface.len()],
            f: vec![0.0; disc.grid.n_nodes()],
        }
    }
}
