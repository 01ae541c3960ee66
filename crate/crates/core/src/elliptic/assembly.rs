//! Stencils, the linearized operator and right-hand sides.

use super::grid::NozzleGrid;
use super::linalg::CsrMatrix;
use super::remainders::Remainders;
use super::{BoundaryData, Formulation, Problem, Thermo};
use crate::coefficients::Jacobians;
use crate::error::{LabError, Result};

/// `(variable, coefficient)` pairs; variable `2 * node + c` with `c = 0`
/// for `U` and `c = 1` for `V`.
pub type Stencil = Vec<(usize, f64)>;

pub(crate) const NONE: usize = usize::MAX;

#[inline]
pub(crate) fn uvar(node: usize) -> usize {
    2 * node
}

#[inline]
pub(crate) fn vvar(node: usize) -> usize {
    2 * node + 1
}

pub(crate) fn eval(st: &Stencil, x: &[f64]) -> f64 {
    st.iter().map(|&(k, c)| c * x[k]).sum()
}

fn merged(parts: &[(&Stencil, f64)]) -> Stencil {
    let mut out: Stencil = Vec::new();
    for (st, s) in parts {
        if *s == 0.0 {
            continue;
        }
        for &(k, c) in st.iter() {
            out.push((k, s * c));
        }
    }
    out
}

/// Gradient and average stencils at a face.
#[derive(Debug, Clone)]
pub struct FaceStencil {
    pub g: [Stencil; 2],
    pub z: Stencil,
}

/// Background state at a node or face.
#[derive(Debug, Clone, Copy)]
pub struct BgPoint {
    pub z: f64,
    pub q: [f64; 2],
    pub a: [f64; 2],
    pub b: f64,
    pub jac: Jacobians,
}

impl BgPoint {
    fn new(thermo: &Thermo, z: f64, q: [f64; 2]) -> Result<Self> {
        let (a, b) = thermo.flux_source(z, q)?;
        let jac = thermo.jacobians(z, q)?;
        Ok(Self { z, q, a, b, jac })
    }
}

/// Precomputed geometry, background coefficients and degree-of-freedom map.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub formulation: Formulation,
    pub grid: NozzleGrid,
    pub thermo: Thermo,
    pub sign: f64,
    /// Background at node columns `i = 0..=nx`.
    pub node_bg: Vec<BgPoint>,
    /// Background at `x1 = (i + 1/2) hx`, `i = 0..nx`.
    pub xface_bg: Vec<BgPoint>,
    pub w: Vec<f64>,
    pub wprime: Vec<f64>,
    pub grad: Vec<[Stencil; 2]>,
    pub xface: Vec<FaceStencil>,
    pub yface: Vec<FaceStencil>,
    pub lap: Vec<Stencil>,
    /// Free index of each variable, or `NONE` for Dirichlet variables.
    pub dof: Vec<usize>,
    pub free: Vec<usize>,
    /// Background velocity potential (potential) or `J x2` (stream) at nodes.
    pub primary_bg: Vec<f64>,
}

impl Discretization {
    pub fn new(problem: &Problem) -> Result<Self> {
        let grid = problem.grid;
        let bg = &problem.background;
        let thermo = Thermo::for_problem(problem.formulation, bg)?;
        let (nx, ny) = (grid.nx, grid.ny);
        let bg_q = |rho: f64| match problem.formulation {
            Formulation::Potential => [bg.flux / rho, 0.0],
            Formulation::Stream => [0.0, bg.flux],
        };

        let mut node_bg = Vec::with_capacity(nx + 1);
        for i in 0..=nx {
            let p = BgPoint::new(&thermo, bg.phi[i], bg_q(bg.rho[i])).map_err(|e| e.at(grid.x1(i), 0.0))?;
            node_bg.push(p);
        }
        let mut xface_bg = Vec::with_capacity(nx);
        for i in 0..nx {
            let rho = 0.5 * (bg.rho[i] + bg.rho[i + 1]);
            let q = bg_q(rho);
            let z = thermo.bernoulli_potential(rho, q)?;
            let p = BgPoint::new(&thermo, z, q).map_err(|e| e.at(grid.x1(i) + 0.5 * grid.hx, 0.0))?;
            xface_bg.push(p);
        }
        for (k, p) in node_bg.iter().chain(xface_bg.iter()).enumerate() {
            let (lo, _) = p.jac.dq_a_eigenvalues();
            if !(lo > 0.0) {
                let x1 = if k <= nx { grid.x1(k) } else { (k - nx - 1) as f64 * grid.hx + 0.5 * grid.hx };
                return Err(LabError::Assembly {
                    x1,
                    x2: 0.0,
                    reason: format!("background coefficient matrix is not elliptic (min eigenvalue {lo:e})"),
                });
            }
        }

        let w: Vec<f64> = (0..=nx).map(|i| problem.doping.w.eval(grid.x1(i))).collect();
        let wprime = (0..=nx).map(|i| problem.doping.w.derivative(grid.x1(i), 1)).collect();

        let formulation = problem.formulation;
        let grad: Vec<[Stencil; 2]> = (0..=nx)
            .flat_map(|i| (0..=ny).map(move |j| (i, j)))
            .map(|(i, j)| [d1_stencil(&grid, formulation, i, j), d2_stencil(&grid, formulation, i, j)])
            .collect();

        let mut xface = Vec::with_capacity(nx * (ny + 1));
        for i in 0..nx {
            for j in 0..=ny {
                let (a, b) = (grid.node(i, j), grid.node(i + 1, j));
                xface.push(FaceStencil {
                    g: [
                        vec![(uvar(b), 1.0 / grid.hx), (uvar(a), -1.0 / grid.hx)],
                        merged(&[(&grad[a][1], 0.5), (&grad[b][1], 0.5)]),
                    ],
                    z: vec![(vvar(a), 0.5), (vvar(b), 0.5)],
                });
            }
        }
        let mut yface = Vec::with_capacity((nx + 1) * ny);
        for i in 0..=nx {
            for j in 0..ny {
                let (a, b) = (grid.node(i, j), grid.node(i, j + 1));
                yface.push(FaceStencil {
                    g: [
                        merged(&[(&grad[a][0], 0.5), (&grad[b][0], 0.5)]),
                        vec![(uvar(b), 1.0 / grid.hy), (uvar(a), -1.0 / grid.hy)],
                    ],
                    z: vec![(vvar(a), 0.5), (vvar(b), 0.5)],
                });
            }
        }

        let mut lap = Vec::with_capacity(grid.n_nodes());
        for i in 0..=nx {
            for j in 0..=ny {
                let n = grid.node(i, j);
                let mut st: Stencil = Vec::new();
                let mut diag = 0.0;
                let mut push = |nb: usize, c: f64| {
                    st.push((vvar(nb), c));
                    diag -= c;
                };
                let ly = grid.hy * grid.theta_y(j) / grid.hx;
                let lx = grid.hx * grid.theta_x(i) / grid.hy;
                if i < nx {
                    push(grid.node(i + 1, j), ly);
                }
                if i > 0 {
                    push(grid.node(i - 1, j), ly);
                }
                if j < ny {
                    push(grid.node(i, j + 1), lx);
                }
                if j > 0 {
                    push(grid.node(i, j - 1), lx);
                }
                st.push((vvar(n), diag));
                lap.push(st);
            }
        }

        let nvar = 2 * grid.n_nodes();
        let mut dof = vec![NONE; nvar];
        let mut free = Vec::new();
        for i in 0..=nx {
            for j in 0..=ny {
                let n = grid.node(i, j);
                let u_dir = match formulation {
                    Formulation::Potential => i == nx,
                    Formulation::Stream => i == 0 || j == 0 || j == ny,
                };
                let v_dir = i == 0;
                if !u_dir {
                    dof[uvar(n)] = free.len();
                    free.push(uvar(n));
                }
                if !v_dir {
                    dof[vvar(n)] = free.len();
                    free.push(vvar(n));
                }
            }
        }

        let primary_bg = (0..=nx)
            .flat_map(|i| (0..=ny).map(move |j| (i, j)))
            .map(|(i, j)| match formulation {
                Formulation::Potential => bg.vel_potential[i],
                Formulation::Stream => bg.flux * grid.x2(j),
            })
            .collect();

        Ok(Self {
            formulation,
            grid,
            thermo,
            sign: formulation.sign(),
            node_bg,
            xface_bg,
            w,
            wprime,
            grad,
            xface,
            yface,
            lap,
            dof,
            free,
            primary_bg,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.dof.len()
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    #[inline]
    pub fn is_dirichlet(&self, var: usize) -> bool {
        self.dof[var] == NONE
    }

    #[inline]
    pub(crate) fn xface_index(&self, i: usize, j: usize) -> usize {
        i * (self.grid.ny + 1) + j
    }

    #[inline]
    pub(crate) fn yface_index(&self, i: usize, j: usize) -> usize {
        i * self.grid.ny + j
    }

    /// Length of the x-face in row `j`.
    #[inline]
    pub(crate) fn xface_len(&self, j: usize) -> f64 {
        self.grid.hy * self.grid.theta_y(j)
    }

    #[inline]
    pub(crate) fn yface_len(&self, i: usize) -> f64 {
        self.grid.hx * self.grid.theta_x(i)
    }

    /// Full background-plus-perturbation `(z, q)` at a node.
    pub fn node_state(&self, x: &[f64], i: usize, j: usize) -> (f64, [f64; 2]) {
        let n = self.grid.node(i, j);
        let bg = &self.node_bg[i];
        let g = [eval(&self.grad[n][0], x), eval(&self.grad[n][1], x)];
        (bg.z + x[vvar(n)], [bg.q[0] + g[0], bg.q[1] + g[1]])
    }

    /// Perturbation gradient at a node.
    pub fn node_gradient(&self, x: &[f64], n: usize) -> [f64; 2] {
        [eval(&self.grad[n][0], x), eval(&self.grad[n][1], x)]
    }

    /// Triplets `(row var, col var, value)` of the operator linearized with
    /// the given coefficients: `xjac` per x-face, `yjac` per y-face, `njac`
    /// per node. Only rows of free variables are emitted.
    pub fn operator_triplets(&self, xjac: &[Jacobians], yjac: &[Jacobians], njac: &[Jacobians]) -> Vec<(usize, usize, f64)> {
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let mut t = Vec::with_capacity(40 * g.n_nodes());
        let emit = |t: &mut Vec<(usize, usize, f64)>, row: usize, st: &Stencil, s: f64| {
            if self.dof[row] != NONE {
                for &(c, v) in st {
                    t.push((row, c, s * v));
                }
            }
        };
        for i in 0..nx {
            for j in 0..=ny {
                let f = self.xface_index(i, j);
                let fs = &self.xface[f];
                let jac = &xjac[f];
                let flux = merged(&[(&fs.g[0], jac.dq_a[0][0]), (&fs.g[1], jac.dq_a[0][1]), (&fs.z, jac.dz_a[0])]);
                let len = self.xface_len(j);
                emit(&mut t, uvar(g.node(i, j)), &flux, len);
                emit(&mut t, uvar(g.node(i + 1, j)), &flux, -len);
            }
        }
        for i in 0..=nx {
            for j in 0..ny {
                let f = self.yface_index(i, j);
                let fs = &self.yface[f];
                let jac = &yjac[f];
                let flux = merged(&[(&fs.g[0], jac.dq_a[1][0]), (&fs.g[1], jac.dq_a[1][1]), (&fs.z, jac.dz_a[1])]);
                let len = self.yface_len(i);
                emit(&mut t, uvar(g.node(i, j)), &flux, len);
                emit(&mut t, uvar(g.node(i, j + 1)), &flux, -len);
            }
        }
        for i in 0..=nx {
            for j in 0..=ny {
                let n = g.node(i, j);
                let row = vvar(n);
                if self.dof[row] == NONE {
                    continue;
                }
                let area = g.cell_area(i, j);
                let jac = &njac[n];
                emit(&mut t, row, &self.lap[n], self.sign / self.w[i]);
                t.push((row, row, -area * jac.dz_b));
                let coupling = merged(&[(&self.grad[n][0], jac.dq_b[0]), (&self.grad[n][1], jac.dq_b[1])]);
                emit(&mut t, row, &coupling, -area);
            }
        }
        t
    }

    /// Background coefficients expanded to every face and node.
    pub fn background_jacobians(&self) -> (Vec<Jacobians>, Vec<Jacobians>, Vec<Jacobians>) {
        let g = &self.grid;
        let mut xj = Vec::with_capacity(g.nx * (g.ny + 1));
        for i in 0..g.nx {
            xj.extend(std::iter::repeat_n(self.xface_bg[i].jac, g.ny + 1));
        }
        let mut yj = Vec::with_capacity((g.nx + 1) * g.ny);
        let mut nj = Vec::with_capacity(g.n_nodes());
        for i in 0..=g.nx {
            yj.extend(std::iter::repeat_n(self.node_bg[i].jac, g.ny));
            nj.extend(std::iter::repeat_n(self.node_bg[i].jac, g.ny + 1));
        }
        (xj, yj, nj)
    }

    /// Coefficients at the current state (for Newton).
    pub fn state_jacobians(&self, x: &[f64]) -> Result<(Vec<Jacobians>, Vec<Jacobians>, Vec<Jacobians>)> {
        let g = &self.grid;
        let mut xj = Vec::with_capacity(self.xface.len());
        for i in 0..g.nx {
            for j in 0..=g.ny {
                let (z, q) = self.xface_state(x, i, j);
                xj.push(self.thermo.jacobians(z, q).map_err(|e| e.at(g.x1(i) + 0.5 * g.hx, g.x2(j)))?);
            }
        }
        let mut yj = Vec::with_capacity(self.yface.len());
        for i in 0..=g.nx {
            for j in 0..g.ny {
                let (z, q) = self.yface_state(x, i, j);
                yj.push(self.thermo.jacobians(z, q).map_err(|e| e.at(g.x1(i), g.x2(j) + 0.5 * g.hy))?);
            }
        }
        let mut nj = Vec::with_capacity(g.n_nodes());
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let (z, q) = self.node_state(x, i, j);
                nj.push(self.thermo.jacobians(z, q).map_err(|e| e.at(g.x1(i), g.x2(j)))?);
            }
        }
        Ok((xj, yj, nj))
    }

    pub(crate) fn xface_pert(&self, x: &[f64], i: usize, j: usize) -> ([f64; 2], f64) {
        let fs = &self.xface[self.xface_index(i, j)];
        ([eval(&fs.g[0], x), eval(&fs.g[1], x)], eval(&fs.z, x))
    }

    pub(crate) fn yface_pert(&self, x: &[f64], i: usize, j: usize) -> ([f64; 2], f64) {
        let fs = &self.yface[self.yface_index(i, j)];
        ([eval(&fs.g[0], x), eval(&fs.g[1], x)], eval(&fs.z, x))
    }

    pub(crate) fn xface_state(&self, x: &[f64], i: usize, j: usize) -> (f64, [f64; 2]) {
        let (g, z) = self.xface_pert(x, i, j);
        let bg = &self.xface_bg[i];
        (bg.z + z, [bg.q[0] + g[0], bg.q[1] + g[1]])
    }

    pub(crate) fn yface_state(&self, x: &[f64], i: usize, j: usize) -> (f64, [f64; 2]) {
        let (g, z) = self.yface_pert(x, i, j);
        let bg = &self.node_bg[i];
        (bg.z + z, [bg.q[0] + g[0], bg.q[1] + g[1]])
    }

    /// Splits full-variable triplets into the free block and the coupling
    /// to Dirichlet variables.
    pub fn split(&self, triplets: Vec<(usize, usize, f64)>) -> LinearOperator {
        let nf = self.n_free();
        let mut a = Vec::with_capacity(triplets.len());
        let mut coupling = Vec::new();
        for (r, c, v) in triplets {
            let rf = self.dof[r];
            debug_assert!(rf != NONE);
            match self.dof[c] {
                NONE => coupling.push((rf, c, v)),
                cf => a.push((rf, cf, v)),
            }
        }
        LinearOperator {
            a: CsrMatrix::from_triplets(nf, nf, a),
            coupling: CsrMatrix::from_triplets(nf, self.n_vars(), coupling),
        }
    }

    /// The operator linearized at the background.
    pub fn background_operator(&self) -> LinearOperator {
        let (xj, yj, nj) = self.background_jacobians();
        self.split(self.operator_triplets(&xj, &yj, &nj))
    }

    /// Right-hand side (indexed by variable) of the linearized problem with
    /// remainders `rem` and data `src`.
    pub fn rhs(&self, rem: &Remainders, src: &Sources) -> Vec<f64> {
        let g = &self.grid;
        let mut b = vec![0.0; self.n_vars()];
        for i in 0..g.nx {
            for j in 0..=g.ny {
                let f = self.xface_index(i, j);
                let v = self.xface_len(j) * rem.fx[f][0];
                b[uvar(g.node(i, j))] += v;
                b[uvar(g.node(i + 1, j))] -= v;
            }
        }
        for i in 0..=g.nx {
            for j in 0..g.ny {
                let f = self.yface_index(i, j);
                let v = self.yface_len(i) * rem.fy[f][1];
                b[uvar(g.node(i, j))] += v;
                b[uvar(g.node(i, j + 1))] -= v;
            }
        }
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let n = g.node(i, j);
                let area = g.cell_area(i, j);
                b[uvar(n)] += area * src.volume_u[n];
                b[vvar(n)] += area * (rem.f[n] + src.volume_v[n]);
                if i == 0 && self.formulation == Formulation::Potential {
                    b[uvar(n)] += src.inlet_flux[j] * self.xface_len(j);
                }
                if i == g.nx {
                    b[vvar(n)] -= self.sign / self.w[i] * src.outlet_neumann[j] * self.xface_len(j);
                }
            }
        }
        b
    }

    /// Residual of the discrete nonlinear equations (indexed by variable,
    /// zero on Dirichlet variables), in control-volume-integrated form.
    pub fn nonlinear_residual(&self, x: &[f64], src: &Sources) -> Result<Vec<f64>> {
        let g = &self.grid;
        let mut r = vec![0.0; self.n_vars()];
        for i in 0..g.nx {
            for j in 0..=g.ny {
                let (z, q) = self.xface_state(x, i, j);
                let (a, _) = self.thermo.flux_source(z, q).map_err(|e| e.at(g.x1(i) + 0.5 * g.hx, g.x2(j)))?;
                let v = self.xface_len(j) * (a[0] - self.xface_bg[i].a[0]);
                r[uvar(g.node(i, j))] += v;
                r[uvar(g.node(i + 1, j))] -= v;
            }
        }
        for i in 0..=g.nx {
            for j in 0..g.ny {
                let (z, q) = self.yface_state(x, i, j);
                let (a, _) = self.thermo.flux_source(z, q).map_err(|e| e.at(g.x1(i), g.x2(j) + 0.5 * g.hy))?;
                let v = self.yface_len(i) * (a[1] - self.node_bg[i].a[1]);
                r[uvar(g.node(i, j))] += v;
                r[uvar(g.node(i, j + 1))] -= v;
            }
        }
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let n = g.node(i, j);
                let area = g.cell_area(i, j);
                r[uvar(n)] -= area * src.volume_u[n];
                if i == 0 && self.formulation == Formulation::Potential {
                    r[uvar(n)] -= src.inlet_flux[j] * self.xface_len(j);
                }
                if self.dof[vvar(n)] == NONE {
                    continue;
                }
                let (z, q) = self.node_state(x, i, j);
                let (_, bval) = self.thermo.flux_source(z, q).map_err(|e| e.at(g.x1(i), g.x2(j)))?;
                let mut lap = eval(&self.lap[n], x);
                if i == g.nx {
                    lap += src.outlet_neumann[j] * self.xface_len(j);
                }
                r[vvar(n)] = self.sign / self.w[i] * lap - area * (bval - self.node_bg[i].b + src.volume_v[n]);
            }
        }
        for (k, v) in r.iter_mut().enumerate() {
            if self.dof[k] == NONE {
                *v = 0.0;
            }
        }
        Ok(r)
    }

    /// Copies the free entries of `x`.
    pub fn gather(&self, x: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&k| x[k]).collect()
    }

    pub fn scatter(&self, y: &[f64], x: &mut [f64]) {
        for (&k, &v) in self.free.iter().zip(y) {
            x[k] = v;
        }
    }

    /// A full variable vector with the Dirichlet values of `src` and zeros elsewhere.
    pub fn initial_vector(&self, src: &Sources) -> Vec<f64> {
        (0..self.n_vars()).map(|k| if self.dof[k] == NONE { src.dirichlet[k] } else { 0.0 }).collect()
    }
}

/// First-derivative stencil in `x1` at node `(i, j)`.
fn d1_stencil(g: &NozzleGrid, f: Formulation, i: usize, j: usize) -> Stencil {
    let h = g.hx;
    let n = |i: usize| uvar(g.node(i, j));
    if i == 0 {
        vec![(n(0), -1.5 / h), (n(1), 2.0 / h), (n(2), -0.5 / h)]
    } else if i == g.nx {
        match f {
            Formulation::Potential => vec![(n(i), 1.5 / h), (n(i - 1), -2.0 / h), (n(i - 2), 0.5 / h)],
            // Homogeneous Neumann outlet.
            Formulation::Stream => Vec::new(),
        }
    } else {
        vec![(n(i + 1), 0.5 / h), (n(i - 1), -0.5 / h)]
    }
}

fn d2_stencil(g: &NozzleGrid, f: Formulation, i: usize, j: usize) -> Stencil {
    let h = g.hy;
    let n = |j: usize| uvar(g.node(i, j));
    if j == 0 || j == g.ny {
        match f {
            // Slip walls.
            Formulation::Potential => Vec::new(),
            Formulation::Stream if j == 0 => vec![(n(0), -1.5 / h), (n(1), 2.0 / h), (n(2), -0.5 / h)],
            Formulation::Stream => vec![(n(j), 1.5 / h), (n(j - 1), -2.0 / h), (n(j - 2), 0.5 / h)],
        }
    } else {
        vec![(n(j + 1), 0.5 / h), (n(j - 1), -0.5 / h)]
    }
}

/// Linear operator on the free variables plus its coupling to the
/// Dirichlet variables.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub a: CsrMatrix,
    pub coupling: CsrMatrix,
}

impl LinearOperator {
    /// `b_free = rhs[free] - coupling * x` where `x` carries the Dirichlet values.
    pub fn reduce_rhs(&self, disc: &Discretization, rhs_full: &[f64], x: &[f64]) -> Vec<f64> {
        let cx = self.coupling.matvec(x);
        disc.free.iter().zip(&cx).map(|(&k, c)| rhs_full[k] - c).collect()
    }

    /// The operator applied to a full vector, on free rows.
    pub fn apply_full(&self, disc: &Discretization, x: &[f64]) -> Vec<f64> {
        let ax = self.a.matvec(&disc.gather(x));
        let cx = self.coupling.matvec(x);
        ax.iter().zip(&cx).map(|(a, c)| a + c).collect()
    }
}

/// An assembled system on the free variables.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Data of the perturbation problem beyond the Taylor remainders.
#[derive(Debug, Clone)]
pub struct Sources {
    /// Values at Dirichlet variables (indexed by variable).
    pub dirichlet: Vec<f64>,
    /// Inflow normal flux at `x1 = 0` per row `j` (potential only).
    pub inlet_flux: Vec<f64>,
    /// `dV/dx1` at `x1 = L` per row `j`.
    pub outlet_neumann: Vec<f64>,
    /// Volume source of the `U` equation per node.
    pub volume_u: Vec<f64>,
    /// Volume source added to the remainder `f` per node.
    pub volume_v: Vec<f64>,
}

impl Sources {
    pub fn zeros(disc: &Discretization) -> Self {
        let g = &disc.grid;
        Self {
            dirichlet: vec![0.0; disc.n_vars()],
            inlet_flux: vec![0.0; g.ny + 1],
            outlet_neumann: vec![0.0; g.ny + 1],
            volume_u: vec![0.0; g.n_nodes()],
            volume_v: vec![0.0; g.n_nodes()],
        }
    }

    /// Sources induced by the boundary perturbations.
    pub fn from_boundary(disc: &Discretization, bd: &BoundaryData) -> Self {
        let g = &disc.grid;
        let mut s = Self::zeros(disc);
        let total = bd.g0_integral(g.width);
        for j in 0..=g.ny {
            let x2 = g.x2(j);
            s.inlet_flux[j] = bd.g0.eval(x2);
            s.outlet_neumann[j] = bd.vl.eval(x2);
            s.dirichlet[vvar(g.node(0, j))] = bd.h0.eval(x2);
        }
        if disc.formulation == Formulation::Stream {
            for i in 0..=g.nx {
                for j in 0..=g.ny {
                    let v = if i == 0 {
                        bd.g0_integral(g.x2(j))
                    } else if j == 0 {
                        0.0
                    } else if j == g.ny {
                        total
                    } else {
                        continue;
                    };
                    s.dirichlet[uvar(g.node(i, j))] = v;
                }
            }
        }
        s
    }
}

/// Assembles the background-linearized system for given remainders.
pub fn assemble_linear_system(disc: &Discretization, rem: &Remainders, src: &Sources) -> LinearSystem {
    let op = disc.background_operator();
    let x = disc.initial_vector(src);
    let rhs = op.reduce_rhs(disc, &disc.rhs(rem, src), &x);
    LinearSystem { matrix: op.a, rhs }
}

/// Solves an assembled system to `|A x - b| <= 1e-10 |b|`.
pub fn solve_linear(system: &LinearSystem) -> Result<Vec<f64>> {
    let lu = super::linalg::BandedLu::factor(&system.matrix)?;
    super::linalg::solve_refined(&system.matrix, &lu, &system.rhs, 1e-10)
}
