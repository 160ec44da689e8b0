//! Nystrom assembly of the NP operator `K`, its discrete `L²` adjoint `K*`,
//! and the single-layer operator `S` on a [`BoundaryMesh`], together with
//! the discrete `E'` machinery in which `K` is self-adjoint.
//!
//! Kernels: `K` has kernel `(1/π)<y−x, n_y>/|x−y|²` with the smooth
//! same-node limit `κ(x)/(2π)`; `S` has kernel `(1/2π) log(1/|x−y|)`.
//! `S`'s self-panel integrals use exact log moments against the Legendre
//! interpolant; the two parameter-adjacent panels use 2x oversampled Gauss;
//! everything else is plain Nystrom. `K` deliberately gets no special
//! near-corner quadrature: the dyadic grading carries the error budget.

use crate::curve::BoundaryMesh;
use crate::error::{Error, Result};
use crate::linalg::{norm2_estimate, ComplexLu};
use crate::quad::{interpolation_matrix, log_quadrature_weights, GaussRule};
use crate::C64;
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    NpK,
    NpKstar,
    SingleLayerS,
}

/// Dense discretized layer operator bound to a mesh.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub mesh_hash: u64,
    pub data: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    /// Apply to complex node data.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut re = 0.0;
            let mut im = 0.0;
            for j in 0..n {
                let a = self.data[(i, j)];
                re += a * f[j].re;
                im += a * f[j].im;
            }
            out[i] = C64::new(re, im);
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.data[(i, j)]).sum())
            .collect()
    }
}

/// Node data over a mesh.
#[derive(Debug, Clone)]
pub struct DiscreteFunction {
    pub values: Vec<C64>,
    pub mesh_hash: u64,
}

impl DiscreteFunction {
    pub fn from_nodes<F: Fn(&crate::curve::MeshNode) -> C64>(mesh: &BoundaryMesh, f: F) -> Self {
        DiscreteFunction {
            values: mesh.nodes.iter().map(f).collect(),
            mesh_hash: mesh.hash(),
        }
    }

    pub fn constant(mesh: &BoundaryMesh, c: C64) -> Self {
        DiscreteFunction {
            values: vec![c; mesh.len()],
            mesh_hash: mesh.hash(),
        }
    }
}

fn np_kernel(x: [f64; 2], y: [f64; 2], ny: [f64; 2]) -> f64 {
    let dx = y[0] - x[0];
    let dy = y[1] - x[1];
    let r2 = dx * dx + dy * dy;
    (dx * ny[0] + dy * ny[1]) / (PI * r2)
}

/// Nystrom matrix of the NP operator `K`.
pub fn assemble_k(mesh: &BoundaryMesh) -> OperatorMatrix {
    let n = mesh.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = mesh.nodes[i].point;
            (0..n)
                .map(|j| {
                    let nj = &mesh.nodes[j];
                    let kern = if i == j {
                        nj.curvature / (2.0 * PI)
                    } else {
                        np_kernel(xi, nj.point, nj.normal)
                    };
                    kern * nj.weight * nj.jacobian
                })
                .collect()
        })
        .collect();
    let data = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    OperatorMatrix {
        kind: OperatorKind::NpK,
        mesh_hash: mesh.hash(),
        data,
    }
}

/// Discrete `L²` adjoint `K* = W⁻¹ Kᵀ W`, `W = diag(weight·jacobian)`.
pub fn assemble_kstar(mesh: &BoundaryMesh, k: &OperatorMatrix) -> OperatorMatrix {
    let n = mesh.len();
    let w: Vec<f64> = mesh.nodes.iter().map(|q| q.weight * q.jacobian).collect();
    let data = DMatrix::from_fn(n, n, |i, j| k.data[(j, i)] * w[j] / w[i]);
    OperatorMatrix {
        kind: OperatorKind::NpKstar,
        mesh_hash: mesh.hash(),
        data,
    }
}

/// Composite oversampled quadrature on a source panel seen from nearby
/// targets: the standard interval is split dyadically towards the shared
/// endpoint until each subpanel is no longer than its distance to the
/// nearest target, then each subpanel carries a 2x oversampled Gauss rule.
struct NearQuadrature {
    /// Scaled physical points of all subnodes.
    points: Vec<[f64; 2]>,
    /// Quadrature weight times |dγ/du_std| per subnode.
    wjac: Vec<f64>,
    /// Interpolation from the panel's own Gauss nodes to the subnodes.
    interp: Vec<Vec<f64>>,
}

fn near_quadrature(
    mesh: &BoundaryMesh,
    panel: usize,
    cluster: NearCluster,
    levels: usize,
    rule: &GaussRule,
    rule2: &GaussRule,
) -> NearQuadrature {
    let pan = &mesh.panels[panel];
    let piece = &mesh.spec.pieces()[pan.piece];
    let scale = mesh.spec.scale();
    let h = 0.5 * (pan.param_hi - pan.param_lo);
    let mid = 0.5 * (pan.param_hi + pan.param_lo);
    // dyadic breakpoints in [-1, 1] clustering at the shared end(s)
    let mut breaks = vec![-1.0f64];
    match cluster {
        NearCluster::Hi | NearCluster::Lo => {
            for l in 0..levels {
                breaks.push(1.0 - 0.5f64.powi(l as i32));
            }
            breaks.push(1.0);
            if matches!(cluster, NearCluster::Lo) {
                let mut rev: Vec<f64> = breaks.iter().rev().map(|b| -b).collect();
                std::mem::swap(&mut breaks, &mut rev);
            }
        }
        NearCluster::Both => {
            for l in (1..=levels).rev() {
                breaks.push(-1.0 + 0.5f64.powi(l as i32));
            }
            breaks.push(0.0);
            for l in 1..=levels {
                breaks.push(1.0 - 0.5f64.powi(l as i32));
            }
            breaks.push(1.0);
        }
    }
    let mut std_nodes = Vec::new();
    let mut wjac = Vec::new();
    let mut points = Vec::new();
    for w in breaks.windows(2) {
        let sh = 0.5 * (w[1] - w[0]);
        let sm = 0.5 * (w[1] + w[0]);
        for (&u, &wt) in rule2.nodes.iter().zip(rule2.weights.iter()) {
            let ustd = sm + sh * u;
            let s = mid + h * ustd;
            let q = piece.point(s);
            let v = piece.velocity(s);
            std_nodes.push(ustd);
            points.push([q[0] * scale, q[1] * scale]);
            wjac.push(wt * sh * v[0].hypot(v[1]) * scale * h);
        }
    }
    let interp = interpolation_matrix(&rule.nodes, &std_nodes);
    NearQuadrature {
        points,
        wjac,
        interp,
    }
}

/// Nystrom matrix of the single-layer operator `S`.
pub fn assemble_s(mesh: &BoundaryMesh) -> OperatorMatrix {
    let n = mesh.len();
    let p = mesh.params.gauss_order;
    let rule = GaussRule::new(p).expect("validated at mesh build");
    let rule2 = GaussRule::new((2 * p).min(64)).expect("valid oversampled order");
    let npanels = mesh.panels.len();

    let panel_lengths: Vec<f64> = (0..npanels)
        .map(|ip| {
            let first = mesh.panel_first_node[ip];
            (0..p).map(|j| {
                let nd = &mesh.nodes[first + j];
                nd.weight * nd.jacobian
            }).sum()
        })
        .collect();

    // one composite near-rule per ordered adjacent pair: sources[ip][0]
    // serves targets in the previous panel (shared endpoint at param_lo),
    // sources[ip][1] serves targets in the next panel (shared at param_hi)
    let near_rules: Vec<[NearQuadrature; 2]> = (0..npanels)
        .into_par_iter()
        .map(|ip| {
            let levels_for = |neighbor: usize, shared_at_hi: bool| {
                let endpoint = {
                    let pan = &mesh.panels[ip];
                    let s = if shared_at_hi { pan.param_hi } else { pan.param_lo };
                    let q = mesh.spec.pieces()[pan.piece].point(s);
                    [q[0] * mesh.spec.scale(), q[1] * mesh.spec.scale()]
                };
                let first = mesh.panel_first_node[neighbor];
                let mut dmin = f64::INFINITY;
                for j in 0..p {
                    let nd = &mesh.nodes[first + j];
                    let d = (nd.point[0] - endpoint[0]).hypot(nd.point[1] - endpoint[1]);
                    dmin = dmin.min(d);
                }
                let ratio = panel_lengths[ip] / dmin.max(1e-300);
                (ratio.log2().ceil() as i64 + 1).clamp(1, 40) as usize
            };
            let prev = (ip + npanels - 1) % npanels;
            let next = (ip + 1) % npanels;
            [
                near_quadrature(mesh, ip, false, levels_for(prev, false), &rule, &rule2),
                near_quadrature(mesh, ip, true, levels_for(next, true), &rule, &rule2),
            ]
        })
        .collect();

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let node_i = &mesh.nodes[i];
            let xi = node_i.point;
            let my_panel = node_i.panel;
            let prev = (my_panel + npanels - 1) % npanels;
            let next = (my_panel + 1) % npanels;
            let mut row = vec![0.0; n];
            for j in 0..n {
                let nj = &mesh.nodes[j];
                if nj.panel == my_panel || nj.panel == prev || nj.panel == next {
                    continue;
                }
                let r = (xi[0] - nj.point[0]).hypot(xi[1] - nj.point[1]);
                row[j] = -(0.5 / PI) * r.ln() * nj.weight * nj.jacobian;
            }
            // composite oversampled Gauss on the parameter-adjacent panels
            for (&pan, side) in [(prev, 1usize), (next, 0usize)].iter() {
                let (pan, side) = (*pan, *side);
                if pan == my_panel {
                    continue;
                }
                let nq = &near_rules[pan][side];
                let first = mesh.panel_first_node[pan];
                for (m, pt) in nq.points.iter().enumerate() {
                    let r = (xi[0] - pt[0]).hypot(xi[1] - pt[1]);
                    let val = -(0.5 / PI) * r.ln() * nq.wjac[m];
                    for j in 0..p {
                        row[first + j] += val * nq.interp[m][j];
                    }
                }
            }
            // self panel: split the log at the parameter distance
            {
                let first = mesh.panel_first_node[my_panel];
                let ui = rule.nodes[i - first];
                let wlog = log_quadrature_weights(&rule, ui);
                for j in 0..p {
                    let nj = &mesh.nodes[first + j];
                    let smooth = if first + j == i {
                        // |x - y|/|u_i - u| -> |dγ/du| at the node
                        node_i.jacobian.ln()
                    } else {
                        let r = (xi[0] - nj.point[0]).hypot(xi[1] - nj.point[1]);
                        let du = (ui - rule.nodes[j]).abs();
                        (r / du).ln()
                    };
                    row[first + j] = -(0.5 / PI) * (smooth * nj.weight + wlog[j]) * nj.jacobian;
                }
            }
            row
        })
        .collect();
    let data = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    OperatorMatrix {
        kind: OperatorKind::SingleLayerS,
        mesh_hash: mesh.hash(),
        data,
    }
}

/// Equilibrium density: the unit-mass kernel element of `K* − I`.
#[derive(Debug, Clone)]
pub struct EquilibriumDensity {
    pub rho: DiscreteFunction,
    /// Constant value of `S ρ₀` (the Robin-constant analogue).
    pub potential: f64,
    /// stddev(Sρ₀) / |mean(Sρ₀)| over nodes.
    pub flatness: f64,
}

/// Solve `(K* − I) ρ = 0` by smallest singular vector, normalize
/// `∮ ρ dσ = 1`, and report the flatness of `S ρ₀`.
pub fn equilibrium_density(
    mesh: &BoundaryMesh,
    kstar: &OperatorMatrix,
    s: &OperatorMatrix,
) -> Result<EquilibriumDensity> {
    let n = mesh.len();
    let mut a = kstar.data.clone();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    let svd = nalgebra::SVD::new(a, false, true);
    let sv = &svd.singular_values;
    let v_t = svd.v_t.as_ref().expect("requested");
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| sv[i].partial_cmp(&sv[j]).unwrap());
    let (smallest, next) = (sv[idx[0]], sv[idx[1]]);
    if next < 10.0 * smallest {
        return Err(Error::DegenerateKernel(smallest, next));
    }
    let mut rho: Vec<f64> = (0..n).map(|j| v_t[(idx[0], j)]).collect();
    let mass: f64 = mesh
        .nodes
        .iter()
        .zip(rho.iter())
        .map(|(q, r)| r * q.weight * q.jacobian)
        .sum();
    if mass.abs() < 1e-300 {
        return Err(Error::DegenerateKernel(smallest, next));
    }
    rho.iter_mut().for_each(|r| *r /= mass);
    let pot: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| s.data[(i, j)] * rho[j]).sum())
        .collect();
    let mean = pot.iter().sum::<f64>() / n as f64;
    let var = pot.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    Ok(EquilibriumDensity {
        rho: DiscreteFunction {
            values: rho.iter().map(|&r| C64::new(r, 0.0)).collect(),
            mesh_hash: mesh.hash(),
        },
        potential: mean,
        flatness: var.sqrt() / mean.abs().max(1e-300),
    })
}

/// Factorization of `K − λI` with its condition estimate.
pub struct ResolventFactor {
    lu: ComplexLu,
    pub lambda: C64,
    pub condition: f64,
    matrix: DMatrix<C64>,
}

/// Threshold above which a shifted system is reported near-singular.
pub const NEAR_SINGULAR_CONDITION: f64 = 1e14;

/// Factor `K − λI`.
pub fn resolvent_factor(k: &OperatorMatrix, lambda: C64) -> Result<ResolventFactor> {
    let n = k.n();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let mut v = C64::new(k.data[(i, j)], 0.0);
        if i == j {
            v -= lambda;
        }
        v
    });
    let lu = ComplexLu::factor(&a)?;
    let condition = lu.condition_estimate();
    if condition > NEAR_SINGULAR_CONDITION {
        return Err(Error::NearSingular(condition));
    }
    Ok(ResolventFactor {
        lu,
        lambda,
        condition,
        matrix: a,
    })
}

impl ResolventFactor {
    /// Solve `(K − λ) f = g`, returning the solution and its relative
    /// residual.
    pub fn solve(&self, g: &[C64]) -> (Vec<C64>, f64) {
        let f = self.lu.solve(g);
        let n = g.len();
        let mut rnorm = 0.0;
        let mut gnorm = 0.0;
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.matrix[(i, j)] * f[j];
            }
            rnorm += (acc - g[i]).norm_sqr();
            gnorm += g[i].norm_sqr();
        }
        (f, (rnorm / gnorm.max(1e-300)).sqrt())
    }
}

/// Dense solve of `(K − λ) f = g`.
pub fn resolvent_solve(
    k: &OperatorMatrix,
    lambda: C64,
    g: &DiscreteFunction,
) -> Result<(DiscreteFunction, f64)> {
    let fac = resolvent_factor(k, lambda)?;
    let (f, resid) = fac.solve(&g.values);
    Ok((
        DiscreteFunction {
            values: f,
            mesh_hash: g.mesh_hash,
        },
        resid,
    ))
}

/// Cached discrete `E'` form: the weighted symmetric factorization of `S`.
///
/// With `W = diag(weight·jacobian)` and `M = sym(W S) = L Lᵀ`, one has
/// `<f, g>_E' = <S⁻¹f, g>_W` computed through `M`, and the conjugation
/// `A = L⁻¹ (W K W⁻¹) L` renders `K` symmetric up to the Plemelj defect.
pub struct EprimeForm {
    w: Vec<f64>,
    l: DMatrix<f64>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    /// `‖WS − (WS)ᵀ‖ / ‖WS‖` of the raw assembly.
    pub weighted_symmetry_residual: f64,
    mesh_hash: u64,
}

impl EprimeForm {
    pub fn new(mesh: &BoundaryMesh, s: &OperatorMatrix) -> Result<Self> {
        let n = mesh.len();
        let w: Vec<f64> = mesh.nodes.iter().map(|q| q.weight * q.jacobian).collect();
        let ws = DMatrix::from_fn(n, n, |i, j| w[i] * s.data[(i, j)]);
        let wst = ws.transpose();
        let asym = (&ws - &wst).norm() / ws.norm();
        let m = (&ws + &wst) * 0.5;
        let chol = nalgebra::Cholesky::new(m).ok_or_else(|| {
            Error::Domain("weighted single-layer matrix is not positive definite".into())
        })?;
        let l = chol.l();
        Ok(EprimeForm {
            w,
            l,
            chol,
            weighted_symmetry_residual: asym,
            mesh_hash: mesh.hash(),
        })
    }

    pub fn mesh_hash(&self) -> u64 {
        self.mesh_hash
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// `S⁻¹ f` through the symmetric factorization (`S⁻¹ = M⁻¹ W`).
    pub fn s_inverse(&self, f: &[C64]) -> Vec<C64> {
        let n = f.len();
        let mut re = nalgebra::DVector::from_fn(n, |i, _| self.w[i] * f[i].re);
        let mut im = nalgebra::DVector::from_fn(n, |i, _| self.w[i] * f[i].im);
        self.chol.solve_mut(&mut re);
        self.chol.solve_mut(&mut im);
        (0..n).map(|i| C64::new(re[i], im[i])).collect()
    }

    /// `<S⁻¹ f, g>` in the discrete weighted `L²` pairing.
    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        let u = self.s_inverse(f);
        u.iter()
            .zip(g.iter())
            .zip(self.w.iter())
            .map(|((a, b), &wi)| wi * a * b.conj())
            .sum()
    }

    /// Riesz vector `r` with `<v, h>_E' = Σ v_i r_i` for any node data `v`.
    pub fn riesz(&self, h: &[C64]) -> Vec<C64> {
        let hbar: Vec<C64> = h.iter().map(|z| z.conj()).collect();
        let u = self.s_inverse(&hbar);
        u.iter().zip(self.w.iter()).map(|(a, &wi)| wi * a).collect()
    }

    /// `E'`-symmetrized form `A = L⁻¹ (W K W⁻¹) L` of a real operator
    /// (explicitly symmetrized), plus its raw asymmetry `‖A − Aᵀ‖/‖A‖`.
    pub fn symmetrized(&self, k: &OperatorMatrix) -> (DMatrix<f64>, f64) {
        let n = k.n();
        let b = DMatrix::from_fn(n, n, |i, j| self.w[i] * k.data[(i, j)] / self.w[j]);
        let x = self
            .l
            .solve_lower_triangular(&b)
            .expect("L has positive diagonal");
        let a = x * &self.l;
        let asym = (&a - a.transpose()).norm() / a.norm();
        let sym = (&a + a.transpose()) * 0.5;
        (sym, asym)
    }

    /// Map a symmetrized-form eigenvector back to node values of the
    /// corresponding eigenfunction of `K` (`f = W⁻¹ L v`).
    pub fn eigenvector_to_nodes(&self, v: &nalgebra::DVector<f64>) -> Vec<f64> {
        let lv = &self.l * v;
        (0..v.len()).map(|i| lv[i] / self.w[i]).collect()
    }
}

/// `<S⁻¹ f, g>` built directly from the operator matrices (one factorization
/// per call; sweeps should hold an [`EprimeForm`] instead).
pub fn eprime_inner(
    mesh: &BoundaryMesh,
    s: &OperatorMatrix,
    f: &DiscreteFunction,
    g: &DiscreteFunction,
) -> Result<C64> {
    let form = EprimeForm::new(mesh, s)?;
    Ok(form.inner(&f.values, &g.values))
}

/// `‖KS − SK*‖ / ‖KS‖`, norms estimated by power iteration.
pub fn plemelj_residual(k: &OperatorMatrix, kstar: &OperatorMatrix, s: &OperatorMatrix) -> f64 {
    let ks = &k.data * &s.data;
    let sk = &s.data * &kstar.data;
    let diff = &ks - &sk;
    let n = ks.nrows();
    let to_c = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| C64::new(m[(i, j)], 0.0));
    let num = norm2_estimate(&to_c(&diff), 25);
    let den = norm2_estimate(&to_c(&ks), 25);
    num / den
}

/// Serialize an operator dump: magic, kind, N, mesh hash, then row-major
/// little-endian (re, im) f64 pairs.
pub fn write_operator<Wr: std::io::Write>(op: &OperatorMatrix, mut w: Wr) -> Result<()> {
    w.write_all(b"NPOP")?;
    let kind: u8 = match op.kind {
        OperatorKind::NpK => 1,
        OperatorKind::NpKstar => 2,
        OperatorKind::SingleLayerS => 3,
    };
    w.write_all(&[kind, 0, 0, 0])?;
    w.write_all(&(op.n() as u64).to_le_bytes())?;
    w.write_all(&op.mesh_hash.to_le_bytes())?;
    for i in 0..op.n() {
        for j in 0..op.n() {
            w.write_all(&op.data[(i, j)].to_le_bytes())?;
            w.write_all(&0f64.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Read back an operator dump.
pub fn read_operator<R: std::io::Read>(mut r: R) -> Result<OperatorMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != b"NPOP" {
        return Err(Error::Schema("bad operator magic".into()));
    }
    let mut kindb = [0u8; 4];
    r.read_exact(&mut kindb)?;
    let kind = match kindb[0] {
        1 => OperatorKind::NpK,
        2 => OperatorKind::NpKstar,
        3 => OperatorKind::SingleLayerS,
        other => return Err(Error::Schema(format!("bad operator kind {other}"))),
    };
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let mesh_hash = u64::from_le_bytes(b8);
    let mut data = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            r.read_exact(&mut b8)?;
            data[(i, j)] = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
        }
    }
    Ok(OperatorMatrix {
        kind,
        mesh_hash,
        data,
    })
}
