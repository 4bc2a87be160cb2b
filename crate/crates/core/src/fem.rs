//! P1 finite elements on a uniform triangulation of the unit square.
//!
//! Every cell `[i h, (i+1) h] x [j h, (j+1) h]` is cut by its lower-left to
//! upper-right diagonal. Interior vertices are numbered lexicographically
//! (x fastest), boundary vertices are eliminated.

use std::f64::consts::PI;

use thiserror::Error;

use crate::coefficients::{CoefficientError, CoefficientModel};
use crate::linalg::CsrMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("mesh needs at least 2 cells per side (got {0})")]
    TooCoarse(usize),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}

/// Smallest Dirichlet-Laplace eigenvalue of the unit square.
pub fn chi1_reference() -> f64 {
    crate::coefficients::chi1_reference()
}

/// Uniform mesh with `m` cells per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh {
    m: usize,
}

pub fn build_mesh(m: usize) -> Result<Mesh, FemError> {
    if m < 2 {
        return Err(FemError::TooCoarse(m));
    }
    Ok(Mesh { m })
}

/// Triangle as three vertex lattice indices, counter-clockwise.
pub type Triangle = [(usize, usize); 3];

impl Mesh {
    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn vertex_count(&self) -> usize {
        (self.m + 1) * (self.m + 1)
    }

    pub fn triangle_count(&self) -> usize {
        2 * self.m * self.m
    }

    pub fn n_dof(&self) -> usize {
        (self.m - 1) * (self.m - 1)
    }

    pub fn diameter(&self) -> f64 {
        self.h() * 2f64.sqrt()
    }

    pub fn vertex(&self, i: usize, j: usize) -> [f64; 2] {
        [i as f64 / self.m as f64, j as f64 / self.m as f64]
    }

    /// Degree of freedom of vertex `(i, j)`, `None` on the boundary.
    pub fn dof(&self, i: usize, j: usize) -> Option<usize> {
        let m = self.m;
        (i >= 1 && j >= 1 && i < m && j < m).then(|| (j - 1) * (m - 1) + (i - 1))
    }

    /// Triangles cell by cell, lower-right triangle first.
    pub fn triangles(&self) -> impl Iterator<Item = Triangle> + '_ {
        let m = self.m;
        (0..m).flat_map(move |j| {
            (0..m).flat_map(move |i| {
                [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]]
            })
        })
    }

    /// Nodal interpolant of `f` on the interior vertices.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let m = self.m;
        let mut out = Vec::with_capacity(self.n_dof());
        for j in 1..m {
            for i in 1..m {
                out.push(f(self.vertex(i, j)));
            }
        }
        out
    }
}

/// Discrete generalized eigenproblem `A u = lambda M u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    /// stiffness plus `b`-weighted mass
    pub a: CsrMatrix,
    /// `c`-weighted mass
    pub m: CsrMatrix,
    pub n_dof: usize,
    pub mesh: Mesh,
}

// Stencil slots: self, W, E, S, N, SW, NE.
const OFFSETS: [(isize, isize); 7] = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1)];

fn slot(di: isize, dj: isize) -> usize {
    OFFSETS.iter().position(|&o| o == (di, dj)).expect("outside 7-point stencil")
}

/// Assembles `A` and `M` at parameter `y` with the edge-midpoint rule.
pub fn assemble(mesh: &Mesh, model: &CoefficientModel, y: &[f64]) -> Result<SparseSystem, FemError> {
    model.check_parameters(y)?;
    let m = mesh.cells();
    let side = 2 * m + 1;
    let coeff_a = diffusion_on_half_grid(model, m, y);
    let b = model.eval_b();
    let c = model.eval_c();

    let n = mesh.n_dof();
    let mut a_acc = vec![[0.0f64; 7]; n];
    let mut m_acc = vec![[0.0f64; 7]; n];
    let area = 0.5 * mesh.h() * mesh.h();

    for tri in mesh.triangles() {
        let half = tri.map(|(i, j)| (2 * i, 2 * j));
        // midpoint opposite local vertex k
        let mid = |k: usize| {
            let (p, q) = ((half[(k + 1) % 3].0 + half[(k + 2) % 3].0) / 2, (half[(k + 1) % 3].1 + half[(k + 2) % 3].1) / 2);
            q * side + p
        };
        let a_mid = [coeff_a[mid(0)], coeff_a[mid(1)], coeff_a[mid(2)]];
        let a_mean = (a_mid[0] + a_mid[1] + a_mid[2]) / 3.0;
        let grads = unit_gradients(&tri);
        for r in 0..3 {
            let Some(row) = mesh.dof(tri[r].0, tri[r].1) else { continue };
            for s in 0..3 {
                let (ri, rj) = tri[r];
                let (si, sj) = tri[s];
                if mesh.dof(si, sj).is_none() {
                    continue;
                }
                // phi_r phi_s at the midpoints is 1/4 on each edge touching both
                let weight = |w: [f64; 3]| {
                    if r == s {
                        w[(r + 1) % 3] + w[(r + 2) % 3]
                    } else {
                        w[3 - r - s]
                    }
                };
                let mass_factor = area / 12.0;
                let g = grads[r][0] * grads[s][0] + grads[r][1] * grads[s][1];
                let k = slot(si as isize - ri as isize, sj as isize - rj as isize);
                a_acc[row][k] += 0.5 * g * a_mean + mass_factor * weight([b; 3]);
                m_acc[row][k] += mass_factor * weight([c; 3]);
            }
        }
    }

    Ok(SparseSystem { a: to_csr(mesh, &a_acc), m: to_csr(mesh, &m_acc), n_dof: n, mesh: *mesh })
}

/// Gradients scaled by `h` (entries in {-1, 0, 1}).
fn unit_gradients(tri: &Triangle) -> [[f64; 2]; 3] {
    let v = tri.map(|(i, j)| [i as f64, j as f64]);
    let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    let mut g = [[0.0; 2]; 3];
    for k in 0..3 {
        let (p, q) = (v[(k + 1) % 3], v[(k + 2) % 3]);
        g[k] = [(p[1] - q[1]) / det, (q[0] - p[0]) / det];
    }
    g
}

fn to_csr(mesh: &Mesh, acc: &[[f64; 7]]) -> CsrMatrix {
    let m = mesh.cells();
    let mut row_ptr = vec![0];
    let mut col_idx = Vec::with_capacity(7 * acc.len());
    let mut values = Vec::with_capacity(7 * acc.len());
    for j in 1..m {
        for i in 1..m {
            let row = mesh.dof(i, j).unwrap();
            let mut entries: Vec<(usize, f64)> = OFFSETS
                .iter()
                .enumerate()
                .filter_map(|(k, &(di, dj))| {
                    let col = mesh.dof((i as isize + di) as usize, (j as isize + dj) as usize)?;
                    Some((col, acc[row][k]))
                })
                .collect();
            entries.sort_by_key(|e| e.0);
            for (col, v) in entries {
                col_idx.push(col);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
    }
    CsrMatrix::from_parts(acc.len(), row_ptr, col_idx, values)
}

/// `a(x, y)` at every point of the lattice with spacing `h / 2`, row-major in x2.
fn diffusion_on_half_grid(model: &CoefficientModel, m: usize, y: &[f64]) -> Vec<f64> {
    let side = 2 * m + 1;
    let freq = model.max_frequency();
    // sin(j pi p / (2m)) for j = 1..=freq
    let sines: Vec<Vec<f64>> = (0..side)
        .map(|p| {
            let x = p as f64 / (2 * m) as f64;
            (0..=freq).map(|j| (j as f64 * PI * x).sin()).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(side * side);
    for q in 0..side {
        for p in 0..side {
            let x = [p as f64 / (2 * m) as f64, q as f64 / (2 * m) as f64];
            out.push(model.eval_a_with(x, y, |j| (sines[p][j], sines[q][j])));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{Field, ModelKind};

    fn laplace() -> CoefficientModel {
        CoefficientModel::constant(1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn mesh_counts() {
        let mesh = build_mesh(2).unwrap();
        assert_eq!((mesh.vertex_count(), mesh.triangle_count(), mesh.n_dof()), (9, 8, 1));
        assert_eq!(mesh.triangles().count(), 8);
        assert_eq!(build_mesh(128).unwrap().n_dof(), 16129);
        assert_eq!(build_mesh(64).unwrap().n_dof(), 3969);
        assert!(matches!(build_mesh(1), Err(FemError::TooCoarse(1))));
        assert!((build_mesh(4).unwrap().diameter() - 2f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn single_interior_node() {
        let sys = assemble(&build_mesh(2).unwrap(), &laplace(), &[]).unwrap();
        assert_eq!(sys.a.to_dense(), vec![vec![4.0]]);
        assert!((sys.m.get(0, 0) - 0.125).abs() < 1e-16);
        assert!((sys.a.get(0, 0) / sys.m.get(0, 0) - 32.0).abs() < 1e-12);
    }

    #[test]
    fn stencil_and_symmetry() {
        let mesh = build_mesh(9).unwrap();
        let model = CoefficientModel::by_name("qmc-analytic").unwrap();
        let y: Vec<f64> = (0..100).map(|j| 0.45 * ((j as f64) * 1.3).sin()).collect();
        let sys = assemble(&mesh, &model, &y).unwrap();
        assert!(sys.a.is_symmetric());
        assert!(sys.m.is_symmetric());
        assert!(sys.a.max_row_nnz() <= 7 && sys.m.max_row_nnz() <= 7);
        assert_eq!(sys.a.bandwidth(), mesh.cells());
        // row sums of the Laplacian vanish away from the boundary
        let lap = assemble(&mesh, &laplace(), &[]).unwrap();
        let row = mesh.dof(4, 4).unwrap();
        assert!(lap.a.row(row).map(|(_, v)| v).sum::<f64>().abs() < 1e-14);
        assert_eq!(lap.a.get(row, row), 4.0);
        assert_eq!(lap.a.get(row, mesh.dof(5, 5).unwrap()), 0.0);
    }

    #[test]
    fn mass_integrates_constants() {
        // 1^T M 1 over all vertices equals |D|; interior part is bounded by it
        let mesh = build_mesh(6).unwrap();
        let sys = assemble(&mesh, &CoefficientModel::constant(1.0, 0.0, 3.0).unwrap(), &[]).unwrap();
        let ones = vec![1.0; sys.n_dof];
        let total = sys.m.quad_form(&ones);
        assert!(total > 0.0 && total < 3.0);
    }

    #[test]
    fn zero_padding_is_bitwise() {
        let mesh = build_mesh(6).unwrap();
        for name in ["qmc-analytic", "qmc-gevrey2", "gl-analytic"] {
            let model = CoefficientModel::by_name(name).unwrap();
            let y = [0.3, -0.2, 0.1];
            let y = &y[..model.parameter_dim().min(3)];
            let mut padded = y.to_vec();
            padded.resize(model.parameter_dim() + 2, 0.0);
            let s1 = assemble(&mesh, &model, y).unwrap();
            let s2 = assemble(&mesh, &model, &padded[..model.parameter_dim()]).unwrap();
            assert_eq!(s1, s2, "{name}");
        }
    }

    #[test]
    fn half_grid_matches_pointwise_eval() {
        let model = CoefficientModel::by_name("qmc-gevrey2").unwrap();
        let y: Vec<f64> = (0..100).map(|j| 0.5 * ((j as f64) * 0.7).cos()).collect();
        let m = 5;
        let grid = diffusion_on_half_grid(&model, m, &y);
        for (q, p) in [(0, 0), (3, 7), (10, 10), (1, 9)] {
            let x = [p as f64 / 10.0, q as f64 / 10.0];
            let direct = model.eval(Field::A, x, &y).unwrap();
            assert!((grid[q * 11 + p] - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn propagates_coefficient_errors() {
        let mesh = build_mesh(4).unwrap();
        let model = CoefficientModel::new(ModelKind::GlGevrey3).unwrap();
        assert!(matches!(assemble(&mesh, &model, &[-1.0]), Err(FemError::Coefficient(_))));
        assert!(assemble(&mesh, &model, &[2.0]).is_err());
    }
}
