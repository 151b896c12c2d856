//! Structured triangulations of the unit square and piecewise-linear
//! (P1) finite element functions over them.
//!
//! Every mesh is an `nx` by `ny` grid of cells, each split along its
//! lower-left to upper-right diagonal into two counter-clockwise
//! triangles. Degrees of freedom are nodal values ordered
//! lexicographically by `(j, i)` grid index, which makes the grid view
//! of a function a pure reshape of its coefficient vector.

use std::sync::Arc;

use thiserror::Error;

use crate::tensor::Tensor;

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("mesh must have at least one cell per axis, got nx={nx}, ny={ny}")]
    EmptyMesh { nx: usize, ny: usize },
    #[error("dof vector has {got} entries but the mesh has {expected} vertices")]
    DofLength { expected: usize, got: usize },
    #[error("interpolated value at vertex {vertex} ({x}, {y}) is not finite")]
    NonFiniteInterpolant { vertex: usize, x: f64, y: f64 },
    #[error("grid of shape {got:?} cannot be cast to a function on a mesh with grid shape {expected:?}")]
    CastShape {
        expected: (usize, usize),
        got: Vec<usize>,
    },
    #[error("functions live on different meshes: {0}x{1} vs {2}x{3}")]
    MeshMismatch(usize, usize, usize, usize),
}

/// Triangulation of the unit square. Immutable after construction and
/// safe to share across threads.
#[derive(Debug)]
pub struct Mesh {
    nx: usize,
    ny: usize,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_nodes: Vec<usize>,
    on_boundary: Vec<bool>,
}

impl Mesh {
    /// Builds the structured triangulation with `nx * ny` cells and
    /// `2 * nx * ny` triangles.
    pub fn unit_square(nx: usize, ny: usize) -> Result<Arc<Mesh>, MeshError> {
        if nx == 0 || ny == 0 {
            return Err(MeshError::EmptyMesh { nx, ny });
        }
        let n_vertices = (nx + 1) * (ny + 1);
        let mut vertices = Vec::with_capacity(n_vertices);
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([i as f64 / nx as f64, j as f64 / ny as f64]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        let node = |i: usize, j: usize| j * (nx + 1) + i;
        for j in 0..ny {
            for i in 0..nx {
                let v00 = node(i, j);
                let v10 = node(i + 1, j);
                let v01 = node(i, j + 1);
                let v11 = node(i + 1, j + 1);
                // lower-left to upper-right diagonal, both CCW
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        let mut on_boundary = vec![false; n_vertices];
        let mut boundary_nodes = Vec::new();
        for (v, &[x, y]) in vertices.iter().enumerate() {
            let on = x.abs() < 1e-14
                || (x - 1.0).abs() < 1e-14
                || y.abs() < 1e-14
                || (y - 1.0).abs() < 1e-14;
            if on {
                on_boundary[v] = true;
                boundary_nodes.push(v);
            }
        }
        Ok(Arc::new(Mesh {
            nx,
            ny,
            vertices,
            triangles,
            boundary_nodes,
            on_boundary,
        }))
    }

    pub fn grid_dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Grid shape of the nodal view: `(rows, cols) = (ny + 1, nx + 1)`.
    pub fn grid_shape(&self) -> (usize, usize) {
        (self.ny + 1, self.nx + 1)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Boundary vertex indices in increasing order.
    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn is_boundary(&self, vertex: usize) -> bool {
        self.on_boundary[vertex]
    }

    /// Vertex index of grid node `(i, j)`.
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn signed_area(&self, triangle: usize) -> f64 {
        let [a, b, c] = self.triangles[triangle];
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    /// Structural compatibility: two unit-square meshes with equal cell
    /// counts carry interchangeable dof vectors.
    pub fn same_layout(&self, other: &Mesh) -> bool {
        self.nx == other.nx && self.ny == other.ny
    }
}

/// Coefficient vector of a P1 function, one value per mesh vertex.
#[derive(Clone, Debug)]
pub struct FeFunction {
    mesh: Arc<Mesh>,
    dofs: Vec<f64>,
}

impl FeFunction {
    pub fn new(mesh: Arc<Mesh>, dofs: Vec<f64>) -> Result<Self, MeshError> {
        if dofs.len() != mesh.n_vertices() {
            return Err(MeshError::DofLength {
                expected: mesh.n_vertices(),
                got: dofs.len(),
            });
        }
        Ok(Self { mesh, dofs })
    }

    pub fn zeros(mesh: &Arc<Mesh>) -> Self {
        Self {
            mesh: Arc::clone(mesh),
            dofs: vec![0.0; mesh.n_vertices()],
        }
    }

    /// Nodal interpolation: `dofs[v] = g(x_v, y_v)`. Rejects non-finite
    /// values, reporting the offending vertex.
    pub fn interpolate<G>(mesh: &Arc<Mesh>, g: G) -> Result<Self, MeshError>
    where
        G: Fn(f64, f64) -> f64,
    {
        let mut dofs = Vec::with_capacity(mesh.n_vertices());
        for (v, &[x, y]) in mesh.vertices().iter().enumerate() {
            let value = g(x, y);
            if !value.is_finite() {
                return Err(MeshError::NonFiniteInterpolant { vertex: v, x, y });
            }
            dofs.push(value);
        }
        Ok(Self {
            mesh: Arc::clone(mesh),
            dofs,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn dofs(&self) -> &[f64] {
        &self.dofs
    }

    pub fn dofs_mut(&mut self) -> &mut [f64] {
        &mut self.dofs
    }

    pub fn into_dofs(self) -> Vec<f64> {
        self.dofs
    }

    /// Grid view of the coefficients as a `(ny+1, nx+1)` tensor. With
    /// lexicographic dof ordering this is a value-preserving reshape.
    pub fn grid_view(&self) -> Tensor {
        let (rows, cols) = self.mesh.grid_shape();
        Tensor::from_vec(&[rows, cols], self.dofs.clone()).expect("dof count matches grid")
    }

    /// Inverse of [`grid_view`](Self::grid_view); exact value
    /// preservation. Fails if the tensor shape does not match the mesh.
    pub fn from_grid(mesh: &Arc<Mesh>, grid: &Tensor) -> Result<Self, MeshError> {
        let (rows, cols) = mesh.grid_shape();
        if grid.shape() != [rows, cols] {
            return Err(MeshError::CastShape {
                expected: (rows, cols),
                got: grid.shape().to_vec(),
            });
        }
        Ok(Self {
            mesh: Arc::clone(mesh),
            dofs: grid.data().to_vec(),
        })
    }

    /// Pointwise evaluation of the P1 interpolant at `(x, y)` inside
    /// the unit square.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (nx, ny) = self.mesh.grid_dims();
        let hx = 1.0 / nx as f64;
        let hy = 1.0 / ny as f64;
        let i = ((x / hx).floor() as usize).min(nx - 1);
        let j = ((y / hy).floor() as usize).min(ny - 1);
        let xi = x / hx - i as f64;
        let eta = y / hy - j as f64;
        let v00 = self.dofs[self.mesh.node_index(i, j)];
        let v10 = self.dofs[self.mesh.node_index(i + 1, j)];
        let v01 = self.dofs[self.mesh.node_index(i, j + 1)];
        let v11 = self.dofs[self.mesh.node_index(i + 1, j + 1)];
        if xi >= eta {
            // lower triangle (v00, v10, v11)
            v00 * (1.0 - xi) + v10 * (xi - eta) + v11 * eta
        } else {
            // upper triangle (v00, v11, v01)
            v00 * (1.0 - eta) + v11 * xi + v01 * (eta - xi)
        }
    }

    pub fn all_finite(&self) -> bool {
        self.dofs.iter().all(|v| v.is_finite())
    }
}
