//! Element assembly for the variable-coefficient diffusion operator
//! `-div(exp(kappa) grad u)`, the L2 mass operator, and load vectors,
//! with symmetric homogeneous Dirichlet elimination.

use crate::mesh::{FeFunction, Mesh};

use super::quadrature::QuadratureRule;
use super::sparse::SparseMatrix;
use super::FemError;

/// Constant P1 basis gradients and area of one triangle.
pub(crate) struct ElementGeometry {
    pub grads: [[f64; 2]; 3],
    pub area: f64,
}

pub(crate) fn element_geometry(mesh: &Mesh, triangle: usize) -> ElementGeometry {
    let [a, b, c] = mesh.triangles()[triangle];
    let pa = mesh.vertices()[a];
    let pb = mesh.vertices()[b];
    let pc = mesh.vertices()[c];
    let two_area = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
    let grads = [
        [(pb[1] - pc[1]) / two_area, (pc[0] - pb[0]) / two_area],
        [(pc[1] - pa[1]) / two_area, (pa[0] - pc[0]) / two_area],
        [(pa[1] - pb[1]) / two_area, (pb[0] - pa[0]) / two_area],
    ];
    ElementGeometry {
        grads,
        area: 0.5 * two_area,
    }
}

/// Stiffness matrix `A[i][j] = integral exp(kappa) grad(phi_i) . grad(phi_j)`,
/// with `kappa` evaluated at quadrature points from its P1 interpolant.
/// No boundary conditions applied; rows of the result sum to zero.
pub fn assemble_stiffness(kappa: &FeFunction) -> Result<SparseMatrix, FemError> {
    let mesh = kappa.mesh();
    let quad = QuadratureRule::midpoint();
    let n = mesh.n_vertices();
    let mut triplets = Vec::with_capacity(9 * mesh.triangles().len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let geo = element_geometry(mesh, t);
        // quadrature factor: sum_q w_q exp(kappa(x_q))
        let mut coeff = 0.0;
        for (p, w) in quad.points().iter().zip(quad.weights()) {
            let kq = p[0] * kappa.dofs()[tri[0]]
                + p[1] * kappa.dofs()[tri[1]]
                + p[2] * kappa.dofs()[tri[2]];
            let e = kq.exp();
            if !e.is_finite() {
                return Err(FemError::AssemblyNonFinite { element: t });
            }
            coeff += w * e;
        }
        for a in 0..3 {
            for b in 0..3 {
                let dot = geo.grads[a][0] * geo.grads[b][0] + geo.grads[a][1] * geo.grads[b][1];
                triplets.push((tri[a], tri[b], geo.area * coeff * dot));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(n, n, triplets))
}

/// Mass matrix `M[i][j] = integral phi_i phi_j`, realizing the L2 inner
/// product on the mesh. Symmetric positive definite; entries sum to the
/// domain area.
pub fn assemble_mass(mesh: &Mesh) -> SparseMatrix {
    let quad = QuadratureRule::midpoint();
    let n = mesh.n_vertices();
    let mut triplets = Vec::with_capacity(9 * mesh.triangles().len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = element_geometry(mesh, t).area;
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = 0.0;
                for (p, w) in quad.points().iter().zip(quad.weights()) {
                    acc += w * p[a] * p[b];
                }
                triplets.push((tri[a], tri[b], area * acc));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Load vector `b[i] = integral f phi_i` with `f` interpolated onto the
/// P1 space; equals the mass matrix applied to the coefficients of `f`
/// up to rounding, since both use the same quadrature.
pub fn assemble_load(f: &FeFunction) -> Vec<f64> {
    let mesh = f.mesh();
    let quad = QuadratureRule::midpoint();
    let mut b = vec![0.0; mesh.n_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = element_geometry(mesh, t).area;
        for (p, w) in quad.points().iter().zip(quad.weights()) {
            let fq = p[0] * f.dofs()[tri[0]] + p[1] * f.dofs()[tri[1]] + p[2] * f.dofs()[tri[2]];
            for a in 0..3 {
                b[tri[a]] += area * w * fq * p[a];
            }
        }
    }
    b
}

/// Symmetric elimination of homogeneous Dirichlet rows: boundary rows
/// and columns are zeroed, the diagonal is set to one, and the
/// right-hand side entries at boundary nodes are cleared. Preserves
/// symmetry and makes the operator positive definite.
pub fn apply_dirichlet(
    a: &SparseMatrix,
    b: &[f64],
    boundary: &[usize],
) -> (SparseMatrix, Vec<f64>) {
    let mut constrained = vec![false; a.n_rows()];
    for &v in boundary {
        constrained[v] = true;
    }
    let a_d = a.map_entries(|r, c, v| {
        if constrained[r] || constrained[c] {
            if r == c {
                1.0
            } else {
                0.0
            }
        } else {
            v
        }
    });
    let mut b_d = b.to_vec();
    for &v in boundary {
        b_d[v] = 0.0;
    }
    (a_d, b_d)
}

/// Action of the stiffness coefficient sensitivity: returns the vector
/// `g` with `g[p] = integral exp(kappa) phi_p (grad u . grad lambda)`,
/// evaluated with the assembly quadrature so it is the exact transpose
/// of the discrete map `kappa -> A(kappa) u` paired against `lambda`.
pub fn stiffness_kappa_vjp(kappa: &FeFunction, u: &FeFunction, lambda: &FeFunction) -> Vec<f64> {
    let mesh = kappa.mesh();
    let quad = QuadratureRule::midpoint();
    let mut g = vec![0.0; mesh.n_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let geo = element_geometry(mesh, t);
        let mut grad_u = [0.0, 0.0];
        let mut grad_l = [0.0, 0.0];
        for k in 0..3 {
            grad_u[0] += u.dofs()[tri[k]] * geo.grads[k][0];
            grad_u[1] += u.dofs()[tri[k]] * geo.grads[k][1];
            grad_l[0] += lambda.dofs()[tri[k]] * geo.grads[k][0];
            grad_l[1] += lambda.dofs()[tri[k]] * geo.grads[k][1];
        }
        let dot = grad_u[0] * grad_l[0] + grad_u[1] * grad_l[1];
        for (p, w) in quad.points().iter().zip(quad.weights()) {
            let kq = p[0] * kappa.dofs()[tri[0]]
                + p[1] * kappa.dofs()[tri[1]]
                + p[2] * kappa.dofs()[tri[2]];
            let scale = geo.area * w * kq.exp() * dot;
            for a in 0..3 {
                g[tri[a]] += scale * p[a];
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use proptest::prelude::*;

    fn constant_kappa(mesh: &std::sync::Arc<Mesh>, c: f64) -> FeFunction {
        FeFunction::interpolate(mesh, |_, _| c).unwrap()
    }

    #[test]
    fn unit_stiffness_on_two_triangles() {
        // Hand assembly of the 1x1 mesh with exp(kappa) = 1:
        // vertices (0,0), (1,0), (0,1), (1,1); triangles (0,1,3), (0,3,2).
        let mesh = Mesh::unit_square(1, 1).unwrap();
        let a = assemble_stiffness(&constant_kappa(&mesh, 0.0)).unwrap();
        let expected = [
            [1.0, -0.5, -0.5, 0.0],
            [-0.5, 1.0, 0.0, -0.5],
            [-0.5, 0.0, 1.0, -0.5],
            [0.0, -0.5, -0.5, 1.0],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert!(
                    (a.get(r, c) - expected[r][c]).abs() < 1e-14,
                    "entry ({r},{c}): {} vs {}",
                    a.get(r, c),
                    expected[r][c]
                );
            }
        }
    }

    #[test]
    fn constants_lie_in_stiffness_kernel() {
        let mesh = Mesh::unit_square(5, 4).unwrap();
        let a = assemble_stiffness(&constant_kappa(&mesh, 0.0)).unwrap();
        let ones = vec![1.0; mesh.n_vertices()];
        let y = a.matvec(&ones).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn constant_coefficient_factors_out() {
        let mesh = Mesh::unit_square(3, 3).unwrap();
        let a0 = assemble_stiffness(&constant_kappa(&mesh, 0.0)).unwrap();
        let c = 0.7;
        let ac = assemble_stiffness(&constant_kappa(&mesh, c)).unwrap();
        let factor = c.exp();
        for r in 0..mesh.n_vertices() {
            for (col, v) in ac.row(r) {
                assert!((v - factor * a0.get(r, col)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kappa_overflow_reports_element() {
        let mesh = Mesh::unit_square(2, 2).unwrap();
        let kappa = constant_kappa(&mesh, 800.0);
        match assemble_stiffness(&kappa) {
            Err(FemError::AssemblyNonFinite { element: 0 }) => {}
            other => panic!("expected overflow in element 0, got {other:?}"),
        }
    }

    #[test]
    fn mass_entries_sum_to_domain_area() {
        for (nx, ny) in [(1, 1), (2, 3), (8, 8)] {
            let mesh = Mesh::unit_square(nx, ny).unwrap();
            let m = assemble_mass(&mesh);
            let total: f64 = (0..mesh.n_vertices())
                .flat_map(|r| m.row(r).map(|(_, v)| v).collect::<Vec<_>>())
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "mesh {nx}x{ny}: {total}");
        }
    }

    #[test]
    fn mass_quadratic_forms_match_exact_integrals() {
        let mesh = Mesh::unit_square(6, 6).unwrap();
        let m = assemble_mass(&mesh);

        let ones = FeFunction::interpolate(&mesh, |_, _| 1.0).unwrap();
        let m1 = m.matvec(ones.dofs()).unwrap();
        let norm1: f64 = ones.dofs().iter().zip(&m1).map(|(a, b)| a * b).sum();
        assert!((norm1 - 1.0).abs() < 1e-12);

        // integral of x^2 over the unit square is 1/3, exact at degree 2
        let x = FeFunction::interpolate(&mesh, |x, _| x).unwrap();
        let mx = m.matvec(x.dofs()).unwrap();
        let normx: f64 = x.dofs().iter().zip(&mx).map(|(a, b)| a * b).sum();
        assert!((normx - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn load_of_zero_and_one() {
        let mesh = Mesh::unit_square(4, 4).unwrap();
        let zero = FeFunction::interpolate(&mesh, |_, _| 0.0).unwrap();
        assert!(assemble_load(&zero).iter().all(|&v| v == 0.0));

        let one = FeFunction::interpolate(&mesh, |_, _| 1.0).unwrap();
        let total: f64 = assemble_load(&one).iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn load_equals_mass_times_coefficients() {
        let mesh = Mesh::unit_square(5, 3).unwrap();
        let f = FeFunction::interpolate(&mesh, |x, y| (3.1 * x).sin() + y * y).unwrap();
        let b = assemble_load(&f);
        // dense matrix-vector oracle
        let dense = assemble_mass(&mesh).to_dense();
        for (i, row) in dense.iter().enumerate() {
            let want: f64 = row.iter().zip(f.dofs()).map(|(m, v)| m * v).sum();
            assert!((b[i] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn dirichlet_on_fully_constrained_mesh() {
        let mesh = Mesh::unit_square(1, 1).unwrap();
        let a = assemble_stiffness(&constant_kappa(&mesh, 0.0)).unwrap();
        let b = vec![1.0, 2.0, 3.0, 4.0];
        let (a_d, b_d) = apply_dirichlet(&a, &b, mesh.boundary_nodes());
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert_eq!(a_d.get(r, c), want);
            }
        }
        assert!(b_d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dirichlet_reduces_two_by_two_to_single_unknown() {
        let mesh = Mesh::unit_square(2, 2).unwrap();
        let a = assemble_stiffness(&constant_kappa(&mesh, 0.0)).unwrap();
        let b = vec![1.0; 9];
        let (a_d, b_d) = apply_dirichlet(&a, &b, mesh.boundary_nodes());
        let interior = mesh.node_index(1, 1);
        // hand reduction of the 9-node system leaves the interior
        // diagonal of the five-point stencil
        assert!((a_d.get(interior, interior) - 4.0).abs() < 1e-12);
        for v in 0..9 {
            if v != interior {
                assert_eq!(a_d.get(interior, v), 0.0);
                assert_eq!(a_d.get(v, interior), 0.0);
                assert_eq!(b_d[v], 0.0);
            }
        }
        assert_eq!(b_d[interior], 1.0);
    }

    #[test]
    fn stiffness_consistency_for_affine_interpolants() {
        // P1 gradients of affine functions are exact, so u' A v equals
        // the exact integral of grad(u) . grad(v).
        let mesh = Mesh::unit_square(6, 5).unwrap();
        let a = assemble_stiffness(&constant_kappa(&mesh, 0.0)).unwrap();
        let cases = [
            ((0.0, 1.0, 0.0), (0.0, 1.0, 0.0)),
            ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
            ((1.0, 2.0, -1.0), (0.5, -1.0, 3.0)),
        ];
        for ((au, bu, cu), (av, bv, cv)) in cases {
            let u = FeFunction::interpolate(&mesh, |x, y| au + bu * x + cu * y).unwrap();
            let v = FeFunction::interpolate(&mesh, |x, y| av + bv * x + cv * y).unwrap();
            let av_vec = a.matvec(v.dofs()).unwrap();
            let got: f64 = u.dofs().iter().zip(&av_vec).map(|(x, y)| x * y).sum();
            let exact = bu * bv + cu * cv;
            assert!((got - exact).abs() < 1e-12, "got {got}, want {exact}");
        }
    }

    proptest! {
        #[test]
        fn dirichlet_preserves_symmetry(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mesh = Mesh::unit_square(4, 4).unwrap();
            let kappa = FeFunction::new(
                std::sync::Arc::clone(&mesh),
                (0..mesh.n_vertices()).map(|_| rng.random_range(-1.0..1.0)).collect(),
            ).unwrap();
            let a = assemble_stiffness(&kappa).unwrap();
            let b = vec![0.0; mesh.n_vertices()];
            let (a_d, _) = apply_dirichlet(&a, &b, mesh.boundary_nodes());
            prop_assert!(a_d.max_asymmetry() < 1e-14);
        }

        #[test]
        fn stiffness_scaling_law(shift in -2.0f64..2.0, seed in 0u64..100) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mesh = Mesh::unit_square(3, 3).unwrap();
            let base: Vec<f64> =
                (0..mesh.n_vertices()).map(|_| rng.random_range(-0.5..0.5)).collect();
            let shifted: Vec<f64> = base.iter().map(|v| v + shift).collect();
            let kappa = FeFunction::new(std::sync::Arc::clone(&mesh), base).unwrap();
            let kappa_shift = FeFunction::new(std::sync::Arc::clone(&mesh), shifted).unwrap();
            let a = assemble_stiffness(&kappa).unwrap();
            let a_shift = assemble_stiffness(&kappa_shift).unwrap();
            let factor = shift.exp();
            for r in 0..mesh.n_vertices() {
                for (c, v) in a_shift.row(r) {
                    prop_assert!((v - factor * a.get(r, c)).abs() < 1e-12);
                }
            }
        }
    }
}
