use helmdg::assembly::{assemble, assemble_term, ProblemParams, Term};
use helmdg::mesh::{build_annulus_square, build_graded_square, build_uniform_square, EdgeKind, Mesh};
use helmdg::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn dense(m: &helmdg::sparse::SparseMatrix) -> Vec<Vec<Complex64>> {
    m.to_dense()
}

fn term(mesh: &Mesh, p: &ProblemParams, t: Term) -> Vec<Vec<f64>> {
    let m = assemble_term(mesh, p, t).unwrap();
    dense(&m)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| {
                    assert_eq!(v.im, 0.0);
                    v.re
                })
                .collect()
        })
        .collect()
}

fn meshes() -> Vec<Mesh> {
    vec![
        build_uniform_square(3).unwrap(),
        build_graded_square(2, 3).unwrap(),
        build_annulus_square(8, 2, 2.0).unwrap(),
    ]
}

#[test]
fn full_matrix_is_sum_of_terms() {
    for mesh in meshes() {
        for degree in [1, 2] {
            let p = ProblemParams::new(5.0, degree).unwrap();
            let k = p.k;
            let a = dense(&assemble(&mesh, &p).unwrap());
            let parts: Vec<_> = Term::ALL.iter().map(|&t| term(&mesh, &p, t)).collect();
            let scale = a.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
            for i in 0..a.len() {
                for j in 0..a.len() {
                    let re = parts[0][i][j] + parts[1][i][j] - k * k * parts[2][i][j];
                    let im = k * parts[3][i][j] + parts[4][i][j] + parts[5][i][j] + parts[6][i][j];
                    let diff = (a[i][j] - Complex64::new(re, im)).norm();
                    assert!(diff <= 1e-13 * scale, "p={degree} ({i},{j}) diff {diff}");
                }
            }
        }
    }
}

#[test]
fn nnz_matches_connectivity_formula() {
    for mesh in meshes() {
        let interior = mesh.edges_of_kind(EdgeKind::Interior).count();
        for degree in [1usize, 2] {
            let a = assemble(&mesh, &ProblemParams::new(5.0, degree).unwrap()).unwrap();
            let d = (degree + 1) * (degree + 2) / 2;
            assert_eq!(a.nnz(), d * d * (mesh.num_triangles() + 2 * interior));
            assert!(a.is_symmetric());
        }
    }
}

#[test]
fn penalty_and_mass_terms_are_positive_semidefinite() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for mesh in meshes() {
        for degree in [1, 2] {
            let p = ProblemParams::new(5.0, degree).unwrap();
            for t in [
                Term::Stiffness,
                Term::Mass,
                Term::Robin,
                Term::JumpValue,
                Term::JumpNormal,
                Term::JumpTangential,
            ] {
                let m = term(&mesh, &p, t);
                let scale = m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
                for _ in 0..50 {
                    let x: Vec<f64> = (0..m.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let q: f64 = (0..m.len())
                        .map(|i| x[i] * (0..m.len()).map(|j| m[i][j] * x[j]).sum::<f64>())
                        .sum();
                    assert!(q >= -1e-12 * scale * m.len() as f64, "{t:?} p={degree}: {q}");
                }
            }
        }
    }
}

#[test]
fn constants_lie_in_the_kernel_without_dirichlet_edges() {
    let mesh = build_uniform_square(4).unwrap();
    for degree in [1, 2] {
        let p = ProblemParams::new(5.0, degree).unwrap();
        for t in [
            Term::Stiffness,
            Term::Consistency,
            Term::JumpValue,
            Term::JumpNormal,
            Term::JumpTangential,
        ] {
            let m = term(&mesh, &p, t);
            for row in &m {
                let s: f64 = row.iter().sum();
                assert!(s.abs() < 1e-12, "{t:?} p={degree}: {s}");
            }
        }
    }
}

#[test]
fn higher_quadrature_does_not_change_p1_matrix() {
    // every P1 integrand is at most quadratic
    for mesh in meshes() {
        let p = ProblemParams::new(5.0, 1).unwrap();
        let mut q = p.clone();
        q.quadrature_degree = Some(2);
        let mut r = p.clone();
        r.quadrature_degree = Some(6);
        let a = assemble(&mesh, &q).unwrap();
        let b = assemble(&mesh, &r).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() <= 1e-13 * a.max_abs());
    }
}

#[test]
fn mass_matrix_integrates_constants() {
    // sum of all mass entries is the domain area
    for mesh in meshes() {
        let area: f64 = (0..mesh.num_triangles()).map(|t| mesh.area(t)).sum();
        for degree in [1, 2] {
            let m = term(&mesh, &ProblemParams::new(1.0, degree).unwrap(), Term::Mass);
            let s: f64 = m.iter().flatten().sum();
            assert!((s - area).abs() < 1e-13, "{s} vs {area}");
        }
    }
}

#[test]
fn robin_matrix_integrates_perimeter() {
    let mesh = build_uniform_square(5).unwrap();
    for degree in [1, 2] {
        let m = term(&mesh, &ProblemParams::new(1.0, degree).unwrap(), Term::Robin);
        let s: f64 = m.iter().flatten().sum();
        assert!((s - 4.0).abs() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbed_meshes_give_exactly_symmetric_matrices(seed in any::<u64>(), degree in 1usize..=2) {
        let base = build_uniform_square(3).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut vertices = base.vertices.clone();
        for v in vertices.iter_mut() {
            let inner = v.x > 0.0 && v.x < 1.0 && v.y > 0.0 && v.y < 1.0;
            if inner {
                v.x += rng.gen_range(-0.08..0.08);
                v.y += rng.gen_range(-0.08..0.08);
            }
        }
        let tris: Vec<[usize; 3]> = base.triangles.iter().map(|t| t.vertices).collect();
        let mesh = Mesh::from_parts(vertices, tris, |_, _| EdgeKind::Robin).unwrap();
        let a = assemble(&mesh, &ProblemParams::new(5.0, degree).unwrap()).unwrap();
        prop_assert!(a.is_symmetric());
        prop_assert_eq!(a.max_abs_diff(&a.transpose()).unwrap(), 0.0);
    }
}
