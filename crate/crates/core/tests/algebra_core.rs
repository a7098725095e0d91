use nalgebra::{DMatrix, DVector};
use rand::Rng;

use nilkill::algebra::center_commutator;
use nilkill::{catalog, sampling, AdaptedFrame};

fn vec(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

#[test]
fn h3_levi_civita_table() {
    let h = catalog::heisenberg(1).unwrap();
    let f = AdaptedFrame::new(&h, 1e-9).unwrap();
    let (e1, e2, e3) = (f.unit(0), f.unit(1), f.unit(2));
    assert!((f.levi_civita(&e1, &e2) - vec(&[0.0, 0.0, 0.5])).norm() < 1e-14);
    assert!((f.levi_civita(&e1, &e3) - vec(&[0.0, -0.5, 0.0])).norm() < 1e-14);
    assert!(f.levi_civita(&e3, &e3).norm() < 1e-14);
}

#[test]
fn center_of_flat_summand_and_complex_heisenberg() {
    let l = catalog::with_flat(2, catalog::heisenberg(1).unwrap()).unwrap();
    let (z, comm) = center_commutator(&l, 1e-9).unwrap();
    assert_eq!((z.dim(), comm.dim()), (3, 1));
    assert!(z.contains(&comm, 1e-9));

    let c = catalog::complex_heisenberg(1.0).unwrap();
    let (z, comm) = center_commutator(&c, 1e-9).unwrap();
    assert_eq!((z.dim(), comm.dim()), (2, 2));
}

#[test]
fn complex_heisenberg_j_squares_to_scalar() {
    for lambda in [0.5, 1.0, 2.0] {
        let l = catalog::complex_heisenberg(lambda).unwrap();
        let f = AdaptedFrame::new(&l, 1e-9).unwrap();
        assert_eq!((f.dim_v, f.dim_z), (4, 2));
        for j in &f.j_matrices {
            let sq = j * j + DMatrix::identity(4, 4) * (lambda * lambda);
            assert!(sq.norm() < 1e-12, "λ = {lambda}");
        }
    }
}

#[test]
fn j_trace_form_examples() {
    let h = catalog::heisenberg(1).unwrap();
    let f = AdaptedFrame::new(&h, 1e-9).unwrap();
    assert!((f.j_trace_form()[(0, 0)] + 2.0).abs() < 1e-14);

    let l = catalog::with_flat(1, catalog::heisenberg(1).unwrap()).unwrap();
    let f = AdaptedFrame::new(&l, 1e-9).unwrap();
    assert_eq!(f.a_indices.len(), 1);
    let tf = f.j_trace_form();
    let a = f.a_indices[0] - f.dim_v;
    assert!(tf.row(a).norm() < 1e-14 && tf.column(a).norm() < 1e-14);
}

#[test]
fn frame_invariants_under_random_metrics() {
    let mut rng = sampling::rng(7);
    for l in catalog::all_algebras() {
        if l.is_abelian() {
            continue;
        }
        let lr = sampling::with_random_metric(&l, &mut rng).unwrap();
        let f = AdaptedFrame::new(&lr, 1e-9).unwrap();
        let n = f.dim();
        let ortho = f.frame.transpose() * &lr.gram * &f.frame - DMatrix::identity(n, n);
        assert!(ortho.norm() < 1e-10, "{}", l.name);
        for (t, j) in f.j_matrices.iter().enumerate() {
            assert!((j + j.transpose()).norm() < 1e-12);
            if f.a_indices.contains(&(f.dim_v + t)) {
                assert_eq!(j.norm(), 0.0);
            }
        }
        // The J_t off a have no common kernel on v.
        let r = f.rank_j();
        let sum = f.j_matrices[..r]
            .iter()
            .fold(DMatrix::zeros(f.dim_v, f.dim_v), |acc, j| {
                acc + j.transpose() * j
            });
        let min = sum.symmetric_eigenvalues().min();
        assert!(min > 1e-8, "{}: {min}", l.name);
        // z-frame vectors are central.
        for t in f.z_indices() {
            for a in 0..n {
                assert!(f.bracket(&f.unit(t), &f.unit(a)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn case_table_matches_koszul_and_connection_is_levi_civita() {
    let mut rng = sampling::rng(11);
    for l in catalog::all_algebras() {
        let f = AdaptedFrame::new(&l, 1e-9).unwrap();
        let n = f.dim();
        let mut random = || DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        for _ in 0..100 {
            let (x, y, w) = (random(), random(), random());
            let lc = f.levi_civita(&x, &y);
            assert!(
                (&lc - f.levi_civita_koszul(&x, &y)).norm() < 1e-12,
                "{}",
                l.name
            );
            let torsion = &lc - f.levi_civita(&y, &x) - f.bracket(&x, &y);
            assert!(torsion.norm() < 1e-12);
            let metric = f.levi_civita(&x, &y).dot(&w) + y.dot(&f.levi_civita(&x, &w));
            assert!(metric.abs() < 1e-12);
        }
    }
}
