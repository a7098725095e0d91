use nalgebra::DMatrix;
use rand::Rng;

use nilkill::exterior::bigrade;
use nilkill::killing::{
    beta_coefficients, is_parallel, kill2_residual, killgen_residuals, killing_nullspace_brute,
    killing_residual, killing_residuals, solve, solve_killing2, solve_killing3, two_form_from_endo,
    Condition, Method,
};
use nilkill::{catalog, sampling, AdaptedFrame, Form, MetricLieAlgebra};

const TOL: f64 = 1e-9;

fn frame(l: &MetricLieAlgebra) -> AdaptedFrame {
    AdaptedFrame::new(l, TOL).unwrap()
}

fn brute_dim(l: &MetricLieAlgebra, k: usize) -> usize {
    killing_nullspace_brute(l, &frame(l), k, TOL).unwrap().dim()
}

#[test]
fn residual_examples() {
    let h = catalog::heisenberg(1).unwrap();
    let f = frame(&h);
    let vol = Form::basis(3, &[0, 1, 2]);
    assert!(killing_residual(&f, &vol) < 1e-14);
    assert!(killing_residual(&f, &Form::basis(3, &[0, 2])) > 0.1);

    let r = catalog::euclidean(4);
    let fr = frame(&r);
    let mut rng = sampling::rng(5);
    for k in 1..=4 {
        let coeffs = nalgebra::DVector::from_fn(nilkill::exterior::binomial(4, k), |_, _| {
            rng.gen_range(-1.0..1.0)
        });
        let w = Form::from_coeffs(4, k, coeffs).unwrap();
        assert_eq!(killing_residual(&fr, &w), 0.0);
        assert!(is_parallel(&fr, &w, TOL));
    }
}

#[test]
fn both_residuals_give_the_same_verdict() {
    let mut rng = sampling::rng(6);
    for l in catalog::all_algebras() {
        let f = frame(&l);
        let n = f.dim();
        for k in 1..=n.min(4) {
            for w in killing_nullspace_brute(&l, &f, k, TOL).unwrap().basis {
                let r = killing_residuals(&f, &w);
                assert!(r.direct < 1e-9 && r.polarized < 1e-9, "{} k={k}", l.name);
            }
            let coeffs = nalgebra::DVector::from_fn(nilkill::exterior::binomial(n, k), |_, _| {
                rng.gen_range(-1.0..1.0)
            });
            let w = Form::from_coeffs(n, k, coeffs).unwrap();
            assert!(
                killing_residuals(&f, &w).verdicts_agree(TOL),
                "{} k={k}",
                l.name
            );
        }
    }
}

#[test]
fn brute_examples() {
    for lambda in [0.5, 1.0, 2.0] {
        assert_eq!(
            brute_dim(&catalog::complex_heisenberg(lambda).unwrap(), 2),
            1
        );
        assert_eq!(
            brute_dim(&catalog::complex_heisenberg(lambda).unwrap(), 3),
            0
        );
    }
    assert_eq!(brute_dim(&catalog::heisenberg(1).unwrap(), 2), 0);
    assert_eq!(brute_dim(&catalog::euclidean(3), 3), 1);
    assert_eq!(brute_dim(&catalog::heisenberg(1).unwrap(), 3), 1);
    assert_eq!(brute_dim(&catalog::free_two_step_3().unwrap(), 3), 1);
}

#[test]
fn brute_rejects_out_of_range_degree() {
    let h = catalog::heisenberg(1).unwrap();
    let f = frame(&h);
    assert!(killing_nullspace_brute(&h, &f, 0, TOL).is_err());
    assert!(killing_nullspace_brute(&h, &f, 4, TOL).is_err());
    assert_eq!(killing_nullspace_brute(&h, &f, 3, TOL).unwrap().dim(), 1);
}

#[test]
fn structured_examples() {
    let l = catalog::with_flat(2, catalog::heisenberg(1).unwrap()).unwrap();
    assert_eq!(solve_killing2(&l, TOL).unwrap().space.dim(), 1);
    assert_eq!(
        solve_killing2(&catalog::heisenberg(2).unwrap(), TOL)
            .unwrap()
            .space
            .dim(),
        0
    );

    let c = catalog::complex_heisenberg(2.0).unwrap();
    let sol = solve_killing2(&c, TOL).unwrap();
    assert_eq!(sol.space.dim(), 1);
    let data = &sol.factors[0];
    let j = sol.decomposition.factors[0]
        .complex_structure
        .clone()
        .unwrap();
    assert!((&data.alpha2 - j.view((0, 0), (4, 4))).norm() < 1e-12);
    assert!((&data.alpha0 - j.view((4, 4), (2, 2)) * 3.0).norm() < 1e-12);

    let s3 = solve_killing3(&catalog::free_two_step_3().unwrap(), TOL).unwrap();
    assert_eq!(s3.space.dim(), 1);
    assert_eq!(s3.factors[0].b, DMatrix::identity(3, 3));
    assert_eq!(
        solve_killing3(&catalog::heisenberg(1).unwrap(), TOL)
            .unwrap()
            .space
            .dim(),
        1
    );
    assert_eq!(solve_killing3(&c, TOL).unwrap().space.dim(), 0);
}

#[test]
fn parallel_examples() {
    let c = catalog::complex_heisenberg(1.0).unwrap();
    let f = frame(&c);
    let alpha = &solve(&c, 2, Method::Brute, TOL).unwrap().basis[0];
    assert!(!is_parallel(&f, alpha, TOL));

    let h = catalog::heisenberg(1).unwrap();
    assert!(is_parallel(&frame(&h), &Form::basis(3, &[0, 1, 2]), TOL));

    let n32 = catalog::free_two_step_3().unwrap();
    let alpha = &solve(&n32, 3, Method::Structured, TOL).unwrap().basis[0];
    assert!(!is_parallel(&frame(&n32), alpha, TOL));
}

#[test]
fn killgen_examples() {
    let h = catalog::heisenberg(1).unwrap();
    assert!(killgen_residuals(&frame(&h), &Form::basis(3, &[0, 1, 2])).max() < 1e-14);

    // A 3-form with a component in v* ⊗ Λ² z*.
    let n32 = catalog::free_two_step_3().unwrap();
    let f = frame(&n32);
    let w = Form::basis(6, &[0, 3, 4]);
    assert!(bigrade(&f, &w, 1).norm() > 0.0);
    let res = killgen_residuals(&f, &w);
    assert!(res.get(Condition::VZ, 0) > 0.1);
    assert!(killing_residual(&f, &w) > 0.1);

    // α₂ = J₁ commutes with j(z₁) instead of anticommuting.
    let c = catalog::complex_heisenberg(1.0).unwrap();
    let f = frame(&c);
    let mut a = DMatrix::zeros(6, 6);
    a.view_mut((0, 0), (4, 4)).copy_from(&f.j_matrices[0]);
    let alpha = two_form_from_endo(&a);
    assert!(kill2_residual(&f, &alpha) > 0.1);
    let res = killgen_residuals(&f, &alpha);
    assert!(res.get(Condition::VZ, 1) > 0.1);
}

#[test]
fn killgen_agrees_with_killing_residual() {
    let mut rng = sampling::rng(8);
    for l in catalog::all_algebras() {
        let f = frame(&l);
        let n = f.dim();
        for k in 2..=n.min(3) {
            for w in killing_nullspace_brute(&l, &f, k, TOL).unwrap().basis {
                assert!(killgen_residuals(&f, &w).max() < 1e-9, "{} k={k}", l.name);
            }
            let coeffs = nalgebra::DVector::from_fn(nilkill::exterior::binomial(n, k), |_, _| {
                rng.gen_range(-1.0..1.0)
            });
            let w = Form::from_coeffs(n, k, coeffs).unwrap();
            let killing = killing_residual(&f, &w) <= TOL;
            assert_eq!(
                killing,
                killgen_residuals(&f, &w).max() <= TOL,
                "{} k={k}",
                l.name
            );
        }
    }
}

#[test]
fn degree_one_forms_are_dual_to_killing_fields() {
    for l in catalog::all_algebras() {
        let f = frame(&l);
        let space = killing_nullspace_brute(&l, &f, 1, TOL).unwrap();
        let m = space.matrix();
        for &a in &f.a_indices {
            let mut e = nalgebra::DVector::zeros(f.dim());
            e[a] = 1.0;
            let proj = &m * (m.transpose() * &e);
            assert!((proj - &e).norm() < 1e-9, "{}", l.name);
        }
        for w in &space.basis {
            let sharp = w.coeffs().clone();
            for x in 0..f.dim() {
                for y in 0..f.dim() {
                    let s =
                        f.levi_civita(&f.unit(x), &sharp)[y] + f.levi_civita(&f.unit(y), &sharp)[x];
                    assert!(s.abs() < 1e-9, "{}", l.name);
                }
            }
        }
    }
}

#[test]
fn killing_forms_obey_the_structure_theorems() {
    let mut rng = sampling::rng(9);
    for base in catalog::all_algebras() {
        for trial in 0..3 {
            let l = if trial == 0 {
                base.clone()
            } else {
                sampling::with_random_metric(&base, &mut rng).unwrap()
            };
            let f = frame(&l);
            if f.dim() < 3 {
                continue;
            }
            for w in killing_nullspace_brute(&l, &f, 3, TOL).unwrap().basis {
                assert!(bigrade(&f, &w, 1).norm() < 1e-9, "{}", l.name);
                assert!(bigrade(&f, &w, 3).norm() < 1e-9, "{}", l.name);
                let (b, fit) = beta_coefficients(&f, &w);
                assert!(fit < 1e-9, "{}: fit {fit}", l.name);
                let r = b.nrows();
                let square = b.columns(0, r);
                assert!((square - square.transpose()).norm() < 1e-9, "{}", l.name);
                assert!(b.columns(r, b.ncols() - r).norm() < 1e-9, "{}", l.name);
            }
            for w in killing_nullspace_brute(&l, &f, 2, TOL).unwrap().basis {
                assert!(bigrade(&f, &w, 1).norm() < 1e-9, "{}", l.name);
                assert!(kill2_residual(&f, &w) < 1e-8, "{}", l.name);
            }
        }
    }
}
