use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use nilkill::exterior::{bigrade, binomial, lie_diff, nabla_form, skew_extend};
use nilkill::{catalog, sampling, AdaptedFrame, Error, Form, MetricLieAlgebra};

fn h3_frame() -> AdaptedFrame {
    AdaptedFrame::new(&catalog::heisenberg(1).unwrap(), 1e-9).unwrap()
}

fn random_form(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Form {
    let coeffs = DVector::from_fn(binomial(n, k), |_, _| rng.gen_range(-1.0..1.0));
    Form::from_coeffs(n, k, coeffs).unwrap()
}

fn random_skew(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    &a - a.transpose()
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

fn algebras() -> Vec<MetricLieAlgebra> {
    catalog::all_algebras()
}

#[test]
fn wedge_and_contraction_examples() {
    let e = |i: usize| Form::basis(4, &[i]);
    assert_eq!(e(0).wedge(&e(1)).unwrap(), Form::basis(4, &[0, 1]));
    assert_eq!(e(0).wedge(&e(0)).unwrap().norm(), 0.0);
    let (a, b) = (Form::basis(4, &[0, 1]), Form::basis(4, &[2, 3]));
    assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());

    let u = |i: usize| {
        let mut v = DVector::zeros(3);
        v[i] = 1.0;
        v
    };
    assert_eq!(
        Form::basis(3, &[0, 1]).contract(&u(0)),
        Form::basis(3, &[1])
    );
    assert_eq!(Form::basis(3, &[0, 1]).contract(&u(2)).norm(), 0.0);
    assert_eq!(
        Form::basis(3, &[0, 1, 2]).contract(&u(1)),
        Form::basis(3, &[0, 2]).scale(-1.0)
    );
    assert_eq!(Form::scalar(3, 2.0).contract(&u(0)).degree(), 0);
    assert!(matches!(
        Form::basis(3, &[0, 1]).wedge(&Form::basis(3, &[0, 2])),
        Err(Error::DegreeOverflow { .. })
    ));
    assert_eq!(
        Form::basis(4, &[0, 1])
            .wedge(&Form::basis(4, &[0, 2]))
            .unwrap()
            .norm(),
        0.0
    );
}

#[test]
fn skew_extend_examples() {
    let f = h3_frame();
    let j = &f.j_matrices[0];
    let mut big = DMatrix::zeros(3, 3);
    big.view_mut((0, 0), (2, 2)).copy_from(j);
    assert_eq!(
        skew_extend(&big, &Form::basis(3, &[0]), 1e-9).unwrap(),
        Form::basis(3, &[1])
    );

    let mut rng = sampling::rng(1);
    let s = random_skew(4, &mut rng);
    let vol = Form::basis(4, &[0, 1, 2, 3]);
    assert!(skew_extend(&s, &vol, 1e-9).unwrap().norm() < 1e-14);
    let w = random_form(4, 2, &mut rng);
    assert_eq!(
        skew_extend(&DMatrix::zeros(4, 4), &w, 1e-9).unwrap().norm(),
        0.0
    );
    assert!(matches!(
        skew_extend(&DMatrix::identity(4, 4), &w, 1e-9),
        Err(Error::NotSkew(_))
    ));
}

#[test]
fn lie_diff_examples() {
    let f = h3_frame();
    assert_eq!(
        lie_diff(&f, &Form::basis(3, &[2])),
        Form::basis(3, &[0, 1]).scale(-1.0)
    );
    for i in 0..2 {
        assert_eq!(lie_diff(&f, &Form::basis(3, &[i])).norm(), 0.0);
    }
    // Top degree has no differential.
    assert_eq!(lie_diff(&f, &Form::basis(3, &[0, 1, 2])).norm(), 0.0);
}

#[test]
fn nabla_form_examples() {
    let f = h3_frame();
    let z = f.unit(2);
    let w = Form::basis(3, &[0, 1]);
    // ∇_z acts by -½J on v, and J is trace free, so e¹∧e² is preserved.
    assert!(nabla_form(&f, &z, &w).norm() < 1e-14);
    let m = nabla_form(&f, &z, &Form::basis(3, &[0]));
    assert!((m.sub(&Form::basis(3, &[1]).scale(-0.5))).norm() < 1e-14);
    assert_eq!(nabla_form(&f, &z, &Form::scalar(3, 1.0)).norm(), 0.0);

    let l = catalog::with_flat(1, catalog::heisenberg(1).unwrap()).unwrap();
    let fl = AdaptedFrame::new(&l, 1e-9).unwrap();
    let a = fl.unit(fl.a_indices[0]);
    let mut rng = sampling::rng(2);
    for k in 0..=4 {
        let w = random_form(4, k, &mut rng);
        assert!(nabla_form(&fl, &a, &w).norm() < 1e-14);
    }
}

#[test]
fn bigrade_examples() {
    let f = h3_frame();
    let w = Form::basis(3, &[0, 2]);
    assert_eq!(bigrade(&f, &w, 1), w);
    assert_eq!(bigrade(&f, &w, 2).norm(), 0.0);
    let mut rng = sampling::rng(3);
    let w = random_form(3, 2, &mut rng);
    let sum = (0..=2).fold(Form::zero(3, 2), |acc, l| acc.add(&bigrade(&f, &w, l)));
    assert!(sum.sub(&w).norm() < 1e-15);
}

#[test]
fn form_json_round_trip() {
    let mut rng = sampling::rng(4);
    let w = random_form(5, 3, &mut rng);
    let back = Form::from_json(5, &w.to_json()).unwrap();
    assert_eq!(back, w);
}

fn check_laws(l: &MetricLieAlgebra, seed: u64) -> Result<(), TestCaseError> {
    let f = AdaptedFrame::new(l, 1e-9).unwrap();
    let n = f.dim();
    let mut rng = sampling::rng(seed);
    let k = rng.gen_range(0..=n);
    let m = rng.gen_range(0..=(n - k));
    let w = random_form(n, k, &mut rng);
    let e = random_form(n, m, &mut rng);
    let x = random_vector(n, &mut rng);
    let (a, b) = (random_skew(n, &mut rng), random_skew(n, &mut rng));

    let dd = lie_diff(&f, &lie_diff(&f, &w));
    prop_assert!(dd.norm() < 1e-10, "d∘d = {}", dd.norm());

    if k >= 1 {
        prop_assert!(w.contract(&x).contract(&x).norm() < 1e-10);
    }
    if k + m >= 1 {
        let lhs = w.wedge(&e).unwrap().contract(&x);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut rhs = Form::zero(n, k + m - 1);
        if k >= 1 {
            rhs = rhs.add(&w.contract(&x).wedge(&e).unwrap());
        }
        if m >= 1 {
            rhs = rhs.add(&w.wedge(&e.contract(&x)).unwrap().scale(sign));
        }
        prop_assert!(lhs.sub(&rhs).norm() < 1e-10);
    }

    let graded = if (k * m) % 2 == 0 { 1.0 } else { -1.0 };
    let swap = w
        .wedge(&e)
        .unwrap()
        .sub(&e.wedge(&w).unwrap().scale(graded));
    prop_assert!(swap.norm() < 1e-10);

    let ext = |s: &DMatrix<f64>, v: &Form| skew_extend(s, v, 1e-9).unwrap();
    let der = ext(&a, &w.wedge(&e).unwrap())
        .sub(&ext(&a, &w).wedge(&e).unwrap())
        .sub(&w.wedge(&ext(&a, &e)).unwrap());
    prop_assert!(der.norm() < 1e-10);
    let comm = &a * &b - &b * &a;
    let c = ext(&comm, &w)
        .sub(&ext(&a, &ext(&b, &w)))
        .add(&ext(&b, &ext(&a, &w)));
    prop_assert!(c.norm() < 1e-10);

    let eta = random_form(n, k, &mut rng);
    let pairing = nabla_form(&f, &x, &w).dot(&eta) + w.dot(&nabla_form(&f, &x, &eta));
    prop_assert!(pairing.abs() < 1e-10);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exterior_laws_hold(which in 0usize..21, seed in any::<u64>()) {
        let all = algebras();
        let l = &all[which % all.len()];
        check_laws(l, seed)?;
    }

    #[test]
    fn laws_hold_under_random_metrics(which in 0usize..21, seed in any::<u64>()) {
        let all = algebras();
        let mut rng = sampling::rng(seed);
        let l = sampling::with_random_metric(&all[which % all.len()], &mut rng).unwrap();
        check_laws(&l, seed ^ 0x5a5a)?;
    }
}
