use nalgebra::DMatrix;

use nilkill::structure::{
    bracket_commutant, compatible_metric, decompose, find_complex_structure, killing_dimensions,
    naturally_reductive_type, skew_bracket_commutant, Decomposition,
};
use nilkill::{catalog, sampling, AdaptedFrame, MetricLieAlgebra};

const TOL: f64 = 1e-9;

fn frame(l: &MetricLieAlgebra) -> AdaptedFrame {
    AdaptedFrame::new(l, TOL).unwrap()
}

fn h(l: usize) -> MetricLieAlgebra {
    catalog::heisenberg(l).unwrap()
}

fn sum(parts: &[MetricLieAlgebra]) -> MetricLieAlgebra {
    catalog::direct_sum(parts).unwrap()
}

/// The complex structure of factor `i` in user coordinates of the algebra.
fn complex_structure_in_user(dec: &Decomposition, i: usize) -> DMatrix<f64> {
    let f = &dec.factors[i];
    let j = f.complex_structure.as_ref().unwrap();
    let to_ambient = &f.embedding * &f.frame.frame;
    dec.frame
        .endo_to_user(&(&to_ambient * j * to_ambient.transpose()))
}

#[test]
fn commutant_examples() {
    assert_eq!(bracket_commutant(&frame(&h(1)), TOL).unwrap().len(), 1);
    assert_eq!(
        bracket_commutant(&frame(&sum(&[h(1), h(1)])), TOL)
            .unwrap()
            .len(),
        2
    );
    for lambda in [0.5, 1.0, 2.0] {
        let c = catalog::complex_heisenberg(lambda).unwrap();
        assert_eq!(bracket_commutant(&frame(&c), TOL).unwrap().len(), 1);
        assert_eq!(skew_bracket_commutant(&frame(&c), TOL).unwrap().len(), 1);
    }
    let n32 = catalog::free_two_step_3().unwrap();
    assert_eq!(bracket_commutant(&frame(&n32), TOL).unwrap().len(), 1);
    assert!(skew_bracket_commutant(&frame(&n32), TOL)
        .unwrap()
        .is_empty());
}

#[test]
fn commutant_elements_intertwine_the_bracket() {
    let l = sum(&[h(1), catalog::complex_heisenberg(1.0).unwrap()]);
    let f = frame(&l);
    for s in bracket_commutant(&f, TOL).unwrap() {
        assert!((&s - s.transpose()).norm() < 1e-10);
        for a in 0..f.dim() {
            for b in 0..f.dim() {
                let (x, y) = (f.unit(a), f.unit(b));
                let lhs = &s * f.bracket(&x, &y);
                assert!((lhs - f.bracket(&(&s * &x), &y)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn decompose_examples() {
    let dec = decompose(&catalog::with_flat(2, h(1)).unwrap(), TOL).unwrap();
    assert_eq!(dec.d(), 2);
    assert_eq!(dec.factors.len(), 1);
    assert_eq!(dec.factors[0].dim(), 3);

    let dec = decompose(&catalog::free_two_step_3().unwrap(), TOL).unwrap();
    assert_eq!((dec.d(), dec.factors.len()), (0, 1));

    let mut rng = sampling::rng(12);
    for _ in 0..5 {
        let mixed = sampling::isometric_scramble(&sum(&[h(1), h(2)]), &mut rng).unwrap();
        let dec = decompose(&mixed, TOL).unwrap();
        let mut dims: Vec<usize> = dec.factors.iter().map(|f| f.dim()).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![3, 5]);
        assert!(dec.reassembly_residual() < 1e-9);
    }
}

#[test]
fn decomposition_is_idempotent_and_orthogonal() {
    let mut rng = sampling::rng(13);
    for base in catalog::all_algebras() {
        let l = sampling::with_random_metric(&base, &mut rng).unwrap();
        let dec = decompose(&l, TOL).unwrap();
        let n = dec.frame.dim();
        let t = &dec.transform;
        assert!(
            (t.transpose() * t - DMatrix::identity(n, n)).norm() < 1e-9,
            "{}",
            l.name
        );
        assert!(dec.reassembly_residual() < 1e-9, "{}", l.name);
        assert_eq!(dec.d(), dec.frame.a_indices.len());
        for f in &dec.factors {
            let again = decompose(&f.sub_algebra, TOL).unwrap();
            assert_eq!((again.d(), again.factors.len()), (0, 1), "{}", l.name);
            assert_eq!(bracket_commutant(&f.frame, TOL).unwrap().len(), 1);
            assert!(!(f.has_complex_structure && f.naturally_reductive));
            assert!(skew_bracket_commutant(&f.frame, TOL).unwrap().len() <= 1);
        }
    }
}

#[test]
fn complex_structure_examples() {
    let c = catalog::complex_heisenberg(1.0).unwrap();
    let dec = decompose(&c, TOL).unwrap();
    let j = complex_structure_in_user(&dec, 0);
    let mut expected = DMatrix::zeros(6, 6);
    for (a, b) in [(0, 1), (2, 3), (4, 5)] {
        expected[(b, a)] = 1.0;
        expected[(a, b)] = -1.0;
    }
    let diff = (&j - &expected).norm().min((&j + &expected).norm());
    assert!(diff < 1e-9, "{j}");

    assert!(find_complex_structure(&frame(&h(1)), TOL)
        .unwrap()
        .is_none());
    let n32 = catalog::free_two_step_3().unwrap();
    assert!(find_complex_structure(&frame(&n32), TOL).unwrap().is_none());
}

#[test]
fn naturally_reductive_examples() {
    let b = naturally_reductive_type(&frame(&h(1)), TOL).unwrap();
    assert_eq!(b.norm(), 0.0);

    let n32 = catalog::free_two_step_3().unwrap();
    let b = naturally_reductive_type(&frame(&n32), TOL).unwrap();
    let eig = b.killing_form().symmetric_eigenvalues();
    assert!(eig.iter().all(|&x| x < -1e-6), "{eig}");

    let c = catalog::complex_heisenberg(1.0).unwrap();
    assert!(naturally_reductive_type(&frame(&c), TOL).is_none());
}

#[test]
fn killing_dimension_examples() {
    let k = killing_dimensions(&catalog::with_flat(3, h(1)).unwrap(), TOL).unwrap();
    assert_eq!((k.dim_k2, k.dim_k3, k.d, k.r2, k.r3), (3, 2, 3, 0, 1));
    let k = killing_dimensions(&sum(&[h(1), h(1)]), TOL).unwrap();
    assert_eq!((k.dim_k2, k.dim_k3, k.d, k.r2, k.r3), (0, 2, 0, 0, 2));
    let k = killing_dimensions(&catalog::with_flat(2, h(1)).unwrap(), TOL).unwrap();
    assert_eq!((k.dim_k2, k.dim_k3), (1, 1));
}

#[test]
fn compatible_metric_examples() {
    let c = catalog::complex_heisenberg(1.0).unwrap();
    let j = complex_structure_in_user(&decompose(&c, TOL).unwrap(), 0);
    let id = DMatrix::identity(6, 6);
    let out = compatible_metric(&c, &j, &id).unwrap();
    assert!((&out.gram - &id * 2.0).norm() < 1e-9);

    let h = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
        1.0, 2.0, 1.0, 1.0, 1.0, 1.0,
    ]));
    let out = compatible_metric(&c, &j, &h).unwrap();
    assert!((j.transpose() * &out.gram * &j - &out.gram).norm() < 1e-9);

    let mut rng = sampling::rng(14);
    for _ in 0..10 {
        let h = sampling::random_spd(6, &mut rng);
        let out = compatible_metric(&c, &j, &h).unwrap();
        assert!(killing_dimensions(&out, TOL).unwrap().dim_k2 >= 1);
    }

    assert!(compatible_metric(&c, &(&j * 2.0), &id).is_err());
}

#[test]
fn invariants_survive_isometric_scrambles() {
    let mut rng = sampling::rng(15);
    for base in catalog::all_algebras() {
        let l = sampling::with_random_metric(&base, &mut rng).unwrap();
        let mixed = sampling::isometric_scramble(&l, &mut rng).unwrap();
        let (a, b) = (
            killing_dimensions(&l, TOL).unwrap(),
            killing_dimensions(&mixed, TOL).unwrap(),
        );
        assert_eq!(a, b, "{}", l.name);
        let spectrum = |m: &MetricLieAlgebra| {
            let mut e: Vec<f64> = frame(m)
                .j_trace_form()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect();
            e.sort_by(f64::total_cmp);
            e
        };
        for (x, y) in spectrum(&l).iter().zip(spectrum(&mixed)) {
            assert!((x - y).abs() < 1e-8, "{}", l.name);
        }
    }
}

#[test]
fn trace_form_separates_the_metric_family() {
    let tf = |lambda: f64| frame(&catalog::complex_heisenberg(lambda).unwrap()).j_trace_form();
    for lambda in [0.5, 1.0, 2.0, 3.0] {
        let expected = DMatrix::identity(2, 2) * (-4.0 * lambda * lambda);
        assert!((tf(lambda) - expected).norm() < 1e-9);
    }
    assert!((tf(1.0) - tf(2.0)).norm() >= 1.0);
}
