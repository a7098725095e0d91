use nalgebra::DMatrix;

use nilkill::algebra::center_commutator;
use nilkill::catalog::{self, Params};
use nilkill::io::{parse_algebra, to_json_string};
use nilkill::structure::{
    bracket_commutant, killing_dimensions, naturally_reductive_type, CompactBracket,
};
use nilkill::{AdaptedFrame, Error, MetricLieAlgebra};

const TOL: f64 = 1e-9;

fn rotation() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

fn sorted_killing_spectrum(b: &CompactBracket) -> Vec<f64> {
    let mut e: Vec<f64> = b
        .killing_form()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn heisenberg_examples() {
    for l in 1..=3 {
        let h = catalog::heisenberg(l).unwrap();
        assert_eq!(h.dim(), 2 * l + 1);
        let (z, _) = center_commutator(&h, TOL).unwrap();
        assert_eq!(z.dim(), 1);
    }
    assert!(catalog::heisenberg(0).is_err());
}

#[test]
fn complex_heisenberg_examples() {
    for lambda in [1.0, 2.0, 0.7] {
        let c = catalog::complex_heisenberg(lambda).unwrap();
        let tf = AdaptedFrame::new(&c, TOL).unwrap().j_trace_form();
        assert!((tf - DMatrix::identity(2, 2) * (-4.0 * lambda * lambda)).norm() < 1e-9);
        assert_eq!(killing_dimensions(&c, TOL).unwrap().dim_k2, 1);
    }
    assert!(catalog::complex_heisenberg(0.0).is_err());
    assert!(catalog::complex_heisenberg(-1.0).is_err());
}

#[test]
fn free_two_step_examples() {
    let n = catalog::free_two_step_3().unwrap();
    let f = AdaptedFrame::new(&n, TOL).unwrap();
    assert_eq!((f.dim_v, f.dim_z), (3, 3));
    let k = killing_dimensions(&n, TOL).unwrap();
    assert_eq!((k.dim_k2, k.r3), (0, 1));
}

#[test]
fn direct_sum_examples() {
    let l = catalog::direct_sum(&[catalog::euclidean(3), catalog::heisenberg(1).unwrap()]).unwrap();
    assert_eq!(l.dim(), 6);
    assert_eq!(AdaptedFrame::new(&l, TOL).unwrap().a_indices.len(), 3);

    let hh = catalog::direct_sum(&[
        catalog::heisenberg(1).unwrap(),
        catalog::heisenberg(1).unwrap(),
    ])
    .unwrap();
    assert_eq!(hh.dim(), 6);
    assert_eq!(
        bracket_commutant(&AdaptedFrame::new(&hh, TOL).unwrap(), TOL)
            .unwrap()
            .len(),
        2
    );
    let mut names = hh.basis_names.clone();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), 6);

    assert!(matches!(catalog::direct_sum(&[]), Err(Error::EmptySum)));
}

#[test]
fn representation_of_so3_gives_the_free_algebra() {
    let (bracket, rho) = catalog::so3_standard();
    let l = catalog::from_representation(&bracket, &rho, &DMatrix::identity(3, 3), TOL).unwrap();
    assert!(l.validate(TOL).is_valid());
    let f = AdaptedFrame::new(&l, TOL).unwrap();
    assert_eq!((f.dim_v, f.dim_z), (3, 3));
    let back = naturally_reductive_type(&f, TOL).unwrap();
    assert!((back.norm() - bracket.norm()).abs() < 1e-9);
    let (a, b) = (
        sorted_killing_spectrum(&back),
        sorted_killing_spectrum(&bracket),
    );
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9);
    }
    let ours = killing_dimensions(&l, TOL).unwrap();
    let free = killing_dimensions(&catalog::free_two_step_3().unwrap(), TOL).unwrap();
    assert_eq!(ours, free);
}

#[test]
fn representation_of_a_line_gives_heisenberg() {
    let zero = CompactBracket::zero(1);
    let l =
        catalog::from_representation(&zero, &[rotation()], &DMatrix::identity(1, 1), TOL).unwrap();
    let f = AdaptedFrame::new(&l, TOL).unwrap();
    assert_eq!((f.dim_v, f.dim_z), (2, 1));
    assert_eq!(naturally_reductive_type(&f, TOL).unwrap().norm(), 0.0);
    assert_eq!(
        killing_dimensions(&l, TOL).unwrap(),
        killing_dimensions(&catalog::heisenberg(1).unwrap(), TOL).unwrap()
    );
}

#[test]
fn representation_of_a_plane_gives_two_heisenbergs() {
    let mut r1 = DMatrix::zeros(4, 4);
    let mut r2 = DMatrix::zeros(4, 4);
    r1.view_mut((0, 0), (2, 2)).copy_from(&rotation());
    r2.view_mut((2, 2), (2, 2)).copy_from(&rotation());
    let l = catalog::from_representation(
        &CompactBracket::zero(2),
        &[r1, r2],
        &DMatrix::identity(2, 2),
        TOL,
    )
    .unwrap();
    let k = killing_dimensions(&l, TOL).unwrap();
    assert_eq!((k.dim_k2, k.dim_k3, k.d, k.r2, k.r3), (0, 2, 0, 0, 2));
    let f = AdaptedFrame::new(&l, TOL).unwrap();
    assert_eq!(
        naturally_reductive_type(&f, TOL).map(|b| b.norm()),
        Some(0.0)
    );
}

#[test]
fn representation_errors() {
    let (bracket, rho) = catalog::so3_standard();
    let skewed = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[1.0, 2.0, 1.0]));
    assert!(matches!(
        catalog::from_representation(&bracket, &rho, &skewed, TOL),
        Err(Error::NotAdInvariant(_))
    ));
    let mut r = DMatrix::zeros(3, 3);
    r.view_mut((0, 0), (2, 2)).copy_from(&rotation());
    assert!(matches!(
        catalog::from_representation(
            &CompactBracket::zero(1),
            &[r],
            &DMatrix::identity(1, 1),
            TOL
        ),
        Err(Error::TrivialSubrepresentation(_))
    ));
}

#[test]
fn every_entry_validates_and_round_trips() {
    let mut all: Vec<MetricLieAlgebra> = catalog::all_algebras();
    all.push(
        catalog::lookup(
            "r2+h3c",
            &Params {
                lambda: 2.0,
                ..Params::default()
            },
        )
        .unwrap(),
    );
    for l in all {
        assert!(l.validate(TOL).is_valid(), "{}", l.name);
        let text = to_json_string(&l);
        let back = parse_algebra(&text).unwrap();
        assert_eq!(back, l, "{}", l.name);
        assert_eq!(to_json_string(&back), text);
    }
}

#[test]
fn classification_lists_have_the_expected_shape() {
    let (two, three) = catalog::classification_lists();
    assert_eq!(two.len(), 14);
    assert_eq!(three.len(), 8);
    assert!(two.iter().any(|e| e.key == "r2+h3" && e.dim == 5));
    let six: Vec<&str> = three.iter().filter(|e| e.dim == 6).map(|e| e.key).collect();
    assert_eq!(six, vec!["r3+h3", "h3+h3", "r+h5", "n32"]);
    assert_eq!(two.iter().filter(|e| e.construction_external).count(), 3);
    assert!(two.iter().all(|e| e.dim <= 8) && three.iter().all(|e| e.dim <= 6));
}

#[test]
fn listed_entries_have_killing_forms_in_their_degree() {
    let (two, three) = catalog::classification_lists();
    for (list, degree) in [(two, 2), (three, 3)] {
        for e in list {
            let Some(l) = e.build() else { continue };
            let k = killing_dimensions(&l.unwrap(), TOL).unwrap();
            let dim = if degree == 2 { k.dim_k2 } else { k.dim_k3 };
            assert!(dim >= 1, "{}", e.key);
            assert_eq!(Some((k.dim_k2, k.dim_k3)), e.expected, "{}", e.key);
        }
    }
}

#[test]
fn lookup_parameters() {
    let p = |lambda: f64, l: usize, d: Option<usize>| Params { lambda, l, d };
    assert_eq!(
        catalog::lookup("heisenberg", &p(1.0, 2, None))
            .unwrap()
            .dim(),
        5
    );
    assert_eq!(
        catalog::lookup("heisenberg", &p(1.0, 1, Some(2)))
            .unwrap()
            .dim(),
        5
    );
    assert_eq!(
        catalog::lookup("euclidean", &p(1.0, 1, Some(4)))
            .unwrap()
            .dim(),
        4
    );
    let c = catalog::lookup("complex_heisenberg", &p(3.0, 1, None)).unwrap();
    assert!((c.gram[(5, 5)] - 9.0).abs() < 1e-12);
    assert!(matches!(
        catalog::lookup("nope", &Params::default()),
        Err(Error::UnknownCatalogEntry(_))
    ));
    assert!(matches!(
        catalog::lookup("r2+n6-f", &Params::default()),
        Err(Error::UnknownCatalogEntry(_))
    ));
}
