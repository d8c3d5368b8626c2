use std::str::FromStr;

use dp4_core::geometry::{rat, AffineForm, Rational};
use dp4_core::jigsaw::{
    alpha_closed_form, compare_degeneracy, degenerate_faces, effective_generators, face_inequalities,
    face_polytope, generator_degree, jigsaw_check, merged_polytope, pyramid, pyramid_base, slice_census,
    union_polytope, ClemensEdge, DivisorClass, FaceTuple, JigsawError, UnitRank,
};
use itertools::Itertools;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: u32) -> UnitRank {
    UnitRank::new(n)
}

fn face(s: &str) -> FaceTuple {
    FaceTuple::from_str(s).unwrap()
}

fn ints(rows: &[AffineForm]) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|f| f.coefficients.iter().map(|c| c.to_integer().try_into().unwrap()).collect())
        .collect()
}

#[test]
fn generator_degrees_in_both_bases() {
    assert_eq!(generator_degree(6).unwrap().coords_l, [1, -1, 0, 0, -1, -1]);
    assert_eq!(generator_degree(1).unwrap().coords_a, [-1, -1, -1, -1, 0, 1]);
    assert_eq!(generator_degree(9).unwrap().coords_a, [2, 3, 4, 1, 1, -1]);
    assert_eq!(generator_degree(0), Err(JigsawError::IndexOutOfRange(0)));
    assert_eq!(generator_degree(10), Err(JigsawError::IndexOutOfRange(10)));
}

#[test]
fn relation_for_a2_holds() {
    let a2 = generator_degree(2).unwrap();
    assert_eq!(a2.coords_a, [1, 2, 3, 0, 1, -1]);
    assert_eq!(DivisorClass::from_a(a2.coords_a).coords_l, [0, 0, 0, 0, 1, 0]);
}

#[test]
fn base_change_round_trips() {
    for i in 1..=9 {
        let d = generator_degree(i).unwrap();
        assert_eq!(DivisorClass::from_a(d.coords_a).coords_l, d.coords_l);
        assert_eq!(DivisorClass::from_l(d.coords_l).coords_a, d.coords_a);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let l: [i64; 6] = std::array::from_fn(|_| rng.gen_range(-50..=50));
        let d = DivisorClass::from_l(l);
        assert_eq!(DivisorClass::from_a(d.coords_a).coords_l, l);
        let a: [i64; 6] = std::array::from_fn(|_| rng.gen_range(-50..=50));
        assert_eq!(DivisorClass::from_l(DivisorClass::from_a(a).coords_l).coords_a, a);
    }
}

#[test]
fn torsor_monomials_share_degree() {
    let a = |i| generator_degree(i).unwrap();
    let m1 = a(1) + a(9);
    let m2 = a(2) + a(8);
    let m3 = a(3) + 2 * a(4) + 3 * a(5) + a(7);
    assert_eq!(m1, m2);
    assert_eq!(m2, m3);
    assert_eq!(m1.coords_l, [1, 0, 0, 0, 0, 0]);
}

#[test]
fn face_inequality_examples() {
    assert_eq!(ints(&face_inequalities(0, ClemensEdge::E57, q(0)).unwrap()), vec![vec![0, -1, 0], vec![0, 3, 1]]);
    assert_eq!(
        ints(&face_inequalities(1, ClemensEdge::E36, q(1)).unwrap()),
        vec![vec![0, 0, 0, 0, 1], vec![0, 0, 0, -1, -1]]
    );
    assert_eq!(
        ints(&face_inequalities(0, ClemensEdge::E34, q(2)).unwrap()),
        vec![vec![0, -2, -1, 0, 0, 0, 0], vec![0, 1, 1, 0, 0, 0, 0]]
    );
    assert!(face_inequalities(2, ClemensEdge::E34, q(1)).is_err());
}

#[test]
fn face_polytope_examples() {
    let p = face_polytope(&face("57"));
    assert_eq!(p.inequalities().len(), 5);
    assert_eq!(p.volume(), rat(5, 54));
    assert_eq!(face_polytope(&face("36")).volume(), Rational::zero());
    assert_eq!(face_polytope(&face("34")).volume(), rat(1, 24));
    assert_eq!(face_polytope(&face("45")).volume(), rat(7, 216));
}

#[test]
fn union_polytope_volumes() {
    assert_eq!(union_polytope(q(0)).volume(), rat(1, 6));
    assert_eq!(union_polytope(q(1)).volume(), rat(1, 30));
    assert_eq!(union_polytope(q(2)).volume(), rat(1, 336));
    assert_eq!(UnitRank::try_from(-1), Err(JigsawError::NegativeRank(-1)));
}

#[test]
fn alpha_closed_form_values() {
    assert_eq!(alpha_closed_form(q(0)), rat(1, 2));
    assert_eq!(alpha_closed_form(q(1)), rat(1, 6));
    assert_eq!(alpha_closed_form(q(2)), rat(1, 48));
    assert_eq!(alpha_closed_form(q(3)), rat(1, 720));
}

#[test]
fn jigsaw_rank_zero_and_one() {
    let r = jigsaw_check(q(0)).unwrap();
    let expect = [("57", rat(5, 54)), ("45", rat(7, 216)), ("34", rat(1, 24)), ("36", rat(0, 1))];
    for (k, v) in expect {
        assert_eq!(r.per_face[&face(k)], v);
    }
    assert_eq!(r.union_volume, rat(1, 6));
    assert_eq!(r.alpha_sum, rat(1, 2));
    assert!(r.disjointness_verified);
    assert_eq!(r.alpha_of(&face("57")), Some(rat(5, 18)));

    let r = jigsaw_check(q(1)).unwrap();
    assert_eq!(r.per_face.len(), 16);
    assert_eq!(r.alpha_sum, rat(1, 6));
    assert_eq!(r.alpha_sum, r.union_volume * rat(5, 1));
}

#[test]
fn jigsaw_rank_two() {
    let start = std::time::Instant::now();
    let r = jigsaw_check(q(2)).unwrap();
    assert_eq!(r.per_face.len(), 64);
    assert_eq!(r.alpha_sum, rat(1, 48));
    assert_eq!(r.union_volume, rat(1, 336));
    eprintln!("rank two jigsaw: {:?}", start.elapsed());
}

#[test]
fn pyramid_identity() {
    for k in 0..=2 {
        let p = pyramid(q(k)).volume();
        let base = pyramid_base(q(k)).volume();
        assert_eq!(p.clone() * Rational::from_integer((2 * k as i64 + 3).into()), base);
        assert_eq!(base, alpha_closed_form(q(k)));
        assert_eq!(p, union_polytope(q(k)).volume());
    }
}

#[test]
fn permutation_symmetry_of_face_volumes() {
    for f in FaceTuple::all(q(1)) {
        assert_eq!(face_polytope(&f).volume(), face_polytope(&f.permuted(&[1, 0])).volume());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let all = FaceTuple::all(q(2));
    for _ in 0..6 {
        let f = &all[rng.gen_range(0..all.len())];
        let v = face_polytope(f).volume();
        for sigma in (0..3).permutations(3) {
            assert_eq!(face_polytope(&f.permuted(&sigma)).volume(), v, "{f} under {sigma:?}");
        }
    }
}

#[test]
fn union_of_two_neighbours() {
    for rank in 0..=1 {
        for f in FaceTuple::all(q(rank)) {
            for n in 0..f.edges().len() {
                let e = f.edges()[n];
                let Some(next) = e.successor() else { continue };
                let mut g = f.edges().to_vec();
                g[n] = next;
                let g = FaceTuple::new(g).unwrap();
                let merged = merged_polytope(&f, n).unwrap();
                assert_eq!(face_polytope(&f).volume() + face_polytope(&g).volume(), merged.volume(), "{f} / {g}");
            }
        }
    }
}

#[test]
fn effective_generator_examples() {
    let g = |s: &str| -> Vec<Vec<i64>> {
        effective_generators(&face(s))
            .generators()
            .iter()
            .map(|v| v.iter().map(|x| x.try_into().unwrap()).collect())
            .collect()
    };
    assert_eq!(g("57"), vec![vec![1, 1, 0], vec![-1, 0, 1], vec![0, -1, 0], vec![0, 3, 1]]);
    assert_eq!(g("36"), vec![vec![1, 1, 0], vec![-1, 0, 1], vec![0, 0, 1], vec![0, -1, -1]]);
    let mixed = g("45,34");
    assert_eq!(mixed.len(), 6);
    assert!(mixed.contains(&vec![0, -3, -1, 0, 0]));
    assert!(mixed.contains(&vec![0, 0, 0, 1, 1]));
}

#[test]
fn degenerate_faces_by_rank() {
    let d0 = degenerate_faces(q(0));
    assert_eq!(d0.len(), 1);
    assert_eq!(d0[0].face, face("36"));
    assert!(d0[0].cone.contains_line());
    assert!(!d0[0].strictly_feasible);
    for rank in 1..=2 {
        let d = degenerate_faces(q(rank));
        let faces: Vec<FaceTuple> = d.iter().map(|x| x.face.clone()).collect();
        assert_eq!(faces, vec![FaceTuple::uniform(ClemensEdge::E36, q(rank))]);
        assert!(d.iter().all(|x| x.cone.contains_line() && !x.strictly_feasible));
    }
}

#[test]
fn degeneracy_report_for_named_face() {
    let c = compare_degeneracy(q(1), &face("57,57")).unwrap();
    assert!(c.agree);
    assert!(!c.reference_is_degenerate);
    assert!(c.reference_volume > Rational::zero());
    assert!(c.reference_interior_point.is_some());
    assert!(!c.reference_cone.contains_line());
    assert!(compare_degeneracy(q(1), &face("57")).is_err());
}

#[test]
fn slice_census_counts() {
    for (a1, a0, expected) in [(rat(1, 5), rat(3, 5), 7), (rat(2, 5), rat(7, 10), 11), (rat(3, 5), rat(4, 5), 11)] {
        for a0 in [a0, (rat(1, 1) + &a1) / rat(2, 1), rat(9, 10)] {
            let c = slice_census(&a1, &a0).unwrap();
            assert_eq!(c.positive_count, expected, "a1={a1} a0={a0}");
            assert!(c.fills_rectangle);
            assert_eq!(c.total_area, a1);
            assert!(c.pieces.iter().all(|p| (3..=4).contains(&p.vertices.len())));
        }
    }
    assert!(slice_census(&rat(0, 1), &rat(1, 2)).is_err());
    assert!(slice_census(&rat(3, 4), &rat(1, 2)).is_err());
}

#[test]
fn census_is_invariant_in_a0() {
    for a1 in [rat(1, 5), rat(2, 5), rat(3, 5)] {
        let a = slice_census(&a1, &((rat(1, 1) + &a1) / rat(2, 1))).unwrap();
        let b = slice_census(&a1, &rat(9, 10)).unwrap();
        let fa: Vec<_> = a.pieces.iter().map(|p| p.face.clone()).collect();
        let fb: Vec<_> = b.pieces.iter().map(|p| p.face.clone()).collect();
        assert_eq!(fa, fb);
    }
}

#[test]
fn face_labels_parse() {
    assert_eq!(face("(57),(36)").to_string(), "57,36");
    assert!(FaceTuple::from_str("58").is_err());
    assert!(FaceTuple::from_str("").is_err());
}
