use std::collections::HashMap;

use dp4_core::geometry::{rat, Rational};
use dp4_core::surface::{
    cumulative, height, is_integral, on_lines, on_surface, z_divisor_histogram, z_points, CountMethod,
    ProjectivePoint,
};
use dp4_core::torsor::{
    lifted_height, map_to_surface, normalized_points, torsor_count, torsor_fast_histogram,
    torsor_naive_histogram, TorsorError, TorsorMethod, TorsorPoint,
};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(c: [i64; 5]) -> ProjectivePoint<i64> {
    ProjectivePoint::new(c).unwrap()
}

#[test]
fn validation_examples() {
    assert!(TorsorPoint::validate([1, 1, 1, 1, 1, 1, 1, 0, -1]).is_ok());
    assert!(TorsorPoint::validate([1, 1, 1, 1, 1, 1, 1, -2, 1]).is_ok());
    assert_eq!(
        TorsorPoint::validate([1, 1, 1, 1, 1, 1, 1, 1, 1]),
        Err(TorsorError::EquationViolated(3))
    );
    assert_eq!(
        TorsorPoint::validate([1, 0, 1, 1, 2, 1, 1, 0, -8]),
        Err(TorsorError::NonUnitMiddle(5))
    );
}

#[test]
fn descent_examples() {
    let t = |a| TorsorPoint::validate(a).unwrap();
    assert_eq!(map_to_surface(&t([1, 1, 1, 1, 1, 1, 1, 0, -1])), pt([0, 1, 1, -1, 0]));
    assert_eq!(map_to_surface(&t([1, 1, 1, 1, 1, 1, 1, -2, 1])), pt([-2, 1, 1, 1, -2]));
    let x = map_to_surface(&t([1, 2, 1, 1, 1, 1, 1, -1, 1]));
    assert_eq!(x, pt([-2, 4, 2, 1, -1]));
    assert!(on_surface(&x));
    // The tuple with x1 = 1 in place of 4 misses the second equation.
    assert!(!on_surface(&pt([-2, 1, 2, 1, -1])));
    assert_eq!(lifted_height(&t([1, 1, 1, 1, 1, 1, 1, 0, -1])), 1);
    assert_eq!(lifted_height(&t([1, 1, 1, 1, 1, 1, 1, -2, 1])), 2);
    // With every a_i a unit, a1a9 + a2a8 is even and cannot cancel the middle term;
    // the smallest tuples have a zero among a8, a9.
    assert_eq!(lifted_height(&t([1, 1, 1, 1, 1, -1, -1, 1, 0])), 1);
    assert!(TorsorPoint::validate([-1, 1, -1, 1, -1, -1, 1, 1, 1]).is_err());
}

#[test]
fn smallest_torsor_counts() {
    assert_eq!(torsor_count(&rat(1, 1), TorsorMethod::Naive).unwrap().count, 4);
    let fast = torsor_count(&rat(1, 1), TorsorMethod::Fast).unwrap();
    assert_eq!(fast.count, 4);
    assert_eq!(fast.method, CountMethod::TorsorFast);
    assert!(torsor_count(&rat(-1, 1), TorsorMethod::Fast).is_err());
}

#[test]
fn naive_and_fast_agree_up_to_ten_thousand() {
    let naive = cumulative(&torsor_naive_histogram(10_000));
    let fast = cumulative(&torsor_fast_histogram(10_000));
    assert_eq!(naive, fast);
    for b in [1u64, 2, 17, 999, 5000, 10_000] {
        let c = torsor_count(&Rational::from_integer(b.into()), TorsorMethod::Fast).unwrap().count;
        assert_eq!(c, fast[b as usize], "B = {b}");
    }
}

#[test]
fn torsor_and_direct_counts_agree_up_to_2000() {
    let torsor = cumulative(&torsor_fast_histogram(2000));
    let direct = cumulative(&z_divisor_histogram(2000));
    assert_eq!(torsor, direct);
}

#[test]
fn descent_over_small_tuples() {
    let mut valid = 0u64;
    for a1 in -20i64..=20 {
        for a2 in -20i64..=20 {
            for signs in 0..32u32 {
                let u: Vec<i64> = (0..5).map(|k| if signs >> k & 1 == 1 { -1 } else { 1 }).collect();
                let m = u[0] * u[2] * u[4]; // a3 a4^2 a5^3 a7
                for a8 in -20i64..=20 {
                    let a9s: Vec<i64> = if a1 == 0 {
                        if a2 * a8 + m == 0 { (-20..=20).collect() } else { vec![] }
                    } else {
                        let num = -(a2 * a8 + m);
                        if num % a1 == 0 && (num / a1).abs() <= 20 { vec![num / a1] } else { vec![] }
                    };
                    for a9 in a9s {
                        let t = TorsorPoint::validate([a1, a2, u[0], u[1], u[2], u[3], u[4], a8, a9])
                            .expect("equation holds by construction");
                        valid += 1;
                        assert_eq!(Integer::gcd(&(a1 * a9), &(a2 * a8)), 1);
                        if a1 * a2 == 0 {
                            continue;
                        }
                        let x = map_to_surface(&t);
                        assert!(on_surface(&x), "{t}");
                        assert_eq!(is_integral(&x), Ok(true), "{t}");
                        assert!(on_lines(&x).unwrap().is_empty(), "{t}");
                        assert_eq!(height(&x).unwrap(), Rational::from_integer(lifted_height(&t).into()), "{t}");
                    }
                }
            }
        }
    }
    assert!(valid > 10_000);
}

#[test]
fn height_lift_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut checked = 0;
    while checked < 100_000 {
        let a1: i64 = rng.gen_range(-1000..=1000);
        let a2: i64 = rng.gen_range(-1000..=1000);
        if a1 == 0 || a2 == 0 || Integer::gcd(&a1, &a2) != 1 {
            continue;
        }
        let u: [i64; 5] = std::array::from_fn(|_| if rng.gen_bool(0.5) { 1 } else { -1 });
        let m = u[0] * u[2] * u[4];
        // a2 a8 = -m (mod a1)
        let e = Integer::extended_gcd(&a2, &a1);
        let a8 = (-m * e.x).rem_euclid(a1.abs()) + a1.abs() * rng.gen_range(-3..=3);
        let a9 = -(a2 * a8 + m) / a1;
        let t = TorsorPoint::validate([a1, a2, u[0], u[1], u[2], u[3], u[4], a8, a9]).unwrap();
        let x = map_to_surface(&t);
        assert_eq!(height(&x).unwrap(), Rational::from_integer(lifted_height(&t).into()), "{t}");
        checked += 1;
    }
}

#[test]
fn fibers_have_two_normalized_preimages() {
    let mut fibers: HashMap<ProjectivePoint<i64>, u32> = HashMap::new();
    for t in normalized_points(50) {
        assert!(t.is_normalized());
        *fibers.entry(map_to_surface(&t)).or_default() += 1;
    }
    let points = z_points(50);
    assert_eq!(fibers.len(), points.len());
    for p in points {
        assert_eq!(fibers.get(&p.point), Some(&2), "{}", p.point);
    }
}
