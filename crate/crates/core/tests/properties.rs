use dkdv_core::exactnum::{int, rat, Field, Fp, Jet, LaurentSeries, Projective, Rational};
use dkdv_core::lattice::{evolve, evolve_cells, Staircase, Window};
use dkdv_core::mapping::{phi_backward, phi_forward, Direction, MapParams, StateVector};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=50)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| rat(n, d))
}

fn params() -> impl Strategy<Value = MapParams> {
    (small_rational(), small_rational(), 1usize..=8)
        .prop_map(|(a, b, q)| MapParams::new(a, b, q).unwrap())
}

fn fp() -> impl Strategy<Value = Fp> {
    any::<u64>().prop_map(Fp::new)
}

fn finite_nonzero(v: &Projective<Rational>) -> bool {
    v.is_finite() && !v.is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn backward_inverts_forward(
        p in params(),
        raw in prop::collection::vec(small_rational(), 9),
    ) {
        let s = StateVector::new(
            raw[..p.dim()].iter().cloned().map(Projective::Finite).collect::<Vec<_>>(),
        );
        let f = phi_forward(&s, &p).unwrap();
        prop_assume!(f.entries().iter().all(finite_nonzero));
        let back = phi_backward(&f, &p).unwrap();
        prop_assert_eq!(back, s.clone());
        let b = phi_backward(&s, &p).unwrap();
        prop_assume!(b.entries().iter().all(finite_nonzero));
        prop_assert_eq!(phi_forward(&b, &p).unwrap(), s);
    }

    #[test]
    fn valuations_add_under_products(
        v1 in -6i64..6, v2 in -6i64..6,
        c1 in prop::collection::vec(small_rational(), 1..6),
        c2 in prop::collection::vec(small_rational(), 1..6),
    ) {
        let x = LaurentSeries::new(v1, c1.clone(), v1 + c1.len() as i64);
        let y = LaurentSeries::new(v2, c2.clone(), v2 + c2.len() as i64);
        let xy = x.mul(&y);
        prop_assert_eq!(xy.valuation(), Some(v1 + v2));
        prop_assert_eq!(xy.coeff(v1 + v2).unwrap(), &c1[0] * &c2[0]);
        prop_assert_eq!(xy.known_terms(), c1.len().min(c2.len()));
    }

    #[test]
    fn reciprocal_round_trip(
        v in -6i64..6,
        c in prop::collection::vec(small_rational(), 1..7),
    ) {
        let x = LaurentSeries::new(v, c.clone(), v + c.len() as i64);
        let r = x.recip().unwrap();
        prop_assert_eq!(r.valuation(), Some(-v));
        prop_assert_eq!(r.known_terms(), c.len());
        prop_assert_eq!(r.recip().unwrap(), x.clone());
        let one = x.mul(&r);
        prop_assert_eq!(one.valuation(), Some(0));
        prop_assert_eq!(one.coeff(0).unwrap(), int(1));
        for e in 1..one.truncation_order().unwrap() {
            prop_assert_eq!(one.coeff(e).unwrap(), int(0));
        }
    }

    #[test]
    fn prime_field_axioms(x in fp(), y in fp(), z in fp()) {
        prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.add(&x.neg()), Fp::zero());
        if !x.is_zero() {
            prop_assert_eq!(x.mul(&x.inv().unwrap()), Fp::one());
        }
    }

    #[test]
    fn rational_embeds_into_prime_field(x in small_rational(), y in small_rational()) {
        let f = |r: &Rational| Fp::from_rational(r).unwrap();
        prop_assert_eq!(f(&(&x * &y)), f(&x).mul(&f(&y)));
        prop_assert_eq!(f(&(&x - &y)), f(&x).sub(&f(&y)));
        prop_assert_eq!(f(&(&x / &y)), f(&x).div(&f(&y)).unwrap());
    }

    #[test]
    fn jets_follow_the_product_rule(x in fp(), y in fp()) {
        let jx = Jet::variable(x, 0, 2);
        let jy = Jet::variable(y, 1, 2);
        let p = jx.mul(&jy);
        prop_assert_eq!(p.partial(0), y);
        prop_assert_eq!(p.partial(1), x);
        if !x.is_zero() {
            let r = jx.inv().unwrap();
            prop_assert_eq!(r.partial(0), x.mul(&x).inv().unwrap().neg());
        }
    }
}

type State = StateVector<Projective<Rational>>;
type MapStep = fn(&State, &MapParams) -> Result<State, dkdv_core::mapping::MapError>;

/// x_i of the reduced orbit, backward for negative i.
fn orbit_value(
    fwd: &[StateVector<Projective<Rational>>],
    bwd: &[StateVector<Projective<Rational>>],
    q: usize,
    i: i64,
) -> Option<Projective<Rational>> {
    if i >= 0 {
        let i = i as usize;
        if i <= q {
            Some(fwd[0].entries()[i].clone())
        } else {
            fwd.get(i - q).map(|s| s.entries()[q].clone())
        }
    } else {
        bwd.get((-i) as usize).map(|s| s.entries()[0].clone())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lattice_reduces_to_the_mapping(
        q in 2usize..=4,
        a in small_rational(),
        b in small_rational(),
        u in prop::collection::vec(small_rational(), 5),
    ) {
        let p = MapParams::new(a, b, q).unwrap();
        let u = &u[..q + 1];
        let steps = 2 * (10 + q) / q + 6;
        let half = (steps / 2) as i64;
        let anchor = (half, -(q as i64) * half);
        let stair = Staircase::periodic(anchor, u, steps).unwrap();
        let s0 = StateVector::new(u.iter().cloned().map(Projective::Finite).collect::<Vec<_>>());
        let run = |f: MapStep| {
            let mut out = vec![s0.clone()];
            for _ in 0..10 {
                match f(out.last().unwrap(), &p) {
                    Ok(s) => out.push(s),
                    Err(_) => break,
                }
            }
            out
        };
        let fwd = run(phi_forward);
        let bwd = run(phi_backward);
        prop_assume!(fwd.len() == 11 && bwd.len() == 11);
        let w = Window { m_min: -3, m_max: 3, n_min: -12, n_max: 12 + q as i64 };
        let mut checked = 0;
        for dir in [Direction::NE, Direction::SW] {
            let g = match evolve(&stair, &p, dir, w) {
                Ok(g) => g,
                Err(_) => { prop_assume!(false); unreachable!() }
            };
            for (&(m, n), v) in &g.cells {
                let i = n + q as i64 * m;
                if let Some(expect) = orbit_value(&fwd, &bwd, q, i) {
                    prop_assert_eq!(v.limit().unwrap(), expect, "cell ({}, {})", m, n);
                    checked += 1;
                }
            }
        }
        prop_assert!(checked > 40);
    }

    #[test]
    fn southwest_undoes_northeast(
        widths in prop::collection::vec(1usize..=3, 8),
        seed in any::<u64>(),
    ) {
        let p = MapParams::new(int(1), int(1), 1).unwrap();
        let stair = Staircase::random((4, -4), &widths, &[], seed).unwrap();
        let hull = stair.hull();
        let w = Window { m_min: hull.m_min - 2, m_max: hull.m_max + 2, n_min: hull.n_min - 2, n_max: hull.n_max + 2 };
        let ne = match evolve(&stair, &p, Direction::NE, w) {
            Ok(g) => g,
            Err(_) => { prop_assume!(false); unreachable!() }
        };
        // lift the staircase one diagonal step and come back
        let lifted: Vec<((i64, i64), Option<Rational>)> = stair
            .cells()
            .iter()
            .filter_map(|((m, n), _, _)| {
                let v = ne.get(m + 1, n + 1)?.limit().ok()?;
                Some(((m + 1, n + 1), Some(v.finite()?.clone())))
            })
            .collect();
        let sw = evolve_cells(&lifted, &p, Direction::SW, w).unwrap();
        let mut hits = 0;
        for ((m, n), v, _) in stair.cells() {
            if let Some(back) = sw.get(m, n) {
                if !stair.cells().iter().any(|c| c.0 == (m + 1, n + 1)) {
                    prop_assert_eq!(back.limit().unwrap(), Projective::Finite(v));
                    hits += 1;
                }
            }
        }
        prop_assert!(hits > 0);
    }
}
