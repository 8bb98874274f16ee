use dkdv_core::exactnum::{int, rat, EntrySignature, LaurentSeries, Projective, Rational};
use dkdv_core::mapping::{phi1_closed_form, phi_forward, MapParams, StateVector};
use dkdv_core::singularity::{
    classify_pattern, codim_estimate, dependence_probe, epsilon_iterate, Classification,
};

fn params(a: Rational, b: Rational, q: usize) -> MapParams {
    MapParams::new(a, b, q).unwrap()
}

fn samples(q: usize, salt: i64) -> Vec<Rational> {
    (1..=q as i64 + 1).map(|i| rat(3 * i + salt, 2 * i + 5 + salt)).collect()
}

fn last(run: &[StateVector<LaurentSeries<Rational>>], j: usize) -> LaurentSeries<Rational> {
    run[j].entries().last().unwrap().clone()
}

#[test]
fn confined_open_lengths() {
    for q in 2..=6 {
        let p = params(int(1), int(1), q);
        let pat = classify_pattern(&p, q + 1, 11).unwrap();
        assert_eq!(pat.classification, Classification::ConfinedOpen { length: 2 * q + 1 }, "q={q}");
        let pat = classify_pattern(&p, 2, 11).unwrap();
        assert_eq!(pat.classification, Classification::Cyclic { period: 2 * q }, "q={q}");
    }
}

#[test]
fn unequal_parameters_break_confinement() {
    for (q, b) in (2..=5).flat_map(|q| [(q, int(3)), (q, rat(2, 7)), (q, rat(-5, 3))]) {
        let p = params(int(1), b, q);
        let pat = classify_pattern(&p, q + 1, 5).unwrap();
        assert_eq!(
            pat.classification,
            Classification::Unconfined { period: q + 1, onset: q as i64 },
            "q={q}"
        );
        let pat = classify_pattern(&p, 2, 5).unwrap();
        match pat.classification {
            Classification::Anticonfined { forward_period, backward_period, backward_onset, .. } => {
                assert_eq!(forward_period, q + 1);
                assert_eq!(backward_period, q + 1);
                assert_eq!(backward_onset, -(q as i64));
            }
            c => panic!("q={q}: {c}"),
        }
    }
}

#[test]
fn special_detuning_closes_the_backward_chain() {
    // with b = 3/2 and q = 2 the regular values on the backward chain cycle
    // with period 6 and cancel to an exact zero at step -8
    let p = params(int(1), rat(3, 2), 2);
    let pat = classify_pattern(&p, 2, 5).unwrap();
    let sig = pat.backward_signatures();
    assert_eq!(sig[8].entries[0], EntrySignature::ZeroLike(1));
}

#[test]
fn open_pattern_dependence() {
    let p = params(int(1), int(1), 2);
    let d = dependence_probe(&p, 3, 5, 3, 1).unwrap();
    assert!(d.depends_on.contains(&1));
    let p = params(int(1), int(1), 3);
    let d = dependence_probe(&p, 4, 5, 3, 1).unwrap();
    assert!(d.depends_on.contains(&3));
    assert!(!d.depends_on.contains(&1));
    for q in 2..=4 {
        let p = params(int(1), int(1), q);
        for k in [2, q + 1] {
            let d = dependence_probe(&p, k, 0, 3, 2).unwrap();
            let all: Vec<usize> = (1..=q + 1).filter(|&i| i != k).collect();
            assert_eq!(d.depends_on.into_iter().collect::<Vec<_>>(), all);
        }
    }
}

fn open_profile(q: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|j| match j {
            0 => 1,
            j if j == q || j == q + 1 => 3,
            j if j <= 2 * q => 2,
            _ => 1,
        })
        .collect()
}

fn cyclic_profile(q: usize, len: usize) -> Vec<usize> {
    (0..len).map(|j| if (1..=q + 1).contains(&(j % (2 * q))) { 2 } else { 1 }).collect()
}

fn unconfined_profile(q: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|j| match j {
            0 => 1,
            j if j < q => 2,
            _ => 3,
        })
        .collect()
}

#[test]
fn codimension_profiles() {
    for q in 2..=5 {
        let n = 3 * q + 4;
        let eq = params(int(1), int(1), q);
        let c3 = codim_estimate(&eq, q + 1, n, 0, 3, 7).unwrap();
        let c6 = codim_estimate(&eq, q + 1, n, 0, 6, 8).unwrap();
        assert_eq!(c3, c6);
        assert_eq!(c3.forward, open_profile(q, n + 1), "open q={q}");
        let c = codim_estimate(&eq, 2, n, 0, 3, 7).unwrap();
        assert_eq!(c.forward, cyclic_profile(q, n + 1), "cyclic q={q}");
        let ne = params(int(1), int(3), q);
        let c = codim_estimate(&ne, q + 1, n, 4, 3, 7).unwrap();
        assert_eq!(c.forward, unconfined_profile(q, n + 1), "unconfined q={q}");
        assert_eq!(c.backward, vec![1; 5]);
        let c = codim_estimate(&ne, 2, n, n, 3, 7).unwrap();
        assert!(c.forward[1..].iter().all(|&d| d == 2));
        let ones = q - 1;
        assert!(c.backward[..ones].iter().all(|&d| d == 1), "q={q} {:?}", c.backward);
        assert!(c.backward[ones..].iter().all(|&d| d == 2), "q={q} {:?}", c.backward);
    }
}

#[test]
fn interior_zero_reproduces_the_second_coordinate_pattern() {
    let q = 5;
    for (a, b) in [(int(1), int(1)), (int(1), rat(3, 2))] {
        let p = params(a, b, q);
        let base = classify_pattern(&p, 2, 3).unwrap().forward_signatures();
        for k in 3..=q {
            let sig = classify_pattern(&p, k, 3).unwrap().forward_signatures();
            let shift = k - 2;
            for j in 1..base.len() - shift {
                assert_eq!(sig[j + shift].entries, base[j].entries, "k={k} j={j}");
            }
        }
    }
}

/// Exact value of the last coordinate of x_{q−1} on the hypersurface
/// u_{q+1} = 0, by projective iteration.
fn f_value(p: &MapParams, u: &[Rational]) -> Rational {
    let mut s: Vec<Projective<Rational>> = u.iter().cloned().map(Projective::Finite).collect();
    *s.last_mut().unwrap() = Projective::zero();
    let mut s = StateVector::new(s);
    for _ in 0..p.q - 1 {
        s = phi_forward(&s, p).unwrap();
    }
    s.entries().last().unwrap().finite().unwrap().clone()
}

#[test]
fn second_zero_expansion() {
    for q in 3..=5 {
        for salt in 0..3 {
            let p = params(int(1), int(1), q);
            let u = samples(q, salt);
            let f = f_value(&p, &u);
            let run = epsilon_iterate(&p, q + 1, &u, q + 1, 0, 8).unwrap();
            let z = last(&run.forward, q + 1);
            assert_eq!(z.valuation(), Some(1));
            assert_eq!(z.coeff(1).unwrap(), int(-1));
            let expect = -(&u[q - 1] + int(1) / &u[1] + int(1) / &f - &u[0]);
            assert_eq!(z.coeff(2).unwrap(), expect, "q={q} salt={salt}");
        }
    }
}

#[test]
fn detuned_expansion_coefficients() {
    for q in 3..=5 {
        for b in [rat(3, 2), int(3), rat(-2, 5)] {
            let p = params(int(1), b.clone(), q);
            let delta = &b + int(1) / &b - int(1);
            let run = epsilon_iterate(&p, q + 1, &samples(q, 1), 2 * q + 1, 0, 8).unwrap();
            let z = last(&run.forward, q + 1);
            assert_eq!(z.coeff(1).unwrap(), -delta.clone());
            let inf3 = last(&run.forward, q + 2);
            assert_eq!(inf3.valuation(), Some(-1));
            let ratio = int(1) - int(1) / &delta;
            assert_eq!(inf3.coeff(-1).unwrap(), ratio.clone());
            let inf4 = last(&run.forward, 2 * q + 1);
            assert_eq!(inf4.coeff(-1).unwrap(), -(&b * &ratio));
        }
    }
}

#[test]
fn detuning_constant_example() {
    let b = int(2);
    let delta = &b + int(1) / &b - int(1);
    assert_eq!(delta, rat(3, 2));
}

#[test]
fn first_order_orbit_matches_closed_form() {
    for seed in 0..10i64 {
        let a = rat(seed + 2, 3);
        let b = rat(5, seed + 4);
        let p = params(a.clone(), b.clone(), 1);
        let u1 = rat(2 * seed + 1, 7);
        let u2 = rat(-seed - 3, 5);
        let mut s = StateVector::new(vec![Projective::Finite(u1.clone()), Projective::Finite(u2.clone())]);
        for n in 0..=20usize {
            let closed = phi1_closed_form(&u1, &u2, n, &p).unwrap();
            let got: Vec<Rational> = s.entries().iter().map(|v| v.finite().unwrap().clone()).collect();
            assert_eq!(closed.entries(), &got[..], "seed={seed} n={n}");
            let invariant = &got[0] * &got[1];
            let expect = &u1 * &u2 + Rational::from_integer((n as i64).into()) * (&a - &b);
            assert_eq!(invariant, expect);
            s = phi_forward(&s, &p).unwrap();
        }
    }
}

#[test]
fn entry_signature_orders() {
    let p = params(int(1), int(1), 2);
    let pat = classify_pattern(&p, 3, 1).unwrap();
    let s1 = &pat.forward[1].signature.entries;
    assert_eq!(s1[2], EntrySignature::InfLike(1));
}
