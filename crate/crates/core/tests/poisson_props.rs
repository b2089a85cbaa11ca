use oddsym_core::poisson::{darboux, LieStructureConstants, OddPoissonStructure};
use oddsym_core::testing::{random_parity, random_poly, rng, SuiteRng};
use oddsym_core::{Parity, SuperPolynomial};
use proptest::prelude::*;

fn structures() -> Vec<OddPoissonStructure> {
    vec![
        darboux(2, 1).unwrap(),
        OddPoissonStructure::kirillov_kostant(&LieStructureConstants::sl2()).unwrap(),
        OddPoissonStructure::kirillov_kostant(&LieStructureConstants::heisenberg()).unwrap(),
    ]
}

fn sample(r: &mut SuiteRng, pi: &OddPoissonStructure) -> (Parity, SuperPolynomial) {
    let vars: Vec<usize> = (0..pi.base().len()).collect();
    loop {
        let p = random_parity(r);
        let f = random_poly(r, pi.base(), &vars, 3, 3, Some(p));
        if !f.is_zero() {
            return (p, f);
        }
    }
}

fn signed(neg: bool, p: SuperPolynomial) -> SuperPolynomial {
    if neg {
        -&p
    } else {
        p
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn odd_symmetry(seed in any::<u64>()) {
        let mut r = rng(seed);
        for pi in structures() {
            let (pf, f) = sample(&mut r, &pi);
            let (pg, g) = sample(&mut r, &pi);
            let fg = pi.odd_bracket(&f, &g).unwrap();
            let gf = pi.odd_bracket(&g, &f).unwrap();
            // {f,g} = −(−1)^{(|f|+1)(|g|+1)} {g,f}
            let neg = !Parity::koszul(pf.flip(), pg.flip());
            prop_assert_eq!(fg, signed(neg, gf));
        }
    }

    #[test]
    fn odd_leibniz(seed in any::<u64>()) {
        let mut r = rng(seed);
        for pi in structures() {
            let (pf, f) = sample(&mut r, &pi);
            let (pg, g) = sample(&mut r, &pi);
            let (_, h) = sample(&mut r, &pi);
            let lhs = pi.odd_bracket(&f, &(&g * &h)).unwrap();
            let a = &pi.odd_bracket(&f, &g).unwrap() * &h;
            let b = &g * &pi.odd_bracket(&f, &h).unwrap();
            let rhs = &a + &signed(Parity::koszul(pf.flip(), pg), b);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn odd_jacobi(seed in any::<u64>()) {
        let mut r = rng(seed);
        for pi in structures() {
            let (_, f) = sample(&mut r, &pi);
            let (_, g) = sample(&mut r, &pi);
            let (_, h) = sample(&mut r, &pi);
            prop_assert!(pi.jacobiator(&f, &g, &h).unwrap().is_zero());
        }
    }

    #[test]
    fn canonical_bracket_axioms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pi = darboux(2, 1).unwrap();
        let ch = pi.chart();
        let vars: Vec<usize> = (0..ch.full().len()).collect();
        let draw = |r: &mut SuiteRng| loop {
            let p = random_parity(r);
            let f = random_poly(r, ch.full(), &vars, 3, 3, Some(p));
            if !f.is_zero() {
                return (p, f);
            }
        };
        let (pf, f) = draw(&mut r);
        let (pg, g) = draw(&mut r);
        let (_, h) = draw(&mut r);
        let fg = ch.canonical_bracket(&f, &g).unwrap();
        let gf = ch.canonical_bracket(&g, &f).unwrap();
        prop_assert_eq!(fg.clone(), signed(!Parity::koszul(pf, pg), gf));
        let lhs = ch.canonical_bracket(&f, &(&g * &h)).unwrap();
        let rhs = &(&fg * &h) + &signed(Parity::koszul(pf, pg), &g * &ch.canonical_bracket(&f, &h).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn failed_jacobi_converts_to_coordinate_triple() {
    let pi = OddPoissonStructure::kirillov_kostant(&LieStructureConstants::sl2_perturbed()).unwrap();
    let report = pi.jacobi_check().unwrap();
    assert!(!report.holds);
    let (i, j, k, w) = pi.jacobi_violation().unwrap().expect("a coordinate triple");
    let c = |n| pi.chart().coordinate(n);
    assert_eq!(pi.jacobiator(&c(i), &c(j), &c(k)).unwrap(), w);
    assert!(!w.is_zero());
}
