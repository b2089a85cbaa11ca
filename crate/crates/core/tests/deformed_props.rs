use oddsym_core::deformed::DeformedForms;
use oddsym_core::graded::same_table;
use oddsym_core::poisson::{darboux, LieStructureConstants, OddPoissonStructure};
use oddsym_core::testing::{random_parity, random_poly, rng};
use proptest::prelude::*;
use rand::Rng;

fn algebras() -> Vec<DeformedForms> {
    let mut v = vec![DeformedForms::new(&darboux(2, 1).unwrap()).unwrap()];
    for c in [
        LieStructureConstants::sl2(),
        LieStructureConstants::heisenberg(),
        LieStructureConstants::abelian(3),
    ] {
        v.push(DeformedForms::new(&OddPoissonStructure::kirillov_kostant(&c).unwrap()).unwrap());
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn commutation_relation_holds(seed in any::<u64>()) {
        let mut r = rng(seed);
        for a in algebras() {
            let vars: Vec<usize> = (0..a.dim()).collect();
            let p = random_parity(&mut r);
            let f = random_poly(&mut r, a.base(), &vars, 3, 3, Some(p));
            let g = oddsym_core::SuperPolynomial::var_index(a.base(), (seed as usize) % a.dim());
            prop_assert!(a.commutation_defect(&f, &g).unwrap().is_zero());
        }
    }

    #[test]
    fn differential_of_bracket(seed in any::<u64>()) {
        let mut r = rng(seed);
        for a in algebras() {
            let i = r.gen_range(0..a.dim());
            let j = r.gen_range(0..a.dim());
            let dzi = a.dsym(i);
            let dzj = a.dsym(j);
            let lhs = a.supercommutator(&dzi, &dzj).unwrap();
            let br = a.structure().coordinate_bracket(i, j).clone();
            prop_assert_eq!(lhs, a.d_of(&br).unwrap());
        }
    }

    #[test]
    fn leading_symbols_multiply(seed in any::<u64>()) {
        let mut r = rng(seed);
        for a in algebras() {
            let x = a.random_element(&mut r, 2, 2, 2);
            let y = a.random_element(&mut r, 2, 2, 2);
            let (kx, gx) = a.gr_symbol(&x).unwrap();
            let (ky, gy) = a.gr_symbol(&y).unwrap();
            let free = &gx * &gy;
            prop_assume!(!free.is_zero());
            let (k, g) = a.gr_symbol(&a.mul(&x, &y).unwrap()).unwrap();
            prop_assert_eq!(k, kx + ky);
            prop_assert!(same_table(g.table(), a.forms_table()));
            prop_assert_eq!(g, free);
        }
    }

    #[test]
    fn differential_raises_filtration_by_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        for a in algebras() {
            let x = a.random_element(&mut r, 3, 2, 3);
            let dx = a.d(&x).unwrap();
            prop_assert!(dx.is_zero() || dx.filtration_degree() <= x.filtration_degree() + 1);
            prop_assert!(a.d(&dx).unwrap().is_zero());
        }
    }

    #[test]
    fn functions_commute(seed in any::<u64>()) {
        let mut r = rng(seed);
        for a in algebras() {
            let vars: Vec<usize> = (0..a.dim()).collect();
            let pf = random_parity(&mut r);
            let pg = random_parity(&mut r);
            let f = a.function(&random_poly(&mut r, a.base(), &vars, 3, 3, Some(pf))).unwrap();
            let g = a.function(&random_poly(&mut r, a.base(), &vars, 3, 3, Some(pg))).unwrap();
            prop_assume!(!f.is_zero() && !g.is_zero());
            prop_assert!(a.supercommutator(&f, &g).unwrap().is_zero());
        }
    }
}
