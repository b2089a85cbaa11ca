//! `Ω_π(Πg*)` for the Kirillov–Kostant structure: the crossed product of
//! the enveloping algebra (generated by `e_i = dθ_i`) with `∧g`.

use super::{Check, Report};
use crate::deformed::{DeformedElement, DeformedForms};
use crate::error::Result;
use crate::poisson::{LieStructureConstants, OddPoissonStructure};

fn first_failure(items: impl IntoIterator<Item = Result<Option<String>>>) -> Result<Option<String>> {
    for it in items {
        if let Some(w) = it? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

pub fn crossed_product_verify(c: &LieStructureConstants) -> Result<Report> {
    let pi = OddPoissonStructure::kirillov_kostant(c)?;
    let omega = DeformedForms::new(&pi)?;
    let n = c.dim();
    let theta = |i: usize| omega.coordinate(i);
    let e = |i: usize| omega.dsym(i);
    let combo = |i: usize, j: usize, gen: &dyn Fn(usize) -> DeformedElement| {
        (0..n).fold(omega.zero(), |acc, k| &acc + &gen(k).scale(c.get(i, j, k)))
    };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut report = Report::new(format!("crossed product, dimension {n}"));

    let w = first_failure(pairs.iter().map(|&(i, j)| {
        let lhs = omega.supercommutator(&e(i), &e(j))?;
        let rhs = combo(i, j, &e);
        Ok((lhs != rhs).then(|| format!("[e{}, e{}] = {lhs}, expected {rhs}", i + 1, j + 1)))
    }))?;
    report.push(Check::new("enveloping relations e_i e_j - e_j e_i = c^k_ij e_k", w));

    let w = first_failure(pairs.iter().map(|&(i, j)| {
        let lhs = omega.supercommutator(&e(i), &theta(j))?;
        let rhs = combo(i, j, &theta);
        Ok((lhs != rhs).then(|| format!("[e{}, θ{}] = {lhs}, expected {rhs}", i + 1, j + 1)))
    }))?;
    report.push(Check::new("coadjoint action [e_i, θ_j] = c^k_ij θ_k", w));

    let w = first_failure((0..n).map(|i| {
        let lhs = omega.d(&theta(i))?;
        Ok((lhs != e(i)).then(|| format!("d(θ{}) = {lhs}", i + 1)))
    }))?;
    report.push(Check::new("d(θ_i) = e_i", w));

    // d² on monomials of filtration ≤ 2 and θ-degree ≤ 3
    let mut samples = Vec::new();
    for i in 0..n {
        samples.push(theta(i));
        for j in 0..n {
            samples.push(omega.mul(&theta(i), &theta(j))?);
            samples.push(omega.mul(&theta(i), &e(j))?);
            samples.push(omega.mul(&e(i), &e(j))?);
            for k in 0..n {
                samples.push(omega.product(&[theta(i), theta(j), theta(k)])?);
                samples.push(omega.product(&[theta(i), theta(j), e(k)])?);
            }
        }
    }
    let w = first_failure(samples.iter().map(|a| {
        let dd = omega.d(&omega.d(a)?)?;
        Ok((!dd.is_zero()).then(|| format!("d²({a}) = {dd}")))
    }))?;
    let jacobi = pi.jacobi_check()?.holds;
    report.push(Check::new("d^2 = 0", w).note(if jacobi {
        "Jacobi identity holds"
    } else {
        "Jacobi identity fails"
    }));

    let consistency = omega.consistency_check(50, 7)?;
    report.push(Check::new(
        "associativity of the normal-form product",
        consistency.witness.clone(),
    ));

    let levels = omega.gr_dimension_check(1, 2)?;
    let bad = levels.iter().find(|l| !l.ok()).map(|l| {
        format!(
            "filtration {}: {} normal monomials vs {} free, leading rank {}",
            l.filtration, l.normal_count, l.free_count, l.leading_rank
        )
    });
    report.push(Check::new("Gr is free graded-commutative", bad));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lie_algebras_give_crossed_products() {
        for c in [
            LieStructureConstants::abelian(2),
            LieStructureConstants::sl2(),
            LieStructureConstants::heisenberg(),
        ] {
            let report = crossed_product_verify(&c).unwrap();
            println!("{report}");
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn jacobi_failure_is_witnessed() {
        let report = crossed_product_verify(&LieStructureConstants::sl2_perturbed()).unwrap();
        println!("{report}");
        assert!(!report.passed());
        assert!(!report.check("d^2 = 0").unwrap().passed, "{report}");
    }
}
