//! Fibrewise odd Fourier transform between forms on `ℝⁿ` and semidensities
//! on `ΠT*ℝⁿ`: `F(ω) = ∫ ∏_i (1 − dx^i ξ_i) ω D(dx)`, under which `d`
//! becomes `Δ`. The odd measure sits on the right (right derivatives, last
//! variable first); with a left measure `d` would become `(−1)^{n+1}Δ`.

use super::{Check, FormsModel, Report};
use crate::bv::{delta_commutator, lie_derivative_semidensity, ChartRef, DarbouxChart, Semidensity};
use crate::error::{Error, Result};
use crate::graded::{same_table, Substitution, SuperPolynomial, TableRef, VarTable, Variable};
use crate::rational::q;
use crate::testing::{random_poly, rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierDirection {
    FormsToSemidensities,
    SemidensitiesToForms,
}

/// Tables and kernels for one dimension.
#[derive(Clone, Debug)]
pub struct FourierSetup {
    pub forms: FormsModel,
    pub chart: ChartRef,
    joint: TableRef,
    to_semidensities: SuperPolynomial,
    to_forms: SuperPolynomial,
}

impl FourierSetup {
    pub fn new(n: usize) -> Result<Self> {
        let forms = FormsModel::new(n)?;
        let chart = DarbouxChart::standard(n)?;
        let mut vars: Vec<Variable> = forms.table().vars().to_vec();
        vars.extend(chart.xi_indices().iter().map(|&i| chart.table().var(i).clone()));
        let joint = VarTable::new(vars)?;
        let var = |i: usize| SuperPolynomial::var_index(&joint, i);
        let one = SuperPolynomial::one(&joint);
        let mut to_semidensities = one.clone();
        let mut to_forms = one.clone();
        for i in 0..n {
            let (dx, xi) = (var(n + i), var(2 * n + i));
            to_semidensities = &to_semidensities * &(&one - &(&dx * &xi));
            to_forms = &to_forms * &(&one - &(&xi * &dx));
        }
        Ok(FourierSetup {
            forms,
            chart,
            joint,
            to_semidensities,
            to_forms,
        })
    }

    pub fn n(&self) -> usize {
        self.forms.n()
    }
}

/// `F` (forms to semidensities) or its partner `G(s) = ∫ ∏(1 − ξ_i dx^i) s D(ξ)`.
pub fn odd_fourier(setup: &FourierSetup, direction: FourierDirection, s: &SuperPolynomial) -> Result<SuperPolynomial> {
    let n = setup.n();
    let (source, kernel, odd, target): (&TableRef, _, Vec<usize>, &TableRef) = match direction {
        FourierDirection::FormsToSemidensities => (
            setup.forms.table(),
            &setup.to_semidensities,
            (n..2 * n).collect(),
            setup.chart.table(),
        ),
        FourierDirection::SemidensitiesToForms => (
            setup.chart.table(),
            &setup.to_forms,
            (2 * n..3 * n).collect(),
            setup.forms.table(),
        ),
    };
    if !same_table(s.table(), source) {
        return Err(Error::Structural(format!(
            "argument is not over the {} table",
            if direction == FourierDirection::FormsToSemidensities {
                "forms"
            } else {
                "semidensity"
            }
        )));
    }
    let mut acc = kernel * &s.retable(&setup.joint)?;
    for &i in odd.iter().rev() {
        acc = acc.right_deriv_index(i);
    }
    // the integrated variables are gone; the rest map by name
    let images = setup
        .joint
        .vars()
        .iter()
        .map(|v| match target.get(&v.name) {
            Some(j) => SuperPolynomial::var_index(target, j),
            None => SuperPolynomial::zero(target),
        })
        .collect();
    Substitution::new(&setup.joint, target, images)?.apply(&acc)
}

/// `F(dω) = Δ F(ω)` on random forms and `G(F(ω)) = ±ω`.
pub fn fourier_intertwining_check(n: usize, degree: u32, samples: usize, seed: u64) -> Result<Report> {
    let setup = FourierSetup::new(n)?;
    let mut r = rng(seed);
    let vars: Vec<usize> = (0..2 * n).collect();
    let mut report = Report::new(format!("odd Fourier transform, n = {n}"));
    let mut w_d = None;
    let mut w_inv = None;
    let inv_sign = inverse_sign(n);
    for _ in 0..samples {
        let omega = random_poly(&mut r, setup.forms.table(), &vars, degree, 4, None);
        let f = odd_fourier(&setup, FourierDirection::FormsToSemidensities, &omega)?;
        let lhs = odd_fourier(&setup, FourierDirection::FormsToSemidensities, &setup.forms.d(&omega))?;
        let rhs = setup.chart.delta_poly(&f);
        if w_d.is_none() && lhs != rhs {
            w_d = Some(format!("ω = {omega}: F(dω) = {lhs}, ΔF(ω) = {rhs}"));
        }
        let back = odd_fourier(&setup, FourierDirection::SemidensitiesToForms, &f)?;
        if w_inv.is_none() && back != omega.scale(&q(inv_sign)) {
            w_inv = Some(format!("ω = {omega}: G(F(ω)) = {back}"));
        }
    }
    report.push(Check::new("F(dω) = ΔF(ω)", w_d).note(format!("{samples} random forms")));
    report.push(Check::new(
        format!("G(F(ω)) = {}ω", if inv_sign < 0 { "-" } else { "" }),
        w_inv,
    ));
    Ok(report)
}

/// Sign of `G ∘ F`.
pub fn inverse_sign(n: usize) -> i64 {
    if (n * (n - 1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `F ∘ L_v = CARTAN_SIGN · [Δ, v] ∘ F`.
pub const CARTAN_SIGN: i64 = 1;

/// Five polynomial vector fields `Σ v^i(x) ξ_i` for the Cartan shadow, n ≤ 2.
pub fn sample_vector_fields(setup: &FourierSetup) -> Result<Vec<SuperPolynomial>> {
    let t = setup.chart.table().clone();
    let z = |i| SuperPolynomial::var_index(&t, i);
    match setup.n() {
        1 => {
            let (x, k) = (z(0), z(1));
            let one = SuperPolynomial::one(&t);
            Ok(vec![
                k.clone(),
                &x * &k,
                &(&x * &x) * &k,
                &(&one + &x) * &k,
                &(&(&x * &x) * &x) * &k,
            ])
        }
        2 => {
            let (x1, x2, k1, k2) = (z(0), z(1), z(2), z(3));
            Ok(vec![
                k1.clone(),
                &x1 * &k1,
                &(&x2 * &k1) - &(&x1 * &k2),
                &(&x1 * &x1) * &k2,
                &(&(&x1 * &x2) * &k1) + &(&(&x2 * &x2) * &k2),
            ])
        }
        n => Err(Error::Domain(format!(
            "sample vector fields are listed for n ≤ 2, got {n}"
        ))),
    }
}

/// Cartan formula shadow: for vector fields `v = Σ v^i(x) ξ_i`,
/// `F(L_v ω) = ±[Δ, v] F(ω) = ±L_{X_v} F(ω)` with `L_v = [d, i_v]`.
pub fn cartan_shadow_check(n: usize, fields: &[SuperPolynomial], degree: u32) -> Result<Report> {
    let setup = FourierSetup::new(n)?;
    let span = setup.forms.spanning_set(degree);
    let mut report = Report::new(format!("Cartan formula shadow, n = {n}"));
    for v in fields {
        if !same_table(v.table(), setup.chart.table()) {
            return Err(Error::Structural(
                "vector field is not over the semidensity chart".into(),
            ));
        }
        let mut witness = None;
        for omega in &span {
            let lie = setup.forms.d_contract(v, omega)?;
            let lhs = odd_fourier(&setup, FourierDirection::FormsToSemidensities, &lie)?;
            let f = Semidensity::new(
                &setup.chart,
                odd_fourier(&setup, FourierDirection::FormsToSemidensities, omega)?,
            )?;
            let comm = delta_commutator(v, &f)?;
            let lx = lie_derivative_semidensity(v, &f)?;
            let want = comm.coeff().scale(&q(CARTAN_SIGN));
            if lhs != want || comm != lx {
                witness = Some(format!(
                    "ω = {omega}: F(L_v ω) = {lhs}, [Δ, v]F(ω) = {}, L_X F(ω) = {}",
                    comm, lx
                ));
                break;
            }
        }
        report.push(Check::new(format!("v = {v}"), witness));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(setup: &FourierSetup) -> SuperPolynomial {
        odd_fourier(
            setup,
            FourierDirection::FormsToSemidensities,
            &SuperPolynomial::one(setup.forms.table()),
        )
        .unwrap()
    }

    #[test]
    fn transform_of_one_is_the_top_odd_element() {
        let s1 = FourierSetup::new(1).unwrap();
        assert_eq!(unit(&s1).to_string(), "ξ");
        let s2 = FourierSetup::new(2).unwrap();
        assert_eq!(unit(&s2).to_string(), "-ξ1*ξ2");
    }

    #[test]
    fn d_becomes_delta() {
        for n in 1..=2 {
            let report = fourier_intertwining_check(n, 4, 100, 11 + n as u64).unwrap();
            assert!(report.passed(), "{report}");
        }
    }

    // (1 − dx ξ) x dx = x dx, whose right dx-derivative is x
    #[test]
    fn one_form_in_one_dimension() {
        let setup = FourierSetup::new(1).unwrap();
        let t = setup.forms.table();
        let w = &SuperPolynomial::var_index(t, 0) * &SuperPolynomial::var_index(t, 1);
        let f = odd_fourier(&setup, FourierDirection::FormsToSemidensities, &w).unwrap();
        assert_eq!(f.to_string(), "x");
        assert_eq!(setup.chart.delta_poly(&unit(&setup)).to_string(), "0");
    }

    #[test]
    fn wrong_table_is_rejected() {
        let setup = FourierSetup::new(1).unwrap();
        let other = SuperPolynomial::one(setup.chart.table());
        assert!(odd_fourier(&setup, FourierDirection::FormsToSemidensities, &other).is_err());
    }

    #[test]
    fn cartan_formula_shadow() {
        let setup = FourierSetup::new(2).unwrap();
        let fields = sample_vector_fields(&setup).unwrap();
        let report = cartan_shadow_check(2, &fields, 3).unwrap();
        assert_eq!(report.checks.len(), 5);
        assert!(report.passed(), "{report}");
    }
}
