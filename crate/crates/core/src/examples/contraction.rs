//! `Ω_π(ΠT*M)` acting on forms on `M`: multivector fields act by
//! contraction and d-symbols by `dg ↦ [d, i_g]`.

use super::{Check, Report};
use crate::deformed::{DeformedElement, DeformedForms};
use crate::error::{Error, Result};
use crate::graded::{Monomial, Parity, SuperPolynomial, TableRef, VarTable, Variable};
use crate::poisson::{darboux, homogeneous, OddPoissonStructure};
use crate::testing::{random_poly, rng};

/// Sign of `{x^i, ξ_i}` that matches contraction with `ξ_i ↦ ∂/∂(dx^i)`
/// (the Schouten convention).
pub const SCHOUTEN_SIGN: i64 = -1;

/// Polynomial differential forms on `ℝⁿ`: `x^i` even, `dx^i` odd.
#[derive(Clone, Debug)]
pub struct FormsModel {
    table: TableRef,
    n: usize,
}

impl FormsModel {
    pub fn new(n: usize) -> Result<Self> {
        let name = |stem: &str, i: usize| {
            if n == 1 {
                stem.to_string()
            } else {
                format!("{stem}{}", i + 1)
            }
        };
        let mut vars: Vec<Variable> = (0..n).map(|i| Variable::even(name("x", i))).collect();
        vars.extend((0..n).map(|i| Variable::odd(format!("d{}", name("x", i)))));
        Ok(FormsModel {
            table: VarTable::new(vars)?,
            n,
        })
    }

    pub fn table(&self) -> &TableRef {
        &self.table
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// de Rham differential `Σ dx^i ∂_{x^i}`.
    pub fn d(&self, w: &SuperPolynomial) -> SuperPolynomial {
        (0..self.n).fold(SuperPolynomial::zero(&self.table), |acc, i| {
            &acc + &(&SuperPolynomial::var_index(&self.table, self.n + i) * &w.deriv_index(i))
        })
    }

    /// Contraction `i_f` by a multivector field written over a table
    /// `(x^1.., ξ_1..)`: `ξ_{i1}⋯ξ_{ik} ↦ ∂_{dx^{i1}} ∘ ⋯ ∘ ∂_{dx^{ik}}`.
    pub fn contract(&self, f: &SuperPolynomial, w: &SuperPolynomial) -> Result<SuperPolynomial> {
        if f.table().len() != 2 * self.n {
            return Err(Error::Structural("multivector table does not match the forms".into()));
        }
        let mut out = SuperPolynomial::zero(&self.table);
        for (m, c) in f.terms() {
            let mut acc = w.clone();
            for i in (0..self.n).rev() {
                if m.0[self.n + i] == 1 {
                    acc = acc.deriv_index(self.n + i);
                }
            }
            let mut coef = vec![0; 2 * self.n];
            coef[..self.n].copy_from_slice(&m.0[..self.n]);
            out = &out + &(&SuperPolynomial::from_terms(&self.table, [(Monomial(coef), c.clone())]) * &acc);
        }
        Ok(out)
    }

    /// `[d, i_g] = d i_g − (−1)^{|g|} i_g d`.
    pub fn d_contract(&self, g: &SuperPolynomial, w: &SuperPolynomial) -> Result<SuperPolynomial> {
        let mut out = SuperPolynomial::zero(&self.table);
        for (p, part) in g.parity_components() {
            let a = self.d(&self.contract(&part, w)?);
            let b = self.contract(&part, &self.d(w))?;
            out = &out + &(if p.is_odd() { &a + &b } else { &a - &b });
        }
        Ok(out)
    }

    /// Monomial forms `x^a dx^I` with `|a| ≤ max_degree`.
    pub fn spanning_set(&self, max_degree: u32) -> Vec<SuperPolynomial> {
        let mut out = Vec::new();
        let mut coef_parts: Vec<Vec<u32>> = vec![vec![0; self.n]];
        for _ in 0..max_degree {
            let mut next = coef_parts.clone();
            for e in &coef_parts {
                for i in 0..self.n {
                    let mut e2 = e.clone();
                    e2[i] += 1;
                    if !next.contains(&e2) {
                        next.push(e2);
                    }
                }
            }
            coef_parts = next;
        }
        for e in &coef_parts {
            for mask in 0..(1u32 << self.n) {
                let mut m = e.clone();
                m.extend((0..self.n).map(|i| (mask >> i) & 1));
                out.push(SuperPolynomial::from_terms(
                    &self.table,
                    [(Monomial(m), crate::rational::q(1))],
                ));
            }
        }
        out
    }
}

/// The representation of `Ω_π(ΠT*ℝⁿ)` on forms.
pub struct ContractionRep {
    pub forms: FormsModel,
    pub omega: DeformedForms,
}

impl ContractionRep {
    pub fn new(n: usize) -> Result<Self> {
        let pi: OddPoissonStructure = darboux(n, SCHOUTEN_SIGN)?;
        Ok(ContractionRep {
            forms: FormsModel::new(n)?,
            omega: DeformedForms::new(&pi)?,
        })
    }

    /// Image of a normal form `Σ c(z) dz_{j1} ⋯` applied to `w`:
    /// `i_c ∘ [d, i_{z_{j1}}] ∘ ⋯`.
    pub fn act(&self, a: &DeformedElement, w: &SuperPolynomial) -> Result<SuperPolynomial> {
        let dim = self.omega.dim();
        let base = self.omega.base();
        let mut out = SuperPolynomial::zero(self.forms.table());
        for (m, c) in a.as_poly().terms() {
            let mut acc = w.clone();
            for j in (0..dim).rev() {
                for _ in 0..m.0[dim + j] {
                    acc = self.forms.d_contract(&SuperPolynomial::var_index(base, j), &acc)?;
                }
            }
            let coef = SuperPolynomial::from_terms(base, [(Monomial(m.0[..dim].to_vec()), c.clone())]);
            out = &out + &self.forms.contract(&coef, &acc)?;
        }
        Ok(out)
    }
}

fn supercommutator_on(
    rep: &ContractionRep,
    a: &SuperPolynomial,
    pa: Parity,
    b: &SuperPolynomial,
    pb: Parity,
    w: &SuperPolynomial,
) -> Result<SuperPolynomial> {
    // A = i_a, B = [d, i_b]
    let ab = rep.forms.contract(a, &rep.forms.d_contract(b, w)?)?;
    let ba = rep.forms.d_contract(b, &rep.forms.contract(a, w)?)?;
    Ok(if pa.is_odd() && !pb.is_odd() {
        &ab + &ba
    } else {
        &ab - &ba
    })
}

/// Checks the contraction picture on forms of coefficient degree
/// `≤ degree`, with `samples` random multivectors and elements.
pub fn contraction_rep_check(n: usize, degree: u32, samples: usize, seed: u64) -> Result<Report> {
    if n == 0 || n > 3 {
        return Err(Error::Domain("contraction check supports 1 ≤ n ≤ 3".into()));
    }
    let rep = ContractionRep::new(n)?;
    let base = rep.omega.base().clone();
    let pi = rep.omega.structure().clone();
    let span = rep.forms.spanning_set(degree);
    let mut r = rng(seed);
    let vars: Vec<usize> = (0..2 * n).collect();
    let mut report = Report::new(format!("contraction representation on forms, n = {n}"));

    let x = SuperPolynomial::var_index(&base, 0);
    let mut w = None;
    for s in &span {
        let v = supercommutator_on(&rep, &x, Parity::Even, &x, Parity::Even, s)?;
        if !v.is_zero() {
            w = Some(format!("[i_x, [d, i_x]] {s} = {v}"));
            break;
        }
    }
    report.push(Check::new("functions commute: [i_x, [d, i_x]] = 0", w));

    // [i_f, [d, i_g]] = i_{{f,g}}
    let mut witness = None;
    let mut cases: Vec<(SuperPolynomial, SuperPolynomial)> = Vec::new();
    let xi = SuperPolynomial::var_index(&base, n);
    cases.push((xi.clone(), &x * &xi));
    for _ in 0..samples {
        let pf = crate::testing::random_parity(&mut r);
        let pg = crate::testing::random_parity(&mut r);
        cases.push((
            random_poly(&mut r, &base, &vars, 3, 3, Some(pf)),
            random_poly(&mut r, &base, &vars, 3, 3, Some(pg)),
        ));
    }
    'outer: for (f, g) in &cases {
        if f.is_zero() || g.is_zero() {
            continue;
        }
        let (pf, pg) = (homogeneous(f)?, homogeneous(g)?);
        let fg = pi.odd_bracket(f, g)?;
        for s in &span {
            let lhs = supercommutator_on(&rep, f, pf, g, pg, s)?;
            let rhs = rep.forms.contract(&fg, s)?;
            if lhs != rhs {
                witness = Some(format!("f = {f}, g = {g}, on {s}: {lhs} vs {rhs}"));
                break 'outer;
            }
        }
    }
    report.push(Check::new("[i_f, [d, i_g]] = i_{f,g}", witness).note(format!(
        "{} pairs on {} forms",
        cases.len(),
        span.len()
    )));

    // the representation is multiplicative on normal forms
    let mut witness = None;
    'outer2: for _ in 0..samples {
        let a = rep.omega.random_element(&mut r, 2, 1, 2);
        let b = rep.omega.random_element(&mut r, 2, 1, 2);
        let ab = rep.omega.mul(&a, &b)?;
        for s in &span {
            let lhs = rep.act(&ab, s)?;
            let rhs = rep.act(&a, &rep.act(&b, s)?)?;
            if lhs != rhs {
                witness = Some(format!("a = {a}, b = {b}, on {s}: {lhs} vs {rhs}"));
                break 'outer2;
            }
        }
    }
    report.push(Check::new("representation is multiplicative", witness));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schouten_bracket_of_vector_fields_on_the_line() {
        let rep = ContractionRep::new(1).unwrap();
        let base = rep.omega.base().clone();
        let (x, xi) = (
            SuperPolynomial::var_index(&base, 0),
            SuperPolynomial::var_index(&base, 1),
        );
        let bracket = rep.omega.structure().odd_bracket(&xi, &(&x * &xi)).unwrap();
        assert_eq!(bracket, xi);
        // both sides on a(x) + b(x) dx for monomial a, b
        for w in rep.forms.spanning_set(3) {
            let lhs = supercommutator_on(&rep, &xi, Parity::Odd, &(&x * &xi), Parity::Odd, &w).unwrap();
            assert_eq!(lhs, rep.forms.contract(&xi, &w).unwrap(), "on {w}");
        }
    }

    #[test]
    fn contraction_picture_holds() {
        for n in 1..=2 {
            let report = contraction_rep_check(n, 3, 40, 5).unwrap();
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn dimension_is_capped() {
        assert!(contraction_rep_check(4, 1, 1, 0).unwrap_err().is_domain());
    }
}
