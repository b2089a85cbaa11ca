//! Khudaverdian's BV operator on semidensities over odd symplectic spaces,
//! δ-semidensities of linear Lagrangians and their composition.
//!
//! A chart lists `n` Darboux pairs `(x^i, ξ_i)`; its table holds all `x`
//! first, then all `ξ`. Each pair carries a sign `ε_i` so that products
//! `Ȳ₁ × Y₂` (with the form of `Y₁` negated) are charts too:
//! `ω = Σ ε_i dx^i dξ_i` and `Δ = Σ ε_i ∂ᴸ_{x^i} ∂ᴸ_{ξ_i}`.

mod diffop;
mod dist;
mod lagrangian;
mod scalar;
mod transform;

pub use diffop::DiffOp;
pub use dist::{Component, Distribution};
pub use lagrangian::{apply_kernel, compose, compose_relations, delta_l, delta_l_via_frame, Lagrangian};
pub use scalar::ScalarValue;
pub use transform::{catalog, darboux_transform, hamiltonian_flow, sqrt_berezinian, LinearSymplecticMap, MapEntry};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{same_table, SuperPolynomial, TableRef, VarTable, Variable};
use crate::poisson::{CotangentChart, OddPoissonStructure};
use crate::rational::{q, Q};

/// One factor of a product chart: its pair count and whether its
/// symplectic form is negated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub pairs: usize,
    pub bar: bool,
}

#[derive(Debug)]
pub struct DarbouxChart {
    table: TableRef,
    eps: Vec<i64>,
    factors: Vec<Factor>,
}

pub type ChartRef = Arc<DarbouxChart>;

impl PartialEq for DarbouxChart {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && self.eps == other.eps
    }
}

impl Eq for DarbouxChart {}

impl DarbouxChart {
    /// A single space with `n` pairs named `x, ξ` (or `x1.., ξ1..`).
    pub fn standard(n: usize) -> Result<ChartRef> {
        Self::product(&[Factor { pairs: n, bar: false }])
    }

    /// `Ȳ₁ × Y₂`: the chart of morphisms from `Y₁` to `Y₂`.
    pub fn hom(n1: usize, n2: usize) -> Result<ChartRef> {
        Self::product(&[Factor { pairs: n1, bar: true }, Factor { pairs: n2, bar: false }])
    }

    /// Factor `k` has its variables suffixed by `k` primes.
    pub fn product(factors: &[Factor]) -> Result<ChartRef> {
        let mut xs = Vec::new();
        let mut xis = Vec::new();
        let mut eps = Vec::new();
        for (k, f) in factors.iter().enumerate() {
            let suffix = "'".repeat(k);
            for i in 1..=f.pairs {
                let idx = if f.pairs == 1 { String::new() } else { i.to_string() };
                xs.push(Variable::even(format!("x{idx}{suffix}")));
                xis.push(Variable::odd(format!("ξ{idx}{suffix}")));
                eps.push(if f.bar { -1 } else { 1 });
            }
        }
        xs.extend(xis);
        Ok(Arc::new(DarbouxChart {
            table: VarTable::new(xs)?,
            eps,
            factors: factors.to_vec(),
        }))
    }

    pub fn table(&self) -> &TableRef {
        &self.table
    }

    pub fn pairs(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self, i: usize) -> i64 {
        self.eps[i]
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Index of `x^i` in the table.
    pub fn x(&self, i: usize) -> usize {
        i
    }

    /// Index of `ξ_i` in the table.
    pub fn xi(&self, i: usize) -> usize {
        self.pairs() + i
    }

    pub fn x_indices(&self) -> Vec<usize> {
        (0..self.pairs()).collect()
    }

    pub fn xi_indices(&self) -> Vec<usize> {
        (self.pairs()..2 * self.pairs()).collect()
    }

    /// First pair index of factor `k`.
    pub fn factor_offset(&self, k: usize) -> usize {
        self.factors[..k].iter().map(|f| f.pairs).sum()
    }

    pub fn var(&self, i: usize) -> SuperPolynomial {
        SuperPolynomial::var_index(&self.table, i)
    }

    /// The odd Poisson structure with `{x^i, ξ_i} = ε_i`.
    pub fn poisson(&self) -> Result<OddPoissonStructure> {
        let chart = CotangentChart::new(&self.table)?;
        let entries: Vec<_> = (0..self.pairs())
            .map(|i| {
                (
                    self.x(i),
                    self.xi(i),
                    SuperPolynomial::constant(&self.table, q(self.eps[i])),
                )
            })
            .collect();
        OddPoissonStructure::from_brackets(&chart, &entries)
    }

    /// `Δ φ = Σ ε_i ∂ᴸ_{x^i} ∂ᴸ_{ξ_i} φ` on a coefficient.
    pub fn delta_poly(&self, phi: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(&self.table);
        for i in 0..self.pairs() {
            let t = phi.deriv_index(self.xi(i)).deriv_index(self.x(i));
            out = if self.eps[i] < 0 { &out - &t } else { &out + &t };
        }
        out
    }

    /// Coefficient of `ξ_1 ⋯ ξ_n` after integrating out every `ξ`:
    /// `∫ ξ_1 ⋯ ξ_n = 1`.
    pub fn berezin_all(&self, phi: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.berezin_over(phi, &self.xi_indices())
    }

    /// Integrates the listed odd variables, first listed innermost, so that
    /// `∫ ξ_a ξ_b ⋯ F = F` when `F` is free of them.
    pub fn berezin_over(&self, phi: &SuperPolynomial, odd: &[usize]) -> Result<SuperPolynomial> {
        let mut acc = phi.clone();
        for &i in odd {
            acc = acc.berezin_index(i)?;
        }
        Ok(acc)
    }
}

/// A polynomial semidensity `φ √D` relative to a chart's reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semidensity {
    chart: ChartRef,
    coeff: SuperPolynomial,
}

impl Semidensity {
    pub fn new(chart: &ChartRef, coeff: SuperPolynomial) -> Result<Self> {
        if !same_table(coeff.table(), chart.table()) {
            return Err(Error::Structural(
                "semidensity coefficient is not over the chart".into(),
            ));
        }
        Ok(Semidensity {
            chart: chart.clone(),
            coeff,
        })
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn coeff(&self) -> &SuperPolynomial {
        &self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn bv_delta(&self) -> Semidensity {
        Semidensity {
            chart: self.chart.clone(),
            coeff: self.chart.delta_poly(&self.coeff),
        }
    }

    pub fn times(&self, f: &SuperPolynomial) -> Result<Semidensity> {
        Semidensity::new(&self.chart, f.checked_mul(&self.coeff)?)
    }

    pub fn to_distribution(&self) -> Distribution {
        Distribution::from_polynomial(&self.chart, &self.coeff)
    }
}

impl std::fmt::Display for Semidensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.coeff)
    }
}

/// `[Δ, f] s = Δ(f s) − (−1)^{|f|} f Δ(s)`, extended linearly over the
/// parity components of `f`.
pub fn delta_commutator(f: &SuperPolynomial, s: &Semidensity) -> Result<Semidensity> {
    let chart = s.chart();
    let mut out = SuperPolynomial::zero(chart.table());
    for (p, part) in f.parity_components() {
        let a = chart.delta_poly(&part.checked_mul(s.coeff())?);
        let b = &part * &chart.delta_poly(s.coeff());
        out = &out + &(if p.is_odd() { &a + &b } else { &a - &b });
    }
    Semidensity::new(chart, out)
}

/// `L_{X_f} s = X_f(φ) + ½ div(X_f) φ` with `X_f = (−1)^{|f|} {f, ·}`,
/// the sign that makes `L_{X_f} = [Δ, f]`.
pub fn lie_derivative_semidensity(f: &SuperPolynomial, s: &Semidensity) -> Result<Semidensity> {
    let chart = s.chart();
    if !same_table(f.table(), chart.table()) {
        return Err(Error::Structural("hamiltonian is not over the chart".into()));
    }
    let pi = chart.poisson()?;
    let half = Q::new(1.into(), 2.into());
    let mut out = SuperPolynomial::zero(chart.table());
    for (p, part) in f.parity_components() {
        let mut x = pi.hamiltonian_field(&part)?;
        if p.is_odd() {
            x = x.scale(&-Q::from_integer(1.into()));
        }
        let applied = x.apply(s.coeff());
        let div = x.divergence();
        out = &out + &(&applied + &(&div * s.coeff()).scale(&half));
    }
    Semidensity::new(chart, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{random_poly, rng};

    #[test]
    fn delta_on_basic_semidensities() {
        let ch = DarbouxChart::standard(1).unwrap();
        let x = ch.var(0);
        let xi = ch.var(1);
        let s = Semidensity::new(&ch, &x * &xi).unwrap();
        assert_eq!(s.bv_delta().coeff().as_constant(), Some(q(1)));
        let one = Semidensity::new(&ch, SuperPolynomial::one(ch.table())).unwrap();
        assert!(one.bv_delta().is_zero());
    }

    #[test]
    fn product_chart_naming() {
        let ch = DarbouxChart::hom(1, 2).unwrap();
        let names: Vec<_> = ch.table().vars().iter().map(|v| v.name.clone()).collect();
        assert_eq!(names, ["x", "x1'", "x2'", "ξ", "ξ1'", "ξ2'"]);
        assert_eq!((ch.eps(0), ch.eps(1)), (-1, 1));
        assert_eq!(ch.factor_offset(1), 1);
    }

    #[test]
    fn lie_derivative_of_linear_hamiltonians() {
        let ch = DarbouxChart::standard(1).unwrap();
        let mut r = rng(3);
        let vars = [0, 1];
        for _ in 0..20 {
            let phi = random_poly(&mut r, ch.table(), &vars, 4, 4, None);
            let s = Semidensity::new(&ch, phi.clone()).unwrap();
            // [Δ, x] s = ∂ᴸ_ξ φ
            let lx = lie_derivative_semidensity(&ch.var(0), &s).unwrap();
            assert_eq!(lx.coeff(), &phi.deriv_index(1));
            assert_eq!(delta_commutator(&ch.var(0), &s).unwrap(), lx);
        }
        let c = SuperPolynomial::constant(ch.table(), q(4));
        let s = Semidensity::new(&ch, ch.var(0)).unwrap();
        assert!(lie_derivative_semidensity(&c, &s).unwrap().is_zero());
    }
}
