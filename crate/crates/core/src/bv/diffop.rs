//! Polynomial-coefficient differential operators `Σ c_m ∂^m` on a chart.
//!
//! `∂^m = ∂_{z_0}^{m_0} ∂_{z_1}^{m_1} ⋯` in table order (the last letter
//! acts first); coefficients stand to the left.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use super::{ChartRef, Distribution};
use crate::error::{Error, Result};
use crate::graded::{render_monomial, same_table, Monomial, Parity, SuperPolynomial};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    chart: ChartRef,
    terms: BTreeMap<Vec<u32>, SuperPolynomial>,
}

impl DiffOp {
    pub fn zero(chart: &ChartRef) -> Self {
        DiffOp {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn multiplication(chart: &ChartRef, c: &SuperPolynomial) -> Result<Self> {
        if !same_table(c.table(), chart.table()) {
            return Err(Error::Structural("operator coefficient is not over the chart".into()));
        }
        let mut op = Self::zero(chart);
        op.add_term(vec![0; chart.table().len()], c.clone());
        Ok(op)
    }

    pub fn identity(chart: &ChartRef) -> Self {
        Self::multiplication(chart, &SuperPolynomial::one(chart.table())).expect("same chart")
    }

    /// `∂ᴸ` by table variable `var`.
    pub fn partial(chart: &ChartRef, var: usize) -> Result<Self> {
        let n = chart.table().len();
        if var >= n {
            return Err(Error::Structural("no such chart variable".into()));
        }
        let mut m = vec![0; n];
        m[var] = 1;
        let mut op = Self::zero(chart);
        op.add_term(m, SuperPolynomial::one(chart.table()));
        Ok(op)
    }

    /// The BV operator `Σ ε_i ∂_{x^i} ∂_{ξ_i}`.
    pub fn delta(chart: &ChartRef) -> Self {
        let mut op = Self::zero(chart);
        for i in 0..chart.pairs() {
            let mut m = vec![0; chart.table().len()];
            m[chart.x(i)] = 1;
            m[chart.xi(i)] = 1;
            op.add_term(
                m,
                SuperPolynomial::constant(chart.table(), Q::from_integer(chart.eps(i).into())),
            );
        }
        op
    }

    /// Builds `Σ c ∂^m` from explicit terms; odd exponents above 1 are
    /// rejected.
    pub fn from_terms(chart: &ChartRef, terms: impl IntoIterator<Item = (Vec<u32>, SuperPolynomial)>) -> Result<Self> {
        let t = chart.table();
        let mut op = Self::zero(chart);
        for (m, c) in terms {
            if m.len() != t.len() || m.iter().enumerate().any(|(i, &e)| t.is_odd(i) && e > 1) {
                return Err(Error::Structural("malformed derivative monomial".into()));
            }
            if !same_table(c.table(), t) {
                return Err(Error::Structural("operator coefficient is not over the chart".into()));
            }
            op.add_term(m, c);
        }
        Ok(op)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, SuperPolynomial> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Vec<u32>, c: SuperPolynomial) {
        if c.is_zero() {
            return;
        }
        let e = self
            .terms
            .entry(m.clone())
            .or_insert_with(|| SuperPolynomial::zero(c.table()));
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn derivative_parity(&self, m: &[u32]) -> Parity {
        let t = self.chart.table();
        let odd: u32 = m
            .iter()
            .enumerate()
            .filter(|(i, _)| t.is_odd(*i))
            .map(|(_, &e)| e)
            .sum();
        Parity::from_bit(odd % 2)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.scale(s));
        }
        out
    }

    /// `∂_z ∘ self`, normal ordered.
    fn left_partial(&self, z: usize) -> Self {
        let t = self.chart.table();
        let z_odd = t.is_odd(z);
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.deriv_index(z));
            if z_odd && m[z] == 1 {
                continue;
            }
            // move ∂_z past the odd letters standing before position z
            let passed: u32 = (0..z).filter(|&j| t.is_odd(j)).map(|j| m[j]).sum();
            let mut m2 = m.clone();
            m2[z] += 1;
            for (p, part) in c.parity_components() {
                let mut neg = z_odd && p.is_odd();
                if z_odd && passed % 2 == 1 {
                    neg = !neg;
                }
                out.add_term(m2.clone(), if neg { -&part } else { part });
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if *self.chart != *other.chart {
            return Err(Error::Structural("operators live on different charts".into()));
        }
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            let mut acc = other.clone();
            for (z, &e) in m.iter().enumerate().rev() {
                for _ in 0..e {
                    acc = acc.left_partial(z);
                }
            }
            for (k, d) in acc.terms {
                out.add_term(k, c * &d);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, phi: &SuperPolynomial) -> Result<SuperPolynomial> {
        if !same_table(phi.table(), self.chart.table()) {
            return Err(Error::Structural("argument is not over the chart".into()));
        }
        let mut out = SuperPolynomial::zero(phi.table());
        for (m, c) in &self.terms {
            let mut acc = phi.clone();
            for (z, &e) in m.iter().enumerate().rev() {
                for _ in 0..e {
                    acc = acc.deriv_index(z);
                }
            }
            out = &out + &(c * &acc);
        }
        Ok(out)
    }

    pub fn apply_distribution(&self, s: &Distribution) -> Result<Distribution> {
        let mut out = Distribution::zero(s.chart());
        for (m, c) in &self.terms {
            let mut acc = s.clone();
            for (z, &e) in m.iter().enumerate().rev() {
                for _ in 0..e {
                    acc = acc.partial(z)?;
                }
            }
            out = out.add(&acc.times_poly(c)?)?;
        }
        Ok(out)
    }

    /// Formal adjoint for `∫ (Pα) β = (−1)^{|P||α|} ∫ α (P*β)`:
    /// `c* = c`, `∂* = −∂` for even and odd letters alike, and
    /// `(PQ)* = (−1)^{|P||Q|} Q* P*`.
    pub fn adjoint(&self) -> Result<Self> {
        let t = self.chart.table();
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            let letters: Vec<usize> = m
                .iter()
                .enumerate()
                .flat_map(|(z, &e)| std::iter::repeat_n(z, e as usize))
                .collect();
            for (p, part) in c.parity_components() {
                // word c ∂_{a1} ⋯ ∂_{ak} reversed: ∂_{ak} ⋯ ∂_{a1} c
                let mut parities: Vec<bool> = vec![p.is_odd()];
                parities.extend(letters.iter().map(|&z| t.is_odd(z)));
                let mut swaps = 0usize;
                for i in 0..parities.len() {
                    for j in i + 1..parities.len() {
                        if parities[i] && parities[j] {
                            swaps += 1;
                        }
                    }
                }
                let mut acc = Self::multiplication(&self.chart, &part)?;
                for &z in &letters {
                    acc = acc.left_partial(z);
                }
                if (swaps + letters.len()) % 2 == 1 {
                    acc = acc.scale(&-Q::one());
                }
                out = out.add(&acc);
            }
        }
        Ok(out)
    }

    /// Parity if homogeneous.
    pub fn parity(&self) -> Option<Parity> {
        let mut seen = None;
        for (m, c) in &self.terms {
            for (p, _) in c.parity_components() {
                let total = p + self.derivative_parity(m);
                match seen {
                    None => seen = Some(total),
                    Some(s) if s != total => return None,
                    _ => {}
                }
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let t = self.chart.table();
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let d: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        let base = format!("d/d{}", render_monomial(t, &Monomial::var(t.len(), i)));
                        if e == 1 {
                            base
                        } else {
                            format!("({base})^{e}")
                        }
                    })
                    .collect();
                let coef = if c.len() == 1 { c.to_string() } else { format!("({c})") };
                if d.is_empty() {
                    coef
                } else if c.as_constant().is_some_and(|v| v.is_one()) {
                    d.join(" ")
                } else {
                    format!("{coef} {}", d.join(" "))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
