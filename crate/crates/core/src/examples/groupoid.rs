//! Convolution algebra of the pair groupoid `X̄ × X` for `X = ΠT*ℝⁿ`:
//! kernels supported on the diagonal, multiplied by `compose`, realize
//! `Ω_π(X)` with functions acting by multiplication and `dz` by `[Δ, z]`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Check, Report};
use crate::bv::{compose, delta_l, ChartRef, DarbouxChart, Distribution, Lagrangian};
use crate::deformed::{DeformedElement, DeformedForms};
use crate::error::{Error, Result};
use crate::graded::{Monomial, Parity, Substitution, SuperPolynomial};
use crate::linalg::{rank, Mat};
use crate::poisson::darboux;
use crate::rational::Q;

/// The convolution-side differential is `(−1)^n Δ` on kernels over
/// `X̄ × X`: `δ_diag` has parity `n`, so a kernel's parity is that of its
/// operator shifted by `n`. With `{x^i, ξ_i} = 1` this is the sign that
/// intertwines it with `d`.
pub fn convolution_d_sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub struct PairGroupoid {
    n: usize,
    chart: ChartRef,
    omega: DeformedForms,
    unit: Distribution,
    dsyms: Vec<Distribution>,
}

impl PairGroupoid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 2 {
            return Err(Error::Domain("the pair-groupoid demo supports n = 1 or 2".into()));
        }
        let chart = DarbouxChart::hom(n, n)?;
        let omega = DeformedForms::new(&darboux(n, 1)?)?;
        let unit = delta_l(&Lagrangian::diagonal(n)?)?;
        let mut g = PairGroupoid {
            n,
            chart,
            omega,
            unit,
            dsyms: Vec::new(),
        };
        g.dsyms = (0..2 * n)
            .map(|j| {
                let k = g.function_kernel(&SuperPolynomial::var_index(g.omega.base(), j))?;
                g.differential(&k)
            })
            .collect::<Result<_>>()?;
        Ok(g)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn algebra(&self) -> &DeformedForms {
        &self.omega
    }

    /// `δ_diag`, the unit.
    pub fn unit(&self) -> &Distribution {
        &self.unit
    }

    /// Convolution product: `compose` along the pair-groupoid relation.
    pub fn mul(&self, a: &Distribution, b: &Distribution) -> Result<Distribution> {
        compose(a, b)
    }

    pub fn differential(&self, k: &Distribution) -> Result<Distribution> {
        Ok(k.bv_delta()?.scale(&Q::from_integer(convolution_d_sign(self.n).into())))
    }

    /// `f(x, ξ) δ_diag` for a function on `X`. On the diagonal `ξ` and `ξ'`
    /// agree up to multiples of `ξ' − ξ`, which `δ_diag` kills.
    pub fn function_kernel(&self, f: &SuperPolynomial) -> Result<Distribution> {
        self.unit.times_poly(&f.retable(self.chart.table())?)
    }

    /// Image of a normal form: `c(z) dz_{j1} ⋯ ↦ K_c ⋆ D_{j1} ⋆ ⋯`.
    pub fn realize(&self, a: &DeformedElement) -> Result<Distribution> {
        let dim = 2 * self.n;
        let base = self.omega.base();
        let mut out = Distribution::zero(&self.chart);
        for (m, c) in a.as_poly().terms() {
            let coef = SuperPolynomial::from_terms(base, [(Monomial(m.0[..dim].to_vec()), c.clone())]);
            let mut acc = self.function_kernel(&coef)?;
            for j in 0..dim {
                for _ in 0..m.0[dim + j] {
                    acc = self.mul(&acc, &self.dsyms[j])?;
                }
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Distribution degree of a diagonal kernel: δ-derivatives across the
    /// even diagonal plus missing powers of `ξ' − ξ`. `None` if the kernel
    /// is not supported on the diagonal.
    pub fn degree(&self, k: &Distribution) -> Result<Option<u32>> {
        let n = self.n;
        let table = self.chart.table();
        // ξ'_i ↦ ξ'_i + ξ_i rewrites coefficients in u = ξ' − ξ
        let images = (0..4 * n)
            .map(|i| {
                let v = SuperPolynomial::var_index(table, i);
                if i >= 3 * n {
                    &v + &SuperPolynomial::var_index(table, i - n)
                } else {
                    v
                }
            })
            .collect();
        let shift = Substitution::new(table, table, images)?;
        let diag = self.unit.components();
        let mut best = None;
        for comp in k.components() {
            if comp.forms != diag[0].forms || comp.gaussian.iter().flatten().any(|v| !v.is_zero()) {
                return Ok(None);
            }
            for (alpha, c) in &comp.terms {
                let order: u32 = alpha.iter().sum();
                for m in shift.apply(c)?.terms().keys() {
                    let du: u32 = m.0[3 * n..].iter().sum();
                    let d = order + n as u32 - du;
                    best = Some(best.map_or(d, |b: u32| b.max(d)));
                }
            }
        }
        Ok(best)
    }

    /// Normal basis with coefficient degree ≤ 1 and filtration ≤ `max_filtration`.
    pub fn basis(&self, max_filtration: u32) -> Vec<DeformedElement> {
        (0..=max_filtration)
            .flat_map(|k| self.omega.normal_basis(1, k))
            .map(|m| {
                let p = SuperPolynomial::from_terms(self.omega.forms_table(), [(m, Q::one())]);
                self.omega
                    .from_normal_form(&p)
                    .expect("normal basis elements are normal")
            })
            .collect()
    }

    fn coordinates(k: &Distribution, index: &mut BTreeMap<String, usize>) -> BTreeMap<usize, Q> {
        let mut v = BTreeMap::new();
        for comp in k.components() {
            for (alpha, c) in &comp.terms {
                for (m, q) in c.terms() {
                    let key = format!("{:?}|{:?}|{:?}|{:?}", comp.forms, comp.gaussian, alpha, m.0);
                    let len = index.len();
                    v.insert(*index.entry(key).or_insert(len), q.clone());
                }
            }
        }
        v
    }

    /// Rank of a family of kernels as vectors over the rationals.
    pub fn rank_of(kernels: &[Distribution]) -> usize {
        let mut index = BTreeMap::new();
        let sparse: Vec<_> = kernels.iter().map(|k| Self::coordinates(k, &mut index)).collect();
        let cols = index.len();
        let m: Mat = sparse
            .iter()
            .map(|v| (0..cols).map(|i| v.get(&i).cloned().unwrap_or_else(Q::zero)).collect())
            .collect();
        rank(&m, cols)
    }
}

fn supercommutator(
    g: &PairGroupoid,
    a: &Distribution,
    pa: Parity,
    b: &Distribution,
    pb: Parity,
) -> Result<Distribution> {
    let ab = g.mul(a, b)?;
    let ba = g.mul(b, a)?;
    Ok(if pa.is_odd() && pb.is_odd() {
        ab.add(&ba)?
    } else {
        ab.sub(&ba)?
    })
}

/// Verifies the realization of `Ω_π(ΠT*ℝⁿ)` on diagonal kernels through
/// filtration `max_filtration`.
pub fn pair_groupoid_demo(n: usize, max_filtration: u32) -> Result<Report> {
    let g = PairGroupoid::new(n)?;
    run(&g, max_filtration)
}

fn run(g: &PairGroupoid, max_filtration: u32) -> Result<Report> {
    let n = g.n;
    let omega = &g.omega;
    let mut report = Report::new(format!("pair groupoid of ΠT*ℝ^{n}"));

    let uu = g.mul(&g.unit, &g.unit)?;
    report.push(Check::new(
        "δ_diag ∘ δ_diag = δ_diag",
        (uu != g.unit).then(|| format!("got {uu}")),
    ));

    // the defining relation on both sides: [K_f, D_g] = K_{f,g}
    let mut w = None;
    'gen: for i in 0..2 * n {
        for j in 0..2 * n {
            let zi = SuperPolynomial::var_index(omega.base(), i);
            let zj = SuperPolynomial::var_index(omega.base(), j);
            let (pi, pj) = (omega.base().parity(i), omega.dsym_parity(j));
            let lhs = supercommutator(g, &g.function_kernel(&zi)?, pi, &g.dsyms[j], pj)?;
            let bracket = omega.structure().odd_bracket(&zi, &zj)?;
            let rhs = g.function_kernel(&bracket)?;
            if lhs != rhs {
                w = Some(format!("[K_{zi}, D_{zj}] = {lhs}, K_{{{zi},{zj}}} = {rhs}"));
                break 'gen;
            }
        }
    }
    report.push(Check::new("[K_f, D_g] = K_{f,g} on coordinates", w));

    if n == 1 {
        let (x, dxi) = (omega.coordinate(0), omega.dsym(1));
        let lhs = g.mul(
            &g.dsyms[1],
            &g.function_kernel(&SuperPolynomial::var_index(omega.base(), 0))?,
        )?;
        let nf = omega.mul(&dxi, &x)?;
        let rhs = g.realize(&nf)?;
        report.push(Check::new(
            "D_ξ ∘ K_x = Φ(x·dξ − 1)",
            (lhs != rhs).then(|| format!("D_ξ ∘ K_x = {lhs}, Φ({nf}) = {rhs}")),
        ));
    }

    let basis = g.basis(max_filtration);
    let images: Vec<Distribution> = basis.iter().map(|a| g.realize(a)).collect::<Result<_>>()?;

    let mut w = None;
    for (a, k) in basis.iter().zip(&images) {
        let d = g.degree(k)?;
        if d != Some(a.filtration_degree()) {
            w = Some(format!("Φ({a}) has degree {d:?}"));
            break;
        }
    }
    report.push(Check::new("filtration = distribution degree", w));

    let r = PairGroupoid::rank_of(&images);
    report.push(Check::new(
        "realization is injective",
        (r != images.len()).then(|| format!("rank {r} for {} basis elements", images.len())),
    ));

    let mut closure = None;
    let mut mult = None;
    let mut leading = None;
    let mut count = 0;
    for (a, ka) in basis.iter().zip(&images) {
        for (b, kb) in basis.iter().zip(&images) {
            if a.filtration_degree() + b.filtration_degree() > max_filtration {
                continue;
            }
            count += 1;
            let prod = g.mul(ka, kb)?;
            let deg = g.degree(&prod)?;
            if closure.is_none() && deg.is_none() && !prod.is_zero() {
                closure = Some(format!("Φ({a}) ⋆ Φ({b}) = {prod}"));
            }
            let ab = omega.mul(a, b)?;
            if mult.is_none() {
                let want = g.realize(&ab)?;
                if prod != want {
                    mult = Some(format!("a = {a}, b = {b}: Φ(a) ⋆ Φ(b) = {prod}, Φ(ab) = {want}"));
                }
            }
            if leading.is_none() && !ab.is_zero() && deg != Some(a.filtration_degree() + b.filtration_degree()) {
                let (k, _) = omega.gr_symbol(&ab)?;
                if k == a.filtration_degree() + b.filtration_degree() {
                    leading = Some(format!("a = {a}, b = {b}: degree {deg:?}"));
                }
            }
        }
    }
    report.push(Check::new("products stay on the diagonal", closure));
    report.push(Check::new("Φ(ab) = Φ(a) ⋆ Φ(b)", mult).note(format!("{count} pairs")));
    report.push(Check::new("degrees add on leading terms", leading));

    let mut w = None;
    for (a, k) in basis.iter().zip(&images) {
        let lhs = g.realize(&omega.d(a)?)?;
        let rhs = g.differential(k)?;
        if lhs != rhs {
            w = Some(format!("a = {a}: Φ(da) = {lhs}, ±ΔΦ(a) = {rhs}"));
            break;
        }
    }
    report.push(Check::new("Φ(da) = (−1)^n ΔΦ(a)", w));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_realizes_the_deformed_forms() {
        let report = pair_groupoid_demo(1, 2).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn plane_generators() {
        let report = pair_groupoid_demo(2, 1).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn unit_and_generator_kernels() {
        let g = PairGroupoid::new(1).unwrap();
        assert_eq!(g.unit().to_string(), "(-ξ + ξ') * delta(x - x')");
        assert_eq!(g.degree(g.unit()).unwrap(), Some(0));
        let omega = g.algebra();
        let dxi = g.realize(&omega.dsym(1)).unwrap();
        assert_eq!(g.degree(&dxi).unwrap(), Some(1));
        let nf = omega.mul(&omega.dsym(1), &omega.coordinate(0)).unwrap();
        assert_eq!(nf.to_string(), "-1 + x * d(ξ)");
    }

    #[test]
    fn dimension_is_capped() {
        assert!(pair_groupoid_demo(3, 1).unwrap_err().is_domain());
    }
}
