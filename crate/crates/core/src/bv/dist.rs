//! Distributional semidensities: sums of
//! `c_α(x, ξ) · ∏ δ^{(α_a)}(ℓ_a(x)) · exp(−xᵀQx)`.
//!
//! A component fixes the δ-forms (rows in reduced row echelon form over the
//! `x` variables) and the Gaussian matrix. Canonical form: every
//! coefficient and the Gaussian are free of the pivot variables, which the
//! rule `g(y) δ^{(k)}(y) = Σ_j (−1)^j C(k,j) g^{(j)}(0) δ^{(k−j)}(y)` always
//! achieves. Odd δ-factors are plain linear odd factors of the coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{ChartRef, ScalarValue};
use crate::error::{Error, Result};
use crate::graded::{same_table, Monomial, Parity, Substitution, SuperPolynomial};
use crate::linalg::{self, Mat};
use crate::rational::{binomial, Q};

/// δ-forms (RREF rows) and Gaussian matrix of a component.
pub type ComponentKey = (Mat, Mat);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub forms: Mat,
    pub gaussian: Mat,
    pub terms: BTreeMap<Vec<u32>, SuperPolynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    chart: ChartRef,
    comps: BTreeMap<ComponentKey, BTreeMap<Vec<u32>, SuperPolynomial>>,
}

/// A not yet canonical term.
struct Raw {
    forms: Mat,
    alpha: Vec<u32>,
    c: SuperPolynomial,
    gaussian: Mat,
}

impl Distribution {
    pub fn zero(chart: &ChartRef) -> Self {
        Distribution {
            chart: chart.clone(),
            comps: BTreeMap::new(),
        }
    }

    pub fn from_polynomial(chart: &ChartRef, c: &SuperPolynomial) -> Self {
        let mut d = Self::zero(chart);
        d.insert(Raw {
            forms: Vec::new(),
            alpha: Vec::new(),
            c: c.clone(),
            gaussian: d.zero_gauss(),
        })
        .expect("a δ-free term is always canonical");
        d
    }

    /// `c · ∏ δ^{(α_a)}(ℓ_a) · exp(−xᵀQx)`; `forms` rows are the `ℓ_a`
    /// over the `x` variables, `gaussian` is symmetric (or `None`).
    pub fn term(
        chart: &ChartRef,
        c: &SuperPolynomial,
        forms: &[Vec<Q>],
        alpha: &[u32],
        gaussian: Option<&Mat>,
    ) -> Result<Self> {
        let n = chart.pairs();
        if forms.len() != alpha.len() || forms.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("δ-form shape mismatch".into()));
        }
        if !same_table(c.table(), chart.table()) {
            return Err(Error::Structural("coefficient is not over the chart".into()));
        }
        let mut d = Self::zero(chart);
        let g = match gaussian {
            Some(g) => {
                check_symmetric(g, n)?;
                g.clone()
            }
            None => d.zero_gauss(),
        };
        d.insert(Raw {
            forms: forms.to_vec(),
            alpha: alpha.to_vec(),
            c: c.clone(),
            gaussian: g,
        })?;
        Ok(d)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> Vec<Component> {
        self.comps
            .iter()
            .map(|((f, g), t)| Component {
                forms: f.clone(),
                gaussian: g.clone(),
                terms: t.clone(),
            })
            .collect()
    }

    /// The part whose coefficients have parity `p` (δ-factors and
    /// Gaussians are even).
    pub fn parity_part(&self, p: Parity) -> Self {
        let mut out = Self::zero(&self.chart);
        for (k, terms) in &self.comps {
            for (a, c) in terms {
                out.add_canonical(k.clone(), a.clone(), c.parity_part(p));
            }
        }
        out
    }

    /// Highest total δ-derivative order.
    pub fn delta_order(&self) -> u32 {
        self.comps
            .values()
            .flat_map(|t| t.keys().map(|a| a.iter().sum::<u32>()))
            .max()
            .unwrap_or(0)
    }

    fn n(&self) -> usize {
        self.chart.pairs()
    }

    fn zero_gauss(&self) -> Mat {
        linalg::zeros(self.n(), self.n())
    }

    fn check_chart(&self, other: &Self) -> Result<()> {
        if *self.chart == *other.chart {
            Ok(())
        } else {
            Err(Error::Structural("distributions live on different charts".into()))
        }
    }

    fn x_poly(&self, row: &[Q]) -> SuperPolynomial {
        let t = self.chart.table();
        let mut p = SuperPolynomial::zero(t);
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                p = &p + &SuperPolynomial::var_index(t, self.chart.x(j)).scale(v);
            }
        }
        p
    }

    fn add_canonical(&mut self, key: ComponentKey, alpha: Vec<u32>, c: SuperPolynomial) {
        if c.is_zero() {
            return;
        }
        let comp = self.comps.entry(key.clone()).or_default();
        let e = comp
            .entry(alpha.clone())
            .or_insert_with(|| SuperPolynomial::zero(&c.table().clone()));
        *e = &*e + &c;
        if e.is_zero() {
            comp.remove(&alpha);
            if comp.is_empty() {
                self.comps.remove(&key);
            }
        }
    }

    /// Canonicalizes and adds a raw term.
    fn insert(&mut self, raw: Raw) -> Result<()> {
        if raw.c.is_zero() {
            return Ok(());
        }
        let n = self.n();
        let (rows, pivots, rebased) = rebase(&raw.forms, &raw.alpha, n, &(0..n).collect::<Vec<_>>())?;
        let (sub, m) = self.pivot_elimination(&rows, &pivots, &(0..pivots.len()).collect::<Vec<_>>())?;
        let gaussian = congruence(&raw.gaussian, &m);
        let key = (rows.clone(), gaussian);
        for (beta, w) in rebased {
            let c = raw.c.scale(&w);
            for (gamma, sign_w) in sub_indices(&beta) {
                let dc = self.apply_d(&c, &raw.gaussian, &pivots, &gamma);
                if dc.is_zero() {
                    continue;
                }
                let reduced = sub.apply(&dc)?.scale(&sign_w);
                let rest: Vec<u32> = beta.iter().zip(&gamma).map(|(b, g)| b - g).collect();
                self.add_canonical(key.clone(), rest, reduced);
            }
        }
        Ok(())
    }

    /// Substitution `x_{p_a} ↦ −Σ_j R_{aj} x_j` for the listed rows, and the
    /// matching linear map on `x`.
    fn pivot_elimination(&self, rows: &Mat, pivots: &[usize], which: &[usize]) -> Result<(Substitution, Mat)> {
        let n = self.n();
        let t = self.chart.table();
        let mut images: Vec<SuperPolynomial> = (0..t.len()).map(|i| SuperPolynomial::var_index(t, i)).collect();
        let mut m = linalg::identity(n);
        for &a in which {
            let p = pivots[a];
            let mut img = SuperPolynomial::zero(t);
            let mut col = vec![Q::zero(); n];
            for (j, v) in rows[a].iter().enumerate() {
                if j != p && !v.is_zero() {
                    img = &img - &SuperPolynomial::var_index(t, self.chart.x(j)).scale(v);
                    col[j] = -v.clone();
                }
            }
            images[self.chart.x(p)] = img;
            m[p] = col;
        }
        Ok((Substitution::new(t, t, images)?, m))
    }

    /// `∏_a D_{p_a}^{γ_a} c` with `D_p = ∂_{x_p} − ∂_{x_p}(xᵀQx)`.
    fn apply_d(&self, c: &SuperPolynomial, g: &Mat, pivots: &[usize], gamma: &[u32]) -> SuperPolynomial {
        let mut out = c.clone();
        for (a, &k) in gamma.iter().enumerate() {
            let p = pivots[a];
            let dq = self.x_poly(&g[p]).scale(&Q::from_integer(2.into()));
            for _ in 0..k {
                if out.is_zero() {
                    return out;
                }
                out = &out.deriv_index(self.chart.x(p)) - &(&dq * &out);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (k, terms) in &other.comps {
            for (a, c) in terms {
                out.add_canonical(k.clone(), a.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero(&self.chart);
        for (k, terms) in &self.comps {
            for (a, c) in terms {
                out.add_canonical(k.clone(), a.clone(), c.scale(s));
            }
        }
        out
    }

    /// Left multiplication by a polynomial.
    pub fn times_poly(&self, f: &SuperPolynomial) -> Result<Self> {
        self.mul(&Self::from_polynomial(&self.chart, f))
    }

    /// Product; δ-forms of the two factors must be jointly independent.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_chart(other)?;
        let mut out = Self::zero(&self.chart);
        for ((f1, g1), t1) in &self.comps {
            for ((f2, g2), t2) in &other.comps {
                let mut forms = f1.clone();
                forms.extend(f2.iter().cloned());
                let gaussian: Mat = g1
                    .iter()
                    .zip(g2)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                    .collect();
                for (a1, c1) in t1 {
                    for (a2, c2) in t2 {
                        let mut alpha = a1.clone();
                        alpha.extend(a2.iter().copied());
                        out.insert(Raw {
                            forms: forms.clone(),
                            alpha,
                            c: c1 * c2,
                            gaussian: gaussian.clone(),
                        })?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Left derivative by table variable `var`. For an `x` it acts on
    /// the coefficient, the δ-factors and the Gaussian.
    pub fn partial(&self, var: usize) -> Result<Self> {
        let n = self.n();
        if var >= 2 * n {
            return Err(Error::Structural("no such chart variable".into()));
        }
        let mut out = Self::zero(&self.chart);
        if var >= n {
            for (k, terms) in &self.comps {
                for (a, c) in terms {
                    out.add_canonical(k.clone(), a.clone(), c.deriv_index(var));
                }
            }
            return Ok(out);
        }
        let two = Q::from_integer(2.into());
        for ((forms, g), terms) in &self.comps {
            let dq = self.x_poly(&g[var]).scale(&two);
            for (alpha, c) in terms {
                out.insert(Raw {
                    forms: forms.clone(),
                    alpha: alpha.clone(),
                    c: &c.deriv_index(var) - &(&dq * c),
                    gaussian: g.clone(),
                })?;
                for (a, row) in forms.iter().enumerate() {
                    if row[var].is_zero() {
                        continue;
                    }
                    let mut up = alpha.clone();
                    up[a] += 1;
                    out.insert(Raw {
                        forms: forms.clone(),
                        alpha: up,
                        c: c.scale(&row[var]),
                        gaussian: g.clone(),
                    })?;
                }
            }
        }
        Ok(out)
    }

    /// `Δ = Σ ε_i ∂ᴸ_{x^i} ∂ᴸ_{ξ_i}`.
    pub fn bv_delta(&self) -> Result<Self> {
        let mut out = Self::zero(&self.chart);
        for i in 0..self.n() {
            let t = self.partial(self.chart.xi(i))?;
            if t.is_zero() {
                continue;
            }
            let t = t.partial(self.chart.x(i))?;
            out = if self.chart.eps(i) < 0 {
                out.sub(&t)?
            } else {
                out.add(&t)?
            };
        }
        Ok(out)
    }

    /// Berezin integration of the listed odd variables (first listed
    /// innermost) on every coefficient.
    pub fn berezin_over(&self, odd: &[usize]) -> Result<Self> {
        let mut out = Self::zero(&self.chart);
        for (k, terms) in &self.comps {
            for (a, c) in terms {
                out.add_canonical(k.clone(), a.clone(), self.chart.berezin_over(c, odd)?);
            }
        }
        Ok(out)
    }

    /// Pullback by `x ↦ A x`, `ξ ↦ B ξ`, times `|det A|`.
    pub fn pullback_linear(&self, a: &Mat, b: &Mat) -> Result<Self> {
        let n = self.n();
        let t = self.chart.table();
        let mut images = Vec::with_capacity(2 * n);
        for (m, idx) in [(a, 0usize), (b, 1)] {
            for row in m.iter() {
                let mut img = SuperPolynomial::zero(t);
                for (j, v) in row.iter().enumerate() {
                    let var = if idx == 0 { self.chart.x(j) } else { self.chart.xi(j) };
                    img = &img + &SuperPolynomial::var_index(t, var).scale(v);
                }
                images.push(img);
            }
        }
        let sub = Substitution::new(t, t, images)?;
        let factor = linalg::det(a).abs();
        let mut out = Self::zero(&self.chart);
        for ((forms, g), terms) in &self.comps {
            let new_forms = linalg::mat_mul(forms, a);
            let new_g = congruence(g, a);
            for (alpha, c) in terms {
                out.insert(Raw {
                    forms: new_forms.clone(),
                    alpha: alpha.clone(),
                    c: sub.apply(c)?.scale(&factor),
                    gaussian: new_g.clone(),
                })?;
            }
        }
        Ok(out)
    }

    /// Moves everything to `target`, sending pair `i` to pair `map[i]`;
    /// pairs mapped to `None` must not occur.
    pub fn remap(&self, target: &ChartRef, map: &[Option<usize>]) -> Result<Self> {
        let src = self.chart.table();
        let tt = target.table();
        let n = self.n();
        let nt = target.pairs();
        let mut images = Vec::with_capacity(2 * n);
        for block in 0..2 {
            for m in map.iter() {
                images.push(match m {
                    Some(j) => SuperPolynomial::var_index(tt, if block == 0 { target.x(*j) } else { target.xi(*j) }),
                    None => SuperPolynomial::zero(tt),
                });
            }
        }
        let dropped: Vec<usize> = (0..n).filter(|&i| map[i].is_none()).collect();
        let dropped_vars: Vec<usize> = dropped
            .iter()
            .flat_map(|&i| [self.chart.x(i), self.chart.xi(i)])
            .collect();
        let sub = Substitution::new(src, tt, images)?;
        let mut out = Self::zero(target);
        for ((forms, g), terms) in &self.comps {
            let move_row = |row: &[Q]| -> Result<Vec<Q>> {
                let mut r = vec![Q::zero(); nt];
                for (i, v) in row.iter().enumerate() {
                    match map[i] {
                        Some(j) => r[j] = v.clone(),
                        None if !v.is_zero() => {
                            return Err(Error::Structural("remap drops a variable that occurs".into()))
                        }
                        None => {}
                    }
                }
                Ok(r)
            };
            let new_forms = forms.iter().map(|r| move_row(r)).collect::<Result<Mat>>()?;
            let mut new_g = linalg::zeros(nt, nt);
            for i in 0..n {
                for j in 0..n {
                    if g[i][j].is_zero() {
                        continue;
                    }
                    match (map[i], map[j]) {
                        (Some(a), Some(b)) => new_g[a][b] = g[i][j].clone(),
                        _ => return Err(Error::Structural("remap drops a Gaussian direction".into())),
                    }
                }
            }
            for (alpha, c) in terms {
                if !c.is_free_of(&dropped_vars) {
                    return Err(Error::Structural("remap drops a variable that occurs".into()));
                }
                out.insert(Raw {
                    forms: new_forms.clone(),
                    alpha: alpha.clone(),
                    c: sub.apply(c)?,
                    gaussian: new_g.clone(),
                })?;
            }
        }
        Ok(out)
    }

    /// Integrates the listed `x` pairs against δ-factors. Every listed
    /// direction must be pinned; the result no longer depends on them.
    pub fn integrate_pinned(&self, pairs: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut order: Vec<usize> = pairs.to_vec();
        order.extend((0..n).filter(|i| !pairs.contains(i)));
        let mut out = Self::zero(&self.chart);
        for ((forms, g), terms) in &self.comps {
            let (rows, pivots, _) = rebase(forms, &[], n, &order)?;
            let pinned: Vec<usize> = (0..pivots.len()).filter(|&a| pairs.contains(&pivots[a])).collect();
            if pinned.len() < pairs.len() {
                return Err(Error::CompositionUndefined(format!(
                    "{} of {} integrated directions are pinned by δ-factors",
                    pinned.len(),
                    pairs.len()
                )));
            }
            let kept: Vec<usize> = (0..pivots.len()).filter(|a| !pinned.contains(a)).collect();
            let (sub, m) = self.pivot_elimination(&rows, &pivots, &pinned)?;
            let new_g = congruence(g, &m);
            let kept_forms: Mat = kept.iter().map(|&a| rows[a].clone()).collect();
            for (alpha, c) in terms {
                let (_, _, terms_b) = rebase(forms, alpha, n, &order)?;
                for (beta, w) in terms_b {
                    let mut gamma = vec![0; beta.len()];
                    let mut sign = w;
                    for &a in &pinned {
                        gamma[a] = beta[a];
                        if beta[a] % 2 == 1 {
                            sign = -sign;
                        }
                    }
                    let dc = self.apply_d(c, g, &pivots, &gamma);
                    if dc.is_zero() {
                        continue;
                    }
                    out.insert(Raw {
                        forms: kept_forms.clone(),
                        alpha: kept.iter().map(|&a| beta[a]).collect(),
                        c: sub.apply(&dc)?.scale(&sign),
                        gaussian: new_g.clone(),
                    })?;
                }
            }
        }
        Ok(out)
    }

    /// `∫ D(x, ξ) · self`: all odd variables by Berezin integration with
    /// `∫ ξ_1 ⋯ ξ_n = 1`, δ-pinned directions by substitution, and the
    /// rest as Gaussian moments.
    pub fn integrate(&self) -> Result<ScalarValue> {
        let odd = self.berezin_over(&self.chart.xi_indices())?;
        let mut total = ScalarValue::zero();
        for ((forms, g), terms) in &odd.comps {
            let mut single = Self::zero(&self.chart);
            single.comps.insert((forms.clone(), g.clone()), terms.clone());
            let (_, pivots) = linalg::rref(forms, self.n());
            let free: Vec<usize> = (0..self.n()).filter(|i| !pivots.contains(i)).collect();
            for ((rest, g), terms) in &single.integrate_pinned(&pivots)?.comps {
                debug_assert!(rest.is_empty());
                for c in terms.values() {
                    total = total.add(&self.gaussian_integral(c, g, &free)?);
                }
            }
        }
        Ok(total)
    }

    /// `∫ c(x) exp(−xᵀGx) dx` over the directions `live`; every one of them
    /// must be damped, since an undamped direction contributes `∫ dx = ∞`.
    fn gaussian_integral(&self, c: &SuperPolynomial, g: &Mat, live: &[usize]) -> Result<ScalarValue> {
        let t = self.chart.table();
        let n = self.n();
        if c.is_zero() {
            return Ok(ScalarValue::zero());
        }
        let mut g = g.clone();
        let mut c = c.clone();
        let mut factor = Q::one();
        for (pos, &i) in live.iter().enumerate() {
            let d = g[i][i].clone();
            if !d.is_positive() {
                return Err(Error::Divergent(format!(
                    "direction `{}` is neither pinned nor damped",
                    t.var(self.chart.x(i)).name
                )));
            }
            // complete the square: x_i ↦ x_i − Σ_{j>i} (G_ij/d) x_j
            let rest = &live[pos + 1..];
            let mut shift = SuperPolynomial::zero(t);
            for &j in rest {
                if !g[i][j].is_zero() {
                    shift = &shift + &SuperPolynomial::var_index(t, self.chart.x(j)).scale(&(&g[i][j] / &d));
                }
            }
            if !shift.is_zero() {
                let mut images: Vec<SuperPolynomial> = (0..t.len()).map(|k| SuperPolynomial::var_index(t, k)).collect();
                images[self.chart.x(i)] = &images[self.chart.x(i)] - &shift;
                c = Substitution::new(t, t, images)?.apply(&c)?;
            }
            let mut g2 = g.clone();
            for &j in rest {
                for &k in rest {
                    g2[j][k] = &g[j][k] - &(&g[i][j] * &g[i][k] / &d);
                }
            }
            for k in 0..n {
                g2[i][k] = Q::zero();
                g2[k][i] = Q::zero();
            }
            g = g2;
            // ∫ x^k e^{−d x²} = (k−1)!!/(2d)^{k/2} · √(π/d) for even k
            let powers = c.split_even_powers(self.chart.x(i));
            let mut next = SuperPolynomial::zero(t);
            for (k, ck) in powers.iter().enumerate() {
                if k % 2 == 1 || ck.is_zero() {
                    continue;
                }
                let mut m = Q::one();
                let mut j = 1;
                while j < k {
                    m *= Q::from_integer(j.into());
                    j += 2;
                }
                for _ in 0..k / 2 {
                    m /= &d * Q::from_integer(2.into());
                }
                next = &next + &ck.scale(&m);
            }
            c = next;
            factor /= &d;
        }
        let value = c
            .as_constant()
            .ok_or_else(|| Error::Consistency(format!("non-constant integrand after integration: {c}")))?;
        if value.is_zero() {
            return Ok(ScalarValue::zero());
        }
        Ok(ScalarValue::term(value, live.len() as u32, &factor))
    }

    /// `(α, β) = ∫ α β`.
    pub fn pairing(&self, other: &Self) -> Result<ScalarValue> {
        self.mul(other)?.integrate()
    }
}

fn check_symmetric(g: &Mat, n: usize) -> Result<()> {
    if g.len() != n || g.iter().any(|r| r.len() != n) {
        return Err(Error::Structural("Gaussian matrix has the wrong shape".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if g[i][j] != g[j][i] {
                return Err(Error::Structural("Gaussian matrix must be symmetric".into()));
            }
        }
    }
    Ok(())
}

/// `Mᵀ G M`.
fn congruence(g: &Mat, m: &Mat) -> Mat {
    let n = m.len();
    let mt = linalg::transpose(m, n);
    linalg::mat_mul(&linalg::mat_mul(&mt, g), m)
}

/// All `γ ≤ β` with weight `∏ (−1)^{γ_a} C(β_a, γ_a)`.
fn sub_indices(beta: &[u32]) -> Vec<(Vec<u32>, Q)> {
    let mut out = vec![(Vec::new(), Q::one())];
    for &b in beta {
        let mut next = Vec::new();
        for (g, w) in &out {
            for k in 0..=b {
                let mut g2 = g.clone();
                g2.push(k);
                let mut w2 = w * Q::from_integer(binomial(b, k));
                if k % 2 == 1 {
                    w2 = -w2;
                }
                next.push((g2, w2));
            }
        }
        out = next;
    }
    out
}

/// Re-expresses `∏ δ^{(α_a)}(F x)` over the RREF basis `m = R x` of the
/// row space of `F` (pivots chosen in `order`):
/// `F = T R`, `δ^{(α)}(Tm) = |det T|^{-1} ∏_a (Σ_b (T^{-1})_{ba} ∂_{m_b})^{α_a} δ(m)`.
#[allow(clippy::type_complexity)]
fn rebase(forms: &Mat, alpha: &[u32], n: usize, order: &[usize]) -> Result<(Mat, Vec<usize>, BTreeMap<Vec<u32>, Q>)> {
    let r = forms.len();
    let (rows, pivots) = linalg::rref_with_order(forms, n, order);
    if pivots.len() < r {
        return Err(Error::Wavefront(format!(
            "{} δ-forms span only a {}-dimensional space",
            r,
            pivots.len()
        )));
    }
    // sort rows by pivot column so the canonical form does not depend on `order`
    let mut idx: Vec<usize> = (0..r).collect();
    idx.sort_by_key(|&a| pivots[a]);
    let rows: Mat = idx.iter().map(|&a| rows[a].clone()).collect();
    let pivots: Vec<usize> = idx.iter().map(|&a| pivots[a]).collect();
    let t: Mat = forms
        .iter()
        .map(|row| pivots.iter().map(|&p| row[p].clone()).collect())
        .collect();
    let tinv = linalg::inverse(&t).ok_or_else(|| Error::Consistency("singular change of δ-basis".into()))?;
    let det = linalg::det(&t).abs();
    let mut acc: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
    acc.insert(vec![0; r], Q::one() / det);
    debug_assert!(alpha.is_empty() || alpha.len() == r);
    for (a, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            let mut next: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
            for (beta, w) in &acc {
                for (b, row) in tinv.iter().enumerate() {
                    let coef = &row[a];
                    if coef.is_zero() {
                        continue;
                    }
                    let mut nb = beta.clone();
                    nb[b] += 1;
                    *next.entry(nb).or_insert_with(Q::zero) += w * coef;
                }
            }
            next.retain(|_, v| !v.is_zero());
            acc = next;
        }
    }
    Ok((rows, pivots, acc))
}

impl fmt::Display for Distribution {
    /// `P * delta'(l1) delta(l2) ... * exp(-q)` per term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for ((forms, g), terms) in &self.comps {
            let weight = self.render_quadratic(g);
            for (alpha, c) in terms {
                let mut s = if c.len() == 1 { c.to_string() } else { format!("({c})") };
                let deltas: Vec<String> = forms
                    .iter()
                    .zip(alpha)
                    .map(|(row, &k)| {
                        let mark = if k <= 3 {
                            "'".repeat(k as usize)
                        } else {
                            format!("^({k})")
                        };
                        format!("delta{mark}({})", self.x_poly(row))
                    })
                    .collect();
                if !deltas.is_empty() {
                    s = format!("{s} * {}", deltas.join(" "));
                }
                if let Some(w) = &weight {
                    s = format!("{s} * exp(-({w}))");
                }
                parts.push(s);
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl Distribution {
    fn render_quadratic(&self, g: &Mat) -> Option<String> {
        let t = self.chart.table();
        let n = self.n();
        let mut q = SuperPolynomial::zero(t);
        for i in 0..n {
            for j in 0..n {
                if g[i][j].is_zero() {
                    continue;
                }
                let mut e = vec![0; t.len()];
                e[self.chart.x(i)] += 1;
                e[self.chart.x(j)] += 1;
                q.add_term(Monomial(e), g[i][j].clone());
            }
        }
        if q.is_zero() {
            None
        } else {
            Some(q.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv::{DarbouxChart, DiffOp};
    use crate::rational::{q, qf};
    use crate::testing::{random_poly, rng};
    use rand::Rng;

    fn gauss(n: usize, diag: &[i64]) -> Mat {
        let mut g = linalg::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            g[i][i] = q(d);
        }
        g
    }

    /// `∫ x^k e^{−d x²}` by `I_k = (k−1)/(2d) I_{k−2}`, `I_0 = √(π/d)`.
    fn hermite_moment(k: u32, d: &Q) -> ScalarValue {
        if k % 2 == 1 {
            return ScalarValue::zero();
        }
        let mut c = Q::one();
        let mut j = k;
        while j >= 2 {
            c *= q(j as i64 - 1) / (q(2) * d);
            j -= 2;
        }
        ScalarValue::term(c, 1, &(Q::one() / d))
    }

    #[test]
    fn pairing_examples() {
        let ch = DarbouxChart::standard(1).unwrap();
        let t = ch.table();
        let (x, xi) = (ch.var(0), ch.var(1));
        let alpha = Distribution::from_polynomial(&ch, &xi);
        let coef = &SuperPolynomial::constant(t, q(3)) + &xi.scale(&q(5));
        let beta = Distribution::term(&ch, &coef, &[], &[], Some(&gauss(1, &[1]))).unwrap();
        assert_eq!(alpha.pairing(&beta).unwrap().to_string(), "3*pi^(1/2)");

        let dx = Distribution::term(&ch, &SuperPolynomial::one(t), &[vec![q(1)]], &[0], None).unwrap();
        let b2 = Distribution::term(&ch, &(&x * &xi), &[], &[], Some(&gauss(1, &[1]))).unwrap();
        assert!(dx.pairing(&b2).unwrap().is_zero());

        let p = Distribution::from_polynomial(&ch, &(&x + &SuperPolynomial::one(t)));
        assert!(matches!(alpha.pairing(&p), Err(Error::Divergent(_))));
        let twice = Distribution::term(&ch, &xi, &[vec![q(2)]], &[0], None).unwrap();
        assert!(matches!(dx.mul(&twice), Err(Error::Wavefront(_))));
    }

    #[test]
    fn gaussian_moments_match_hermite_recursion() {
        let ch = DarbouxChart::standard(1).unwrap();
        let t = ch.table();
        for d in [q(1), q(3), qf(1, 2)] {
            for k in 0..7u32 {
                let c = &ch.var(0).pow(k) * &ch.var(1);
                let mut g = linalg::zeros(1, 1);
                g[0][0] = d.clone();
                let s = Distribution::term(&ch, &c, &[], &[], Some(&g)).unwrap();
                assert_eq!(s.integrate().unwrap(), hermite_moment(k, &d), "k={k} d={d}");
            }
        }
        let _ = t;
    }

    #[test]
    fn correlated_gaussian() {
        // ∫ e^{−(x1² + x1x2 + x2²)} = π / √(3/4)
        let ch = DarbouxChart::standard(2).unwrap();
        let mut g = gauss(2, &[1, 1]);
        g[0][1] = qf(1, 2);
        g[1][0] = qf(1, 2);
        let c = &ch.var(ch.xi(0)) * &ch.var(ch.xi(1));
        let s = Distribution::term(&ch, &c, &[], &[], Some(&g)).unwrap();
        assert_eq!(s.integrate().unwrap(), ScalarValue::term(Q::one(), 2, &qf(4, 3)));
    }

    #[test]
    fn delta_derivatives_reduce() {
        let ch = DarbouxChart::standard(1).unwrap();
        let x = ch.var(0);
        // x δ'(x) = −δ(x)
        let s = Distribution::term(&ch, &x, &[vec![q(1)]], &[1], None).unwrap();
        assert_eq!(s.to_string(), "-1 * delta(x)");
        // δ'(2x) = δ'(x)/4
        let s = Distribution::term(&ch, &SuperPolynomial::one(ch.table()), &[vec![q(2)]], &[1], None).unwrap();
        assert_eq!(s.to_string(), "1/4 * delta'(x)");
    }

    #[test]
    fn delta_squares_to_zero_on_distributions() {
        let mut r = rng(17);
        for n in 1..=3 {
            let ch = DarbouxChart::standard(n).unwrap();
            let vars: Vec<usize> = (0..2 * n).collect();
            for _ in 0..15 {
                let c = random_poly(&mut r, ch.table(), &vars, 3, 3, None);
                let k = r.gen_range(0..=n);
                let forms: Mat = (0..k)
                    .map(|_| (0..n).map(|_| q(r.gen_range(-2..=2))).collect())
                    .collect();
                let alpha: Vec<u32> = (0..k).map(|_| r.gen_range(0..=1)).collect();
                let g = gauss(n, &(0..n).map(|_| r.gen_range(0..=2)).collect::<Vec<_>>());
                let Ok(s) = Distribution::term(&ch, &c, &forms, &alpha, Some(&g)) else {
                    continue;
                };
                assert!(s.bv_delta().unwrap().bv_delta().unwrap().is_zero(), "{s}");
            }
        }
    }

    #[test]
    fn adjoint_integrates_by_parts() {
        let mut r = rng(23);
        let ch = DarbouxChart::standard(2).unwrap();
        let vars: Vec<usize> = (0..4).collect();
        let g = gauss(2, &[1, 2]);
        let ops = [
            DiffOp::delta(&ch),
            DiffOp::partial(&ch, 0).unwrap(),
            DiffOp::partial(&ch, 3).unwrap(),
        ];
        for op in &ops {
            let adj = op.adjoint().unwrap();
            let pp = op.parity().unwrap();
            for _ in 0..10 {
                let pa = crate::testing::random_parity(&mut r);
                let a = Distribution::term(
                    &ch,
                    &random_poly(&mut r, ch.table(), &vars, 3, 3, Some(pa)),
                    &[],
                    &[],
                    Some(&g),
                )
                .unwrap();
                let b = Distribution::from_polynomial(&ch, &random_poly(&mut r, ch.table(), &vars, 3, 3, None));
                let lhs = op.apply_distribution(&a).unwrap().pairing(&b).unwrap();
                let rhs = a.pairing(&adj.apply_distribution(&b).unwrap()).unwrap();
                let rhs = if pp.is_odd() && pa.is_odd() { rhs.neg() } else { rhs };
                assert_eq!(lhs, rhs, "{op}");
            }
        }
    }

    #[test]
    fn pullback_matches_substitution() {
        let ch = DarbouxChart::standard(1).unwrap();
        let t = ch.table();
        let s = Distribution::term(&ch, &ch.var(1), &[vec![q(1)]], &[0], None).unwrap();
        // x ↦ 2x, ξ ↦ ξ/2: 2 · δ(2x) ξ/2 = δ(x) ξ/2
        let out = s.pullback_linear(&vec![vec![q(2)]], &vec![vec![qf(1, 2)]]).unwrap();
        let want = Distribution::term(&ch, &ch.var(1).scale(&qf(1, 2)), &[vec![q(1)]], &[0], None).unwrap();
        assert_eq!(out, want);
        let _ = t;
    }
}
