//! Linear Lagrangian subspaces and relations, their δ-semidensities, and
//! composition of morphisms by integration over the middle factor.
//!
//! A linear Lagrangian is fixed by its even part `L0 ⊂ ℝⁿ` (the `x`
//! directions it contains); the odd part is forced to be the annihilator
//! `L1 = {η : Σ ε_i v^i η_i = 0 ∀ v ∈ L0}`.
//!
//! `δ_L` flips sign with the orientation of `L0` (pulling `ξ_1⋯ξ_n` back
//! along `x ↦ Ax` gives `sign(det A) ξ_1⋯ξ_n`), so Lagrangians are
//! oriented. Orientation is stored relative to the RREF basis of `L0`.

use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{ChartRef, DarbouxChart, Distribution, Factor};
use crate::error::{Error, Result};
use crate::graded::{Parity, SuperPolynomial};
use crate::linalg::{self, Mat};
use crate::rational::{q, Q};
use crate::testing::SuiteRng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lagrangian {
    chart: ChartRef,
    even: Mat,
    odd: Mat,
    orientation: i8,
}

fn sign(v: &Q) -> i8 {
    if v.is_negative() {
        -1
    } else {
        1
    }
}

/// Sign of `det T` where `rows = T · rref` (rows independent).
fn relative_orientation(rows: &Mat, rref: &Mat, pivots: &[usize]) -> i8 {
    let t: Mat = rows
        .iter()
        .map(|r| pivots.iter().map(|&p| r[p].clone()).collect())
        .collect();
    debug_assert_eq!(rows.len(), rref.len());
    sign(&linalg::det(&t))
}

fn row_space(rows: &Mat, n: usize) -> Mat {
    linalg::rref(rows, n).0
}

/// `{η : Σ ε_i v^i η_i = 0 for every row v}`, in RREF.
fn eps_annihilator(chart: &DarbouxChart, rows: &Mat) -> Mat {
    let n = chart.pairs();
    let twisted: Mat = rows
        .iter()
        .map(|r| r.iter().enumerate().map(|(i, v)| v * q(chart.eps(i))).collect())
        .collect();
    row_space(&linalg::nullspace(&twisted, n), n)
}

impl Lagrangian {
    /// The Lagrangian whose even part is spanned by `rows`, oriented by
    /// them when they are independent (by the RREF basis otherwise).
    pub fn from_even_basis(chart: &ChartRef, rows: &Mat) -> Result<Self> {
        let n = chart.pairs();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("basis vectors must have one entry per pair".into()));
        }
        let (even, pivots) = linalg::rref(rows, n);
        let orientation = if even.len() == rows.len() {
            relative_orientation(rows, &even, &pivots)
        } else {
            1
        };
        let odd = eps_annihilator(chart, &even);
        Ok(Lagrangian {
            chart: chart.clone(),
            even,
            odd,
            orientation,
        })
    }

    /// Same subspace, opposite orientation (no effect when `L0 = 0`).
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        if !out.even.is_empty() {
            out.orientation = -out.orientation;
        }
        out
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// An oriented basis of `L0`.
    pub fn oriented_basis(&self) -> Mat {
        let mut rows = self.even.clone();
        if self.orientation < 0 {
            for v in rows[0].iter_mut() {
                *v = -v.clone();
            }
        }
        rows
    }

    /// The Lagrangian whose even part is cut out by the linear forms `forms`.
    pub fn from_defining_forms(chart: &ChartRef, forms: &Mat) -> Result<Self> {
        let n = chart.pairs();
        if forms.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("forms must have one entry per pair".into()));
        }
        Self::from_even_basis(chart, &linalg::nullspace(forms, n))
    }

    /// Validates an explicit parity-split basis: isotropic and of dimension
    /// `n`.
    pub fn from_parity_basis(chart: &ChartRef, even: &Mat, odd: &Mat) -> Result<Self> {
        let n = chart.pairs();
        if even.iter().chain(odd).any(|r| r.len() != n) {
            return Err(Error::Structural("basis vectors must have one entry per pair".into()));
        }
        let e = row_space(even, n);
        let o = row_space(odd, n);
        if e.len() + o.len() != n {
            return Err(Error::Contract(format!(
                "dimension {}|{} is not half of {}|{}",
                e.len(),
                o.len(),
                n,
                n
            )));
        }
        for v in &e {
            for w in &o {
                let pairing = (0..n).fold(Q::zero(), |acc, i| acc + &v[i] * &w[i] * q(chart.eps(i)));
                if !pairing.is_zero() {
                    return Err(Error::Contract("subspace is not isotropic".into()));
                }
            }
        }
        let orientation = if e.len() == even.len() {
            relative_orientation(even, &e, &linalg::rref(even, n).1)
        } else {
            1
        };
        Ok(Lagrangian {
            chart: chart.clone(),
            even: e,
            odd: o,
            orientation,
        })
    }

    /// Graph `{(v, Av)}` of the linear symplectomorphism `x ↦ Ax`,
    /// `ξ ↦ A^{-T} ξ`, as a relation in `Ȳ × Y`.
    pub fn graph(a: &Mat) -> Result<Self> {
        let n = a.len();
        if a.iter().any(|r| r.len() != n) || linalg::det(a).is_zero() {
            return Err(Error::Contract("graph needs an invertible square matrix".into()));
        }
        let chart = DarbouxChart::hom(n, n)?;
        let rows: Mat = (0..n)
            .map(|i| {
                let mut r = vec![Q::zero(); 2 * n];
                r[i] = Q::one();
                for j in 0..n {
                    r[n + j] = a[j][i].clone();
                }
                r
            })
            .collect();
        Self::from_even_basis(&chart, &rows)
    }

    pub fn diagonal(n: usize) -> Result<Self> {
        Self::graph(&linalg::identity(n))
    }

    /// Random Lagrangian with small integer even basis.
    pub fn random(rng: &mut SuiteRng, chart: &ChartRef) -> Self {
        let n = chart.pairs();
        let k = rng.gen_range(0..=n);
        let rows: Mat = (0..k)
            .map(|_| (0..n).map(|_| q(rng.gen_range(-2..=2))).collect())
            .collect();
        Self::from_even_basis(chart, &rows).expect("shape is right")
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn even_basis(&self) -> &Mat {
        &self.even
    }

    pub fn odd_basis(&self) -> &Mat {
        &self.odd
    }

    pub fn is_lagrangian(&self) -> bool {
        self.even.len() + self.odd.len() == self.chart.pairs() && eps_annihilator(&self.chart, &self.even) == self.odd
    }

    /// Image under `x ↦ Ax` (with the induced odd map).
    pub fn image(&self, a: &Mat) -> Result<Self> {
        let n = self.chart.pairs();
        let rows: Mat = self
            .oriented_basis()
            .iter()
            .map(|v| {
                (0..n)
                    .map(|i| (0..n).fold(Q::zero(), |acc, j| acc + &a[i][j] * &v[j]))
                    .collect()
            })
            .collect();
        if linalg::det(a).is_zero() {
            return Err(Error::Singular("image under a singular map".into()));
        }
        Self::from_even_basis(&self.chart, &rows)
    }

    /// Swaps the two factors of a relation in `Ȳ₁ × Y₂`.
    pub fn transpose(&self) -> Result<Self> {
        let (n1, n2) = hom_sizes(&self.chart)?;
        let chart = DarbouxChart::hom(n2, n1)?;
        let rows: Mat = self
            .oriented_basis()
            .iter()
            .map(|r| {
                let mut s = r[n1..].to_vec();
                s.extend_from_slice(&r[..n1]);
                s
            })
            .collect();
        Self::from_even_basis(&chart, &rows)
    }
}

fn hom_sizes(chart: &DarbouxChart) -> Result<(usize, usize)> {
    match chart.factors() {
        [a, b] if a.bar && !b.bar => Ok((a.pairs, b.pairs)),
        _ => Err(Error::Structural("expected a relation chart Ȳ₁ × Y₂".into())),
    }
}

/// `δ_L = ±|det E|⁻¹ ∏ δ(v_l(x)) ∏ η_k` (sign: the orientation) where `E = [a | c]` completes the
/// RREF basis `a` of `L0` by coordinate vectors, `v` are the complement
/// coordinates of `E⁻¹x` and `η_k = Σ_i a_k^i ε_i ξ_i`.
pub fn delta_l(l: &Lagrangian) -> Result<Distribution> {
    if !l.is_lagrangian() {
        return Err(Error::Contract("not a Lagrangian subspace".into()));
    }
    let chart = &l.chart;
    let n = chart.pairs();
    let (a, pivots) = linalg::rref(&l.even, n);
    let k = a.len();
    let complement: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let mut cols: Mat = a.clone();
    for &j in &complement {
        let mut e = vec![Q::zero(); n];
        e[j] = Q::one();
        cols.push(e);
    }
    let e = linalg::transpose(&cols, n);
    let inv = linalg::inverse(&e).ok_or_else(|| Error::Consistency("frame completion failed".into()))?;
    let forms: Mat = inv[k..].to_vec();
    let t = chart.table();
    let mut coeff = SuperPolynomial::constant(t, q(l.orientation as i64) / linalg::det(&e).abs());
    for row in &a {
        let mut eta = SuperPolynomial::zero(t);
        for (i, v) in row.iter().enumerate() {
            eta = &eta + &chart.var(chart.xi(i)).scale(&(v * q(chart.eps(i))));
        }
        coeff = &coeff * &eta;
    }
    Distribution::term(chart, &coeff, &forms, &vec![0; forms.len()], None)
}

/// `δ_L` as the pullback of the model `∏_{l>k} δ(x_l) ∏_{i≤k} ε_i ξ_i` along
/// the symplectic frame `A = [aG | c + aH]` (`a` an oriented basis,
/// `det G > 0`), which carries the coordinate Lagrangian onto `L`.
pub fn delta_l_via_frame(l: &Lagrangian, g: &Mat, h: &Mat) -> Result<Distribution> {
    let chart = &l.chart;
    let n = chart.pairs();
    let pivots = linalg::rref(&l.even, n).1;
    let a = l.oriented_basis();
    let k = a.len();
    if g.len() != k || g.iter().any(|r| r.len() != k) || h.len() != k || h.iter().any(|r| r.len() != n - k) {
        return Err(Error::Structural("frame parameters have the wrong shape".into()));
    }
    if !linalg::det(g).is_positive() {
        return Err(Error::Contract("frame matrix must have positive determinant".into()));
    }
    let complement: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    // columns of A
    let mut cols: Mat = Vec::with_capacity(n);
    for c in 0..k {
        cols.push(
            (0..n)
                .map(|i| (0..k).fold(Q::zero(), |acc, r| acc + &a[r][i] * &g[r][c]))
                .collect(),
        );
    }
    for (c, &j) in complement.iter().enumerate() {
        let mut v: Vec<Q> = (0..n)
            .map(|i| (0..k).fold(Q::zero(), |acc, r| acc + &a[r][i] * &h[r][c]))
            .collect();
        v[j] += Q::one();
        cols.push(v);
    }
    let frame = linalg::transpose(&cols, n);
    let t = chart.table();
    let mut model_coeff = SuperPolynomial::one(t);
    for i in 0..k {
        model_coeff = &model_coeff * &chart.var(chart.xi(i)).scale(&q(chart.eps(i)));
    }
    let forms: Mat = (k..n)
        .map(|l| {
            let mut r = vec![Q::zero(); n];
            r[l] = Q::one();
            r
        })
        .collect();
    let model = Distribution::term(chart, &model_coeff, &forms, &vec![0; n - k], None)?;
    // new coordinates y = A⁻¹ x
    let inv = linalg::inverse(&frame).ok_or_else(|| Error::Singular("degenerate frame".into()))?;
    let map = super::LinearSymplecticMap::new(chart, inv)?;
    model.pullback_linear(map.a(), map.b())
}

/// Set-theoretic composite `{(a, c) : (a, b) ∈ L1, (b, c) ∈ L2}` of
/// relations in `Ȳ₁ × Y₂` and `Ȳ₂ × Y₃`.
///
/// Transversality: both middle-difference maps `L1_i ⊕ L2_i → ℝ^{n₂}` are
/// onto. Then the fibre product `F` of the even parts maps isomorphically
/// onto the composite, which is oriented by `F`: a basis `f` of `F` is
/// positive when `(f, g)` is positive in `L1₀ ⊕ L2₀` for lifts `g` of the
/// standard basis of `ℝ^{n₂}`, twisted by `(−1)^{n₂ dim L2₀}`.
pub fn compose_relations(l1: &Lagrangian, l2: &Lagrangian) -> Result<Lagrangian> {
    let (n1, n2) = hom_sizes(&l1.chart)?;
    let (m2, n3) = hom_sizes(&l2.chart)?;
    if n2 != m2 {
        return Err(Error::Structural("middle factors differ".into()));
    }
    let even = compose_parts(&l1.oriented_basis(), &l2.oriented_basis(), n1, n2, n3);
    let odd = compose_parts(&l1.odd, &l2.odd, n1, n2, n3);
    if even.rank + odd.rank < 2 * n2 {
        return Err(Error::NotTransversal {
            rank: even.rank + odd.rank,
            expected: 2 * n2,
        });
    }
    let chart = DarbouxChart::hom(n1, n3)?;
    let mut out = Lagrangian::from_parity_basis(&chart, &even.images, &odd.images)?;
    if out.even.len() != even.images.len() {
        return Err(Error::Consistency(
            "fibre product does not embed in the composite".into(),
        ));
    }
    let twist = if n2 * l2.even.len() % 2 == 1 { -1 } else { 1 };
    out.orientation = out.orientation * even.sign * twist;
    if !out.is_lagrangian() {
        return Err(Error::Consistency("composite relation is not Lagrangian".into()));
    }
    Ok(out)
}

struct PartComposite {
    images: Mat,
    rank: usize,
    /// Orientation of the fibre-product basis behind `images`.
    sign: i8,
}

fn compose_parts(p1: &Mat, p2: &Mat, n1: usize, n2: usize, n3: usize) -> PartComposite {
    let k1 = p1.len();
    let k2 = p2.len();
    let m: Mat = (0..n2)
        .map(|b| {
            let mut row: Vec<Q> = p1.iter().map(|r| r[n1 + b].clone()).collect();
            row.extend(p2.iter().map(|r| -r[b].clone()));
            row
        })
        .collect();
    let rank = linalg::rank(&m, k1 + k2);
    let fibre = linalg::nullspace(&m, k1 + k2);
    let sign = if rank == n2 {
        // lifts g = (M Mᵀ)⁻¹ M satisfy M gᵀ = 1
        let mmt = linalg::mat_mul(&m, &linalg::transpose(&m, k1 + k2));
        let lifts = linalg::mat_mul(&linalg::inverse(&mmt).expect("M is onto"), &m);
        let mut frame = fibre.clone();
        frame.extend(lifts);
        sign(&linalg::det(&frame))
    } else {
        1
    };
    let images: Mat = fibre
        .iter()
        .map(|v| {
            let mut r: Vec<Q> = (0..n1)
                .map(|i| (0..k1).fold(Q::zero(), |acc, s| acc + &v[s] * &p1[s][i]))
                .collect();
            r.extend((0..n3).map(|i| (0..k2).fold(Q::zero(), |acc, s| acc + &v[k1 + s] * &p2[s][n2 + i])));
            r
        })
        .collect();
    PartComposite { images, rank, sign }
}

/// `m1 ∘ m2 = (−1)^{n₂(|m1|+1)} ∫_{Y2} m1 m2` for `m1` on `Ȳ₁ × Y₂` and
/// `m2` on `Ȳ₂ × Y₃`, the odd integrations taken as left derivatives in
/// index order. The sign moves the odd measure of `Y2` to the front and
/// makes `δ_diag` a two-sided unit.
pub fn compose(m1: &Distribution, m2: &Distribution) -> Result<Distribution> {
    let (n1, n2) = hom_sizes(m1.chart())?;
    let (k2, n3) = hom_sizes(m2.chart())?;
    if n2 != k2 {
        return Err(Error::Structural("middle factors differ".into()));
    }
    let triple = DarbouxChart::product(&[
        Factor { pairs: n1, bar: true },
        Factor { pairs: n2, bar: false },
        Factor { pairs: n3, bar: false },
    ])?;
    let first: Vec<Option<usize>> = (0..n1 + n2).map(Some).collect();
    let second: Vec<Option<usize>> = (n1..n1 + n2 + n3).map(Some).collect();
    let middle: Vec<usize> = (n1..n1 + n2).collect();
    let undefined = |e: Error| match e {
        Error::Wavefront(s) | Error::CompositionUndefined(s) => Error::CompositionUndefined(s),
        other => other,
    };
    let mut left = Distribution::zero(&triple);
    for p in [Parity::Even, Parity::Odd] {
        let part = m1.parity_part(p).remap(&triple, &first)?;
        let flip = n2 % 2 == 1 && !p.is_odd();
        left = left.add(&if flip { part.scale(&-Q::one()) } else { part })?;
    }
    let product = left.mul(&m2.remap(&triple, &second)?).map_err(undefined)?;
    let odd: Vec<usize> = middle.iter().map(|&i| triple.xi(i)).collect();
    let integrated = product
        .berezin_over(&odd)?
        .integrate_pinned(&middle)
        .map_err(undefined)?;
    let target = DarbouxChart::hom(n1, n3)?;
    let back: Vec<Option<usize>> = (0..n1 + n2 + n3)
        .map(|i| match i {
            i if i < n1 => Some(i),
            i if i < n1 + n2 => None,
            i => Some(i - n2),
        })
        .collect();
    integrated.remap(&target, &back)
}

/// `∫_{Y1} α m` for `α` on `Y1` and a kernel `m` on `Ȳ₁ × Y₂`; every `Y1`
/// direction must be pinned by the product.
pub fn apply_kernel(alpha: &Distribution, m: &Distribution) -> Result<Distribution> {
    let (n1, n2) = hom_sizes(m.chart())?;
    if alpha.chart().pairs() != n1 {
        return Err(Error::Structural("argument does not live on the source".into()));
    }
    let chart = m.chart();
    let embed: Vec<Option<usize>> = (0..n1).map(Some).collect();
    let product = alpha.remap(chart, &embed)?.mul(m)?;
    let odd: Vec<usize> = (0..n1).map(|i| chart.xi(i)).collect();
    let source: Vec<usize> = (0..n1).collect();
    let integrated = product.berezin_over(&odd)?.integrate_pinned(&source)?;
    let target = DarbouxChart::standard(n2)?;
    let back: Vec<Option<usize>> = (0..n1 + n2).map(|i| i.checked_sub(n1)).collect();
    integrated.remap(&target, &back)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::rng;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
    }

    #[test]
    fn coordinate_lagrangians() {
        let ch = DarbouxChart::standard(1).unwrap();
        let xi_zero = Lagrangian::from_even_basis(&ch, &m(&[&[1]])).unwrap();
        assert_eq!(delta_l(&xi_zero).unwrap().to_string(), "ξ");
        let x_zero = Lagrangian::from_even_basis(&ch, &vec![]).unwrap();
        let d = delta_l(&x_zero).unwrap();
        assert_eq!(d.to_string(), "1 * delta(x)");
        assert!(d.bv_delta().unwrap().is_zero());
    }

    #[test]
    fn diagonal_density() {
        let d = delta_l(&Lagrangian::diagonal(1).unwrap()).unwrap();
        assert_eq!(d.to_string(), "(-ξ + ξ') * delta(x - x')");
    }

    #[test]
    fn closed_and_frame_independent() {
        let mut r = rng(3);
        for n in 2..=3 {
            let ch = DarbouxChart::standard(n).unwrap();
            for _ in 0..20 {
                let l = Lagrangian::random(&mut r, &ch);
                let d = delta_l(&l).unwrap();
                assert!(d.bv_delta().unwrap().is_zero(), "{d}");
                let k = l.even_basis().len();
                let g: Mat = (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| {
                                q(if i == j {
                                    r.gen_range(1..=3)
                                } else if j > i {
                                    r.gen_range(-2..=2)
                                } else {
                                    0
                                })
                            })
                            .collect()
                    })
                    .collect();
                let h: Mat = (0..k)
                    .map(|_| (0..n - k).map(|_| q(r.gen_range(-2..=2))).collect())
                    .collect();
                assert_eq!(delta_l_via_frame(&l, &g, &h).unwrap(), d);
            }
        }
    }

    #[test]
    fn diagonal_is_a_unit() {
        let mut r = rng(8);
        for n in 1..=2 {
            let diag = delta_l(&Lagrangian::diagonal(n).unwrap()).unwrap();
            let ch = DarbouxChart::hom(n, n).unwrap();
            for _ in 0..10 {
                let l = Lagrangian::random(&mut r, &ch);
                let d = delta_l(&l).unwrap();
                assert_eq!(compose(&diag, &d).unwrap(), d, "left unit on {l:?}");
                assert_eq!(compose(&d, &diag).unwrap(), d, "right unit on {l:?}");
            }
        }
    }

    #[test]
    fn graphs_compose_functorially() {
        let s = m(&[&[1, 1], &[0, 1]]);
        let t = m(&[&[2, 1], &[1, 1]]);
        let gs = Lagrangian::graph(&s).unwrap();
        let gt = Lagrangian::graph(&t).unwrap();
        let ts = linalg::mat_mul(&t, &s);
        assert_eq!(compose_relations(&gs, &gt).unwrap(), Lagrangian::graph(&ts).unwrap());
        let lhs = compose(&delta_l(&gs).unwrap(), &delta_l(&gt).unwrap()).unwrap();
        assert_eq!(lhs, delta_l(&Lagrangian::graph(&ts).unwrap()).unwrap());
    }

    #[test]
    fn random_relations_compose_functorially() {
        let mut r = rng(21);
        let mut done = 0;
        let mut tries = 0;
        while done < 60 {
            tries += 1;
            assert!(tries < 2000);
            let (n1, n2, n3) = (r.gen_range(1..=2), r.gen_range(1..=2), r.gen_range(1..=2));
            let l1 = Lagrangian::random(&mut r, &DarbouxChart::hom(n1, n2).unwrap());
            let l2 = Lagrangian::random(&mut r, &DarbouxChart::hom(n2, n3).unwrap());
            let Ok(l) = compose_relations(&l1, &l2) else { continue };
            let got = compose(&delta_l(&l1).unwrap(), &delta_l(&l2).unwrap()).unwrap();
            let want = delta_l(&l).unwrap();
            assert!(
                got == want,
                "{:?} ∘ {:?}: {got} vs {want}",
                l1.even_basis(),
                l2.even_basis()
            );
            done += 1;
        }
    }

    #[test]
    fn non_transversal_composition_is_undefined() {
        let ch = DarbouxChart::hom(1, 1).unwrap();
        // L = {x = 0, x' = 0}: the middle x' is pinned twice
        let l = Lagrangian::from_even_basis(&ch, &vec![]).unwrap();
        assert!(matches!(compose_relations(&l, &l), Err(Error::NotTransversal { .. })));
        let d = delta_l(&l).unwrap();
        assert!(matches!(compose(&d, &d), Err(Error::CompositionUndefined(_))));
    }
}
