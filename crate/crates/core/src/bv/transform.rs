//! Darboux coordinate changes acting on semidensities.
//!
//! A map is given by the images `Φ(z)` of every chart variable (old
//! coordinates as polynomials in new ones). A semidensity transforms as
//! `φ ↦ Φ*(φ) · √Ber(JΦ)` with `J_ij = ∂ᴸ_{z_j} Φ^i` and
//! `Ber = det(A − B D⁻¹ C) / det D` over the even/odd block split.

use num_traits::{One, Signed, Zero};

use super::{ChartRef, DarbouxChart, Semidensity};
use crate::error::{Error, Result};
use crate::graded::{same_table, Substitution, SuperPolynomial};
use crate::linalg::{self, Mat};
use crate::poisson::HomogeneousVectorField;
use crate::rational::{q, qf, sqrt_exact, Q};

/// `x ↦ A x`, `ξ ↦ B ξ` with `B = E A^{-T} E` (`E` the pair signs), the
/// linear symplectomorphisms preserving the polarization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSymplecticMap {
    a: Mat,
    b: Mat,
}

impl LinearSymplecticMap {
    pub fn new(chart: &DarbouxChart, a: Mat) -> Result<Self> {
        let n = chart.pairs();
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("matrix shape does not match the chart".into()));
        }
        let inv = linalg::inverse(&a).ok_or_else(|| Error::Singular("linear map is not invertible".into()))?;
        let mut b = linalg::transpose(&inv, n);
        for (i, row) in b.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if chart.eps(i) * chart.eps(j) < 0 {
                    *v = -v.clone();
                }
            }
        }
        Ok(LinearSymplecticMap { a, b })
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn images(&self, chart: &DarbouxChart) -> Vec<SuperPolynomial> {
        let t = chart.table();
        let n = chart.pairs();
        let lin = |m: &Mat, i: usize, var: &dyn Fn(usize) -> usize| {
            let mut p = SuperPolynomial::zero(t);
            for j in 0..n {
                p = &p + &SuperPolynomial::var_index(t, var(j)).scale(&m[i][j]);
            }
            p
        };
        let mut out: Vec<SuperPolynomial> = (0..n).map(|i| lin(&self.a, i, &|j| chart.x(j))).collect();
        out.extend((0..n).map(|i| lin(&self.b, i, &|j| chart.xi(j))));
        out
    }
}

/// A named coordinate change used by the invariance suites.
#[derive(Clone, Debug)]
pub struct MapEntry {
    pub name: String,
    pub chart: ChartRef,
    pub images: Vec<SuperPolynomial>,
}

/// `√Ber(JΦ)` after checking that `Φ` preserves parities and brackets.
pub fn sqrt_berezinian(chart: &ChartRef, images: &[SuperPolynomial]) -> Result<SuperPolynomial> {
    let t = chart.table();
    let n = chart.pairs();
    if images.len() != 2 * n {
        return Err(Error::Structural("one image per chart variable is required".into()));
    }
    let sub = Substitution::new(t, t, images.to_vec())?;
    let pi = chart.poisson()?;
    for u in 0..2 * n {
        for v in u..2 * n {
            let lhs = pi.odd_bracket(&images[u], &images[v])?;
            let rhs = sub.apply(&pi.odd_bracket(&chart.var(u), &chart.var(v))?)?;
            if lhs != rhs {
                return Err(Error::Contract(format!(
                    "map does not preserve {{{}, {}}}: {} vs {}",
                    t.var(u).name,
                    t.var(v).name,
                    lhs,
                    rhs
                )));
            }
        }
    }
    let jac = |rows: &[usize], cols: &[usize]| -> Vec<Vec<SuperPolynomial>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| images[i].deriv_index(j)).collect())
            .collect()
    };
    let xs = chart.x_indices();
    let xis = chart.xi_indices();
    let a = jac(&xs, &xs);
    let b = jac(&xs, &xis);
    let c = jac(&xis, &xs);
    let d = jac(&xis, &xis);
    let det_d = poly_det(&d, t);
    let inv_det_d = unit_inverse(&det_d)
        .ok_or_else(|| Error::Singular(format!("odd-odd Jacobian block has non-invertible determinant {det_d}")))?;
    let adj_d = adjugate(&d, t);
    // A − B adj(D) C / det D
    let mut schur = a.clone();
    for i in 0..n {
        for j in 0..n {
            let mut s = SuperPolynomial::zero(t);
            for k in 0..n {
                for l in 0..n {
                    s = &s + &(&(&b[i][k] * &adj_d[k][l]) * &c[l][j]);
                }
            }
            schur[i][j] = &schur[i][j] - &(&s * &inv_det_d);
        }
    }
    let ber = &poly_det(&schur, t) * &inv_det_d;
    sqrt_poly(&ber).ok_or_else(|| Error::UnsupportedMap(format!("Berezinian {ber} has no polynomial square root")))
}

/// Pulls a semidensity back along `Φ`: `Φ*(φ) · √Ber(JΦ)`.
pub fn darboux_transform(images: &[SuperPolynomial], s: &Semidensity) -> Result<Semidensity> {
    let chart = s.chart();
    if images.iter().any(|p| !same_table(p.table(), chart.table())) {
        return Err(Error::Structural("map images are not over the chart".into()));
    }
    let root = sqrt_berezinian(chart, images)?;
    let sub = Substitution::new(chart.table(), chart.table(), images.to_vec())?;
    Semidensity::new(chart, &sub.apply(s.coeff())? * &root)
}

/// `exp(X_H)` on coordinates for an odd Hamiltonian whose field is
/// nilpotent on generators.
pub fn hamiltonian_flow(chart: &ChartRef, h: &SuperPolynomial) -> Result<Vec<SuperPolynomial>> {
    let pi = chart.poisson()?;
    let field: HomogeneousVectorField = pi.hamiltonian_field(h)?;
    if field.parity.is_odd() {
        return Err(Error::UnsupportedMap(
            "an even Hamiltonian generates an odd flow".into(),
        ));
    }
    let t = chart.table();
    let limit = 4 * (h.total_degree() as usize + 2) * t.len();
    (0..t.len())
        .map(|i| {
            let mut term = chart.var(i);
            let mut acc = term.clone();
            for k in 1..=limit {
                term = field.apply(&term).scale(&qf(1, k as i64));
                if term.is_zero() {
                    return Ok(acc);
                }
                acc = &acc + &term;
            }
            Err(Error::UnsupportedMap(format!(
                "flow of {h} does not terminate on `{}`",
                t.var(i).name
            )))
        })
        .collect()
}

/// Square root with positive constant term, by the binomial series in
/// `u = p/c0 − 1` truncated at a degree that bounds any exact root.
fn sqrt_poly(p: &SuperPolynomial) -> Option<SuperPolynomial> {
    let t = p.table();
    let c0 = p.constant_term();
    if !c0.is_positive() {
        return None;
    }
    let r0 = sqrt_exact(&c0)?;
    let u = &p.scale(&(Q::one() / &c0)) - &SuperPolynomial::one(t);
    let bound = p.total_degree() + t.odd_indices().len() as u32;
    let mut root = SuperPolynomial::one(t);
    let mut power = SuperPolynomial::one(t);
    let mut coef = Q::one();
    for k in 1..=bound {
        power = truncate(&(&power * &u), bound);
        if power.is_zero() {
            break;
        }
        // binom(1/2, k) = binom(1/2, k−1) · (1/2 − k + 1) / k
        coef = coef * (qf(1, 2) - q(k as i64 - 1)) / q(k as i64);
        root = &root + &power.scale(&coef);
    }
    let root = root.scale(&r0);
    (&root * &root == *p).then_some(root)
}

fn truncate(p: &SuperPolynomial, max_degree: u32) -> SuperPolynomial {
    SuperPolynomial::from_terms(
        p.table(),
        p.terms()
            .iter()
            .filter(|(m, _)| m.degree() <= max_degree)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Inverse of `c0 + ν` with `c0 ≠ 0` constant and `ν` nilpotent (every
/// term contains an odd variable).
fn unit_inverse(p: &SuperPolynomial) -> Option<SuperPolynomial> {
    let t = p.table();
    let c0 = p.constant_term();
    if c0.is_zero() {
        return None;
    }
    let odd = t.odd_indices();
    let nu = &p.scale(&(Q::one() / &c0)) - &SuperPolynomial::one(t);
    if nu.terms().keys().any(|m| odd.iter().all(|&i| m.0[i] == 0)) {
        return None;
    }
    let mut acc = SuperPolynomial::one(t);
    let mut power = SuperPolynomial::one(t);
    loop {
        power = -&(&power * &nu);
        if power.is_zero() {
            break;
        }
        acc = &acc + &power;
    }
    Some(acc.scale(&(Q::one() / c0)))
}

/// Determinant of a matrix of even polynomials (Laplace expansion).
fn poly_det(m: &[Vec<SuperPolynomial>], t: &crate::graded::TableRef) -> SuperPolynomial {
    let n = m.len();
    if n == 0 {
        return SuperPolynomial::one(t);
    }
    let mut out = SuperPolynomial::zero(t);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<SuperPolynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &poly_det(&minor, t);
        out = if j % 2 == 0 { &out + &term } else { &out - &term };
    }
    out
}

fn adjugate(m: &[Vec<SuperPolynomial>], t: &crate::graded::TableRef) -> Vec<Vec<SuperPolynomial>> {
    let n = m.len();
    let mut adj = vec![vec![SuperPolynomial::zero(t); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<SuperPolynomial>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let c = poly_det(&minor, t);
            adj[j][i] = if (i + j) % 2 == 0 { c } else { -&c };
        }
    }
    adj
}

fn mat(rows: &[&[i64]]) -> Mat {
    rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

/// Linear block maps and Hamiltonian shears on one and two pairs, plus a
/// genuinely odd shear on three pairs.
pub fn catalog() -> Result<Vec<MapEntry>> {
    let one = DarbouxChart::standard(1)?;
    let two = DarbouxChart::standard(2)?;
    let three = DarbouxChart::standard(3)?;
    let mut out = Vec::new();
    let mut linear = |name: &str, chart: &ChartRef, a: Mat| -> Result<()> {
        let m = LinearSymplecticMap::new(chart, a)?;
        out.push(MapEntry {
            name: name.into(),
            chart: chart.clone(),
            images: m.images(chart),
        });
        Ok(())
    };
    linear("identity", &one, mat(&[&[1]]))?;
    linear("scale x by 2", &one, mat(&[&[2]]))?;
    linear("scale x by -3", &one, mat(&[&[-3]]))?;
    linear("upper unipotent", &two, mat(&[&[1, 1], &[0, 1]]))?;
    linear("lower unipotent", &two, mat(&[&[1, 0], &[3, 1]]))?;
    linear("cat map", &two, mat(&[&[2, 1], &[1, 1]]))?;
    linear("swap", &two, mat(&[&[0, 1], &[1, 0]]))?;
    linear(
        "anisotropic scaling",
        &two,
        vec![vec![q(2), q(0)], vec![q(0), qf(1, 3)]],
    )?;
    let var = |c: &ChartRef, name: &str| SuperPolynomial::var(c.table(), name);
    let mut flow = |name: &str, chart: &ChartRef, h: SuperPolynomial| -> Result<()> {
        out.push(MapEntry {
            name: name.into(),
            chart: chart.clone(),
            images: hamiltonian_flow(chart, &h)?,
        });
        Ok(())
    };
    flow("translation", &one, var(&one, "ξ")?)?;
    flow("linear shear x2 ξ1", &two, &var(&two, "x2")? * &var(&two, "ξ1")?)?;
    flow(
        "quadratic shear x2^2 ξ1",
        &two,
        &var(&two, "x2")?.pow(2) * &var(&two, "ξ1")?,
    )?;
    flow(
        "cubic shear (x1^3 + x1) ξ2",
        &two,
        &(&var(&two, "x1")?.pow(3) + &var(&two, "x1")?) * &var(&two, "ξ2")?,
    )?;
    flow(
        "odd shear ξ1 ξ2 ξ3",
        &three,
        &(&var(&three, "ξ1")? * &var(&three, "ξ2")?) * &var(&three, "ξ3")?,
    )?;
    flow(
        "odd shear x1 ξ1 ξ2 ξ3",
        &three,
        &(&(&var(&three, "x1")? * &var(&three, "ξ1")?) * &var(&three, "ξ2")?) * &var(&three, "ξ3")?,
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{random_poly, rng};

    #[test]
    fn linear_scaling_has_expected_root() {
        let ch = DarbouxChart::standard(1).unwrap();
        let m = LinearSymplecticMap::new(&ch, mat(&[&[2]])).unwrap();
        let root = sqrt_berezinian(&ch, &m.images(&ch)).unwrap();
        assert_eq!(root, SuperPolynomial::constant(ch.table(), q(2)));
        // det A / det D = 2 / (1/2) = 4
        let s = Semidensity::new(&ch, ch.var(0)).unwrap();
        let out = darboux_transform(&m.images(&ch), &s).unwrap();
        assert_eq!(out.coeff(), &ch.var(0).scale(&q(4)));
    }

    #[test]
    fn non_symplectic_map_is_rejected() {
        let ch = DarbouxChart::standard(1).unwrap();
        let images = vec![ch.var(0).scale(&q(2)), ch.var(1)];
        assert!(matches!(sqrt_berezinian(&ch, &images), Err(Error::Contract(_))));
    }

    #[test]
    fn transforms_commute_with_delta() {
        let mut r = rng(5);
        for entry in catalog().unwrap() {
            let ch = &entry.chart;
            let vars: Vec<usize> = (0..ch.table().len()).collect();
            for _ in 0..10 {
                let s = Semidensity::new(ch, random_poly(&mut r, ch.table(), &vars, 4, 4, None)).unwrap();
                let a = darboux_transform(&entry.images, &s.bv_delta()).unwrap();
                let b = darboux_transform(&entry.images, &s).unwrap().bv_delta();
                assert_eq!(a, b, "map {}", entry.name);
            }
        }
    }
}
