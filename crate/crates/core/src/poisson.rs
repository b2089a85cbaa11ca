//! Odd Poisson structures as odd functions on the cotangent bundle that are
//! quadratic in the momenta.
//!
//! The even canonical bracket on `T*X` is the one forced by
//! `{z^i, p_j} = δ^i_j`, graded antisymmetry and graded Leibniz. The odd
//! bracket on functions is the sign-corrected derived bracket
//! `{f, g}_π = (−1)^{|f|} {{π, f}, g}|_{p=0}`; `{π, π} = 0` is the Jacobi
//! identity. The factor `(−1)^{|f|}` turns the derived bracket, which is
//! symmetric up to `(−1)^{|f||g|}`, into one with the odd symmetry
//! `{f,g} = −(−1)^{(|f|+1)(|g|+1)}{g,f}` and the matching Jacobi identity.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graded::{same_table, Monomial, Parity, Role, SuperPolynomial, TableRef, VarTable, Variable};
use crate::rational::Q;

pub const MOMENTUM_PREFIX: &str = "p_";

/// Base coordinates `z^i` together with conjugate momenta `p_i`.
///
/// The full table lists all base variables first, then the momenta in the
/// same order, so lifting a base function never changes a sign.
#[derive(Debug, Clone)]
pub struct CotangentChart {
    base: TableRef,
    full: TableRef,
}

impl PartialEq for CotangentChart {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.base, &other.base)
    }
}

impl CotangentChart {
    pub fn new(base: &TableRef) -> Result<Arc<Self>> {
        let mut vars: Vec<Variable> = base.vars().to_vec();
        for v in base.vars() {
            vars.push(Variable {
                name: format!("{MOMENTUM_PREFIX}{}", v.name),
                parity: v.parity,
                degree: v.degree.map(|d| -d),
                role: Role::Momentum,
            });
        }
        Ok(Arc::new(CotangentChart {
            base: base.clone(),
            full: VarTable::new(vars)?,
        }))
    }

    pub fn base(&self) -> &TableRef {
        &self.base
    }

    pub fn full(&self) -> &TableRef {
        &self.full
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn momentum(&self, i: usize) -> usize {
        self.dim() + i
    }

    pub fn momentum_indices(&self) -> Vec<usize> {
        (self.dim()..2 * self.dim()).collect()
    }

    /// Base function viewed on `T*X`.
    pub fn lift(&self, f: &SuperPolynomial) -> Result<SuperPolynomial> {
        if same_table(f.table(), &self.full) {
            return Ok(f.clone());
        }
        if !same_table(f.table(), &self.base) {
            return Err(Error::Structural("function is not over this chart".into()));
        }
        let n = self.dim();
        Ok(SuperPolynomial::from_terms(
            &self.full,
            f.terms().iter().map(|(m, c)| {
                let mut e = m.0.clone();
                e.resize(2 * n, 0);
                (Monomial(e), c.clone())
            }),
        ))
    }

    /// Momentum-free function on `T*X` as a base function.
    pub fn project(&self, f: &SuperPolynomial) -> Result<SuperPolynomial> {
        if same_table(f.table(), &self.base) {
            return Ok(f.clone());
        }
        if !same_table(f.table(), &self.full) {
            return Err(Error::Structural("function is not over this chart".into()));
        }
        if !f.is_free_of(&self.momentum_indices()) {
            return Err(Error::Domain(format!("function depends on momenta: {f}")));
        }
        let n = self.dim();
        Ok(SuperPolynomial::from_terms(
            &self.base,
            f.terms().iter().map(|(m, c)| (Monomial(m.0[..n].to_vec()), c.clone())),
        ))
    }

    pub fn coordinate(&self, i: usize) -> SuperPolynomial {
        SuperPolynomial::var_index(&self.base, i)
    }

    /// The even canonical bracket on `T*X`:
    /// `{F,G} = Σ_i (F∂⃖_{z_i})(∂_{p_i}G) − (−1)^{|z_i|}(F∂⃖_{p_i})(∂_{z_i}G)`.
    pub fn canonical_bracket(&self, f: &SuperPolynomial, g: &SuperPolynomial) -> Result<SuperPolynomial> {
        let f = self.lift(f)?;
        let g = self.lift(g)?;
        let mut out = SuperPolynomial::zero(&self.full);
        for i in 0..self.dim() {
            let p = self.momentum(i);
            let a = &f.right_deriv_index(i) * &g.deriv_index(p);
            let b = &f.right_deriv_index(p) * &g.deriv_index(i);
            out = &out + &a;
            out = if self.base.is_odd(i) { &out + &b } else { &out - &b };
        }
        Ok(out)
    }
}

/// A vector field `Σ X^i ∂_{z^i}` of definite parity.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousVectorField {
    pub components: Vec<SuperPolynomial>,
    pub parity: Parity,
}

impl HomogeneousVectorField {
    pub fn new(base: &TableRef, components: Vec<SuperPolynomial>, parity: Parity) -> Result<Self> {
        if components.len() != base.len() {
            return Err(Error::Structural("vector field arity mismatch".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if !same_table(c.table(), base) {
                return Err(Error::Structural("vector field component over wrong table".into()));
            }
            let want = parity + base.parity(i);
            if !c.is_zero() && c.homogeneous_parity() != Some(want) {
                return Err(Error::Parity(format!(
                    "component {} of a {parity} field must be {want}: {c}",
                    base.var(i).name
                )));
            }
        }
        Ok(HomogeneousVectorField { components, parity })
    }

    pub fn zero(base: &TableRef, parity: Parity) -> Self {
        HomogeneousVectorField {
            components: vec![SuperPolynomial::zero(base); base.len()],
            parity,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SuperPolynomial::is_zero)
    }

    /// `X(g) = Σ X^i ∂ᴸ_i g`.
    pub fn apply(&self, g: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(g.table());
        for (i, c) in self.components.iter().enumerate() {
            out = &out + &(c * &g.deriv_index(i));
        }
        out
    }

    /// Graded divergence `Σ (−1)^{|z^i|(|X|+1)} ∂ᴸ_i X^i`.
    pub fn divergence(&self) -> SuperPolynomial {
        let base = self.components[0].table().clone();
        let mut out = SuperPolynomial::zero(&base);
        for (i, c) in self.components.iter().enumerate() {
            let d = c.deriv_index(i);
            let neg = base.is_odd(i) && !self.parity.is_odd();
            out = if neg { &out - &d } else { &out + &d };
        }
        out
    }

    /// `Σ X^i p_i` on the cotangent chart.
    pub fn momentum_linear(&self, chart: &CotangentChart) -> Result<SuperPolynomial> {
        let mut out = SuperPolynomial::zero(chart.full());
        for (i, c) in self.components.iter().enumerate() {
            let p = SuperPolynomial::var_index(chart.full(), chart.momentum(i));
            out = &out + &(&chart.lift(c)? * &p);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        HomogeneousVectorField {
            components: self.components.iter().map(|x| x.scale(c)).collect(),
            parity: self.parity,
        }
    }
}

/// Lie algebra structure constants `c^k_{ij}`, antisymmetric in `(i, j)`.
/// The Jacobi identity is not assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct LieStructureConstants {
    dim: usize,
    /// `c[i][j][k] = c^k_{ij}`
    c: Vec<Vec<Vec<Q>>>,
}

impl LieStructureConstants {
    pub fn new(dim: usize) -> Self {
        LieStructureConstants {
            dim,
            c: vec![vec![vec![Q::zero(); dim]; dim]; dim],
        }
    }

    /// Sets `c^k_{ij}` and `c^k_{ji} = −c^k_{ij}` (indices from 0).
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Q) -> Result<()> {
        if i >= self.dim || j >= self.dim || k >= self.dim {
            return Err(Error::Structural(format!(
                "structure constant index out of range ({i},{j},{k})"
            )));
        }
        if i == j && !v.is_zero() {
            return Err(Error::Contract("c^k_{ii} must vanish".into()));
        }
        self.c[j][i][k] = -v.clone();
        self.c[i][j][k] = v;
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.c[i][j][k]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(dim)
    }

    /// `[e1,e2] = e3, [e3,e1] = 2e1, [e3,e2] = −2e2` (with `e3 = h`).
    pub fn sl2() -> Self {
        let mut c = Self::new(3);
        c.set(0, 1, 2, Q::one()).unwrap();
        c.set(2, 0, 0, Q::from_integer(2.into())).unwrap();
        c.set(2, 1, 1, Q::from_integer((-2).into())).unwrap();
        c
    }

    /// `[e1,e2] = e3`, `e3` central.
    pub fn heisenberg() -> Self {
        let mut c = Self::new(3);
        c.set(0, 1, 2, Q::one()).unwrap();
        c
    }

    /// sl₂ with `[e3, e1] = 3e1`: violates Jacobi.
    ///
    /// Rescaling `c³₁₂` alone would not do: that is a change of basis.
    pub fn sl2_perturbed() -> Self {
        let mut c = Self::sl2();
        c.set(2, 0, 0, Q::from_integer(3.into())).unwrap();
        c
    }

    /// Dual bracket `[θ1,θ2] = θ1, [θ2,θ3] = −θ3`; together with [`Self::sl2`]
    /// it forms a Lie bialgebra, so `Q = CE(this)` solves the master
    /// equation against the Kirillov–Kostant structure of sl₂.
    pub fn sl2_compatible_dual() -> Self {
        let mut c = Self::new(3);
        c.set(0, 1, 0, Q::one()).unwrap();
        c.set(1, 2, 2, -Q::one()).unwrap();
        c
    }

    /// Jacobiator component `Σ_l c^l_{ij}c^m_{lk} + cyclic`.
    pub fn jacobi_defect(&self) -> Option<(usize, usize, usize, usize, Q)> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut s = Q::zero();
                        for l in 0..n {
                            s += &self.c[i][j][l] * &self.c[l][k][m];
                            s += &self.c[j][k][l] * &self.c[l][i][m];
                            s += &self.c[k][i][l] * &self.c[l][j][m];
                        }
                        if !s.is_zero() {
                            return Some((i, j, k, m, s));
                        }
                    }
                }
            }
        }
        None
    }

    /// Odd coordinates `θ1..θn` of degree 1 on the shifted dual.
    pub fn odd_dual_table(&self) -> TableRef {
        VarTable::new(
            (1..=self.dim)
                .map(|i| Variable::odd(format!("θ{i}")).with_degree(1))
                .collect(),
        )
        .expect("valid table")
    }
}

#[derive(Debug, Clone)]
pub struct JacobiReport {
    pub holds: bool,
    /// `{π, π}` when nonzero.
    pub witness: Option<SuperPolynomial>,
}

/// Odd Poisson structure `π` on a cotangent chart.
#[derive(Debug, Clone)]
pub struct OddPoissonStructure {
    chart: Arc<CotangentChart>,
    pi: SuperPolynomial,
    /// `{z^i, z^j}_π` for all `i, j`.
    brackets: Vec<Vec<SuperPolynomial>>,
}

impl OddPoissonStructure {
    /// From an assembled function on `T*X`.
    pub fn from_function(chart: &Arc<CotangentChart>, pi: SuperPolynomial) -> Result<Self> {
        let pi = chart.lift(&pi)?;
        if !pi.is_zero() && pi.homogeneous_parity() != Some(Parity::Odd) {
            return Err(Error::Parity(format!("π must be odd: {pi}")));
        }
        let moms = chart.momentum_indices();
        for m in pi.terms().keys() {
            let d: u32 = moms.iter().map(|&i| m.0[i]).sum();
            if d != 2 {
                return Err(Error::Domain(format!("π must be quadratic in momenta: {pi}")));
            }
        }
        let mut s = OddPoissonStructure {
            chart: chart.clone(),
            pi,
            brackets: Vec::new(),
        };
        let n = chart.dim();
        let mut b = vec![vec![SuperPolynomial::zero(chart.base()); n]; n];
        for (i, row) in b.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = s.raw_bracket(&chart.coordinate(i), &chart.coordinate(j))?;
            }
        }
        s.brackets = b;
        Ok(s)
    }

    pub fn zero(chart: &Arc<CotangentChart>) -> Self {
        Self::from_function(chart, SuperPolynomial::zero(chart.full())).unwrap()
    }

    /// Assembles `π` from prescribed coordinate brackets `{z^i, z^j}`.
    ///
    /// Entries not listed are zero; listing both `(i, j)` and `(j, i)` is
    /// allowed if they agree with the odd symmetry rule.
    pub fn from_brackets(chart: &Arc<CotangentChart>, entries: &[(usize, usize, SuperPolynomial)]) -> Result<Self> {
        let n = chart.dim();
        let base = chart.base();
        let mut want: BTreeMap<(usize, usize), SuperPolynomial> = BTreeMap::new();
        for (i, j, v) in entries {
            let (i, j) = (*i, *j);
            if i >= n || j >= n {
                return Err(Error::Structural("bracket index out of range".into()));
            }
            if !same_table(v.table(), base) {
                return Err(Error::Structural("bracket value must be a base function".into()));
            }
            let expect = base.parity(i) + base.parity(j) + Parity::Odd;
            if !v.is_zero() && v.homogeneous_parity() != Some(expect) {
                return Err(Error::Parity(format!(
                    "{{{},{}}} must be {expect}: {v}",
                    base.var(i).name,
                    base.var(j).name
                )));
            }
            let (key, val) = if i <= j {
                ((i, j), v.clone())
            } else {
                ((j, i), Self::swap_sign(base, i, j, v))
            };
            if let Some(prev) = want.get(&key) {
                if *prev != val {
                    return Err(Error::Contract(format!(
                        "inconsistent entries for {{{},{}}}",
                        base.var(key.0).name,
                        base.var(key.1).name
                    )));
                }
            }
            want.insert(key, val);
        }
        let mut pi = SuperPolynomial::zero(chart.full());
        for (&(a, b), val) in &want {
            if val.is_zero() {
                continue;
            }
            let pa = SuperPolynomial::var_index(chart.full(), chart.momentum(a));
            let pb = SuperPolynomial::var_index(chart.full(), chart.momentum(b));
            let mu = &pa * &pb;
            if mu.is_zero() {
                return Err(Error::Contract(format!(
                    "{{{0},{0}}} must vanish for odd {0}",
                    base.var(a).name
                )));
            }
            let s = derived_bracket(chart, &mu, &chart.coordinate(a), &chart.coordinate(b))?
                .as_constant()
                .filter(|s| !s.is_zero())
                .ok_or_else(|| Error::Consistency("degenerate bracket normalization".into()))?;
            let coeff = chart.lift(&val.scale(&(Q::one() / s)))?;
            pi = &pi + &(&coeff * &mu);
        }
        let out = Self::from_function(chart, pi)?;
        for (&(a, b), val) in &want {
            if &out.brackets[a][b] != val {
                return Err(Error::Consistency("assembled π does not reproduce its brackets".into()));
            }
        }
        Ok(out)
    }

    /// `{z^j, z^i}` from `{z^i, z^j}` by odd symmetry.
    fn swap_sign(base: &TableRef, i: usize, j: usize, v: &SuperPolynomial) -> SuperPolynomial {
        let s = (base.parity(i) + Parity::Odd).is_odd() && (base.parity(j) + Parity::Odd).is_odd();
        if s {
            v.clone()
        } else {
            -v
        }
    }

    /// Kirillov–Kostant structure on the odd dual: `{θ_i, θ_j} = Σ_k c^k_{ij} θ_k`.
    pub fn kirillov_kostant(c: &LieStructureConstants) -> Result<Self> {
        let base = c.odd_dual_table();
        let chart = CotangentChart::new(&base)?;
        let mut entries = Vec::new();
        for i in 0..c.dim() {
            for j in i + 1..c.dim() {
                let mut v = SuperPolynomial::zero(&base);
                for k in 0..c.dim() {
                    v = &v + &SuperPolynomial::var_index(&base, k).scale(c.get(i, j, k));
                }
                entries.push((i, j, v));
            }
        }
        Self::from_brackets(&chart, &entries)
    }

    pub fn chart(&self) -> &Arc<CotangentChart> {
        &self.chart
    }

    pub fn base(&self) -> &TableRef {
        self.chart.base()
    }

    pub fn function(&self) -> &SuperPolynomial {
        &self.pi
    }

    /// `{z^i, z^j}_π`.
    pub fn coordinate_bracket(&self, i: usize, j: usize) -> &SuperPolynomial {
        &self.brackets[i][j]
    }

    /// Total degree of `π` when every variable carries a degree and `π`
    /// is homogeneous.
    pub fn degree(&self) -> Option<i64> {
        let ds = self.pi.weighted_degrees()?;
        let first = *ds.first()?;
        ds.iter().all(|&d| d == first).then_some(first)
    }

    fn as_base(&self, f: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.chart.project(f)
    }

    fn raw_bracket(&self, f: &SuperPolynomial, g: &SuperPolynomial) -> Result<SuperPolynomial> {
        derived_bracket(&self.chart, &self.pi, f, g)
    }

    /// Odd bracket `{f, g}_π = (−1)^{|f|} {{π, f}, g}|_{p=0}`.
    pub fn odd_bracket(&self, f: &SuperPolynomial, g: &SuperPolynomial) -> Result<SuperPolynomial> {
        let f = self.as_base(f)?;
        let g = self.as_base(g)?;
        self.raw_bracket(&f, &g)
    }

    pub fn jacobi_check(&self) -> Result<JacobiReport> {
        let w = self.chart.canonical_bracket(&self.pi, &self.pi)?;
        Ok(JacobiReport {
            holds: w.is_zero(),
            witness: (!w.is_zero()).then_some(w),
        })
    }

    /// `{f,{g,h}} − {{f,g},h} − (−1)^{(|f|+1)(|g|+1)} {g,{f,h}}` for
    /// parity-homogeneous arguments.
    pub fn jacobiator(&self, f: &SuperPolynomial, g: &SuperPolynomial, h: &SuperPolynomial) -> Result<SuperPolynomial> {
        let pf = homogeneous(f)?;
        let pg = homogeneous(g)?;
        let lhs = self.odd_bracket(f, &self.odd_bracket(g, h)?)?;
        let a = self.odd_bracket(&self.odd_bracket(f, g)?, h)?;
        let b = self.odd_bracket(g, &self.odd_bracket(f, h)?)?;
        let neg = Parity::koszul(pf.flip(), pg.flip());
        let rhs = if neg { &a - &b } else { &a + &b };
        Ok(&lhs - &rhs)
    }

    /// First coordinate triple with a nonzero jacobiator.
    pub fn jacobi_violation(&self) -> Result<Option<(usize, usize, usize, SuperPolynomial)>> {
        let n = self.chart.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = |t| self.chart.coordinate(t);
                    let w = self.jacobiator(&c(i), &c(j), &c(k))?;
                    if !w.is_zero() {
                        return Ok(Some((i, j, k, w)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Components `X_f^i = {f, z^i}_π`; parity `|f| + 1`.
    pub fn hamiltonian_field(&self, f: &SuperPolynomial) -> Result<HomogeneousVectorField> {
        let f = self.as_base(f)?;
        let parity = homogeneous(&f)?.flip();
        let comps = (0..self.chart.dim())
            .map(|i| self.odd_bracket(&f, &self.chart.coordinate(i)))
            .collect::<Result<Vec<_>>>()?;
        HomogeneousVectorField::new(self.base(), comps, parity)
    }

    /// Expands `{π̃, π̃}` for `π̃ = π + Q^i p_i p_t + φ p_t²` on
    /// `T*(X × ℝ[2])`, returning the coefficients of `p_t^0 .. p_t^4`
    /// (as functions on the extended cotangent chart with `p_t` removed).
    pub fn master_equation_expand(
        &self,
        q: &HomogeneousVectorField,
        phi: &SuperPolynomial,
    ) -> Result<Vec<SuperPolynomial>> {
        let base = self.base();
        if base.get("t").is_some() {
            return Err(Error::Structural("base already has a variable named `t`".into()));
        }
        if q.parity != Parity::Odd {
            return Err(Error::Domain("Q must be an odd vector field".into()));
        }
        let phi = self.as_base(phi)?;
        if !phi.is_zero() && phi.homogeneous_parity() != Some(Parity::Odd) {
            return Err(Error::Domain(format!("φ must be odd: {phi}")));
        }
        let graded = base.vars().iter().all(|v| v.degree.is_some());
        let mut vars = base.vars().to_vec();
        let mut t = Variable::even("t").with_role(Role::FormalTime);
        if graded {
            t = t.with_degree(2);
        }
        vars.push(t);
        let ext = CotangentChart::new(&VarTable::new(vars)?)?;
        let full = ext.full();
        let pt_idx = ext.momentum(base.len());
        let pt = SuperPolynomial::var_index(full, pt_idx);
        let pi = self.pi.retable(full)?;
        let qp = q.momentum_linear(&self.chart)?.retable(full)?;
        let phi = self.chart.lift(&phi)?.retable(full)?;
        let total = &(&pi + &(&qp * &pt)) + &(&phi * &(&pt * &pt));
        let sq = ext.canonical_bracket(&total, &total)?;
        let mut parts = sq.split_even_powers(pt_idx);
        parts.resize(5, SuperPolynomial::zero(full));
        Ok(parts)
    }
}

/// `(−1)^{|f|} {{F, f}, g}|_{p=0}` for any function `F` on `T*X`, extended
/// to inhomogeneous `f` by parity components.
fn derived_bracket(
    chart: &CotangentChart,
    big: &SuperPolynomial,
    f: &SuperPolynomial,
    g: &SuperPolynomial,
) -> Result<SuperPolynomial> {
    let mut out = SuperPolynomial::zero(chart.base());
    for (parity, part) in f.parity_components() {
        let inner = chart.canonical_bracket(big, &part)?;
        let outer = chart.canonical_bracket(&inner, g)?;
        let v = chart.project(&outer.restrict_zero(&chart.momentum_indices()))?;
        out = if parity.is_odd() { &out - &v } else { &out + &v };
    }
    Ok(out)
}

pub fn homogeneous(f: &SuperPolynomial) -> Result<Parity> {
    f.homogeneous_parity()
        .ok_or_else(|| Error::Parity(format!("expected a parity-homogeneous element: {f}")))
}

/// Darboux structure on `n` pairs `x_i` (even), `ξ_i` (odd) with
/// `{x_i, ξ_j} = sign · δ_ij`.
pub fn darboux(pairs: usize, sign: i64) -> Result<OddPoissonStructure> {
    let mut vars = Vec::new();
    for i in 1..=pairs {
        vars.push(Variable::even(suffixed("x", i, pairs)));
    }
    for i in 1..=pairs {
        vars.push(Variable::odd(suffixed("ξ", i, pairs)));
    }
    let base = VarTable::new(vars)?;
    let chart = CotangentChart::new(&base)?;
    let one = SuperPolynomial::constant(&base, Q::from_integer(sign.into()));
    let entries: Vec<_> = (0..pairs).map(|i| (i, pairs + i, one.clone())).collect();
    OddPoissonStructure::from_brackets(&chart, &entries)
}

fn suffixed(stem: &str, i: usize, n: usize) -> String {
    if n == 1 {
        stem.to_string()
    } else {
        format!("{stem}{i}")
    }
}

/// Chevalley–Eilenberg field `Q(θ_k) = ½ Σ c^k_{ij} θ_i θ_j` on the odd
/// coordinates of [`LieStructureConstants::odd_dual_table`].
pub fn chevalley_eilenberg(c: &LieStructureConstants, base: &TableRef) -> Result<HomogeneousVectorField> {
    let half = Q::new(1.into(), 2.into());
    let comps = (0..c.dim())
        .map(|k| {
            let mut v = SuperPolynomial::zero(base);
            for i in 0..c.dim() {
                for j in 0..c.dim() {
                    let t = &SuperPolynomial::var_index(base, i) * &SuperPolynomial::var_index(base, j);
                    v = &v + &t.scale(&(c.get(i, j, k) * &half));
                }
            }
            v
        })
        .collect();
    HomogeneousVectorField::new(base, comps, Parity::Odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn canonical_bracket_defining_relations() {
        let base = VarTable::new(vec![Variable::even("x")]).unwrap();
        let ch = CotangentChart::new(&base).unwrap();
        let x = SuperPolynomial::var_index(ch.full(), 0);
        let p = SuperPolynomial::var_index(ch.full(), 1);
        assert_eq!(ch.canonical_bracket(&x, &p).unwrap().as_constant(), Some(q(1)));
        assert_eq!(ch.canonical_bracket(&(&x * &x), &p).unwrap(), x.scale(&q(2)));
        assert_eq!(ch.canonical_bracket(&p, &x).unwrap().as_constant(), Some(q(-1)));
    }

    #[test]
    fn darboux_bracket() {
        let pi = darboux(1, 1).unwrap();
        let x = pi.chart().coordinate(0);
        let xi = pi.chart().coordinate(1);
        assert_eq!(pi.odd_bracket(&x, &xi).unwrap().as_constant(), Some(q(1)));
        assert!(pi.odd_bracket(&x, &x).unwrap().is_zero());
        assert!(pi.jacobi_check().unwrap().holds);
    }

    #[test]
    fn momentum_dependent_input_is_a_domain_error() {
        let pi = darboux(1, 1).unwrap();
        let p = SuperPolynomial::var_index(pi.chart().full(), 2);
        let x = pi.chart().coordinate(0);
        assert!(matches!(pi.odd_bracket(&p, &x), Err(Error::Domain(_))));
    }

    #[test]
    fn kirillov_kostant_brackets_reproduce_constants() {
        let c = LieStructureConstants::sl2();
        let pi = OddPoissonStructure::kirillov_kostant(&c).unwrap();
        assert_eq!(pi.degree(), Some(-1));
        let th = |i| pi.chart().coordinate(i);
        // direct component oracle: Σ_k c^k_{ij} θ_k
        for i in 0..3 {
            for j in 0..3 {
                let mut want = SuperPolynomial::zero(pi.base());
                for k in 0..3 {
                    want = &want + &th(k).scale(c.get(i, j, k));
                }
                assert_eq!(pi.odd_bracket(&th(i), &th(j)).unwrap(), want, "({i},{j})");
            }
        }
    }

    #[test]
    fn jacobi_detects_perturbation() {
        let good = OddPoissonStructure::kirillov_kostant(&LieStructureConstants::sl2()).unwrap();
        assert!(good.jacobi_check().unwrap().holds);
        let bad = OddPoissonStructure::kirillov_kostant(&LieStructureConstants::sl2_perturbed()).unwrap();
        let r = bad.jacobi_check().unwrap();
        assert!(!r.holds);
        assert!(!r.witness.unwrap().is_zero());
        assert!(bad.jacobi_violation().unwrap().is_some());
        assert!(LieStructureConstants::sl2_perturbed().jacobi_defect().is_some());
        assert!(LieStructureConstants::sl2().jacobi_defect().is_none());
    }

    #[test]
    fn rescaled_sl2_still_satisfies_jacobi() {
        let mut c = LieStructureConstants::sl2();
        c.set(0, 1, 2, q(2)).unwrap();
        assert!(c.jacobi_defect().is_none());
        let pi = OddPoissonStructure::kirillov_kostant(&c).unwrap();
        assert!(pi.jacobi_check().unwrap().holds);
    }

    #[test]
    fn hamiltonian_fields() {
        let pi = darboux(1, 1).unwrap();
        let x = pi.chart().coordinate(0);
        let xf = pi.hamiltonian_field(&x).unwrap();
        assert!(xf.components[0].is_zero());
        assert_eq!(xf.components[1].as_constant(), Some(q(1)));
        assert_eq!(xf.parity, Parity::Odd);
        let c = SuperPolynomial::constant(pi.base(), q(5));
        assert!(pi.hamiltonian_field(&c).unwrap().is_zero());
    }

    #[test]
    fn trivial_master_equation() {
        let c = LieStructureConstants::abelian(3);
        let pi = OddPoissonStructure::kirillov_kostant(&c).unwrap();
        let q0 = HomogeneousVectorField::zero(pi.base(), Parity::Odd);
        let parts = pi
            .master_equation_expand(&q0, &SuperPolynomial::zero(pi.base()))
            .unwrap();
        assert!(parts.iter().all(SuperPolynomial::is_zero));
    }

    #[test]
    fn master_equation_for_sl2() {
        let c = LieStructureConstants::sl2();
        let pi = OddPoissonStructure::kirillov_kostant(&c).unwrap();
        let zero = SuperPolynomial::zero(pi.base());

        let same = chevalley_eilenberg(&c, pi.base()).unwrap();
        let parts = pi.master_equation_expand(&same, &zero).unwrap();
        assert!(parts[0].is_zero() && parts[2].is_zero());
        assert_eq!(
            parts[1].to_string(),
            "-14*θ1*θ2*p_θ1*p_θ2 - 2*θ1*θ3*p_θ1*p_θ3 - 2*θ2*θ3*p_θ2*p_θ3"
        );

        let dual = LieStructureConstants::sl2_compatible_dual();
        assert!(dual.jacobi_defect().is_none());
        let q_dual = chevalley_eilenberg(&dual, pi.base()).unwrap();
        let parts = pi.master_equation_expand(&q_dual, &zero).unwrap();
        assert!(parts.iter().all(SuperPolynomial::is_zero));
    }

    #[test]
    fn master_equation_with_cubic_phi() {
        let c = LieStructureConstants::abelian(3);
        let pi = OddPoissonStructure::kirillov_kostant(&c).unwrap();
        let th = |i| pi.chart().coordinate(i);
        let phi = &(&th(0) * &th(1)) * &th(2);
        let q0 = HomogeneousVectorField::zero(pi.base(), Parity::Odd);
        let parts = pi.master_equation_expand(&q0, &phi).unwrap();
        assert_eq!(parts.len(), 5);
        assert!(parts.iter().all(SuperPolynomial::is_zero));
    }
}
