//! Free graded-commutative polynomial algebra over the rationals.
//!
//! Variables are declared once in a [`VarTable`]; a [`SuperPolynomial`] is a
//! sparse map from canonical monomials to nonzero rational coefficients.
//! Odd variables square to zero and anticommute; monomials store their odd
//! factors in table order, so every product is canonicalized by the sign of
//! the sorting permutation.
//!
//! Only polynomial functions are represented. Every identity checked by this
//! crate is a polynomial identity, so nothing is lost for verification.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{render_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u32 {
        self as u32
    }

    pub fn from_bit(b: u32) -> Parity {
        if b.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        self + Parity::Odd
    }

    /// Koszul sign `(-1)^{|a||b|}` as a bool (true = negative).
    pub fn koszul(a: Parity, b: Parity) -> bool {
        a.is_odd() && b.is_odd()
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Coordinate,
    Momentum,
    DSymbol,
    FormalTime,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub parity: Parity,
    pub degree: Option<i32>,
    pub role: Role,
}

impl Variable {
    pub fn new(name: impl Into<String>, parity: Parity) -> Self {
        Variable {
            name: name.into(),
            parity,
            degree: None,
            role: Role::Coordinate,
        }
    }

    pub fn even(name: impl Into<String>) -> Self {
        Self::new(name, Parity::Even)
    }

    pub fn odd(name: impl Into<String>) -> Self {
        Self::new(name, Parity::Odd)
    }

    pub fn with_degree(mut self, degree: i32) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }
}

/// Ordered, immutable set of declared variables.
#[derive(Debug)]
pub struct VarTable {
    vars: Vec<Variable>,
    odd: Vec<bool>,
    index: HashMap<String, usize>,
}

impl PartialEq for VarTable {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
    }
}

impl Eq for VarTable {}

pub type TableRef = Arc<VarTable>;

impl VarTable {
    pub fn new(vars: Vec<Variable>) -> Result<TableRef> {
        let mut index = HashMap::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            if v.name.is_empty() {
                return Err(Error::Structural("empty variable name".into()));
            }
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::Structural(format!("duplicate variable `{}`", v.name)));
            }
            if let Some(d) = v.degree {
                if Parity::from_bit(d.rem_euclid(2) as u32) != v.parity {
                    return Err(Error::Parity(format!(
                        "variable `{}` has degree {d} but is {}",
                        v.name, v.parity
                    )));
                }
            }
        }
        let odd = vars.iter().map(|v| v.parity.is_odd()).collect();
        Ok(Arc::new(VarTable { vars, odd, index }))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &Variable {
        &self.vars[i]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.vars[i].parity
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Structural(format!("unknown variable `{name}`")))
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn odd_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.odd[i]).collect()
    }

    pub fn even_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.odd[i]).collect()
    }
}

/// Exponent vector aligned with the table; odd entries are 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn parity(&self, table: &VarTable) -> Parity {
        let odd = self
            .0
            .iter()
            .enumerate()
            .filter(|&(i, &e)| e > 0 && table.is_odd(i))
            .count();
        Parity::from_bit(odd as u32)
    }

    /// Number of odd factors with index strictly below `i`.
    fn odd_before(&self, table: &VarTable, i: usize) -> usize {
        (0..i).filter(|&j| table.is_odd(j) && self.0[j] > 0).count()
    }

    /// Product `a * b`; `None` if an odd variable repeats. The bool is true
    /// when sorting the odd factors contributed a minus sign.
    pub fn mul(table: &VarTable, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut swaps = 0usize;
        let mut odd_in_a_above =
            a.0.iter()
                .enumerate()
                .filter(|&(i, &e)| e > 0 && table.is_odd(i))
                .count();
        let mut out = Vec::with_capacity(a.0.len());
        for (i, (&ea, &eb)) in a.0.iter().zip(&b.0).enumerate() {
            if table.is_odd(i) {
                if ea > 0 {
                    odd_in_a_above -= 1;
                }
                if eb > 0 {
                    if ea > 0 {
                        return None;
                    }
                    swaps += odd_in_a_above;
                }
            }
            out.push(ea + eb);
        }
        Some((Monomial(out), swaps % 2 == 1))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Element of the free graded-commutative algebra on a [`VarTable`].
#[derive(Clone, Debug)]
pub struct SuperPolynomial {
    table: TableRef,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for SuperPolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for SuperPolynomial {}

pub fn same_table(a: &TableRef, b: &TableRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_tables(a: &TableRef, b: &TableRef) -> Result<()> {
    if same_table(a, b) {
        Ok(())
    } else {
        Err(Error::Structural("operands live over different variable tables".into()))
    }
}

impl SuperPolynomial {
    pub fn zero(table: &TableRef) -> Self {
        SuperPolynomial {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &TableRef, c: Q) -> Self {
        let mut p = Self::zero(table);
        p.add_term(Monomial::one(table.len()), c);
        p
    }

    pub fn one(table: &TableRef) -> Self {
        Self::constant(table, Q::one())
    }

    pub fn var_index(table: &TableRef, i: usize) -> Self {
        let mut p = Self::zero(table);
        p.add_term(Monomial::var(table.len(), i), Q::one());
        p
    }

    pub fn var(table: &TableRef, name: &str) -> Result<Self> {
        Ok(Self::var_index(table, table.index_of(name)?))
    }

    /// Builds `c * v1 * v2 * ...` from an arbitrary word of variable
    /// indices, applying the Koszul sign of the sorting permutation.
    pub fn from_word(table: &TableRef, c: Q, word: &[usize]) -> Self {
        let mut p = Self::constant(table, c);
        for &i in word {
            p = &p * &Self::var_index(table, i);
        }
        p
    }

    pub fn from_terms(table: &TableRef, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Self::zero(table);
        for (m, c) in terms {
            assert_eq!(m.0.len(), table.len(), "monomial length mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn table(&self) -> &TableRef {
        &self.table
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Q> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Monomial::one(self.table.len()))
    }

    /// The value if this polynomial is a constant.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        SuperPolynomial {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_tables(&self.table, &other.table)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_tables(&self.table, &other.table)?;
        let mut out = Self::zero(&self.table);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = Monomial::mul(&self.table, ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.table);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Parity of every term, or `None` for a mixed polynomial. Zero is even.
    pub fn homogeneous_parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.table));
        let first = it.next().unwrap_or(Parity::Even);
        it.all(|p| p == first).then_some(first)
    }

    pub fn parity_part(&self, parity: Parity) -> Self {
        SuperPolynomial {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.parity(&self.table) == parity)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn even_part(&self) -> Self {
        self.parity_part(Parity::Even)
    }

    pub fn odd_part(&self) -> Self {
        self.parity_part(Parity::Odd)
    }

    /// Splits into `(parity, part)` pairs with nonzero parts.
    pub fn parity_components(&self) -> Vec<(Parity, Self)> {
        [Parity::Even, Parity::Odd]
            .into_iter()
            .map(|p| (p, self.parity_part(p)))
            .filter(|(_, part)| !part.is_zero())
            .collect()
    }

    /// One polynomial per term, each parity homogeneous.
    pub fn monomial_terms(&self) -> impl Iterator<Item = (Parity, Self)> + '_ {
        self.terms.iter().map(move |(m, c)| {
            (
                m.parity(&self.table),
                Self::from_terms(&self.table, [(m.clone(), c.clone())]),
            )
        })
    }

    /// Left derivative by the variable at index `i`.
    pub fn deriv_index(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.table);
        let odd = self.table.is_odd(i);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            let coeff = if odd {
                if m.odd_before(&self.table, i) % 2 == 1 {
                    -c.clone()
                } else {
                    c.clone()
                }
            } else {
                c * Q::from_integer(BigInt::from(e))
            };
            out.add_term(dm, coeff);
        }
        out
    }

    pub fn deriv(&self, name: &str) -> Result<Self> {
        Ok(self.deriv_index(self.table.index_of(name)?))
    }

    /// Right derivative `a ∂⃖/∂v = (-1)^{|v|(|a|+1)} ∂ᴸ_v a`, term by term.
    pub fn right_deriv_index(&self, i: usize) -> Self {
        if !self.table.is_odd(i) {
            return self.deriv_index(i);
        }
        let mut out = Self::zero(&self.table);
        for (p, t) in self.monomial_terms() {
            let d = t.deriv_index(i);
            let d = if p.is_odd() { d } else { -&d };
            out = &out + &d;
        }
        out
    }

    /// Berezin integral `∫ dv a` with `∫ dv v = 1`.
    pub fn berezin_index(&self, i: usize) -> Result<Self> {
        if !self.table.is_odd(i) {
            return Err(Error::Structural(format!(
                "Berezin integration over even variable `{}`",
                self.table.var(i).name
            )));
        }
        Ok(self.deriv_index(i))
    }

    pub fn berezin(&self, name: &str) -> Result<Self> {
        self.berezin_index(self.table.index_of(name)?)
    }

    /// Iterated integral `∫dv1 ∫dv2 ... ∫dvk a` as written: the innermost
    /// (last listed) variable is integrated first.
    pub fn berezin_iter(&self, written: &[&str]) -> Result<Self> {
        let mut acc = self.clone();
        for name in written.iter().rev() {
            acc = acc.berezin(name)?;
        }
        Ok(acc)
    }

    /// Sets the listed variables to zero.
    pub fn restrict_zero(&self, indices: &[usize]) -> Self {
        SuperPolynomial {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| indices.iter().all(|&i| m.0[i] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// True if no term involves any listed variable.
    pub fn is_free_of(&self, indices: &[usize]) -> bool {
        self.terms.keys().all(|m| indices.iter().all(|&i| m.0[i] == 0))
    }

    /// Maximum total degree in the listed variables (0 for zero).
    pub fn degree_in(&self, indices: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| indices.iter().map(|&i| m.0[i]).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Coefficients of powers of the even variable `i`:
    /// `a = Σ_k c_k v^k` with `c_k` free of `v`.
    pub fn split_even_powers(&self, i: usize) -> Vec<Self> {
        assert!(!self.table.is_odd(i));
        let mut out: Vec<Self> = Vec::new();
        for (m, c) in &self.terms {
            let k = m.0[i] as usize;
            while out.len() <= k {
                out.push(Self::zero(&self.table));
            }
            let mut m2 = m.clone();
            m2.0[i] = 0;
            out[k].add_term(m2, c.clone());
        }
        out
    }

    /// Sum of weighted degrees `Σ deg(v)·e_v`, requiring declared degrees.
    pub fn weighted_degrees(&self) -> Option<Vec<i64>> {
        let mut out = Vec::new();
        for m in self.terms.keys() {
            let mut d = 0i64;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    d += self.table.var(i).degree? as i64 * e as i64;
                }
            }
            out.push(d);
        }
        Some(out)
    }

    /// Re-expresses this polynomial over `target`, mapping variables by name.
    pub fn retable(&self, target: &TableRef) -> Result<Self> {
        if same_table(&self.table, target) {
            return Ok(SuperPolynomial {
                table: target.clone(),
                terms: self.terms.clone(),
            });
        }
        Substitution::by_name(&self.table, target, [])?.apply(self)
    }

    pub fn substitute(&self, s: &Substitution) -> Result<Self> {
        s.apply(self)
    }
}

impl Add for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.checked_add(rhs).expect("table mismatch in add")
    }
}

impl Sub for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.checked_add(&-rhs).expect("table mismatch in sub")
    }
}

impl Neg for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        SuperPolynomial {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.checked_mul(rhs).expect("table mismatch in mul")
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let factors = render_monomial(&self.table, m);
            if factors.is_empty() {
                write!(f, "{}", render_q(&abs))?;
            } else if abs.is_one() {
                write!(f, "{factors}")?;
            } else {
                write!(f, "{}*{factors}", render_q(&abs))?;
            }
        }
        Ok(())
    }
}

pub fn render_monomial(table: &VarTable, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(table.var(i).name.clone()),
            _ => parts.push(format!("{}^{e}", table.var(i).name)),
        }
    }
    parts.join("*")
}

/// Algebra homomorphism determined by images of the source variables.
#[derive(Clone, Debug)]
pub struct Substitution {
    source: TableRef,
    target: TableRef,
    images: Vec<SuperPolynomial>,
}

impl Substitution {
    /// Explicit images for some variables; every other source variable maps
    /// to the same-named target variable, which must exist.
    pub fn by_name<'a>(
        source: &TableRef,
        target: &TableRef,
        map: impl IntoIterator<Item = (&'a str, SuperPolynomial)>,
    ) -> Result<Self> {
        let mut images: Vec<Option<SuperPolynomial>> = vec![None; source.len()];
        for (name, img) in map {
            let i = source.index_of(name)?;
            images[i] = Some(img);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| match img {
                Some(p) => Ok(p),
                None => SuperPolynomial::var(target, &source.var(i).name),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, images)
    }

    pub fn new(source: &TableRef, target: &TableRef, images: Vec<SuperPolynomial>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Structural("substitution arity mismatch".into()));
        }
        for (i, img) in images.iter().enumerate() {
            check_tables(img.table(), target)?;
            let want = source.parity(i);
            match img.homogeneous_parity() {
                Some(p) if p == want || img.is_zero() => {}
                _ => {
                    return Err(Error::Parity(format!(
                        "image of `{}` is not {want}: {img}",
                        source.var(i).name
                    )))
                }
            }
        }
        Ok(Substitution {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn source(&self) -> &TableRef {
        &self.source
    }

    pub fn target(&self) -> &TableRef {
        &self.target
    }

    pub fn image(&self, i: usize) -> &SuperPolynomial {
        &self.images[i]
    }

    pub fn apply(&self, a: &SuperPolynomial) -> Result<SuperPolynomial> {
        check_tables(a.table(), &self.source)?;
        let mut powers: HashMap<(usize, u32), SuperPolynomial> = HashMap::new();
        let mut out = SuperPolynomial::zero(&self.target);
        for (m, c) in a.terms() {
            let mut acc = SuperPolynomial::constant(&self.target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers.entry((i, e)).or_insert_with(|| self.images[i].pow(e));
                acc = &acc * p;
                if acc.is_zero() {
                    break;
                }
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &Substitution) -> Result<Substitution> {
        check_tables(&inner.target, &self.source)?;
        let images = inner.images.iter().map(|p| self.apply(p)).collect::<Result<Vec<_>>>()?;
        Substitution::new(&inner.source, &self.target, images)
    }
}
