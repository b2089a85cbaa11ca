//! The filtered deformation `Ω_π(X)` of differential forms.
//!
//! Elements are kept in normal form: function coefficients on the left, then
//! a canonically ordered word of d-symbols. Internally an element is a
//! polynomial over the table `(z^1..z^n, d(z^1)..d(z^n))`, whose canonical
//! monomials are exactly the normal-form words. Only the product differs
//! from the graded-commutative one; it is computed by two rewriting rules:
//!
//! * `dg·f = (−1)^{|f|(|g|+1)} (f·dg − {f,g})` for a coordinate `g`,
//! * `[dz^i, dz^j] = d{z^i, z^j}`.
//!
//! Both rules strictly lower the filtration or the number of inversions, so
//! the recursion terminates; the step budget only guards against misuse.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graded::{same_table, Monomial, Parity, Role, SuperPolynomial, TableRef, VarTable, Variable};
use crate::linalg;
use crate::poisson::{homogeneous, OddPoissonStructure};
use crate::rational::{binomial, Q};
use crate::testing::{self, SuiteRng};

pub const DEFAULT_STEP_BUDGET: usize = 5_000_000;

/// Name of the d-symbol over a coordinate.
pub fn dname(z: &str) -> String {
    format!("d({z})")
}

/// Normal-form element of `Ω_π(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedElement {
    poly: SuperPolynomial,
}

impl DeformedElement {
    pub fn as_poly(&self) -> &SuperPolynomial {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Filtration degree: the largest number of d-symbols in a term.
    pub fn filtration_degree(&self) -> u32 {
        let n = self.poly.table().len() / 2;
        let d: Vec<usize> = (n..2 * n).collect();
        self.poly.degree_in(&d)
    }

    pub fn scale(&self, c: &Q) -> Self {
        DeformedElement {
            poly: self.poly.scale(c),
        }
    }

    pub fn homogeneous_parity(&self) -> Option<Parity> {
        self.poly.homogeneous_parity()
    }
}

impl std::ops::Add for &DeformedElement {
    type Output = DeformedElement;
    fn add(self, rhs: &DeformedElement) -> DeformedElement {
        DeformedElement {
            poly: &self.poly + &rhs.poly,
        }
    }
}

impl std::ops::Sub for &DeformedElement {
    type Output = DeformedElement;
    fn sub(self, rhs: &DeformedElement) -> DeformedElement {
        DeformedElement {
            poly: &self.poly - &rhs.poly,
        }
    }
}

impl std::ops::Neg for &DeformedElement {
    type Output = DeformedElement;
    fn neg(self) -> DeformedElement {
        DeformedElement { poly: -&self.poly }
    }
}

impl fmt::Display for DeformedElement {
    /// `coef * d(z1)^e1 d(z2) ...`, grouped by d-word, ordered by
    /// filtration degree and then monomial order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table = self.poly.table();
        let n = table.len() / 2;
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, Q)>> = BTreeMap::new();
        for (m, c) in self.poly.terms() {
            let mut coef = m.0.clone();
            let word = coef.split_off(n);
            coef.resize(2 * n, 0);
            let mut w = vec![0; n];
            w.extend(word);
            groups.entry(Monomial(w)).or_default().push((Monomial(coef), c.clone()));
        }
        if groups.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (word, terms) in groups {
            let coef = SuperPolynomial::from_terms(table, terms);
            let dpart = crate::graded::render_monomial(table, &word).replace('*', " ");
            let mut s = if dpart.is_empty() {
                coef.to_string()
            } else if coef.as_constant() == Some(Q::one()) {
                dpart
            } else if coef.as_constant() == Some(-Q::one()) {
                format!("-{dpart}")
            } else if coef.len() == 1 {
                format!("{coef} * {dpart}")
            } else {
                format!("({coef}) * {dpart}")
            };
            if !first {
                if let Some(rest) = s.strip_prefix('-') {
                    s = format!(" - {rest}");
                } else {
                    s = format!(" + {s}");
                }
            }
            first = false;
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

struct Ctx {
    steps: usize,
    budget: usize,
}

impl Ctx {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(Error::Consistency(format!(
                "normal ordering exceeded the step budget of {}",
                self.budget
            )))
        } else {
            Ok(())
        }
    }
}

/// `Ω_π(X)` for a fixed odd Poisson structure.
pub struct DeformedForms {
    pi: OddPoissonStructure,
    forms: TableRef,
    n: usize,
    budget: usize,
    word_cache: Mutex<HashMap<(usize, Vec<u32>), SuperPolynomial>>,
    bracket_cache: Mutex<HashMap<(Vec<u32>, usize), SuperPolynomial>>,
}

impl DeformedForms {
    pub fn new(pi: &OddPoissonStructure) -> Result<Self> {
        let base = pi.base();
        let mut vars: Vec<Variable> = base.vars().to_vec();
        for v in base.vars() {
            vars.push(Variable {
                name: dname(&v.name),
                parity: v.parity.flip(),
                degree: v.degree.map(|d| d + 1),
                role: Role::DSymbol,
            });
        }
        Ok(DeformedForms {
            pi: pi.clone(),
            forms: VarTable::new(vars)?,
            n: base.len(),
            budget: DEFAULT_STEP_BUDGET,
            word_cache: Mutex::new(HashMap::new()),
            bracket_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn structure(&self) -> &OddPoissonStructure {
        &self.pi
    }

    pub fn base(&self) -> &TableRef {
        self.pi.base()
    }

    /// The table of `Ω(X)`: coordinates followed by their d-symbols.
    pub fn forms_table(&self) -> &TableRef {
        &self.forms
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn ctx(&self) -> Ctx {
        Ctx {
            steps: 0,
            budget: self.budget,
        }
    }

    fn wrap(&self, poly: SuperPolynomial) -> DeformedElement {
        DeformedElement { poly }
    }

    pub fn zero(&self) -> DeformedElement {
        self.wrap(SuperPolynomial::zero(&self.forms))
    }

    pub fn one(&self) -> DeformedElement {
        self.wrap(SuperPolynomial::one(&self.forms))
    }

    /// A function as an element of filtration degree 0.
    pub fn function(&self, f: &SuperPolynomial) -> Result<DeformedElement> {
        if same_table(f.table(), &self.forms) {
            if !f.is_free_of(&self.dsym_indices()) {
                return Err(Error::Domain("expected a function without d-symbols".into()));
            }
            return Ok(self.wrap(f.clone()));
        }
        Ok(self.wrap(self.lift(f)?))
    }

    /// Reads a normal-form element written over the forms table.
    pub fn from_normal_form(&self, p: &SuperPolynomial) -> Result<DeformedElement> {
        if !same_table(p.table(), &self.forms) {
            return Err(Error::Structural("element is not over the forms table".into()));
        }
        Ok(self.wrap(p.clone()))
    }

    pub fn coordinate(&self, i: usize) -> DeformedElement {
        self.wrap(SuperPolynomial::var_index(&self.forms, i))
    }

    pub fn dsym(&self, i: usize) -> DeformedElement {
        self.wrap(SuperPolynomial::var_index(&self.forms, self.n + i))
    }

    pub fn dsym_parity(&self, i: usize) -> Parity {
        self.forms.parity(self.n + i)
    }

    fn dsym_indices(&self) -> Vec<usize> {
        (self.n..2 * self.n).collect()
    }

    fn lift(&self, f: &SuperPolynomial) -> Result<SuperPolynomial> {
        if !same_table(f.table(), self.base()) {
            return Err(Error::Structural("function is not over the base table".into()));
        }
        let n = self.n;
        Ok(SuperPolynomial::from_terms(
            &self.forms,
            f.terms().iter().map(|(m, c)| {
                let mut e = m.0.clone();
                e.resize(2 * n, 0);
                (Monomial(e), c.clone())
            }),
        ))
    }

    /// Coefficient part of a forms-table monomial, as a base monomial.
    fn coef_part(&self, m: &Monomial) -> Monomial {
        Monomial(m.0[..self.n].to_vec())
    }

    fn word_part(&self, m: &Monomial) -> Vec<u32> {
        m.0[self.n..].to_vec()
    }

    fn word_poly(&self, w: &[u32]) -> SuperPolynomial {
        let mut e = vec![0; self.n];
        e.extend_from_slice(w);
        SuperPolynomial::from_terms(&self.forms, [(Monomial(e), Q::one())])
    }

    /// `{f, z^i}_π` for a base monomial `f`, lifted to the forms table.
    fn bracket_with_coordinate(&self, f: &Monomial, i: usize) -> Result<SuperPolynomial> {
        let key = (f.0.clone(), i);
        if let Some(v) = self.bracket_cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let base = self.base();
        let fp = SuperPolynomial::from_terms(base, [(f.clone(), Q::one())]);
        let b = self.pi.odd_bracket(&fp, &SuperPolynomial::var_index(base, i))?;
        let v = self.lift(&b)?;
        self.bracket_cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// `dz^i · x` for a normal-form `x`.
    fn dsym_times(&self, i: usize, x: &SuperPolynomial, ctx: &mut Ctx) -> Result<SuperPolynomial> {
        let dpar = self.dsym_parity(i);
        let mut out = SuperPolynomial::zero(&self.forms);
        for (m, c) in x.terms() {
            ctx.tick()?;
            let fm = self.coef_part(m);
            let fpar = fm.parity(self.base());
            let neg = Parity::koszul(fpar, dpar);
            let mut fe = fm.0.clone();
            fe.resize(2 * self.n, 0);
            let f = SuperPolynomial::from_terms(&self.forms, [(Monomial(fe), c.clone())]);
            let word = self.word_part(m);
            let moved = &f * &self.dsym_times_word(i, &word, ctx)?;
            let br = self.bracket_with_coordinate(&fm, i)?.scale(c);
            let corr = if word.iter().all(|&e| e == 0) {
                br
            } else {
                &br * &self.word_poly(&word)
            };
            let term = &moved - &corr;
            out = if neg { &out - &term } else { &out + &term };
        }
        Ok(out)
    }

    /// `dz^i · D` for a canonically ordered d-word `D`.
    fn dsym_times_word(&self, i: usize, word: &[u32], ctx: &mut Ctx) -> Result<SuperPolynomial> {
        let key = (i, word.to_vec());
        if let Some(v) = self.word_cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        ctx.tick()?;
        let first = word.iter().position(|&e| e > 0);
        let result = match first {
            Some(j) if j < i => {
                // dz^i dz^j D' = ± dz^j (dz^i D') + d{z^i,z^j} D'
                let mut rest = word.to_vec();
                rest[j] -= 1;
                let inner = self.dsym_times_word(i, &rest, ctx)?;
                let swapped = self.dsym_times(j, &inner, ctx)?;
                let neg = Parity::koszul(self.dsym_parity(i), self.dsym_parity(j));
                let dbr = self.d_coordinate_bracket(i, j, ctx)?;
                let corr = self.times_word(&dbr, &rest, ctx)?;
                let s = if neg { -&swapped } else { swapped };
                &s + &corr
            }
            Some(j) if j == i && self.dsym_parity(i).is_odd() => {
                // odd dz^i squares to ½ [dz^i, dz^i] = ½ d{z^i, z^i}
                let mut rest = word.to_vec();
                rest[i] -= 1;
                let dbr = self.d_coordinate_bracket(i, i, ctx)?;
                self.times_word(&dbr, &rest, ctx)?.scale(&Q::new(1.into(), 2.into()))
            }
            _ => {
                let mut w = word.to_vec();
                w[i] += 1;
                self.word_poly(&w)
            }
        };
        self.word_cache.lock().unwrap().insert(key, result.clone());
        Ok(result)
    }

    fn d_coordinate_bracket(&self, i: usize, j: usize, ctx: &mut Ctx) -> Result<SuperPolynomial> {
        let b = self.lift(self.pi.coordinate_bracket(i, j))?;
        self.d_function(&b, ctx)
    }

    /// `x · D` for a pure d-word `D`.
    fn times_word(&self, x: &SuperPolynomial, word: &[u32], ctx: &mut Ctx) -> Result<SuperPolynomial> {
        if word.iter().all(|&e| e == 0) {
            return Ok(x.clone());
        }
        let rhs = self.word_poly(word);
        self.mul_raw(x, &rhs, ctx)
    }

    /// Letters of a canonical word in order.
    fn letters(word: &[u32]) -> Vec<usize> {
        word.iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
            .collect()
    }

    fn mul_raw(&self, a: &SuperPolynomial, b: &SuperPolynomial, ctx: &mut Ctx) -> Result<SuperPolynomial> {
        let mut out = SuperPolynomial::zero(&self.forms);
        let mut by_word: BTreeMap<Vec<u32>, SuperPolynomial> = BTreeMap::new();
        for (m, c) in a.terms() {
            let mut fe = self.coef_part(m).0;
            fe.resize(2 * self.n, 0);
            let f = SuperPolynomial::from_terms(&self.forms, [(Monomial(fe), c.clone())]);
            let e = by_word
                .entry(self.word_part(m))
                .or_insert_with(|| SuperPolynomial::zero(&self.forms));
            *e = &*e + &f;
        }
        for (word, f) in by_word {
            let mut acc = b.clone();
            for &l in Self::letters(&word).iter().rev() {
                acc = self.dsym_times(l, &acc, ctx)?;
            }
            out = &out + &(&f * &acc);
        }
        Ok(out)
    }

    /// `d` of a function (forms-table polynomial free of d-symbols).
    fn d_function(&self, h: &SuperPolynomial, ctx: &mut Ctx) -> Result<SuperPolynomial> {
        let mut out = SuperPolynomial::zero(&self.forms);
        for (m, c) in h.terms() {
            let letters = Self::letters(&m.0[..self.n]);
            for r in 0..letters.len() {
                ctx.tick()?;
                let prefix = SuperPolynomial::from_word(&self.forms, c.clone(), &letters[..r]);
                let suffix = SuperPolynomial::from_word(&self.forms, Q::one(), &letters[r + 1..]);
                let moved = self.dsym_times(letters[r], &suffix, ctx)?;
                let term = &prefix * &moved;
                let neg = prefix.homogeneous_parity() == Some(Parity::Odd);
                out = if neg { &out - &term } else { &out + &term };
            }
        }
        Ok(out)
    }

    fn check(&self, a: &DeformedElement) -> Result<()> {
        if same_table(a.poly.table(), &self.forms) {
            Ok(())
        } else {
            Err(Error::Structural("element belongs to a different algebra".into()))
        }
    }

    /// Normal-ordered product.
    pub fn mul(&self, a: &DeformedElement, b: &DeformedElement) -> Result<DeformedElement> {
        self.check(a)?;
        self.check(b)?;
        let mut ctx = self.ctx();
        Ok(self.wrap(self.mul_raw(&a.poly, &b.poly, &mut ctx)?))
    }

    pub fn product(&self, factors: &[DeformedElement]) -> Result<DeformedElement> {
        let mut acc = self.one();
        for f in factors {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    /// The differential: odd derivation with `d(z^i) = dz^i`, `d(dz^i) = 0`.
    pub fn d(&self, a: &DeformedElement) -> Result<DeformedElement> {
        self.check(a)?;
        let mut ctx = self.ctx();
        let mut out = SuperPolynomial::zero(&self.forms);
        let mut by_word: BTreeMap<Vec<u32>, SuperPolynomial> = BTreeMap::new();
        for (m, c) in a.poly.terms() {
            let mut fe = self.coef_part(m).0;
            fe.resize(2 * self.n, 0);
            let e = by_word
                .entry(self.word_part(m))
                .or_insert_with(|| SuperPolynomial::zero(&self.forms));
            e.add_term(Monomial(fe), c.clone());
        }
        for (word, f) in by_word {
            let df = self.d_function(&f, &mut ctx)?;
            out = &out + &self.times_word(&df, &word, &mut ctx)?;
        }
        Ok(self.wrap(out))
    }

    /// `d` of a base function.
    pub fn d_of(&self, f: &SuperPolynomial) -> Result<DeformedElement> {
        self.d(&self.function(f)?)
    }

    /// Supercommutator `[a, b] = ab − (−1)^{|a||b|} ba` (homogeneous inputs).
    pub fn supercommutator(&self, a: &DeformedElement, b: &DeformedElement) -> Result<DeformedElement> {
        let pa = homogeneous(&a.poly)?;
        let pb = homogeneous(&b.poly)?;
        let ab = self.mul(a, b)?;
        let ba = self.mul(b, a)?;
        Ok(if Parity::koszul(pa, pb) { &ab + &ba } else { &ab - &ba })
    }

    /// Filtration degree and leading form in `Ω(X)`.
    pub fn gr_symbol(&self, a: &DeformedElement) -> Result<(u32, SuperPolynomial)> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::Domain("gr_symbol of zero".into()));
        }
        let k = a.filtration_degree();
        let ds = self.dsym_indices();
        let lead = SuperPolynomial::from_terms(
            &self.forms,
            a.poly
                .terms()
                .iter()
                .filter(|(m, _)| ds.iter().map(|&i| m.0[i]).sum::<u32>() == k)
                .map(|(m, c)| (m.clone(), c.clone())),
        );
        Ok((k, lead))
    }

    /// `[f, dg] − {f, g}_π`; zero whenever the commutation relation holds.
    pub fn commutation_defect(&self, f: &SuperPolynomial, g: &SuperPolynomial) -> Result<DeformedElement> {
        let fe = self.function(f)?;
        let dg = self.d_of(g)?;
        let lhs = self.supercommutator(&fe, &dg)?;
        let rhs = self.function(&self.pi.odd_bracket(f, g)?)?;
        Ok(&lhs - &rhs)
    }

    /// Random element: a few terms `f · D` with `deg f ≤ max_coef_degree`,
    /// filtration at most `max_filtration`.
    pub fn random_element(
        &self,
        rng: &mut SuiteRng,
        max_coef_degree: u32,
        max_filtration: u32,
        max_terms: usize,
    ) -> DeformedElement {
        let base_vars: Vec<usize> = (0..self.n).collect();
        let dvars: Vec<usize> = self.dsym_indices();
        let mut p = SuperPolynomial::zero(&self.forms);
        let terms = rng.gen_range(1..=max_terms);
        for _ in 0..terms {
            let a = testing::random_monomial(rng, &self.forms, &base_vars, max_coef_degree);
            let b = testing::random_monomial(rng, &self.forms, &dvars, max_filtration);
            let m = Monomial(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect());
            p.add_term(m, crate::rational::q(rng.gen_range(1..=3)));
        }
        self.wrap(p)
    }

    /// Certifies associativity and `d² = 0`: exhaustively on generator
    /// triples, then on `samples` random triples.
    pub fn consistency_check(&self, samples: usize, seed: u64) -> Result<ConsistencyReport> {
        let mut checked = 0;
        let gens: Vec<(String, DeformedElement)> = (0..self.n)
            .map(|i| (self.base().var(i).name.clone(), self.coordinate(i)))
            .chain((0..self.n).map(|i| (dname(&self.base().var(i).name), self.dsym(i))))
            .collect();
        for (na, a) in &gens {
            for (nb, b) in &gens {
                for (nc, c) in &gens {
                    checked += 1;
                    if let Some(w) = self.associativity_witness(a, b, c)? {
                        return Ok(ConsistencyReport::fail(checked, format!("({na}, {nb}, {nc}): {w}")));
                    }
                }
            }
        }
        for (na, a) in &gens[..self.n] {
            for (nb, b) in &gens[..self.n] {
                checked += 1;
                let f = self.mul(a, b)?;
                let dd = self.d(&self.d(&f)?)?;
                if !dd.is_zero() {
                    return Ok(ConsistencyReport::fail(checked, format!("d²({na}·{nb}) = {dd}")));
                }
            }
        }
        let mut rng = testing::rng(seed);
        for _ in 0..samples {
            checked += 1;
            let a = self.random_element(&mut rng, 2, 2, 2);
            let b = self.random_element(&mut rng, 2, 2, 2);
            let c = self.random_element(&mut rng, 2, 1, 2);
            if let Some(w) = self.associativity_witness(&a, &b, &c)? {
                return Ok(ConsistencyReport::fail(checked, format!("({a}, {b}, {c}): {w}")));
            }
            let dd = self.d(&self.d(&a)?)?;
            if !dd.is_zero() {
                return Ok(ConsistencyReport::fail(checked, format!("d²({a}) = {dd}")));
            }
        }
        Ok(ConsistencyReport {
            passed: true,
            checked,
            witness: None,
        })
    }

    fn associativity_witness(
        &self,
        a: &DeformedElement,
        b: &DeformedElement,
        c: &DeformedElement,
    ) -> Result<Option<DeformedElement>> {
        let left = self.mul(&self.mul(a, b)?, c)?;
        let right = self.mul(a, &self.mul(b, c)?)?;
        let diff = &left - &right;
        Ok((!diff.is_zero()).then_some(diff))
    }

    /// Compares normal-form basis sizes per filtration level with the free
    /// graded-commutative counts, and measures the rank of the leading
    /// symbols of products written in reversed (non-normal) order.
    pub fn gr_dimension_check(&self, max_coef_degree: u32, max_filtration: u32) -> Result<Vec<GrLevel>> {
        let base = self.base();
        let n_even = base.even_indices().len() as u32;
        let n_odd = base.odd_indices().len() as u32;
        let mut out = Vec::new();
        for k in 0..=max_filtration {
            let basis = self.normal_basis(max_coef_degree, k);
            let free_count = free_count(n_even, n_odd, max_coef_degree) * free_count_exact(n_odd, n_even, k);
            let mut rows: Vec<Vec<Q>> = Vec::new();
            let mut index: HashMap<Monomial, usize> = HashMap::new();
            let mut leading_ok = true;
            for m in &basis {
                let mut letters: Vec<usize> = Self::letters(&m.0);
                letters.reverse();
                let factors: Vec<DeformedElement> = letters
                    .iter()
                    .map(|&l| self.wrap(SuperPolynomial::var_index(&self.forms, l)))
                    .collect();
                let prod = self.product(&factors)?;
                if prod.is_zero() {
                    leading_ok = false;
                    continue;
                }
                let (deg, lead) = self.gr_symbol(&prod)?;
                if deg != k {
                    leading_ok = false;
                }
                let mut row = vec![Q::zero(); index.len()];
                for (lm, c) in lead.terms() {
                    let next = index.len();
                    let col = *index.entry(lm.clone()).or_insert(next);
                    if col >= row.len() {
                        row.resize(col + 1, Q::zero());
                    }
                    row[col] = c.clone();
                }
                rows.push(row);
            }
            let cols = index.len();
            for r in rows.iter_mut() {
                r.resize(cols, Q::zero());
            }
            let rank = linalg::rank(&rows, cols);
            out.push(GrLevel {
                filtration: k,
                normal_count: basis.len() as u64,
                free_count,
                leading_rank: rank as u64,
                leading_degrees_ok: leading_ok,
            });
        }
        Ok(out)
    }

    /// Normal-form monomials with coefficient degree ≤ `max_coef_degree`
    /// and exactly `k` d-symbols.
    pub fn normal_basis(&self, max_coef_degree: u32, k: u32) -> Vec<Monomial> {
        let coefs = enumerate(&self.forms, &(0..self.n).collect::<Vec<_>>(), max_coef_degree, false);
        let words = enumerate(&self.forms, &self.dsym_indices(), k, true);
        let mut out = Vec::new();
        for a in &coefs {
            for b in &words {
                out.push(Monomial(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()));
            }
        }
        out
    }
}

/// Monomials in `vars` of total degree ≤ `deg` (or exactly `deg`).
fn enumerate(table: &VarTable, vars: &[usize], deg: u32, exact: bool) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = Monomial::one(table.len());
    fn rec(table: &VarTable, vars: &[usize], left: u32, exact: bool, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        match vars.split_first() {
            None => {
                if !exact || left == 0 {
                    out.push(cur.clone());
                }
            }
            Some((&v, rest)) => {
                let cap = if table.is_odd(v) { left.min(1) } else { left };
                for e in 0..=cap {
                    cur.0[v] = e;
                    rec(table, rest, left - e, exact, cur, out);
                }
                cur.0[v] = 0;
            }
        }
    }
    rec(table, vars, deg, exact, &mut cur, &mut out);
    out
}

/// Number of monomials of degree ≤ `d` in `e` even and `o` odd variables.
pub fn free_count(e: u32, o: u32, d: u32) -> u64 {
    (0..=o.min(d))
        .map(|j| {
            let c = binomial(o, j) * binomial(d - j + e, e);
            u64::try_from(c).unwrap()
        })
        .sum()
}

/// Number of monomials of degree exactly `k` in `e` even and `o` odd
/// variables.
pub fn free_count_exact(e: u32, o: u32, k: u32) -> u64 {
    (0..=o.min(k))
        .map(|j| {
            let rest = k - j;
            let evens = if e == 0 {
                u64::from(rest == 0)
            } else {
                u64::try_from(binomial(rest + e - 1, e - 1)).unwrap()
            };
            u64::try_from(binomial(o, j)).unwrap() * evens
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrLevel {
    pub filtration: u32,
    pub normal_count: u64,
    pub free_count: u64,
    pub leading_rank: u64,
    pub leading_degrees_ok: bool,
}

impl GrLevel {
    pub fn ok(&self) -> bool {
        self.normal_count == self.free_count && self.leading_rank == self.free_count && self.leading_degrees_ok
    }
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

impl ConsistencyReport {
    fn fail(checked: usize, w: String) -> Self {
        ConsistencyReport {
            passed: false,
            checked,
            witness: Some(w),
        }
    }
}

pub type SharedForms = Arc<DeformedForms>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{darboux, LieStructureConstants};
    use crate::rational::q;

    fn darboux1() -> DeformedForms {
        DeformedForms::new(&darboux(1, 1).unwrap()).unwrap()
    }

    #[test]
    fn moving_functions_left() {
        let a = darboux1();
        let (x, dx, dxi) = (a.coordinate(0), a.dsym(0), a.dsym(1));
        let p = a.mul(&dxi, &x).unwrap();
        assert_eq!(p.to_string(), "-1 + x * d(ξ)");
        assert_eq!(a.mul(&dx, &x).unwrap().to_string(), "x * d(x)");
    }

    #[test]
    fn darboux_triple_both_bracketings() {
        let a = darboux1();
        let (x, dxi) = (a.coordinate(0), a.dsym(1));
        let l = a.mul(&a.mul(&dxi, &x).unwrap(), &x).unwrap();
        let r = a.mul(&dxi, &a.mul(&x, &x).unwrap()).unwrap();
        assert_eq!(l, r);
        // hand rewrite: dξ x x = (x dξ − 1) x = x (x dξ − 1) − x = x² dξ − 2x
        assert_eq!(l.to_string(), "-2*x + x^2 * d(ξ)");
    }

    #[test]
    fn differential_basics() {
        let a = darboux1();
        let x = a.coordinate(0);
        assert_eq!(a.d(&x).unwrap(), a.dsym(0));
        let xxi = a.mul(&x, &a.coordinate(1)).unwrap();
        let d = a.d(&xxi).unwrap();
        assert_eq!(d.filtration_degree(), 1);
        assert!(a.d(&d).unwrap().is_zero());
    }

    #[test]
    fn enveloping_relations_for_kirillov_kostant() {
        let c = LieStructureConstants::sl2();
        let pi = OddPoissonStructure::kirillov_kostant(&c).unwrap();
        let a = DeformedForms::new(&pi).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let lhs = &a.mul(&a.dsym(i), &a.dsym(j)).unwrap() - &a.mul(&a.dsym(j), &a.dsym(i)).unwrap();
                let mut rhs = a.zero();
                for k in 0..3 {
                    rhs = &rhs + &a.dsym(k).scale(c.get(i, j, k));
                }
                assert_eq!(lhs, rhs, "({i},{j})");
            }
        }
    }

    #[test]
    fn gr_symbol_drops_lower_filtration() {
        let a = darboux1();
        let p = a.mul(&a.dsym(1), &a.coordinate(0)).unwrap();
        let (k, lead) = a.gr_symbol(&p).unwrap();
        assert_eq!(k, 1);
        assert_eq!(lead.to_string(), "x*d(ξ)");
        let five = a.function(&SuperPolynomial::constant(a.base(), q(5))).unwrap();
        assert_eq!(
            a.gr_symbol(&five).unwrap(),
            (0, SuperPolynomial::constant(a.forms_table(), q(5)))
        );
        assert!(a.gr_symbol(&a.zero()).is_err());
    }

    #[test]
    fn zero_structure_is_free() {
        let base = VarTable::new(vec![Variable::even("x"), Variable::odd("θ")]).unwrap();
        let chart = crate::poisson::CotangentChart::new(&base).unwrap();
        let a = DeformedForms::new(&OddPoissonStructure::zero(&chart)).unwrap();
        assert!(a.consistency_check(20, 1).unwrap().passed);
    }

    #[test]
    fn free_counts() {
        assert_eq!(free_count(1, 0, 3), 4);
        assert_eq!(free_count(0, 2, 5), 4);
        assert_eq!(free_count_exact(1, 1, 2), 2);
        assert_eq!(free_count_exact(0, 2, 1), 2);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let a = DeformedForms::new(&darboux(1, 1).unwrap()).unwrap().with_budget(1);
        let r = a.mul(&a.dsym(1), &a.mul(&a.coordinate(0), &a.coordinate(0)).unwrap());
        assert!(matches!(r, Err(Error::Consistency(_))));
    }
}
