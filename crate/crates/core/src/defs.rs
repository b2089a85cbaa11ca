//! Plain-text definition files and the expression language.
//!
//! ```text
//! [variables]
//! x: even
//! xi: odd, 1
//!
//! [poisson]
//! {x,xi} = 1
//!
//! [lie]
//! c[1,2]^3 = 1
//!
//! [lagrangian]
//! chart = 1, 1
//! basis = 1, 1
//!
//! [expression]
//! a = d(xi)*x
//! ```
//!
//! `[lie]` replaces `[variables]` and `[poisson]` with the Kirillov–Kostant
//! structure on `θ1..θn`. A `[lagrangian]` section may repeat; `chart` is
//! either `n` (a space with `n` pairs) or `n1, n2` (relations `Ȳ₁ × Y₂`),
//! followed by `basis` rows (vectors spanning the even part) or `form` rows
//! (linear forms cutting it out). Expressions are rationals, variables,
//! `+ - * ^`, parentheses, `d(z)`, `delta(ℓ)` and `exp(-q)`; ASCII names
//! `xi`, `theta`, `eta` stand for `ξ`, `θ`, `η`.

use ini::{Ini, ParseOption};
use num_traits::{One, Signed, Zero};

use crate::bv::{ChartRef, DarbouxChart, Distribution, Lagrangian};
use crate::deformed::{DeformedElement, DeformedForms};
use crate::error::{Error, Result};
use crate::graded::{Parity, SuperPolynomial, TableRef, VarTable, Variable};
use crate::linalg::{zeros, Mat};
use crate::poisson::{CotangentChart, LieStructureConstants, OddPoissonStructure};
use crate::rational::Q;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Q),
    Var(String),
    D(String),
    Delta(Box<Expr>),
    Exp(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Q),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i].iter().collect::<String>()
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let num = digits(&mut i);
            let mut value: Q = num
                .parse::<num_bigint::BigInt>()
                .map(Q::from_integer)
                .map_err(|e| parse_err(e.to_string()))?;
            // `p/q` with literal integers is a single rational
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                let den = digits(&mut i)
                    .parse::<num_bigint::BigInt>()
                    .map_err(|e| parse_err(e.to_string()))?;
                if den.is_zero() {
                    return Err(parse_err("division by zero"));
                }
                value /= Q::from_integer(den);
            }
            out.push(Token::Num(value));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(parse_err(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(parse_err(format!("expected `{c}`")))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.product()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while self.eat('*') {
            e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Token::Num(n)) if n.is_integer() && !n.is_negative() => {
                    self.pos += 1;
                    let k = n.to_integer().try_into().map_err(|_| parse_err("exponent too large"))?;
                    return Ok(Expr::Pow(Box::new(base), k));
                }
                _ => return Err(parse_err("exponent must be a nonnegative integer")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.peek() != Some(&Token::Sym('(')) {
                    return Ok(Expr::Var(name));
                }
                self.pos += 1;
                let e = match name.as_str() {
                    "d" => match self.peek().cloned() {
                        Some(Token::Ident(z)) => {
                            self.pos += 1;
                            Expr::D(z)
                        }
                        _ => return Err(parse_err("d(...) takes a variable")),
                    },
                    "delta" => Expr::Delta(Box::new(self.sum()?)),
                    "exp" => Expr::Exp(Box::new(self.sum()?)),
                    other => return Err(parse_err(format!("unknown function `{other}`"))),
                };
                self.expect(')')?;
                Ok(e)
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Token::Sym(c)) => Err(parse_err(format!("unexpected `{c}`"))),
            None => Err(parse_err("unexpected end of expression")),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser {
        tokens: tokenize(s)?,
        pos: 0,
    };
    let e = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(parse_err(format!("trailing input in `{s}`")));
    }
    Ok(e)
}

/// Index of `name` in `table`, accepting ASCII spellings of Greek stems.
pub fn resolve(table: &VarTable, name: &str) -> Result<usize> {
    if let Some(i) = table.get(name) {
        return Ok(i);
    }
    for (ascii, greek) in [("theta", "θ"), ("xi", "ξ"), ("eta", "η")] {
        if let Some(rest) = name.strip_prefix(ascii) {
            if let Some(i) = table.get(&format!("{greek}{rest}")) {
                return Ok(i);
            }
        }
    }
    Err(parse_err(format!("unknown variable `{name}`")))
}

impl Expr {
    /// Value in the polynomial algebra over `table` (no `d`, `delta`, `exp`).
    pub fn to_poly(&self, table: &TableRef) -> Result<SuperPolynomial> {
        Ok(match self {
            Expr::Num(q) => SuperPolynomial::constant(table, q.clone()),
            Expr::Var(v) => SuperPolynomial::var_index(table, resolve(table, v)?),
            Expr::Neg(a) => a.to_poly(table)?.scale(&-Q::one()),
            Expr::Add(a, b) => &a.to_poly(table)? + &b.to_poly(table)?,
            Expr::Sub(a, b) => &a.to_poly(table)? - &b.to_poly(table)?,
            Expr::Mul(a, b) => &a.to_poly(table)? * &b.to_poly(table)?,
            Expr::Pow(a, k) => a.to_poly(table)?.pow(*k),
            Expr::D(_) | Expr::Delta(_) | Expr::Exp(_) => {
                return Err(parse_err("d(), delta() and exp() are not polynomial"))
            }
        })
    }

    /// Value in `Ω_π`, multiplying in the written order.
    pub fn to_deformed(&self, omega: &DeformedForms) -> Result<DeformedElement> {
        Ok(match self {
            Expr::Num(q) => omega.one().scale(q),
            Expr::Var(v) => omega.coordinate(resolve(omega.base(), v)?),
            Expr::D(v) => omega.dsym(resolve(omega.base(), v)?),
            Expr::Neg(a) => a.to_deformed(omega)?.scale(&-Q::one()),
            Expr::Add(a, b) => &a.to_deformed(omega)? + &b.to_deformed(omega)?,
            Expr::Sub(a, b) => &a.to_deformed(omega)? - &b.to_deformed(omega)?,
            Expr::Mul(a, b) => omega.mul(&a.to_deformed(omega)?, &b.to_deformed(omega)?)?,
            Expr::Pow(a, k) => {
                let base = a.to_deformed(omega)?;
                omega.product(&vec![base; *k as usize])?
            }
            Expr::Delta(_) | Expr::Exp(_) => return Err(parse_err("delta() and exp() are not forms")),
        })
    }

    /// Value as a distributional semidensity on `chart`.
    pub fn to_distribution(&self, chart: &ChartRef) -> Result<Distribution> {
        let table = chart.table();
        Ok(match self {
            Expr::Num(_) | Expr::Var(_) => Distribution::from_polynomial(chart, &self.to_poly(table)?),
            Expr::Neg(a) => a.to_distribution(chart)?.scale(&-Q::one()),
            Expr::Add(a, b) => a.to_distribution(chart)?.add(&b.to_distribution(chart)?)?,
            Expr::Sub(a, b) => a.to_distribution(chart)?.sub(&b.to_distribution(chart)?)?,
            Expr::Mul(a, b) => a.to_distribution(chart)?.mul(&b.to_distribution(chart)?)?,
            Expr::Pow(a, k) => {
                let base = a.to_distribution(chart)?;
                let mut acc = Distribution::from_polynomial(chart, &SuperPolynomial::one(table));
                for _ in 0..*k {
                    acc = acc.mul(&base)?;
                }
                acc
            }
            Expr::Delta(arg) => delta_of(chart, &arg.to_poly(table)?)?,
            Expr::Exp(arg) => {
                let g = gaussian_of(chart, &arg.to_poly(table)?.scale(&-Q::one()))?;
                Distribution::term(chart, &SuperPolynomial::one(table), &[], &[], Some(&g))?
            }
            Expr::D(_) => return Err(parse_err("d() has no meaning for semidensities")),
        })
    }
}

/// `δ(ℓ)`: an even linear form gives a δ-factor, an odd one is its own δ.
fn delta_of(chart: &ChartRef, l: &SuperPolynomial) -> Result<Distribution> {
    let n = chart.pairs();
    match l.homogeneous_parity() {
        Some(Parity::Odd) => {
            if l.total_degree() != 1 || l.terms().keys().any(|m| m.degree() != 1) {
                return Err(Error::Domain(format!("δ of a non-linear odd expression {l}")));
            }
            Ok(Distribution::from_polynomial(chart, l))
        }
        _ => {
            let mut row = vec![Q::zero(); n];
            for (m, c) in l.terms() {
                let i = (0..n).find(|&i| m.0[chart.x(i)] == 1 && m.degree() == 1);
                match i {
                    Some(i) => row[i] = c.clone(),
                    None => return Err(Error::Domain(format!("δ needs a linear form in x, got {l}"))),
                }
            }
            if row.iter().all(Q::is_zero) {
                return Err(Error::Domain("δ of the zero form".into()));
            }
            Distribution::term(chart, &SuperPolynomial::one(chart.table()), &[row], &[0], None)
        }
    }
}

/// Symmetric `G` with `q = xᵀGx` for a quadratic form `q` in `x`.
fn gaussian_of(chart: &ChartRef, q: &SuperPolynomial) -> Result<Mat> {
    let n = chart.pairs();
    let mut g = zeros(n, n);
    for (m, c) in q.terms() {
        let xs: Vec<usize> = (0..n).filter(|&i| m.0[chart.x(i)] > 0).collect();
        if m.degree() != 2 || xs.iter().map(|&i| m.0[chart.x(i)]).sum::<u32>() != 2 {
            return Err(Error::Domain(format!(
                "exp needs minus a quadratic form in x, got exp(-({q}))"
            )));
        }
        match xs[..] {
            [i] => g[i][i] = c.clone(),
            [i, j] => {
                let half = c / Q::from_integer(2.into());
                g[i][j] = half.clone();
                g[j][i] = half;
            }
            _ => unreachable!("degree two"),
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LagrangianChart {
    Space(usize),
    Relation(usize, usize),
}

#[derive(Clone, Debug)]
pub struct LagrangianSpec {
    pub chart: LagrangianChart,
    pub basis: Option<Mat>,
    pub forms: Option<Mat>,
}

impl LagrangianSpec {
    pub fn build(&self) -> Result<Lagrangian> {
        let chart = match self.chart {
            LagrangianChart::Space(n) => DarbouxChart::standard(n)?,
            LagrangianChart::Relation(a, b) => DarbouxChart::hom(a, b)?,
        };
        let n = chart.pairs();
        let rows = self.basis.as_ref().or(self.forms.as_ref());
        if rows.is_some_and(|rs| rs.iter().any(|r| r.len() != n)) {
            return Err(parse_err(format!("Lagrangian rows must have {n} entries")));
        }
        match (&self.basis, &self.forms) {
            (Some(b), None) => Lagrangian::from_even_basis(&chart, b),
            (None, Some(f)) => Lagrangian::from_defining_forms(&chart, f),
            (None, None) => Lagrangian::from_even_basis(&chart, &Vec::new()),
            (Some(_), Some(_)) => Err(parse_err("give either basis or form rows, not both")),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Definition {
    pub table: Option<TableRef>,
    pub brackets: Vec<(String, String, Expr)>,
    pub lie: Option<LieStructureConstants>,
    pub lagrangians: Vec<LagrangianSpec>,
    pub expressions: Vec<(String, Expr)>,
}

fn rational(s: &str) -> Result<Q> {
    match parse_expr(s)? {
        Expr::Num(q) => Ok(q),
        Expr::Neg(b) => match *b {
            Expr::Num(q) => Ok(-q),
            _ => Err(parse_err(format!("expected a rational, got `{s}`"))),
        },
        _ => Err(parse_err(format!("expected a rational, got `{s}`"))),
    }
}

fn row(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(|t| rational(t.trim())).collect()
}

fn index(s: &str) -> Result<usize> {
    let i: usize = s.trim().parse().map_err(|_| parse_err(format!("bad index `{s}`")))?;
    i.checked_sub(1).ok_or_else(|| parse_err("indices start at 1"))
}

impl Definition {
    pub fn parse(text: &str) -> Result<Self> {
        let opts = ParseOption {
            enabled_quote: false,
            enabled_escape: false,
            ..ParseOption::default()
        };
        let ini = Ini::load_from_str_opt(text, opts).map_err(|e| parse_err(e.to_string()))?;
        let mut def = Definition::default();
        for (name, props) in ini.iter() {
            match name {
                None if props.is_empty() => {}
                None => return Err(parse_err("entries before the first section")),
                Some("variables") => {
                    let mut vars = Vec::new();
                    for (k, v) in props.iter() {
                        let mut parts = v.split(',').map(str::trim);
                        let parity = match parts.next() {
                            Some("even") => Parity::Even,
                            Some("odd") => Parity::Odd,
                            other => {
                                return Err(parse_err(format!("`{k}`: parity must be even or odd, got {other:?}")))
                            }
                        };
                        let mut var = Variable::new(k, parity);
                        if let Some(d) = parts.next() {
                            let d: i32 = d.parse().map_err(|_| parse_err(format!("`{k}`: bad degree `{d}`")))?;
                            var = var.with_degree(d);
                        }
                        if parts.next().is_some() {
                            return Err(parse_err(format!("`{k}`: expected `parity[, degree]`")));
                        }
                        vars.push(var);
                    }
                    def.table = Some(VarTable::new(vars)?);
                }
                Some("poisson") => {
                    for (k, v) in props.iter() {
                        let inner = k
                            .strip_prefix('{')
                            .and_then(|s| s.strip_suffix('}'))
                            .ok_or_else(|| parse_err(format!("bracket key must look like {{zi,zj}}, got `{k}`")))?;
                        let (a, b) = inner
                            .split_once(',')
                            .ok_or_else(|| parse_err(format!("bracket key needs two variables: `{k}`")))?;
                        def.brackets.push((a.trim().into(), b.trim().into(), parse_expr(v)?));
                    }
                }
                Some("lie") => {
                    let mut entries = Vec::new();
                    let mut dim = 0;
                    for (k, v) in props.iter() {
                        if k == "dim" {
                            dim = dim.max(v.trim().parse().map_err(|_| parse_err("bad dim"))?);
                            continue;
                        }
                        let body = k
                            .strip_prefix("c[")
                            .ok_or_else(|| parse_err(format!("bad key `{k}`")))?;
                        let (ij, kk) = body
                            .split_once("]^")
                            .ok_or_else(|| parse_err(format!("bad key `{k}`")))?;
                        let (i, j) = ij.split_once(',').ok_or_else(|| parse_err(format!("bad key `{k}`")))?;
                        let (i, j, kk) = (index(i)?, index(j)?, index(kk)?);
                        dim = dim.max(i + 1).max(j + 1).max(kk + 1);
                        entries.push((i, j, kk, rational(v)?));
                    }
                    let mut c = LieStructureConstants::new(dim);
                    for (i, j, k, v) in entries {
                        c.set(i, j, k, v)?;
                    }
                    def.lie = Some(c);
                }
                Some("lagrangian") => {
                    let mut spec = LagrangianSpec {
                        chart: LagrangianChart::Space(0),
                        basis: None,
                        forms: None,
                    };
                    let mut seen_chart = false;
                    for (k, v) in props.iter() {
                        match k {
                            "chart" => {
                                let dims: Vec<usize> = v
                                    .split(',')
                                    .map(|t| t.trim().parse().map_err(|_| parse_err(format!("bad chart `{v}`"))))
                                    .collect::<Result<_>>()?;
                                spec.chart = match dims[..] {
                                    [n] => LagrangianChart::Space(n),
                                    [a, b] => LagrangianChart::Relation(a, b),
                                    _ => return Err(parse_err(format!("bad chart `{v}`"))),
                                };
                                seen_chart = true;
                            }
                            "basis" => spec.basis.get_or_insert_with(Vec::new).push(row(v)?),
                            "form" => spec.forms.get_or_insert_with(Vec::new).push(row(v)?),
                            other => return Err(parse_err(format!("unknown Lagrangian key `{other}`"))),
                        }
                    }
                    if !seen_chart {
                        return Err(parse_err("[lagrangian] needs a chart"));
                    }
                    def.lagrangians.push(spec);
                }
                Some("expression") => {
                    for (k, v) in props.iter() {
                        def.expressions.push((k.into(), parse_expr(v)?));
                    }
                }
                Some(other) => return Err(parse_err(format!("unknown section [{other}]"))),
            }
        }
        if def.lie.is_some() && (def.table.is_some() || !def.brackets.is_empty()) {
            return Err(parse_err("[lie] cannot be combined with [variables] or [poisson]"));
        }
        if !def.brackets.is_empty() && def.table.is_none() {
            return Err(parse_err("[poisson] needs [variables]"));
        }
        Ok(def)
    }

    /// The odd Poisson structure the file describes, if any.
    pub fn poisson(&self) -> Result<Option<OddPoissonStructure>> {
        if let Some(c) = &self.lie {
            return OddPoissonStructure::kirillov_kostant(c).map(Some);
        }
        let Some(table) = &self.table else {
            return Ok(None);
        };
        let chart = CotangentChart::new(table)?;
        let entries = self
            .brackets
            .iter()
            .map(|(a, b, e)| Ok((resolve(table, a)?, resolve(table, b)?, e.to_poly(table)?)))
            .collect::<Result<Vec<_>>>()?;
        OddPoissonStructure::from_brackets(&chart, &entries).map(Some)
    }

    pub fn expression(&self, name: Option<&str>) -> Result<&Expr> {
        match name {
            Some(n) => self
                .expressions
                .iter()
                .find(|(k, _)| k == n)
                .map(|(_, e)| e)
                .ok_or_else(|| parse_err(format!("no expression named `{n}`"))),
            None => self
                .expressions
                .first()
                .map(|(_, e)| e)
                .ok_or_else(|| parse_err("no [expression] entries")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::darboux;

    #[test]
    fn expressions_parse_and_evaluate() {
        let pi = darboux(1, 1).unwrap();
        let omega = DeformedForms::new(&pi).unwrap();
        let e = parse_expr("d(xi)*x").unwrap();
        assert_eq!(e.to_deformed(&omega).unwrap().to_string(), "-1 + x * d(ξ)");
        let p = parse_expr("(x + 1/2)^2 - 3*x*xi")
            .unwrap()
            .to_poly(omega.base())
            .unwrap();
        assert_eq!(p.to_string(), "1/4 + x + x^2 - 3*x*ξ");
        assert!(parse_expr("x +").is_err());
        assert!(parse_expr("x ^ y").is_err());
        assert!(parse_expr("foo(x)").is_err());
    }

    #[test]
    fn distributions_from_text() {
        let chart = DarbouxChart::standard(2).unwrap();
        let d = parse_expr("2*delta(x1 - x2)*exp(-(x1^2 + x1*x2))*xi1")
            .unwrap()
            .to_distribution(&chart)
            .unwrap();
        assert!(!d.is_zero());
        let odd = parse_expr("delta(xi1)").unwrap().to_distribution(&chart).unwrap();
        assert_eq!(odd, Distribution::from_polynomial(&chart, &chart.var(2)));
        assert!(parse_expr("delta(x1 + 1)")
            .unwrap()
            .to_distribution(&chart)
            .unwrap_err()
            .is_domain());
        assert!(parse_expr("exp(-x1^3)")
            .unwrap()
            .to_distribution(&chart)
            .unwrap_err()
            .is_domain());
    }

    #[test]
    fn definition_files() {
        let text = "[variables]\nx: even\nxi: odd, 1\n\n[poisson]\n{x,xi} = 1\n\n[expression]\na = d(xi)*x\n";
        let def = Definition::parse(text).unwrap();
        let pi = def.poisson().unwrap().unwrap();
        let omega = DeformedForms::new(&pi).unwrap();
        let a = def.expression(None).unwrap().to_deformed(&omega).unwrap();
        assert_eq!(a.to_string(), "-1 + x * d(xi)");

        let lie = Definition::parse("[lie]\nc[1,2]^3 = 1\nc[3,1]^1 = 2\nc[3,2]^2 = -2\n").unwrap();
        assert_eq!(lie.lie.as_ref().unwrap(), &LieStructureConstants::sl2());

        let rel =
            Definition::parse("[lagrangian]\nchart = 1, 1\nbasis = 1, 1\n[lagrangian]\nchart = 1, 1\nbasis = 1, 2\n")
                .unwrap();
        assert_eq!(rel.lagrangians.len(), 2);
        let l = rel.lagrangians[1].build().unwrap();
        assert!(l.is_lagrangian());
    }

    #[test]
    fn malformed_files_are_parse_errors() {
        for bad in [
            "[variables]\nx: sideways\n",
            "[poisson]\n{x,xi} = 1\n",
            "[lie]\nc[1,2]^0 = 1\n",
            "[lagrangian]\nbasis = 1\n",
            "[nonsense]\na = 1\n",
            "[expression]\na = (x\n",
            "[variables\nx: even\n",
        ] {
            assert!(matches!(Definition::parse(bad), Err(Error::Parse(_))), "{bad}");
        }
    }
}
