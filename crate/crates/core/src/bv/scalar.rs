//! Exact scalars `Σ c · π^{k/2} · √r` with `r` a squarefree positive integer.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{render_q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ScalarValue {
    terms: BTreeMap<(u32, BigInt), Q>,
}

impl ScalarValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(c: Q) -> Self {
        Self::term(c, 0, &Q::one())
    }

    /// `c · π^{k/2} · √r` for a positive rational `r`.
    pub fn term(c: Q, k: u32, r: &Q) -> Self {
        assert!(r.is_positive(), "radicand must be positive");
        let (outside, radicand) = normalize_root(r);
        let mut s = Self::default();
        s.add_term(c * outside, k, radicand);
        s
    }

    fn add_term(&mut self, c: Q, k: u32, r: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((k, r)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((k, r), c) in &other.terms {
            out.add_term(c.clone(), *k, r.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ScalarValue {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::default();
        for ((k, r), v) in &self.terms {
            out.add_term(v * c, *k, r.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for ((k1, r1), c1) in &self.terms {
            for ((k2, r2), c2) in &other.terms {
                let prod = Self::term(c1 * c2, k1 + k2, &Q::from_integer(r1 * r2));
                out = out.add(&prod);
            }
        }
        out
    }

    /// The single term's data, if there is exactly one.
    pub fn as_single(&self) -> Option<(Q, u32, BigInt)> {
        if self.terms.len() != 1 {
            return None;
        }
        let ((k, r), c) = self.terms.iter().next()?;
        Some((c.clone(), *k, r.clone()))
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        match self.as_single()? {
            (c, 0, r) if r.is_one() => Some(c),
            _ => None,
        }
    }
}

/// `√(p/q) = (s/q)·√t` with `t` squarefree.
fn normalize_root(r: &Q) -> (Q, BigInt) {
    let n = r.numer() * r.denom();
    let (s, t) = split_square(&n);
    (Q::new(s, r.denom().clone()), t)
}

/// `n = s² t` with `t` squarefree.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut t = BigInt::one();
    let mut rest = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            t *= &p;
        }
        p += 1;
    }
    t *= rest;
    (s, t)
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((k, r), c)| {
                let mut factors = Vec::new();
                if !c.is_one() || (*k == 0 && r.is_one()) {
                    factors.push(render_q(c));
                }
                match k {
                    0 => {}
                    1 => factors.push("pi^(1/2)".into()),
                    2 => factors.push("pi".into()),
                    k if k % 2 == 0 => factors.push(format!("pi^{}", k / 2)),
                    k => factors.push(format!("pi^({k}/2)")),
                }
                if !r.is_one() {
                    factors.push(format!("sqrt({r})"));
                }
                factors.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn roots_are_normalized() {
        let s = ScalarValue::term(q(1), 1, &qf(1, 8));
        assert_eq!(s.as_single(), Some((qf(1, 4), 1, BigInt::from(2))));
        let t = ScalarValue::term(q(3), 0, &q(9));
        assert_eq!(t.as_rational(), Some(q(9)));
    }

    #[test]
    fn products_combine_radicals() {
        let a = ScalarValue::term(q(1), 1, &q(2));
        assert_eq!(a.mul(&a).to_string(), "2*pi");
        assert_eq!(a.add(&a.neg()), ScalarValue::zero());
    }
}
