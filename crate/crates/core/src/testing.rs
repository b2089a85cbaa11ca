//! Seeded random generators shared by the verification suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graded::{Monomial, Parity, SuperPolynomial, TableRef};
use crate::rational::q;

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random monomial over `vars` (indices into `table`) of total degree
/// at most `max_degree`.
pub fn random_monomial(rng: &mut SuiteRng, table: &TableRef, vars: &[usize], max_degree: u32) -> Monomial {
    let mut m = Monomial::one(table.len());
    if vars.is_empty() {
        return m;
    }
    let deg = rng.gen_range(0..=max_degree);
    for _ in 0..deg {
        let i = *vars.choose(rng).unwrap();
        if table.is_odd(i) && m.0[i] > 0 {
            continue;
        }
        m.0[i] += 1;
    }
    m
}

/// Random polynomial in the listed variables with small integer coefficients.
pub fn random_poly(
    rng: &mut SuiteRng,
    table: &TableRef,
    vars: &[usize],
    max_degree: u32,
    max_terms: usize,
    parity: Option<Parity>,
) -> SuperPolynomial {
    let mut p = SuperPolynomial::zero(table);
    let n = rng.gen_range(1..=max_terms.max(1));
    let mut tries = 0;
    while p.len() < n && tries < 20 * n {
        tries += 1;
        let m = random_monomial(rng, table, vars, max_degree);
        if let Some(want) = parity {
            if m.parity(table) != want {
                continue;
            }
        }
        let c = loop {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                break c;
            }
        };
        p.add_term(m, q(c));
    }
    p
}

pub fn random_parity(rng: &mut SuiteRng) -> Parity {
    if rng.gen_bool(0.5) {
        Parity::Odd
    } else {
        Parity::Even
    }
}
