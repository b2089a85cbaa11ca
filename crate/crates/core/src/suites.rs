//! Randomized and catalog-driven verification suites. Each returns a
//! [`Report`]; failures carry the first witness found.

use rand::Rng;

use crate::bv::{
    catalog, compose, compose_relations, darboux_transform, delta_commutator, delta_l, delta_l_via_frame,
    lie_derivative_semidensity, ChartRef, DarbouxChart, DiffOp, Distribution, Lagrangian, Semidensity,
};
use crate::deformed::DeformedForms;
use crate::error::{Error, Result};
use crate::examples::{cartan_shadow_check, fourier_intertwining_check, sample_vector_fields, FourierSetup};
use crate::graded::SuperPolynomial;
use crate::linalg::{zeros, Mat};
use crate::poisson::{darboux, LieStructureConstants, OddPoissonStructure};
use crate::rational::{q, qf};
use crate::report::{Check, Report};
use crate::testing::{random_parity, random_poly, rng, SuiteRng};

/// Sample count, seed and degree cap shared by the randomized suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    pub max_degree: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            samples: 200,
            seed: 7,
            max_degree: 5,
        }
    }
}

fn all_vars(chart: &DarbouxChart) -> Vec<usize> {
    (0..chart.table().len()).collect()
}

/// `Δ²s = 0` on random semidensities over 1–3 pairs.
pub fn delta_squared(cfg: SuiteConfig) -> Result<Report> {
    let mut r = rng(cfg.seed);
    let charts = (1..=3).map(DarbouxChart::standard).collect::<Result<Vec<_>>>()?;
    let mut witness = None;
    for k in 0..cfg.samples {
        let ch = &charts[k % 3];
        let s = Semidensity::new(
            ch,
            random_poly(&mut r, ch.table(), &all_vars(ch), cfg.max_degree, 6, None),
        )?;
        let dd = s.bv_delta().bv_delta();
        if !dd.coeff().is_zero() {
            witness = Some(format!("s = {}: Δ²s = {}", s.coeff(), dd.coeff()));
            break;
        }
    }
    let mut report = Report::new("Δ² = 0");
    report.push(Check::new("Δ²s = 0 on random semidensities", witness).note(format!(
        "{} samples, ≤ 3 pairs, degree ≤ {}",
        cfg.samples, cfg.max_degree
    )));
    Ok(report)
}

/// `Δ* = Δ` as operators, and `∫ (Δα) β = (−1)^{|α|} ∫ α (Δβ)` on
/// Gaussian-damped pairs.
pub fn delta_self_adjoint(cfg: SuiteConfig) -> Result<Report> {
    let mut report = Report::new("Δ is formally self-adjoint");
    let mut witness = None;
    for n in 1..=3 {
        let ch = DarbouxChart::standard(n)?;
        let delta = DiffOp::delta(&ch);
        let adj = delta.adjoint()?;
        if adj != delta {
            witness = Some(format!("{n} pairs: Δ* = {adj}"));
            break;
        }
    }
    report.push(Check::new("Δ* = Δ for 1–3 pairs", witness));

    let mut r = rng(cfg.seed);
    let mut witness = None;
    let samples = cfg.samples.min(40);
    let mut nonzero = 0;
    let mut k = 0;
    while nonzero < samples && k < 50 * samples {
        k += 1;
        let n = 1 + k % 2;
        let ch = DarbouxChart::standard(n)?;
        let mut g = zeros(n, n);
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = q(1);
        }
        let parity = random_parity(&mut r);
        let a = random_poly(&mut r, ch.table(), &all_vars(&ch), 3, 3, Some(parity));
        let b = random_poly(&mut r, ch.table(), &all_vars(&ch), 3, 3, None);
        let alpha = Distribution::term(&ch, &a, &[], &[], Some(&g))?;
        let beta = Distribution::term(&ch, &b, &[], &[], Some(&g))?;
        let lhs = alpha.bv_delta()?.pairing(&beta)?;
        let rhs = alpha.pairing(&beta.bv_delta()?)?;
        let rhs = if parity.is_odd() { rhs.neg() } else { rhs };
        if lhs != rhs {
            witness = Some(format!("α = {a}, β = {b}: {lhs} vs {rhs}"));
            break;
        }
        nonzero += usize::from(!lhs.is_zero());
    }
    let short = (witness.is_none() && nonzero < samples).then(|| format!("only {nonzero} nonzero pairings"));
    report.push(
        Check::new("∫(Δα)β = (−1)^|α| ∫α(Δβ)", witness.or(short))
            .note(format!("{nonzero} nonzero pairings, ≤ 2 pairs")),
    );
    Ok(report)
}

/// `[Δ, f] s = L_{X_f} s` on random `(f, s)` over 1–2 pairs.
pub fn lie_derivative(cfg: SuiteConfig) -> Result<Report> {
    let mut r = rng(cfg.seed);
    let degree = cfg.max_degree.min(4);
    let mut witness = None;
    for k in 0..cfg.samples {
        let ch = DarbouxChart::standard(1 + k % 2)?;
        let vars = all_vars(&ch);
        let f = random_poly(&mut r, ch.table(), &vars, degree, 4, None);
        let s = Semidensity::new(&ch, random_poly(&mut r, ch.table(), &vars, degree, 4, None))?;
        let lhs = delta_commutator(&f, &s)?;
        let rhs = lie_derivative_semidensity(&f, &s)?;
        if lhs != rhs {
            witness = Some(format!(
                "f = {f}, s = {}: [Δ,f]s = {}, L s = {}",
                s.coeff(),
                lhs.coeff(),
                rhs.coeff()
            ));
            break;
        }
    }
    let mut report = Report::new("[Δ, f] = L_{X_f}");
    report.push(
        Check::new("[Δ, f] s = L_{X_f} s", witness)
            .note(format!("{} samples, ≤ 2 pairs, degree ≤ {degree}", cfg.samples)),
    );
    Ok(report)
}

/// `Δ` commutes with the Darboux transform for every catalog map.
pub fn darboux_invariance(cfg: SuiteConfig) -> Result<Report> {
    let maps = catalog()?;
    let mut report = Report::new("Darboux invariance of Δ");
    let small = maps.iter().filter(|m| m.chart.pairs() <= 2).count();
    report.push(Check::new(
        "catalog has at least 10 maps on ≤ 2 pairs",
        (small < 10).then(|| format!("only {small}")),
    ));
    let mut r = rng(cfg.seed);
    let per_map = (cfg.samples / maps.len()).max(5);
    let mut witness = None;
    'maps: for entry in &maps {
        let ch = &entry.chart;
        for _ in 0..per_map {
            let s = Semidensity::new(ch, random_poly(&mut r, ch.table(), &all_vars(ch), 4, 4, None))?;
            let a = darboux_transform(&entry.images, &s.bv_delta())?;
            let b = darboux_transform(&entry.images, &s)?.bv_delta();
            if a != b {
                witness = Some(format!(
                    "{}: s = {}: T(Δs) = {}, Δ(Ts) = {}",
                    entry.name,
                    s.coeff(),
                    a.coeff(),
                    b.coeff()
                ));
                break 'maps;
            }
        }
    }
    report.push(Check::new("T(Δs) = Δ(Ts)", witness).note(format!("{} maps × {per_map} semidensities", maps.len())));
    Ok(report)
}

/// Upper unitriangular with a positive diagonal: `det > 0`.
fn random_frame(r: &mut SuiteRng, k: usize) -> Mat {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Equal => q(r.gen_range(1..=3)),
                    std::cmp::Ordering::Greater => q(r.gen_range(-2..=2)),
                    std::cmp::Ordering::Less => q(0),
                })
                .collect()
        })
        .collect()
}

/// `Δδ_L = 0` and agreement of two adapted-frame constructions.
pub fn delta_l_closed(cfg: SuiteConfig) -> Result<Report> {
    let mut r = rng(cfg.seed);
    let samples = cfg.samples.min(100);
    let mut closed = None;
    let mut frames = None;
    for k in 0..samples {
        let n = 2 + k % 2;
        let ch = DarbouxChart::standard(n)?;
        let l = Lagrangian::random(&mut r, &ch);
        let d = delta_l(&l)?;
        let dd = d.bv_delta()?;
        if closed.is_none() && !dd.is_zero() {
            closed = Some(format!("L0 = {:?}: Δδ_L = {dd}", l.even_basis()));
        }
        let dim = l.even_basis().len();
        let g = random_frame(&mut r, dim);
        let h: Mat = (0..dim)
            .map(|_| (0..n - dim).map(|_| q(r.gen_range(-2..=2))).collect())
            .collect();
        let other = delta_l_via_frame(&l, &g, &h)?;
        if frames.is_none() && other != d {
            frames = Some(format!("L0 = {:?}: {d} vs {other}", l.even_basis()));
        }
    }
    let mut report = Report::new("δ_L");
    report.push(Check::new("Δδ_L = 0", closed).note(format!("{samples} Lagrangians in (2|2), (3|3)")));
    report.push(Check::new("adapted frames agree", frames));
    Ok(report)
}

/// `compose(δ_{L1}, δ_{L2}) = δ_{L1∘L2}` on random transversal pairs.
pub fn functoriality(cfg: SuiteConfig) -> Result<Report> {
    let mut r = rng(cfg.seed);
    let samples = cfg.samples.min(100);
    let mut done = 0;
    let mut tries = 0;
    let mut witness = None;
    while done < samples && tries < 50 * samples {
        tries += 1;
        let (n1, n2, n3) = (r.gen_range(1..=2), r.gen_range(1..=2), r.gen_range(1..=2));
        let l1 = Lagrangian::random(&mut r, &DarbouxChart::hom(n1, n2)?);
        let l2 = Lagrangian::random(&mut r, &DarbouxChart::hom(n2, n3)?);
        let l = match compose_relations(&l1, &l2) {
            Ok(l) => l,
            Err(Error::NotTransversal { .. }) => continue,
            Err(e) => return Err(e),
        };
        let got = compose(&delta_l(&l1)?, &delta_l(&l2)?)?;
        let want = delta_l(&l)?;
        if got != want {
            witness = Some(format!(
                "L1 = {:?}, L2 = {:?}: {got} vs {want}",
                l1.even_basis(),
                l2.even_basis()
            ));
            break;
        }
        done += 1;
    }
    let mut report = Report::new("quantization is functorial");
    let short = (witness.is_none() && done < samples).then(|| format!("only {done} transversal pairs found"));
    report.push(
        Check::new("compose(δ_L1, δ_L2) = δ_{L1∘L2}", witness.or(short))
            .note(format!("{done} transversal pairs, constant exactly 1")),
    );
    Ok(report)
}

/// Pairing of `δ_L` with Δ-closed Gaussian semidensities is unchanged when
/// `L` is moved by a symplectic shear.
pub fn bv_invariance(cfg: SuiteConfig) -> Result<Report> {
    let mut report = Report::new("BV invariance of the pairing");
    let mut cases = Vec::new();

    let line = DarbouxChart::standard(1)?;
    let (x, xi) = (line.var(0), line.var(1));
    let one = SuperPolynomial::one(line.table());
    let horizontal = Lagrangian::from_even_basis(&line, &vec![vec![q(1)]])?;
    let vertical = Lagrangian::from_even_basis(&line, &Vec::new())?;
    let beta_h = gaussian(&line, &(&one + &(&x * &x)), &[1])?.add(&exact(&line, cfg.seed)?)?;
    let beta_v = Distribution::from_polynomial(&line, &xi).add(&exact(&line, cfg.seed + 1)?)?;
    for s in [q(2), qf(1, 3)] {
        cases.push((
            "ξ = 0 under scaling",
            horizontal.clone(),
            vec![vec![s.clone()]],
            beta_h.clone(),
        ));
        cases.push(("x = 0 under scaling", vertical.clone(), vec![vec![s]], beta_v.clone()));
    }

    let plane = DarbouxChart::standard(2)?;
    let (x1, xi2) = (plane.var(0), plane.var(3));
    let l = Lagrangian::from_even_basis(&plane, &vec![vec![q(1), q(0)]])?;
    let one = SuperPolynomial::one(plane.table());
    for (k, c) in [xi2.clone(), &(&one + &(&x1 * &x1)) * &xi2].iter().enumerate() {
        let beta = gaussian(&plane, c, &[1, 0])?.add(&exact(&plane, cfg.seed + 2 + k as u64)?)?;
        for t in [q(1), q(2), qf(-1, 2)] {
            cases.push((
                "shear x2 ↦ x2 + t x1",
                l.clone(),
                vec![vec![q(1), q(0)], vec![t, q(1)]],
                beta.clone(),
            ));
        }
        cases.push(("cat map", l.clone(), vec![vec![q(2), q(1)], vec![q(1), q(1)]], beta));
    }

    let mut witness = None;
    for (name, l, a, beta) in &cases {
        if !beta.bv_delta()?.is_zero() {
            witness = Some(format!("{name}: β is not closed"));
            break;
        }
        let before = delta_l(l)?.pairing(beta)?;
        let after = delta_l(&l.image(a)?)?.pairing(beta)?;
        if before != after || before.is_zero() {
            witness = Some(format!("{name} {a:?}: {before} vs {after}"));
            break;
        }
    }
    report
        .push(Check::new("(δ_L, β) = (δ_L′, β)", witness).note(format!("{} triples in (1|1) and (2|2)", cases.len())));
    Ok(report)
}

fn gaussian(chart: &ChartRef, c: &SuperPolynomial, diag: &[i64]) -> Result<Distribution> {
    let mut g = zeros(diag.len(), diag.len());
    for (i, &d) in diag.iter().enumerate() {
        g[i][i] = q(d);
    }
    Distribution::term(chart, c, &[], &[], Some(&g))
}

/// `Δγ` for a random `γ` damped in every direction.
fn exact(chart: &ChartRef, seed: u64) -> Result<Distribution> {
    let mut r = rng(seed);
    let gamma = random_poly(&mut r, chart.table(), &all_vars(chart), 3, 3, None);
    gaussian(chart, &gamma, &vec![1; chart.pairs()])?.bv_delta()
}

/// `{π, π} = 0`.
pub fn jacobi(pi: &OddPoissonStructure) -> Result<Report> {
    let j = pi.jacobi_check()?;
    let mut report = Report::new("odd Poisson structure");
    report.push(Check::new("{π, π} = 0", j.witness.map(|w| format!("{{π, π}} = {w}"))));
    Ok(report)
}

/// `[f, dg] = {f, g}` on random pairs, associativity and `d² = 0`.
pub fn deformation(pi: &OddPoissonStructure, cfg: SuiteConfig) -> Result<Report> {
    let omega = DeformedForms::new(pi)?;
    let base = omega.base().clone();
    let vars: Vec<usize> = (0..base.len()).collect();
    let mut r = rng(cfg.seed);
    let mut witness = None;
    for _ in 0..cfg.samples {
        let (pf, pg) = (random_parity(&mut r), random_parity(&mut r));
        let f = random_poly(&mut r, &base, &vars, 2, 3, Some(pf));
        let g = random_poly(&mut r, &base, &vars, 2, 3, Some(pg));
        let defect = omega.commutation_defect(&f, &g)?;
        if !defect.is_zero() {
            witness = Some(format!("f = {f}, g = {g}: [f, dg] − {{f, g}} = {defect}"));
            break;
        }
    }
    let mut report = Report::new("deformed forms");
    report.push(Check::new("[f, dg] = {f, g}", witness).note(format!("{} random pairs", cfg.samples)));
    let c = omega.consistency_check(cfg.samples, cfg.seed)?;
    report.push(
        Check::new("associativity and d² = 0", c.witness).note(format!("{} products and differentials", c.checked)),
    );
    Ok(report)
}

/// Normal-form basis sizes against free graded-commutative counts.
pub fn gr_dimensions(pi: &OddPoissonStructure, max_coef_degree: u32, max_filtration: u32) -> Result<Report> {
    let omega = DeformedForms::new(pi)?;
    let mut report = Report::new("associated graded");
    for level in omega.gr_dimension_check(max_coef_degree, max_filtration)? {
        report.push(Check::new(
            format!(
                "filtration {}: {} normal monomials",
                level.filtration, level.normal_count
            ),
            (!level.ok()).then(|| {
                format!(
                    "free count {}, leading rank {}, degrees ok {}",
                    level.free_count, level.leading_rank, level.leading_degrees_ok
                )
            }),
        ));
    }
    Ok(report)
}

/// The BV suites in order: Δ², self-adjointness, Lie derivative, Darboux
/// invariance, δ_L, functoriality, pairing invariance.
pub fn bv_all(cfg: SuiteConfig) -> Result<Vec<Report>> {
    Ok(vec![
        delta_squared(cfg)?,
        delta_self_adjoint(cfg)?,
        lie_derivative(SuiteConfig {
            max_degree: cfg.max_degree.min(4),
            ..cfg
        })?,
        darboux_invariance(cfg)?,
        delta_l_closed(cfg)?,
        functoriality(cfg)?,
        bv_invariance(cfg)?,
    ])
}

/// The structures exercised by the deformation suites: Darboux on one and
/// two pairs and Kirillov–Kostant for sl₂, Heisenberg and abelian ℝ².
pub fn standard_structures() -> Result<Vec<(&'static str, OddPoissonStructure)>> {
    Ok(vec![
        ("darboux(1)", darboux(1, 1)?),
        ("darboux(2)", darboux(2, 1)?),
        (
            "sl2",
            OddPoissonStructure::kirillov_kostant(&LieStructureConstants::sl2())?,
        ),
        (
            "heisenberg",
            OddPoissonStructure::kirillov_kostant(&LieStructureConstants::heisenberg())?,
        ),
        (
            "abelian(2)",
            OddPoissonStructure::kirillov_kostant(&LieStructureConstants::abelian(2))?,
        ),
    ])
}

/// `F ∘ d = Δ ∘ F` for n = 1, 2 and the Cartan shadow on five fields.
pub fn fourier(cfg: SuiteConfig) -> Result<Vec<Report>> {
    let degree = cfg.max_degree.min(4);
    let mut reports = Vec::new();
    for n in 1..=2 {
        reports.push(fourier_intertwining_check(n, degree, cfg.samples.min(100), cfg.seed)?);
    }
    let setup = FourierSetup::new(2)?;
    reports.push(cartan_shadow_check(2, &sample_vector_fields(&setup)?, 3)?);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_adjointness_is_tested_on_nonzero_pairings() {
        let report = delta_self_adjoint(SuiteConfig::default()).unwrap();
        assert!(report.passed(), "{report}");
        let detail = report.checks[1].detail.clone().unwrap();
        assert!(detail.starts_with("40 nonzero"), "{detail}");
    }

    #[test]
    fn perturbed_structure_fails_with_witness() {
        let bad = OddPoissonStructure::kirillov_kostant(&LieStructureConstants::sl2_perturbed()).unwrap();
        let report = deformation(
            &bad,
            SuiteConfig {
                samples: 50,
                ..SuiteConfig::default()
            },
        )
        .unwrap();
        assert!(!report.passed());
        assert!(report.checks.iter().any(|c| !c.passed && c.detail.is_some()));
    }
}
