use oddsym_core::bv::{
    apply_kernel, delta_l, hamiltonian_flow, DarbouxChart, Distribution, Lagrangian, LinearSymplecticMap, ScalarValue,
};
use oddsym_core::graded::SuperPolynomial;
use oddsym_core::linalg::{zeros, Mat};
use oddsym_core::rational::{q, qf};
use oddsym_core::testing::{random_parity, random_poly, rng};
use oddsym_core::Error;

fn gaussian(chart: &oddsym_core::bv::ChartRef, c: &SuperPolynomial, diag: &[i64]) -> Distribution {
    let mut g = zeros(diag.len(), diag.len());
    for (i, &d) in diag.iter().enumerate() {
        g[i][i] = q(d);
    }
    Distribution::term(chart, c, &[], &[], Some(&g)).unwrap()
}

/// Linear part on the even coordinates of a flow that is linear in `x`.
fn linear_part(images: &[SuperPolynomial], n: usize) -> Mat {
    let mut a = zeros(n, n);
    for (i, row) in a.iter_mut().enumerate() {
        for (m, c) in images[i].terms() {
            let j = m.0.iter().position(|&e| e == 1).expect("linear image");
            assert_eq!(m.0.iter().sum::<u32>(), 1, "image is not linear");
            row[j] = c.clone();
        }
    }
    a
}

/// A random exact summand `Δγ` with `γ` a full Gaussian times a polynomial.
fn exact_part(chart: &oddsym_core::bv::ChartRef, seed: u64) -> Distribution {
    let mut r = rng(seed);
    let n = chart.pairs();
    let vars: Vec<usize> = (0..2 * n).collect();
    let gamma = random_poly(&mut r, chart.table(), &vars, 3, 3, None);
    gaussian(chart, &gamma, &vec![1; n]).bv_delta().unwrap()
}

fn assert_invariant(l: &Lagrangian, a: &Mat, beta: &Distribution) -> ScalarValue {
    assert!(beta.bv_delta().unwrap().is_zero(), "β must be closed");
    let moved = l.image(a).unwrap();
    let before = delta_l(l).unwrap().pairing(beta).unwrap();
    let after = delta_l(&moved).unwrap().pairing(beta).unwrap();
    assert_eq!(before, after, "pairing changed under {a:?}");
    assert!(!before.is_zero());
    before
}

#[test]
fn pairing_is_invariant_on_the_line() {
    let chart = DarbouxChart::standard(1).unwrap();
    let (x, xi) = (chart.var(0), chart.var(1));
    let one = SuperPolynomial::one(chart.table());
    let horizontal = Lagrangian::from_even_basis(&chart, &vec![vec![q(1)]]).unwrap();
    let vertical = Lagrangian::from_even_basis(&chart, &Vec::new()).unwrap();
    let beta_h = gaussian(&chart, &(&one + &(&x * &x)), &[1])
        .add(&exact_part(&chart, 3))
        .unwrap();
    let beta_v = Distribution::from_polynomial(&chart, &xi)
        .add(&exact_part(&chart, 4))
        .unwrap();
    for s in [q(2), qf(1, 3)] {
        let a = vec![vec![s]];
        // ∫ e^{−x²}(1 + x²) dx = (3/2)√π
        assert_eq!(assert_invariant(&horizontal, &a, &beta_h).to_string(), "3/2*pi^(1/2)");
        assert_eq!(assert_invariant(&vertical, &a, &beta_v).to_string(), "1");
    }
}

#[test]
fn pairing_is_invariant_under_shears_in_the_plane() {
    let chart = DarbouxChart::standard(2).unwrap();
    let (x1, xi2) = (chart.var(0), chart.var(3));
    // H = x1 ξ2 generates a unipotent shear mixing x1 into x2
    let flow = hamiltonian_flow(&chart, &(&x1 * &xi2)).unwrap();
    let shear = linear_part(&flow, 2);
    assert_eq!(
        LinearSymplecticMap::new(&chart, shear.clone()).unwrap().images(&chart),
        flow
    );
    assert!(shear[0][1] == q(0) && shear[1][0] != q(0));

    let l = Lagrangian::from_even_basis(&chart, &vec![vec![q(1), q(0)]]).unwrap();
    let one = SuperPolynomial::one(chart.table());
    // closed: ξ2 f(x1) e^{−x1²} has no x2 dependence for ∂_{x2}∂_{ξ2} to see
    let coefficients = [
        xi2.clone(),
        &(&one + &(&x1 * &x1)) * &xi2,
        &(&(&x1 * &x1) * &(&x1 * &x1)).scale(&q(3)) * &xi2,
    ];
    let mut count = 0;
    for (k, c) in coefficients.iter().enumerate() {
        let beta = gaussian(&chart, c, &[1, 0])
            .add(&exact_part(&chart, 10 + k as u64))
            .unwrap();
        for t in [q(1), q(2), qf(-1, 2)] {
            let a: Mat = shear.iter().map(|r| r.iter().map(|v| v * &t).collect()).collect();
            let a = vec![vec![q(1), a[0][1].clone()], vec![a[1][0].clone(), q(1)]];
            assert_invariant(&l, &a, &beta);
            count += 1;
        }
        let cat = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        assert_invariant(&l, &cat, &beta);
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn unpinned_flat_directions_diverge() {
    let chart = DarbouxChart::standard(2).unwrap();
    let l = Lagrangian::from_even_basis(&chart, &vec![vec![q(0), q(1)]]).unwrap();
    let beta = gaussian(&chart, &chart.var(2), &[1, 0]);
    assert!(matches!(delta_l(&l).unwrap().pairing(&beta), Err(Error::Divergent(_))));
}

/// `(m α, β) = (−1)^{|α| + |β|(1 + |m| + n1)} (α, mᵀ β)` for `m = δ_L` on
/// `Ȳ₁ × Y₂` and the transpose relation.
#[test]
fn composition_is_adjoint_to_the_transpose() {
    for seed in [41, 42, 43] {
        let mut r = rng(seed);
        let mut checked = 0;
        for _ in 0..3000 {
            let (n1, n2) = (1 + checked % 2, 1 + (checked / 2) % 2);
            let hom = DarbouxChart::hom(n1, n2).unwrap();
            let y1 = DarbouxChart::standard(n1).unwrap();
            let y2 = DarbouxChart::standard(n2).unwrap();
            let l = Lagrangian::random(&mut r, &hom);
            let la = Lagrangian::random(&mut r, &y1);
            let lb = Lagrangian::random(&mut r, &y2);
            let (pa, pb) = (random_parity(&mut r), random_parity(&mut r));
            let vars1: Vec<usize> = (0..2 * n1).collect();
            let vars2: Vec<usize> = (0..2 * n2).collect();
            let fa = random_poly(&mut r, y1.table(), &vars1, 2, 2, Some(pa));
            let fb = random_poly(&mut r, y2.table(), &vars2, 2, 2, Some(pb));
            let alpha = delta_l(&la).unwrap().times_poly(&fa).unwrap();
            let beta = delta_l(&lb).unwrap().times_poly(&fb).unwrap();
            let m = delta_l(&l).unwrap();
            let mt = delta_l(&l.transpose().unwrap()).unwrap();
            let (Ok(ma), Ok(mb)) = (apply_kernel(&alpha, &m), apply_kernel(&beta, &mt)) else {
                continue;
            };
            let (Ok(lhs), Ok(rhs)) = (ma.pairing(&beta), alpha.pairing(&mb)) else {
                continue;
            };
            if lhs.is_zero() {
                continue;
            }
            let parity_a = (n1 - la.even_basis().len() + pa.bit() as usize) % 2;
            let parity_b = (n2 - lb.even_basis().len() + pb.bit() as usize) % 2;
            let parity_m = (n1 + n2 - l.even_basis().len()) % 2;
            let flip = (parity_a + parity_b * (1 + parity_m + n1)) % 2 == 1;
            let expected = if flip { rhs.neg() } else { rhs };
            assert_eq!(lhs, expected, "seed {seed}: L = {:?}", l.even_basis());
            checked += 1;
            if checked == 60 {
                break;
            }
        }
        assert!(checked >= 30, "only {checked} defined cases");
    }
}
