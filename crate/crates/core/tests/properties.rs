use num_complex::Complex64;
use proptest::prelude::*;
use rug::{Integer, Rational};
use sswalk::asymptotics::complex_gamma;
use sswalk::blowup::{blow_up, origin_clique, safe_ball_radius};
use sswalk::cellgraph::verify_symmetry;
use sswalk::dynamics::LocalInverse;
use sswalk::fixtures;
use sswalk::greens::{green_coefficients_cauchy, green_coefficients_exact, green_product};
use sswalk::oracle::{exact_transition_sequence, geodesic_bound_check, FiniteChain};
use sswalk::walkfn::transition_return_functions;
use sswalk::{BigComplex, WalkFunctions};

fn wf(name: &str) -> WalkFunctions {
    let cell = match name {
        "line3" => fixtures::line(3),
        "flake3" => fixtures::flake(3),
        "flake5" => fixtures::flake(5),
        "gasket" => fixtures::sierpinski(2, 2),
        _ => fixtures::sierpinski(3, 4),
    };
    transition_return_functions(&cell.unwrap()).unwrap()
}

fn fixture_name() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("line3"), Just("flake3"), Just("flake5"), Just("gasket"), Just("sierpinski3d")]
}

fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::from(1)];
    for m in 1..=n {
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (k, bk) in b.iter().enumerate() {
            acc += Rational::from(bk * &binom);
            binom = binom * (m + 1 - k) as u64 / (k + 1) as u64;
        }
        b.push(-acc / Rational::from(m as u64 + 1));
    }
    b
}

/// `ln Gamma(z)` from 64 Stirling terms after shifting the argument by 20.
fn ln_gamma_stirling(z: Complex64, b: &[Rational]) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    for j in 0..20 {
        shift += (z + j as f64).ln();
    }
    let w = z + 20.0;
    let mut s = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let w2 = w * w;
    let mut wp = w;
    for k in 1..=64usize {
        let c = b[2 * k].to_f64() / ((2 * k) * (2 * k - 1)) as f64;
        s += c / wp;
        wp *= w2;
    }
    s - shift
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_reflection(re in -6.0f64..6.0, im in -6.0f64..6.0) {
        let z = Complex64::new(re, im);
        prop_assume!((z - z.re.round()).norm() > 1e-3);
        let g = complex_gamma(z, 64).unwrap() * complex_gamma(Complex64::new(1.0, 0.0) - z, 64).unwrap();
        let want = std::f64::consts::PI / (z * std::f64::consts::PI).sin();
        prop_assert!((g / want - 1.0).norm() < 1e-11, "z = {z}: {g} vs {want}");
    }

    #[test]
    fn gamma_matches_stirling(re in 0.5f64..10.0, im in -10.0f64..10.0) {
        let b = bernoulli(128);
        let z = Complex64::new(re, im);
        let want = ln_gamma_stirling(z, &b).exp();
        let got = complex_gamma(z, 64).unwrap();
        prop_assert!((got / want - 1.0).norm() < 1e-12, "z = {z}: {got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn local_inverse_contracts(name in fixture_name(), r in 0.0f64..0.05, phi in 0.0f64..std::f64::consts::TAU) {
        let wf = wf(name);
        let inv = LocalInverse::new(&wf.d).unwrap();
        let z = BigComplex::from_f64(192, 1.0 + r * phi.cos(), r * phi.sin());
        let w = inv.eval(&z, 192).unwrap();
        let back = wf.d.eval_complex(&w, 192).unwrap();
        prop_assert!(back.sub(&z).abs_f64() < 1e-40);
        prop_assert!(w.add_rational(&Rational::from(-1)).abs_f64() <= r);
    }

    #[test]
    fn unit_disk_lies_in_the_basin_of_zero(name in fixture_name(), r in 0.0f64..0.95, phi in 0.0f64..std::f64::consts::TAU) {
        let wf = wf(name);
        let mut z = Complex64::from_polar(r, phi);
        for _ in 0..200 {
            z = wf.d.eval_c64(z).unwrap();
        }
        prop_assert!(z.norm() < 1e-12, "d^200 = {z}");
    }

    #[test]
    fn functional_equation(name in fixture_name(), r in 0.0f64..0.9, phi in 0.0f64..std::f64::consts::TAU) {
        let wf = wf(name);
        let prec = 256;
        let z = BigComplex::from_f64(prec, r * phi.cos(), r * phi.sin());
        let (g, err) = green_product(&wf, &z, prec).unwrap();
        let dz = wf.d.eval_complex(&z, prec + 32).unwrap().with_prec(prec);
        let (gd, err_d) = green_product(&wf, &dz, prec).unwrap();
        let fz = wf.f.eval_complex(&z, prec).unwrap();
        let residual = g.sub(&fz.mul(&gd)).abs_f64();
        let tol = 2f64.powi(8 - prec as i32) + err + fz.abs_f64() * err_d;
        prop_assert!(residual < tol, "residual {residual:e} vs {tol:e}");
        let (gc, _) = green_product(&wf, &z.conj(), prec).unwrap();
        prop_assert!(gc.sub(&g.conj()).abs_f64() <= 2.0 * err + 2f64.powi(8 - prec as i32));
    }
}

fn random_chain() -> impl Strategy<Value = (usize, Vec<(usize, usize, u64, u64)>, Vec<(usize, u64)>, usize, usize)> {
    (2usize..=12).prop_flat_map(|n| {
        let tree = proptest::collection::vec((0usize..1000, 1u64..=20, 1u64..=5), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 1u64..=20, 1u64..=5), 0..=n);
        let holding = proptest::collection::vec((0..n, 1u64..=10), 0..=3);
        (Just(n), tree, extra, holding, 0..n, 0..n - 1).prop_map(|(n, tree, extra, holding, x, y)| {
            let mut edges: Vec<(usize, usize, u64, u64)> =
                tree.into_iter().enumerate().map(|(i, (p, a, b))| (p % (i + 1), i + 1, a, b)).collect();
            for (a, b, c, d) in extra {
                if a != b && !edges.iter().any(|e| (e.0.min(e.1), e.0.max(e.1)) == (a.min(b), a.max(b))) {
                    edges.push((a, b, c, d));
                }
            }
            let mut hold: Vec<(usize, u64)> = Vec::new();
            for (v, w) in holding {
                if !hold.iter().any(|h| h.0 == v) {
                    hold.push((v, w));
                }
            }
            (n, edges, hold, x, if y >= x { y + 1 } else { y })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn geodesic_bound_on_reversible_chains((n, edges, holding, x, y) in random_chain()) {
        let e: Vec<(usize, usize, Rational)> = edges.iter().map(|&(a, b, p, q)| (a, b, Rational::from((p, q)))).collect();
        let h: Vec<(usize, Rational)> = holding.iter().map(|&(v, w)| (v, Rational::from(w))).collect();
        let chain = FiniteChain::conductances(n, &e, &h).unwrap();
        prop_assert!(chain.check_stochastic());
        let c = geodesic_bound_check(&chain, x, y).unwrap();
        prop_assert!(c.holds, "{} > {} at n = {}", c.lhs, c.bound, c.n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_cells_match_the_blowup_oracle(seed in 0u64..10_000, theta in 2usize..=4) {
        let cell = fixtures::random_symmetric_cell(seed, theta, 10).unwrap();
        prop_assume!(verify_symmetry(&cell).map(|r| r.passed).unwrap_or(false));
        let wf = transition_return_functions(&cell).unwrap();
        let n = 12;
        let coeffs = green_coefficients_exact(&wf, n).unwrap();
        let base = origin_clique(&cell).unwrap_or(1);
        let mut levels = 1;
        let b = loop {
            let b = blow_up(&cell, base, levels).unwrap();
            if safe_ball_radius(&b, &cell).unwrap() >= n || b.vertex_count() > 50_000 {
                break b;
            }
            levels += 1;
        };
        prop_assume!(safe_ball_radius(&b, &cell).unwrap() >= n);
        let o = b.origin().unwrap();
        let oracle = exact_transition_sequence(&FiniteChain::simple(b.adjacency(), &[]), o, o, n).unwrap();
        prop_assert_eq!(coeffs, oracle);
    }

    #[test]
    fn cauchy_coefficients_within_their_bound(name in fixture_name(), n in 8usize..80) {
        let wf = wf(name);
        let exact = green_coefficients_exact(&wf, n).unwrap();
        let (float, bound) = green_coefficients_cauchy(&wf, n, 128).unwrap();
        for (k, (e, f)) in exact.iter().zip(&float).enumerate() {
            let err = (e.to_f64() - f).abs();
            prop_assert!(err <= bound + 1e-15 * e.to_f64().abs().max(1e-300), "p_{k}: {err:e} > {bound:e}");
        }
    }
}
