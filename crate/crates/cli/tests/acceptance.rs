//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sswalk::asymptotics::{asymptotic_fit, ratio_limit_checks, ratio_limit_horizon, AsymptoticProfile};
use sswalk::blowup::{blow_up, origin_clique, safe_ball_radius};
use sswalk::cellgraph::{invariant_measure, verify_symmetry, CellGraph};
use sswalk::dynamics::{is_chebyshev_conjugate, julia_classify, verify_witness, JuliaKind};
use sswalk::exactalg::{chebyshev_t, ExtRational, Polynomial, RationalFunction};
use sswalk::fixtures;
use sswalk::greens::{green_coefficients, green_coefficients_exact, h_and_omega, CoefficientMode};
use sswalk::oracle::{exact_transition_sequence, geodesic_bound_check, FiniteChain};
use sswalk::rug::Rational;
use sswalk::walkfn::{line_transition_closed_form, scaling_identities, transition_return_functions, ScalingParams};

const PREC: u32 = 256;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(a: i64, b: i64) -> Rational {
    Rational::from((a, b))
}

fn all_fixtures() -> Vec<(String, CellGraph)> {
    let mut v = Vec::new();
    for n in 2..=8 {
        v.push((format!("line {n}"), fixtures::line(n).unwrap()));
    }
    for n in 2..=6 {
        v.push((format!("flake {n}"), fixtures::flake(n).unwrap()));
    }
    v.push(("gasket".into(), fixtures::sierpinski(2, 2).unwrap()));
    v.push(("sierpinski 3d scale 4".into(), fixtures::sierpinski(3, 4).unwrap()));
    v
}

fn params(cell: &CellGraph) -> Result<ScalingParams, String> {
    let wf = transition_return_functions(cell).map_err(|e| e.to_string())?;
    let (sp, checks) = scaling_identities(cell, &wf).map_err(|e| e.to_string())?;
    if let Some(c) = checks.iter().find(|c| !c.holds) {
        return Err(format!("{} fails: {} vs {}", c.name, c.lhs, c.rhs));
    }
    Ok(sp)
}

fn criterion_1() -> Outcome {
    for n in 2..=8 {
        let d = transition_return_functions(&fixtures::line(n).unwrap()).map_err(|e| e.to_string())?.d;
        ensure(d == line_transition_closed_form(n), || format!("line {n}: d = {d}"))?;
        // z^n T_n(1/z) is the reflected Chebyshev polynomial
        let t = chebyshev_t(n);
        let refl = Polynomial::from_coeffs((0..=n).map(|k| t.coeff(n - k)).collect());
        let rhs = RationalFunction::new(Polynomial::monomial(q(1, 1), n), refl).unwrap();
        ensure(d == rhs, || format!("line {n}: d(z) T_n(1/z) != 1"))?;
        ensure(is_chebyshev_conjugate(&d), || format!("line {n}: Chebyshev test rejects d"))?;
    }
    for n in 2..=6i64 {
        let d = transition_return_functions(&fixtures::flake(n as usize).unwrap()).map_err(|e| e.to_string())?.d;
        let want = RationalFunction::from_ints(&[0, 0, 1], &[n * (n - 1), -2 * n * (n - 2), n * n - 3 * n + 1]).unwrap();
        ensure(d == want, || format!("flake {n}: d = {d}"))?;
    }
    let d = transition_return_functions(&fixtures::sierpinski(3, 4).unwrap()).map_err(|e| e.to_string())?.d;
    let want = RationalFunction::from_ints(
        &[0, 0, 0, 0, -486, 9, 23, 2],
        &[-104976, 227448, -156168, 31212, 2958, -887, -41, 2],
    )
    .unwrap();
    ensure(d == want, || format!("3d example: d = {d}"))?;
    ensure(d.numer().degree() == Some(7) && d.order_at_zero() == Some(4), || "3d example: wrong degrees".into())?;
    Ok("lines 2..8, flakes 2..6 and the 3d example match exactly".into())
}

fn criterion_2() -> Outcome {
    let tuple = |sp: &ScalingParams| (sp.theta, sp.mu, sp.beta, sp.tau.clone(), sp.rho.clone());
    for n in 2..=8usize {
        let sp = params(&fixtures::line(n).unwrap())?;
        let want = (2, n, 1, Rational::from(n * n), Rational::from(n));
        ensure(tuple(&sp) == want, || format!("line {n}: {:?}", tuple(&sp)))?;
    }
    for n in 2..=6usize {
        let sp = params(&fixtures::flake(n).unwrap())?;
        let want = (n, n, 1, Rational::from(2 * n), Rational::from(2));
        ensure(tuple(&sp) == want, || format!("flake {n}: {:?}", tuple(&sp)))?;
    }
    let sp = params(&fixtures::sierpinski(3, 4).unwrap())?;
    let want = (4, 20, 1, q(4415, 113), q(883, 452));
    ensure(tuple(&sp) == want, || format!("3d example: {:?}", tuple(&sp)))?;
    Ok("parameter table matches".into())
}

fn identities(name: &str, cell: &CellGraph) -> Result<(), String> {
    let wf = transition_return_functions(cell).map_err(|e| format!("{name}: {e}"))?;
    let (_, checks) = scaling_identities(cell, &wf).map_err(|e| format!("{name}: {e}"))?;
    for c in &checks {
        ensure(c.holds, || format!("{name}: {} fails ({} vs {})", c.name, c.lhs, c.rhs))?;
    }
    invariant_measure(cell).map_err(|e| format!("{name}: {e}"))?;
    let inv = RationalFunction::one().sub(&wf.u).recip().map_err(|e| e.to_string())?;
    ensure(wf.f == inv, || format!("{name}: f != 1/(1-u)"))?;
    Ok(())
}

fn criterion_3() -> Outcome {
    let fx = all_fixtures();
    for (name, cell) in &fx {
        identities(name, cell)?;
    }
    let mut valid = 0;
    let mut seed = 0u64;
    while valid < 50 {
        let theta = 2 + (seed % 3) as usize;
        let cell = fixtures::random_symmetric_cell(seed, theta, 12).map_err(|e| format!("seed {seed}: {e}"))?;
        seed += 1;
        if !verify_symmetry(&cell).map(|r| r.passed).unwrap_or(false) {
            continue;
        }
        identities(&format!("random cell seed {}", seed - 1), &cell)?;
        valid += 1;
    }
    Ok(format!("{} fixtures and {valid} random cells ({seed} drawn) satisfy all identities", fx.len()))
}

fn criterion_4() -> Outcome {
    const N: usize = 30;
    let mut lines = Vec::new();
    for (name, cell) in all_fixtures() {
        let base = origin_clique(&cell).unwrap_or(1);
        let mut levels = 1;
        let (b, radius) = loop {
            let b = blow_up(&cell, base, levels).map_err(|e| format!("{name}: {e}"))?;
            let r = safe_ball_radius(&b, &cell).map_err(|e| format!("{name}: {e}"))?;
            if r >= N {
                break (b, r);
            }
            levels += 1;
        };
        let wf = transition_return_functions(&cell).map_err(|e| e.to_string())?;
        let coeffs = green_coefficients_exact(&wf, N).map_err(|e| e.to_string())?;
        let o = b.origin().ok_or("no origin")?;
        let chain = FiniteChain::simple(b.adjacency(), &[]);
        let oracle = exact_transition_sequence(&chain, o, o, N).map_err(|e| e.to_string())?;
        for k in 0..=N {
            ensure(coeffs[k] == oracle[k], || format!("{name}: p_{k} = {} but oracle gives {}", coeffs[k], oracle[k]))?;
        }
        lines.push(format!("{name}@{levels}(r={radius},V={})", b.vertex_count()));
    }
    Ok(format!("p_n exact for n <= {N}: {}", lines.join(" ")))
}

fn criterion_5() -> Outcome {
    let cell = fixtures::line(2).unwrap();
    let wf = transition_return_functions(&cell).map_err(|e| e.to_string())?;
    let sp = params(&cell)?;
    let samples = h_and_omega(&wf, &sp, 64, 12, PREC).map_err(|e| e.to_string())?;
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let omega_dev = samples.values.iter().map(|v| (v[0] - target).hypot(v[1])).fold(0.0, f64::max);
    ensure(omega_dev <= 1e-6, || format!("max |omega - 1/sqrt 2| = {omega_dev:e}"))?;
    let profile = AsymptoticProfile::from_samples(&samples, &sp, 8, wf.bipartite).map_err(|e| e.to_string())?;
    let sigma_target = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut sigma_dev: f64 = 0.0;
    for j in 0..256 {
        let s = profile.sigma_at(j as f64 / 256.0).map_err(|e| e.to_string())?;
        sigma_dev = sigma_dev.max((s - sigma_target).abs());
    }
    ensure(sigma_dev <= 1e-6, || format!("max |sigma - 1/sqrt(2 pi)| = {sigma_dev:e}"))?;
    let gs = green_coefficients(&wf, 4096, CoefficientMode::Float(PREC)).map_err(|e| e.to_string())?;
    let fit = asymptotic_fit(&gs, &profile, 512, 4096).map_err(|e| e.to_string())?;
    let worst = fit.rows.iter().map(|r| r.n as f64 * r.residual.abs()).fold(0.0, f64::max);
    ensure(!fit.rows.is_empty() && worst <= 0.1, || format!("max n|r_n| = {worst}"))?;
    Ok(format!("omega dev {omega_dev:.1e}, sigma dev {sigma_dev:.1e}, max n|r_n| on [512,4096] = {worst:.5}"))
}

fn cantor(name: &str, d: &RationalFunction) -> Result<sswalk::dynamics::JuliaVerdict, String> {
    let v = julia_classify(d, 3).map_err(|e| format!("{name}: {e}"))?;
    ensure(v.kind == JuliaKind::Cantor, || format!("{name}: verdict {:?}", v.kind))?;
    verify_witness(d, &v).map_err(|e| format!("{name}: witness rejected: {e}"))?;
    Ok(v)
}

fn criterion_6() -> Outcome {
    for n in 2..=8 {
        let d = transition_return_functions(&fixtures::line(n).unwrap()).map_err(|e| e.to_string())?.d;
        let v = julia_classify(&d, 3).map_err(|e| e.to_string())?;
        ensure(v.kind == JuliaKind::Interval, || format!("line {n}: verdict {:?}", v.kind))?;
    }
    for n in 3..=6 {
        let d = transition_return_functions(&fixtures::flake(n).unwrap()).map_err(|e| e.to_string())?.d;
        cantor(&format!("flake {n}"), &d)?;
        if n == 3 {
            let two = ExtRational::Finite(q(2, 1));
            let d1 = d.eval_ext(&two);
            let d2 = d.eval_ext(&d1);
            ensure(d1 == ExtRational::Finite(q(-2, 1)) && d2 == ExtRational::Finite(q(2, 11)), || {
                format!("flake 3: d(2) = {d1}, d(d(2)) = {d2}")
            })?;
        }
    }
    let d = transition_return_functions(&fixtures::sierpinski(3, 4).unwrap()).map_err(|e| e.to_string())?.d;
    ensure(d.eval(&q(9, 4)) == Some(q(1, 1)), || "3d example: d(9/4) != 1".into())?;
    ensure(d.eval(&q(2, 1)) == Some(q(36, 53)), || "3d example: d(2) != 36/53".into())?;
    let v = cantor("3d example", &d)?;
    let w = v.witness.as_ref().unwrap();
    Ok(format!("lines interval; flakes 3..6 and 3d example cantor (3d witness d^{}({}) = {})", w.n, w.z0, w.value))
}

struct Profiled {
    sp: ScalingParams,
    profile: AsymptoticProfile,
    gs: sswalk::GreenSeries,
}

fn profiled(cell: &CellGraph, n: usize) -> Result<Profiled, String> {
    let wf = transition_return_functions(cell).map_err(|e| e.to_string())?;
    let sp = params(cell)?;
    let samples = h_and_omega(&wf, &sp, 64, 12, PREC).map_err(|e| e.to_string())?;
    let profile = AsymptoticProfile::from_samples(&samples, &sp, 8, wf.bipartite).map_err(|e| e.to_string())?;
    let gs = green_coefficients(&wf, n, CoefficientMode::Float(PREC)).map_err(|e| e.to_string())?;
    Ok(Profiled { sp, profile, gs })
}

fn criterion_7(gasket: &Profiled) -> Outcome {
    let w1 = gasket.profile.omega_hat_at(1).norm();
    let budget = gasket.profile.omega_hat_error;
    ensure(w1 > 10.0 * budget, || format!("|omega_hat(1)| = {w1:e} vs budget {budget:e}"))?;
    let amplitude = gasket.profile.sigma_hat.iter().filter(|c| c.k != 0).map(|c| c.abs()).sum::<f64>();
    Ok(format!(
        "|omega_hat(1)| = {w1:.3e} > 10 x {budget:.1e}; sigma oscillation amplitude <= {:.2e} (d_s = {:.6})",
        2.0 * amplitude,
        gasket.sp.d_s
    ))
}

fn criterion_8(flake: &Profiled, gasket: &Profiled) -> Outcome {
    let mut parts = Vec::new();
    for (name, p) in [("flake 3", flake), ("gasket", gasket)] {
        let fit = asymptotic_fit(&p.gs, &p.profile, 64, 8192).map_err(|e| e.to_string())?;
        let e = fit.exponent.ok_or_else(|| format!("{name}: no exponent"))?;
        ensure(e <= -0.7, || format!("{name}: fitted exponent {e}"))?;
        let last = fit.windows.last().unwrap();
        parts.push(format!("{name} exponent {e:.3} (last window max {:.2e})", last.max_abs));
    }
    Ok(parts.join(", "))
}

fn random_chain(rng: &mut ChaCha8Rng) -> (FiniteChain, usize, usize) {
    let n = rng.random_range(2..=12usize);
    let weight = |rng: &mut ChaCha8Rng| Rational::from((rng.random_range(1..=20u64), rng.random_range(1..=5u64)));
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v, weight(rng)));
    }
    for _ in 0..rng.random_range(0..=n) {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b && !edges.iter().any(|(x, y, _)| (*x, *y) == (a.min(b), a.max(b)) || (*x, *y) == (a.max(b), a.min(b))) {
            edges.push((a.min(b), a.max(b), weight(rng)));
        }
    }
    let mut holding = Vec::new();
    for v in 0..n {
        if rng.random_bool(0.25) {
            holding.push((v, weight(rng)));
        }
    }
    let x = rng.random_range(0..n);
    let mut y = rng.random_range(0..n - 1);
    if y >= x {
        y += 1;
    }
    (FiniteChain::conductances(n, &edges, &holding).unwrap(), x, y)
}

fn path(n: usize) -> Vec<Vec<usize>> {
    (0..=n).map(|i| [i.checked_sub(1), (i < n).then_some(i + 1)].into_iter().flatten().collect()).collect()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut equalities = 0;
    for i in 0..200 {
        let (chain, x, y) = random_chain(&mut rng);
        let c = geodesic_bound_check(&chain, x, y).map_err(|e| format!("chain {i}: {e}"))?;
        ensure(c.holds, || format!("chain {i}: {} > {} at n = {}", c.lhs, c.bound, c.n))?;
        equalities += usize::from(c.equality && c.n > 1);
    }
    for n in 1..=11 {
        let c = geodesic_bound_check(&FiniteChain::simple(&path(n), &[]), 0, n).map_err(|e| e.to_string())?;
        ensure(c.equality, || format!("path of length {n}: {} != {}", c.lhs, c.bound))?;
    }
    for n in 2..=11 {
        let edges: Vec<(usize, usize, Rational)> = (0..n).map(|i| (i, i + 1, Rational::from(1 + (i % 2) as u64))).collect();
        let chain = FiniteChain::conductances(n + 1, &edges, &[]).unwrap();
        let c = geodesic_bound_check(&chain, 0, n).map_err(|e| e.to_string())?;
        ensure(c.holds && !c.equality, || format!("non-uniform path {n}: {} vs {}", c.lhs, c.bound))?;
    }
    Ok(format!("200 random chains hold ({equalities} non-trivial equalities); equality on simple paths 1..11 only"))
}

fn criterion_10() -> Outcome {
    let cell = fixtures::sierpinski(2, 2).unwrap();
    let b = blow_up(&cell, origin_clique(&cell).unwrap_or(1), 11).map_err(|e| e.to_string())?;
    let radius = safe_ball_radius(&b, &cell).map_err(|e| e.to_string())?;
    let o = b.origin().ok_or("no origin")?;
    let nb = b.neighbors(o).to_vec();
    let far = *b.neighbors(nb[0]).iter().find(|&&w| w != o && !nb.contains(&w)).unwrap_or(&nb[0]);
    let pairs = [(o, nb[0]), (nb[0], nb[1]), (nb[0], o), (nb[0], far), (nb[1], nb[1])];
    let horizon = pairs.iter().map(|&(x, y)| ratio_limit_horizon(&b, radius, x, y)).min().unwrap();
    let reports = ratio_limit_checks(&b, radius, &pairs, horizon).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for r in &reports {
        let last = r.last().ok_or("empty ratio table")?;
        ensure((0.8..=1.2).contains(&last.normalized), || {
            format!("pair ({}, {}): ratio {} at n = {}", r.x, r.y, last.normalized, last.n)
        })?;
        ensure(r.windows.len() >= 3, || "fewer than three dyadic windows".into())?;
        let tail = &r.windows[r.windows.len() - 3..];
        ensure(tail[0].2 >= tail[1].2 && tail[1].2 >= tail[2].2, || {
            format!("pair ({}, {}): window deviations {:?}", r.x, r.y, tail)
        })?;
        parts.push(format!("({},{}) {:.5}", r.x, r.y, last.normalized));
    }
    Ok(format!("n = {horizon}, radius {radius}: {}", parts.join(", ")))
}

fn run_cli(args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_sswalk"))
        .args(args)
        .arg("--out")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("{args:?} exited with {status}"))
}

fn outputs(dir: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(dir.join("manifest.json")).map_err(|e| e.to_string())?;
    let mut m: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let out = m["outputs"].take();
    for rec in out.as_array().ok_or("manifest without outputs")? {
        let name = rec["name"].as_str().unwrap();
        let bytes = std::fs::read(dir.join(name)).map_err(|e| e.to_string())?;
        ensure(bytes.len() as u64 == rec["bytes"].as_u64().unwrap(), || format!("{name}: size mismatch"))?;
    }
    Ok(out)
}

fn criterion_11() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cell_path = tmp.path().join("gasket.cell");
    std::fs::write(&cell_path, fixtures::sierpinski(2, 2).unwrap().to_cell_format()).map_err(|e| e.to_string())?;
    let cell = cell_path.to_str().unwrap();
    let jobs: [&[&str]; 3] = [
        &["oracle", "hit", cell, "--trials", "200000", "--seed", "11"],
        &["asymptotics", cell, "-N", "512"],
        &["coeffs", cell, "-N", "200", "--float"],
    ];
    for (j, args) in jobs.iter().enumerate() {
        let mut digests = Vec::new();
        for (run, threads) in ["1", "8", "1", "8"].iter().enumerate() {
            let dir = tmp.path().join(format!("job{j}_run{run}"));
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--threads", threads]);
            run_cli(&full, &dir)?;
            digests.push(outputs(&dir)?);
        }
        ensure(digests.windows(2).all(|w| w[0] == w[1]), || format!("{}: outputs differ across runs", args[0]))?;
    }
    Ok("oracle hit, asymptotics and coeffs: byte-identical outputs over 2 runs x threads {1, 8}".into())
}

fn report(label: &str, start: Instant, outcome: Outcome, failures: &mut usize) {
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(msg) => println!("PASS criterion {label} ({secs:.1}s): {msg}"),
        Err(msg) => {
            *failures += 1;
            println!("FAIL criterion {label} ({secs:.1}s): {msg}");
        }
    }
}

fn main() {
    // the default libtest flags are accepted and ignored
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut failures = 0;
    let t = Instant::now();
    report("1", t, criterion_1(), &mut failures);
    let t = Instant::now();
    report("2", t, criterion_2(), &mut failures);
    let t = Instant::now();
    report("3", t, criterion_3(), &mut failures);
    let t = Instant::now();
    report("4", t, criterion_4(), &mut failures);
    let t = Instant::now();
    report("5", t, criterion_5(), &mut failures);
    let t = Instant::now();
    report("6", t, criterion_6(), &mut failures);
    let t = Instant::now();
    let profiles = profiled(&fixtures::flake(3).unwrap(), 8192).and_then(|f| Ok((f, profiled(&fixtures::sierpinski(2, 2).unwrap(), 8192)?)));
    match &profiles {
        Ok((_, gasket)) => report("7", t, criterion_7(gasket), &mut failures),
        Err(e) => report("7", t, Err(e.clone()), &mut failures),
    }
    let t = Instant::now();
    match &profiles {
        Ok((flake, gasket)) => report("8", t, criterion_8(flake, gasket), &mut failures),
        Err(e) => report("8", t, Err(e.clone()), &mut failures),
    }
    let t = Instant::now();
    report("9", t, criterion_9(), &mut failures);
    let t = Instant::now();
    report("10", t, criterion_10(), &mut failures);
    let t = Instant::now();
    report("11", t, criterion_11(), &mut failures);
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
