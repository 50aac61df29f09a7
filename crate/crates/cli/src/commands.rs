use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::time::Instant;

use serde::Serialize;
use sswalk::asymptotics::{asymptotic_fit, AsymptoticProfile};
use sswalk::blowup::{blow_up, export_graph, origin_clique};
use sswalk::cellgraph::{load_cell_graph, verify_symmetry, AxiomReport, CellGraph};
use sswalk::dynamics::{fixed_point_report, julia_classify_with, FixedPointReport, JuliaKind, JuliaVerdict};
use sswalk::extended::parse_complex;
use sswalk::fixtures;
use sswalk::greens::{green_coefficients, green_product, h_and_omega, CoefficientMode, Coefficients};
use sswalk::oracle::{geodesic_bound_check, matrix_power_probabilities, monte_carlo_first_hit, FiniteChain, PowerMode};
use sswalk::walkfn::{scaling_identities, transition_return_functions, IdentityCheck, ScalingParams, WalkFunctions};
use sswalk::{Error, ExportFormat, Result};

use crate::manifest::{digest, OutputRecord, RunManifest};
use crate::output::{fmt_complex, fmt_f64, json, Artifact, Outcome};
use crate::{Cli, Command, FixtureCommand, Input, OracleCommand};

struct Context<'a> {
    cli: &'a Cli,
    inputs: BTreeMap<String, String>,
}

impl Context<'_> {
    fn read(&mut self, input: &Input) -> Result<String> {
        let text = if input.input == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        } else {
            std::fs::read_to_string(&input.input).map_err(|e| Error::Io(format!("{}: {e}", input.input)))?
        };
        self.inputs.insert(input.input.clone(), digest(text.as_bytes()));
        Ok(text)
    }

    fn cell(&mut self, input: &Input) -> Result<CellGraph> {
        let text = self.read(input)?;
        load_cell_graph(&text)
    }

    fn digits(&self) -> usize {
        self.cli.digits
    }
}

pub fn run(cli: &Cli, argv: &[String]) -> i32 {
    let start = Instant::now();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: thread pool: {e}");
            return 1;
        }
    }
    let mut ctx = Context { cli, inputs: BTreeMap::new() };
    let outcome = match dispatch(&mut ctx) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            Outcome { artifacts: Vec::new(), exit_code: e.exit_code(), messages: Vec::new() }
        }
    };
    for m in &outcome.messages {
        eprintln!("{m}");
    }
    let mut records = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for a in &outcome.artifacts {
        records.push(OutputRecord { name: a.name.clone(), sha256: digest(a.content.as_bytes()), bytes: a.content.len() });
        match &cli.out {
            Some(dir) => {
                if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join(&a.name), &a.content)) {
                    eprintln!("error: writing {}: {e}", a.name);
                    return 1;
                }
            }
            None => {
                if outcome.artifacts.len() > 1 {
                    let _ = writeln!(stdout, "== {} ==", a.name);
                }
                let _ = stdout.write_all(a.content.as_bytes());
            }
        }
    }
    let manifest = RunManifest {
        command_line: argv.to_vec(),
        input_digests: ctx.inputs,
        precision: cli.precision,
        seed: cli.seed,
        threads: cli.threads,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        exit_code: outcome.exit_code,
        outputs: records,
    };
    match &cli.out {
        Some(dir) => {
            if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join("manifest.json"), json(&manifest))) {
                eprintln!("error: writing manifest: {e}");
                return 1;
            }
        }
        None => eprintln!("manifest: {}", serde_json::to_string(&manifest).expect("serializable")),
    }
    outcome.exit_code
}

fn dispatch(ctx: &mut Context) -> Result<Outcome> {
    match &ctx.cli.command {
        Command::Analyze(input) => analyze(ctx, input),
        Command::Blowup { input, levels, base_clique, format } => blowup(ctx, input, *levels, *base_clique, format),
        Command::Coeffs { input, n, float } => coeffs(ctx, input, *n, *float),
        Command::Green { input, at } => green(ctx, input, at),
        Command::Asymptotics { input, samples, shift, fourier_k, n, fit_from } => {
            asymptotics(ctx, input, *samples, *shift, *fourier_k, *n, *fit_from)
        }
        Command::Julia { input, depth, probes } => julia(ctx, input, *depth, *probes),
        Command::Oracle(cmd) => oracle(ctx, cmd),
        Command::Fixtures(cmd) => fixture(ctx, cmd),
    }
}

#[derive(Serialize)]
struct Analysis {
    axioms: Option<AxiomReport>,
    walk_functions: Option<WalkFunctions>,
    scaling: Option<ScalingParams>,
    fixed_point: Option<FixedPointReport>,
    identities: Vec<IdentityCheck>,
}

fn analyze(ctx: &mut Context, input: &Input) -> Result<Outcome> {
    let cell = ctx.cell(input)?;
    let digits = ctx.digits();
    let axioms = match verify_symmetry(&cell) {
        Ok(r) => Some(r),
        Err(Error::Size { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut a = Analysis { axioms, walk_functions: None, scaling: None, fixed_point: None, identities: Vec::new() };
    let mut code = 0;
    let mut messages = Vec::new();
    if a.axioms.as_ref().is_some_and(|r| !r.passed) {
        code = 2;
        messages.push("cell violates the symmetry axioms".to_string());
    } else {
        let wf = transition_return_functions(&cell)?;
        let (sp, checks) = scaling_identities(&cell, &wf)?;
        a.fixed_point = Some(fixed_point_report(&wf.d)?);
        if checks.iter().any(|c| !c.holds) {
            code = 4;
            messages.push("a scaling identity fails".to_string());
        }
        a.walk_functions = Some(wf);
        a.scaling = Some(sp);
        a.identities = checks;
    }
    if ctx.cli.json {
        return Ok(Outcome { artifacts: vec![Artifact::new("analysis.json", json(&a))], exit_code: code, messages });
    }
    let mut s = String::new();
    let _ = writeln!(s, "vertices {}", cell.vertex_count());
    let _ = writeln!(s, "boundary {:?}", cell.boundary());
    match &a.axioms {
        Some(r) => {
            let _ = writeln!(s, "axioms {}", if r.passed { "pass" } else { "fail" });
            for (code, msg) in &r.failures {
                let _ = writeln!(s, "failure {code}: {msg}");
            }
            for n in &r.notes {
                let _ = writeln!(s, "note {n}");
            }
        }
        None => {
            let _ = writeln!(s, "axioms skipped (cell too large for the symmetry search)");
        }
    }
    if let (Some(wf), Some(sp), Some(fp)) = (&a.walk_functions, &a.scaling, &a.fixed_point) {
        let _ = writeln!(s, "theta {}", sp.theta);
        let _ = writeln!(s, "mu {}", sp.mu);
        let _ = writeln!(s, "beta {}", sp.beta);
        let _ = writeln!(s, "tau {}", sp.tau);
        let _ = writeln!(s, "rho {}", sp.rho);
        let _ = writeln!(s, "d_s {}", fmt_f64(sp.d_s, digits));
        let _ = writeln!(s, "alpha {}", fmt_f64(sp.alpha, digits));
        let _ = writeln!(s, "ord_0(d) {}", fp.order_at_zero);
        let _ = writeln!(s, "bipartite {}", wf.bipartite);
        let _ = writeln!(s, "d(z) = {}", wf.d);
        let _ = writeln!(s, "f(z) = {}", wf.f);
        let _ = writeln!(s, "u(z) = {}", wf.u);
        let _ = writeln!(s, "u_hat(z) = {}", wf.u_hat);
        for c in &a.identities {
            let _ = writeln!(s, "check {}: {} vs {} {}", c.name, c.lhs, c.rhs, if c.holds { "ok" } else { "FAIL" });
        }
    }
    Ok(Outcome { artifacts: vec![Artifact::new("analysis.txt", s)], exit_code: code, messages })
}

fn blowup(ctx: &mut Context, input: &Input, levels: usize, base: Option<usize>, format: &str) -> Result<Outcome> {
    let cell = ctx.cell(input)?;
    let fmt: ExportFormat = if ctx.cli.json { ExportFormat::AdjacencyJson } else { format.parse()? };
    let base = base.or_else(|| origin_clique(&cell)).unwrap_or(1);
    let b = blow_up(&cell, base, levels)?;
    let name = match fmt {
        ExportFormat::EdgeList => "blowup.edges",
        ExportFormat::CellFormat => "blowup.cell",
        ExportFormat::AdjacencyJson => "blowup.json",
    };
    let mut o = Outcome::ok(vec![Artifact::new(name, export_graph(&b, fmt))]);
    o.messages.push(format!("blow-up: {} vertices, {} edges, origin {:?}", b.vertex_count(), b.edges().len(), b.origin()));
    Ok(o)
}

fn walk_functions(ctx: &mut Context, input: &Input) -> Result<(CellGraph, WalkFunctions)> {
    let cell = ctx.cell(input)?;
    let wf = transition_return_functions(&cell)?;
    Ok((cell, wf))
}

fn coeffs(ctx: &mut Context, input: &Input, n: usize, float: bool) -> Result<Outcome> {
    let (_, wf) = walk_functions(ctx, input)?;
    let mode = if float { CoefficientMode::Float(ctx.cli.precision) } else { CoefficientMode::Exact };
    let gs = green_coefficients(&wf, n, mode)?;
    if ctx.cli.json {
        return Ok(Outcome::ok(vec![Artifact::new("coeffs.json", json(&gs))]));
    }
    let mut s = String::from("n,p_n\n");
    match &gs.coefficients {
        Coefficients::Exact(c) => {
            for (k, v) in c.iter().enumerate() {
                let _ = writeln!(s, "{k},{v}");
            }
        }
        Coefficients::Float { values, .. } => {
            for (k, v) in values.iter().enumerate() {
                let _ = writeln!(s, "{k},{}", fmt_f64(*v, ctx.digits()));
            }
        }
    }
    let mut o = Outcome::ok(vec![Artifact::new("coeffs.csv", s)]);
    if float {
        o.messages.push(format!("coefficient error bound {}", fmt_f64(gs.error_bound(), 3)));
    }
    Ok(o)
}

#[derive(Serialize)]
struct GreenValue {
    z: [f64; 2],
    value: [f64; 2],
    error_bound: f64,
    precision: u32,
}

fn green(ctx: &mut Context, input: &Input, at: &str) -> Result<Outcome> {
    let (_, wf) = walk_functions(ctx, input)?;
    let prec = ctx.cli.precision;
    let z = parse_complex(at, prec).ok_or_else(|| Error::Parse(format!("cannot parse complex number '{at}'")))?;
    let (g, err) = green_product(&wf, &z, prec)?;
    if g.conj().sub(&green_product(&wf, &z.conj(), prec)?.0).abs_f64() > 2.0 * err.max(f64::MIN_POSITIVE) + 1e-300 {
        return Err(Error::TheoremViolation("G(conj z) differs from conj G(z)".into()));
    }
    if ctx.cli.json {
        let c = g.to_c64();
        let zc = z.to_c64();
        let v = GreenValue { z: [zc.re, zc.im], value: [c.re, c.im], error_bound: err, precision: prec };
        return Ok(Outcome::ok(vec![Artifact::new("green.json", json(&v))]));
    }
    let s = format!(
        "z = {}\nG(z) = {}\nerror_bound = {}\n",
        fmt_complex(&z, ctx.digits()),
        fmt_complex(&g, ctx.digits()),
        fmt_f64(err, 3)
    );
    Ok(Outcome::ok(vec![Artifact::new("green.txt", s)]))
}

#[derive(Serialize)]
struct AsymptoticSummary<'a> {
    profile: &'a AsymptoticProfile,
    samples: usize,
    shift: u32,
    precision: u32,
    coefficient_error_bound: f64,
    residual_windows: &'a [sswalk::asymptotics::ResidualWindow],
    residual_exponent: Option<f64>,
    max_sigma_imaginary: f64,
}

fn asymptotics(ctx: &mut Context, input: &Input, m: usize, shift: u32, k: usize, n: usize, fit_from: usize) -> Result<Outcome> {
    let (cell, wf) = walk_functions(ctx, input)?;
    let prec = ctx.cli.precision;
    let digits = ctx.digits();
    let (sp, _) = scaling_identities(&cell, &wf)?;
    let samples = h_and_omega(&wf, &sp, m, shift, prec)?;
    let profile = AsymptoticProfile::from_samples(&samples, &sp, k, wf.bipartite)?;
    let gs = green_coefficients(&wf, n, CoefficientMode::Float(prec))?;
    let fit = asymptotic_fit(&gs, &profile, fit_from, n)?;
    let table = |coeffs: &[sswalk::asymptotics::FourierCoefficient]| {
        let mut s = String::from("k,re,im,abs\n");
        for c in coeffs {
            let _ = writeln!(s, "{},{},{},{}", c.k, fmt_f64(c.re, digits), fmt_f64(c.im, digits), fmt_f64(c.abs(), digits));
        }
        s
    };
    let mut sigma = String::from("t,sigma\n");
    for j in 0..64 {
        let t = j as f64 / 64.0;
        let _ = writeln!(sigma, "{},{}", fmt_f64(t, digits), fmt_f64(profile.sigma_at(t)?, digits));
    }
    let mut residuals = String::from("n,p_n,fitted,residual\n");
    for r in &fit.rows {
        let _ = writeln!(residuals, "{},{},{},{}", r.n, fmt_f64(r.p_n, digits), fmt_f64(r.fitted, digits), fmt_f64(r.residual, digits));
    }
    let summary = AsymptoticSummary {
        profile: &profile,
        samples: m,
        shift,
        precision: prec,
        coefficient_error_bound: gs.error_bound(),
        residual_windows: &fit.windows,
        residual_exponent: fit.exponent,
        max_sigma_imaginary: profile.max_sigma_imaginary(1024),
    };
    Ok(Outcome::ok(vec![
        Artifact::new("omega_hat.csv", table(&profile.omega_hat)),
        Artifact::new("sigma_hat.csv", table(&profile.sigma_hat)),
        Artifact::new("sigma.csv", sigma),
        Artifact::new("residuals.csv", residuals),
        Artifact::new("summary.json", json(&summary)),
    ]))
}

fn julia(ctx: &mut Context, input: &Input, depth: usize, probes: usize) -> Result<Outcome> {
    let (_, wf) = walk_functions(ctx, input)?;
    let v: JuliaVerdict = julia_classify_with(&wf.d, depth, probes)?;
    if ctx.cli.json {
        return Ok(Outcome::ok(vec![Artifact::new("julia.json", json(&v))]));
    }
    let mut s = String::new();
    let kind = match v.kind {
        JuliaKind::Interval => "interval",
        JuliaKind::Cantor => "cantor",
        JuliaKind::Unknown => "unknown",
    };
    let _ = writeln!(s, "verdict {kind}");
    if let Some(w) = &v.witness {
        let _ = writeln!(s, "witness z0 = {}, n = {}, d^n(z0) = {}", w.z0, w.n, w.value);
        let orbit: Vec<String> = w.orbit.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "orbit {}", orbit.join(" -> "));
    }
    for b in &v.preimage_chain {
        if b.infinite {
            let _ = writeln!(s, "backward level {}: inf", b.level);
        } else {
            let _ = writeln!(s, "backward level {}: {} in [{}, {}]", b.level, fmt_f64(b.approx, ctx.digits()), b.lower, b.upper);
        }
    }
    for n in &v.notes {
        let _ = writeln!(s, "note {n}");
    }
    Ok(Outcome::ok(vec![Artifact::new("julia.txt", s)]))
}

fn oracle(ctx: &mut Context, cmd: &OracleCommand) -> Result<Outcome> {
    let digits = ctx.digits();
    match cmd {
        OracleCommand::Hit { input, vertex, trials } => {
            let cell = ctx.cell(input)?;
            let v = vertex.unwrap_or(cell.boundary()[0]);
            let st = monte_carlo_first_hit(&cell, v, *trials, ctx.cli.seed)?;
            if ctx.cli.json {
                return Ok(Outcome::ok(vec![Artifact::new("hit.json", json(&st))]));
            }
            let mut s = format!("# trials {} seed {}\n", st.trials, st.seed);
            let _ = writeln!(s, "# mean_hit_time {} se {}", fmt_f64(st.mean_hit_time, digits), fmt_f64(st.mean_hit_time_se, digits));
            let _ = writeln!(s, "# mean_visits {} se {}", fmt_f64(st.mean_visits, digits), fmt_f64(st.mean_visits_se, digits));
            s.push_str("n,count,pmf,se\n");
            for (n, &c) in st.hit_counts.iter().enumerate() {
                if c > 0 {
                    let _ = writeln!(s, "{n},{c},{},{}", fmt_f64(st.hit_pmf(n), digits), fmt_f64(st.hit_pmf_se(n), digits));
                }
            }
            Ok(Outcome::ok(vec![Artifact::new("hit.csv", s)]))
        }
        OracleCommand::Power { input, from, to, steps, absorbing, float } => {
            let cell = ctx.cell(input)?;
            let to = to.unwrap_or(*from);
            let chain = FiniteChain::from_cell(&cell, absorbing);
            let mode = if *float { PowerMode::Float } else { PowerMode::Exact };
            let t = matrix_power_probabilities(&chain, *from, *steps, mode)?;
            if to >= chain.len() {
                return Err(Error::IndexOutOfRange(format!("vertex {to}")));
            }
            let mut s = String::from("k,p\n");
            for k in 0..=t.steps() {
                match t.exact(k, to) {
                    Some(q) => {
                        let _ = writeln!(s, "{k},{q}");
                    }
                    None => {
                        let _ = writeln!(s, "{k},{}", fmt_f64(t.get_f64(k, to), digits));
                    }
                }
            }
            Ok(Outcome::ok(vec![Artifact::new("power.csv", s)]))
        }
        OracleCommand::Geodesic { input, x, y } => {
            let cell = ctx.cell(input)?;
            let c = geodesic_bound_check(&FiniteChain::from_cell(&cell, &[]), *x, *y)?;
            if ctx.cli.json {
                return Ok(Outcome::ok(vec![Artifact::new("geodesic.json", json(&c))]));
            }
            let s = format!("n,lhs,bound,equality\n{},{},{},{}\n", c.n, c.lhs, c.bound, c.equality);
            let code = if c.holds { 0 } else { 4 };
            Ok(Outcome { artifacts: vec![Artifact::new("geodesic.csv", s)], exit_code: code, messages: Vec::new() })
        }
    }
}

fn fixture(ctx: &mut Context, cmd: &FixtureCommand) -> Result<Outcome> {
    let text = match cmd {
        FixtureCommand::Counterexample { name } => {
            let c = fixtures::counterexample(name).ok_or_else(|| {
                let names: Vec<&str> = fixtures::COUNTEREXAMPLES.iter().map(|c| c.name).collect();
                Error::Parse(format!("unknown counterexample '{name}', expected one of {}", names.join(", ")))
            })?;
            c.text.to_string()
        }
        other => {
            let cell = match other {
                FixtureCommand::Line { n } => fixtures::line(*n)?,
                FixtureCommand::Flake { n } => fixtures::flake(*n)?,
                FixtureCommand::Sierpinski { dim, scale } => fixtures::sierpinski(*dim, *scale)?,
                FixtureCommand::Random { theta, max_vertices } => {
                    fixtures::random_symmetric_cell(ctx.cli.seed, *theta, *max_vertices)?
                }
                FixtureCommand::Counterexample { .. } => unreachable!(),
            };
            if ctx.cli.json {
                let mut s = cell.to_json();
                s.push('\n');
                s
            } else {
                cell.to_cell_format()
            }
        }
    };
    let name = if ctx.cli.json && !matches!(cmd, FixtureCommand::Counterexample { .. }) { "fixture.json" } else { "fixture.cell" };
    Ok(Outcome::ok(vec![Artifact::new(name, text)]))
}
