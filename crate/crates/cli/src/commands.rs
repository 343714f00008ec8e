//! One function per subcommand; each fills in a [`Report`].

use std::path::Path;

use qgap_core::amp::{
    c_of_lambda, verify_classical_amp, verify_quantum_amp_capped, AmpCaps, ClassicalCSP, QuantumWalkSystem,
};
use qgap_core::corpus::{diagonal_neq, mixed_assignments, planted_csp, random_edge_system, rank1_entangled};
use qgap_core::detect::{
    decay_bound, decay_spectrum, delta_sq, detect_witness, kitaev_check, projected_norm_sq, verify_aux,
    verify_decay, verify_detectability, verify_energy_claims, SystemBounds,
};
use qgap_core::linalg::{LanczosOptions, DENSE_CAP};
use qgap_core::qsat::{load_instance, save_instance, GroundOptions, QSatSystem};
use qgap_core::report::CheckReport;
use qgap_core::sweep::{verify_all, verify_moments, SweepOptions};
use qgap_core::walks::{random_regular, spectral, walk_avoid_probability, walk_moments, Graph};
use qgap_core::xy::{seeded_state, ThetaMode, ThetaOptions};
use qgap_core::Error;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::report::Report;
use crate::{
    CampArgs, CliError, Command, Common, CspKind, GenArgs, GenFamily, GraphArgs, GroundArgs, GroundMethod,
    LayersArgs, MomentsArgs, QampArgs, QampFamily, ThetaArgs, ThetaModeArg,
};

type CliResult<T> = Result<T, CliError>;

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn shape(name: &str) -> CliResult<Graph> {
    let sized = |prefix: &str| -> Option<CliResult<usize>> {
        name.strip_prefix(prefix).map(|n| {
            n.parse()
                .map_err(|_| config(format!("bad size in shape {name:?}")))
        })
    };
    if name == "k4" {
        return Ok(Graph::complete(4));
    }
    if name == "prism" {
        return Ok(Graph::prism());
    }
    if let Some(n) = sized("complete:") {
        return Ok(Graph::complete(n?));
    }
    if let Some(n) = sized("cycle:") {
        return Ok(Graph::cycle(n?));
    }
    if let Some(n) = sized("path:") {
        return Ok(Graph::path(n?));
    }
    Err(config(format!("unknown shape {name:?}")))
}

fn load_graph_file(path: &Path) -> CliResult<Graph> {
    let bytes = read(path)?;
    let g = if path.extension().is_some_and(|e| e == "json") {
        Graph::from_json(&bytes)?
    } else {
        let text = String::from_utf8(bytes).map_err(|e| config(e.to_string()))?;
        Graph::from_edge_list(&text)?
    };
    Ok(g)
}

fn graph_of(args: &GraphArgs) -> CliResult<Graph> {
    match (&args.graph, &args.shape) {
        (Some(p), _) => load_graph_file(p),
        (None, Some(s)) => shape(s),
        (None, None) => Err(config("a graph is required: pass --graph or --shape")),
    }
}

/// Loads, validates and layers an instance.
fn load_system(path: &Path) -> CliResult<QSatSystem> {
    let sys = load_instance(&read(path)?)?;
    let v = sys.validate();
    if !v.is_valid() {
        return Err(config(format!(
            "{} is not a valid instance: {}",
            path.display(),
            serde_json::to_string(&v.issues).unwrap_or_default()
        )));
    }
    Ok(sys.layered())
}

fn theta_options(c: &Common, mode: ThetaMode) -> ThetaOptions {
    let mut o = ThetaOptions {
        mode,
        seed: c.seed,
        ..ThetaOptions::default()
    };
    if let Some(cap) = c.cap_enum {
        o.cap = cap;
    }
    o
}

fn ground_options(c: &Common) -> GroundOptions {
    GroundOptions {
        dense_cap: c.cap_dense.unwrap_or(DENSE_CAP),
        lanczos: LanczosOptions {
            tol: c.tol.unwrap_or(LanczosOptions::default().tol),
            seed: c.seed,
            ..LanczosOptions::default()
        },
    }
}

fn system_bounds(sys: &QSatSystem, c: &Common) -> CliResult<SystemBounds> {
    let (e0, _) = sys.ground_state(&ground_options(c))?;
    Ok(SystemBounds::with_epsilon0(
        sys,
        e0,
        &theta_options(c, ThetaMode::Exact),
    )?)
}

fn bounds_json(b: &SystemBounds, ell: usize) -> Value {
    let p = b.params(ell);
    let d2 = if p.theta_exact { delta_sq(&p).ok() } else { None };
    json!({
        "epsilon0": b.epsilon0,
        "theta": b.theta,
        "theta_exact": b.theta_exact,
        "k": b.k,
        "g": b.g,
        "f1": b.f1,
        "f": b.f,
        "r": (b.r != usize::MAX).then_some(b.r),
        "ell": ell,
        "regime_valid": p.regime_valid(),
        "delta_sq": d2,
    })
}

fn states(sys: &QSatSystem, c: &Common, default_trials: usize) -> Vec<qgap_core::linalg::StateVector> {
    let trials = c.trials.unwrap_or(default_trials);
    (0..trials)
        .map(|i| seeded_state(sys.total_dim(), c.seed, i as u64))
        .collect()
}

fn fold(check: &str, params: Value, parts: impl IntoIterator<Item = CheckReport>) -> CheckReport {
    let mut total = CheckReport::new(check, params);
    for p in parts {
        total.merge(p);
    }
    total
}

pub fn gen(args: &GenArgs, c: &Common) -> CliResult<Vec<u8>> {
    let sys = match args.family {
        GenFamily::RandomRegular => {
            let g = random_regular(args.n, args.d, c.seed)?;
            return Ok(g.to_json()?);
        }
        GenFamily::DiagonalNeq => diagonal_neq(&graph_of(&args.graph)?, args.q)?,
        GenFamily::Rank1Entangled => rank1_entangled(&graph_of(&args.graph)?, args.angle)?,
        GenFamily::RandomRank => random_edge_system(&graph_of(&args.graph)?, args.rank, c.seed)?,
    };
    Ok(save_instance(&sys)?)
}

pub fn run(cli: &crate::Cli, report: &mut Report) -> CliResult<()> {
    let c = &cli.common;
    match &cli.command {
        Command::Gen(_) => unreachable!("gen writes no report"),
        Command::Validate(a) => validate(&a.instance, report),
        Command::Layers(a) => layers(a, report),
        Command::Theta(a) => theta(a, c, report),
        Command::Ground(a) => ground(a, c, report),
        Command::Decay(a) => decay(&load_system(&a.instance)?, c, report),
        Command::Detect(a) => detect(&load_system(&a.instance)?, c, report),
        Command::Kitaev(a) => kitaev(&load_system(&a.instance)?, c, report),
        Command::Camp(a) => camp(a, c, report),
        Command::Qamp(a) => qamp(a, c, report),
        Command::Moments(a) => moments(a, c, report),
        Command::VerifyAll(_) => sweep(c, report),
    }
}

fn validate(path: &Path, report: &mut Report) -> CliResult<()> {
    let sys = load_instance(&read(path)?)?;
    let v = sys.validate();
    report.params = json!({
        "n": sys.n(), "m": sys.m(), "dims": sys.dims(),
        "layers_present": sys.layers().is_some(), "valid": v.is_valid(),
    });
    report.rows = v.issues.iter().map(|i| json!(i)).collect();
    let mut rep = CheckReport::new("validate", json!({}));
    rep.trials = 1;
    rep.check_le_with(0, "issues", v.issues.len() as f64, 0.0, 0.0);
    report.checks.push(rep);
    Ok(())
}

fn layers(a: &LayersArgs, report: &mut Report) -> CliResult<()> {
    let loaded = load_system(&a.input.instance)?;
    let from_file = load_instance(&read(&a.input.instance)?)?.layers().is_some() && !a.recompute;
    let sys = if from_file {
        loaded
    } else {
        let l = loaded.compute_layers();
        loaded.with_layers(l)
    };
    let layers = sys.require_layers()?;
    report.params = json!({
        "g": layers.len(),
        "source": if from_file { "file" } else { "greedy" },
        "greedy_g": sys.compute_layers().len(),
        "k": sys.k(),
    });
    report.rows = layers
        .iter()
        .enumerate()
        .map(|(i, ids)| json!({"layer": i, "size": ids.len(), "constraints": ids}))
        .collect();
    let issues = sys.validate().issues.len();
    let mut rep = CheckReport::new("layer-partition", json!({}));
    rep.trials = 1;
    rep.check_le_with(0, "issues", issues as f64, 0.0, 0.0);
    report.checks.push(rep);
    if let Some(p) = &a.save {
        std::fs::write(p, save_instance(&sys)?).map_err(|e| config(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn theta(a: &ThetaArgs, c: &Common, report: &mut Report) -> CliResult<()> {
    let sys = load_system(&a.input.instance)?;
    let mode = if a.mode == ThetaModeArg::Sampled {
        ThetaMode::Sampled
    } else {
        ThetaMode::Exact
    };
    let opts = theta_options(c, mode);
    let b = SystemBounds::with_epsilon0(&sys, 0.0, &opts)?;
    if a.mode == ThetaModeArg::Exact && !b.theta_exact {
        return Err(CliError::Cap(format!(
            "a pyramid needs more than {} products for exact θ",
            opts.cap
        )));
    }
    report.params = json!({
        "theta": b.theta, "theta_exact": b.theta_exact, "k": b.k, "g": b.g,
        "f1": b.f1, "f": b.f, "r": (b.r != usize::MAX).then_some(b.r), "cap": opts.cap,
    });
    let mut rep = CheckReport::new("theta-range", json!({}));
    for (top, cover) in b.covers.iter().enumerate() {
        for (d, dec) in cover.iter().enumerate() {
            for (pyr, sp) in dec.pyramids.iter().zip(&dec.spaces) {
                rep.trials += 1;
                rep.check_le_with(0, &format!("theta(apex {})", pyr.apex), sp.theta, 1.0, 1e-9);
                report.rows.push(json!({
                    "top": top, "decomposition": d, "apex": pyr.apex, "size": pyr.size(),
                    "y_dim": sp.y_space.dim(), "theta": sp.theta, "exact": sp.exact,
                }));
            }
        }
    }
    report.checks.push(rep);
    Ok(())
}

fn ground(a: &GroundArgs, c: &Common, report: &mut Report) -> CliResult<()> {
    let sys = load_system(&a.input.instance)?;
    let opts = ground_options(c);
    let dim = sys.total_dim();
    let mut rows = Vec::new();
    let mut oracle = CheckReport::new("lanczos-vs-dense", json!({"tol": opts.lanczos.tol}));
    let use_dense = match a.method {
        GroundMethod::Dense => true,
        GroundMethod::Lanczos => false,
        GroundMethod::Auto => dim <= opts.dense_cap,
    };
    let mut energy = None;
    if use_dense {
        let dense_only = GroundOptions {
            dense_cap: opts.dense_cap,
            ..opts.clone()
        };
        if dim > dense_only.dense_cap {
            return Err(Error::DimensionTooLarge {
                dim,
                cap: dense_only.dense_cap,
            }
            .into());
        }
        let (e, _) = sys.ground_state(&dense_only)?;
        rows.push(json!({"method": "dense", "energy": e}));
        energy = Some(e);
    }
    if a.method != GroundMethod::Dense {
        let (e, _) = sys.ground_state_lanczos(&opts.lanczos)?;
        rows.push(json!({"method": "lanczos", "energy": e}));
        if let Some(d) = energy {
            oracle.trials = 1;
            oracle.check_le_with(0, "|lanczos - dense|", (e - d).abs(), 0.0, 1e-7);
        }
        energy.get_or_insert(e);
    }
    let e = energy.expect("some method ran");
    report.params = json!({
        "n": sys.n(), "m": sys.m(), "dim": dim, "g": sys.g(),
        "epsilon0": qgap_core::detect::snap_epsilon0(e),
    });
    report.rows = rows;
    report.checks.push(oracle);
    Ok(())
}

fn decay(sys: &QSatSystem, c: &Common, report: &mut Report) -> CliResult<()> {
    let ell = c.ell.unwrap_or(0);
    let b = system_bounds(sys, c)?;
    let p = b.params(ell);
    report.params = bounds_json(&b, ell);
    if !p.theta_exact {
        report.checks.push(CheckReport::skipped(
            "decay",
            json!(p),
            "theta is a sampled estimate",
        ));
        return Ok(());
    }
    let psis = states(sys, c, 20);
    let decs: Vec<_> = b
        .covers
        .iter()
        .enumerate()
        .flat_map(|(top, cover)| cover.iter().enumerate().map(move |(d, dec)| (top, d, dec)))
        .collect();
    let jobs: Vec<_> = decs
        .iter()
        .flat_map(|&dec| psis.iter().enumerate().map(move |(t, psi)| (dec, t, psi)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&((top, d, dec), trial, psi)| {
            let spec = match decay_spectrum(sys, dec, ell, psi) {
                Ok(s) => s,
                Err(Error::AllProjectedOut { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let rep = verify_decay(&spec, &p, trial)?;
            let energy = verify_energy_claims(sys, dec, &p, psi, trial)?;
            let rows: Vec<Value> = (ell..spec.lambda.len())
                .map(|s| {
                    let bound = decay_bound(&p, spec.layers, spec.x, s, spec.eta[s]);
                    json!({
                        "trial": trial, "top": top, "decomposition": d, "s": s, "x": spec.x,
                        "lambda": spec.lambda[s], "eta": spec.eta[s], "bound": bound,
                        "pass": spec.lambda[s] <= bound + qgap_core::report::default_slack(bound),
                    })
                })
                .collect();
            Ok(Some((rows, rep, energy)))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut decays = Vec::new();
    let mut energies = Vec::new();
    for (rows, rep, energy) in results.into_iter().flatten() {
        report.rows.extend(rows);
        decays.push(rep);
        energies.push(energy);
    }
    report.checks.push(fold("decay", json!(p), decays));
    report.checks.push(fold("energy-claims", json!(p), energies));
    Ok(())
}

fn detect(sys: &QSatSystem, c: &Common, report: &mut Report) -> CliResult<()> {
    let ell = c.ell.unwrap_or(0);
    let b = system_bounds(sys, c)?;
    let p = b.params(ell);
    report.params = bounds_json(&b, ell);
    let psis = states(sys, c, 20);
    let bound = (p.theta_exact && p.regime_valid())
        .then(|| delta_sq(&p))
        .transpose()?;
    let g = p.g as f64;
    let threshold = bound.map(|d2| d2 / (4.0 * g * g));
    let rows = psis
        .par_iter()
        .enumerate()
        .map(|(t, psi)| {
            let x2 = projected_norm_sq(sys, ell, psi)?;
            let (layer, best) = detect_witness(sys, ell, psi, threshold.unwrap_or(f64::INFINITY))?;
            let pass = match (bound, threshold) {
                (Some(d2), Some(th)) => x2 <= 1.0 - d2 + 1e-7 && best >= th - 1e-7,
                _ => true,
            };
            Ok(json!({
                "trial": t, "x2": x2, "x2_bound": bound.map(|d2| 1.0 - d2),
                "max_violation": best, "threshold": threshold, "witness_layer": layer, "pass": pass,
            }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    report.rows = rows;
    report.checks.push(verify_aux(sys, &b, ell, &psis)?);
    report.checks.push(verify_detectability(sys, &b, ell, &psis)?);
    Ok(())
}

fn kitaev(sys: &QSatSystem, c: &Common, report: &mut Report) -> CliResult<()> {
    let b = system_bounds(sys, c)?;
    report.params = bounds_json(&b, 0);
    let k = kitaev_check(sys, &b)?;
    report.rows.push(json!({
        "cos_alpha": k.cos_alpha,
        "one_minus_cos": k.cos_alpha.map(|x| 1.0 - x),
        "epsilon0": k.epsilon0,
        "delta_sq": k.delta_sq,
    }));
    report.checks.push(k.report);
    Ok(())
}

/// The constraint graph and assignments shared by `camp` and `moments`.
fn classical_setup(
    g: &Graph,
    kind: CspKind,
    q: usize,
    density: f64,
    c: &Common,
    default_trials: usize,
) -> (ClassicalCSP, Vec<Vec<usize>>) {
    let trials = c.trials.unwrap_or(default_trials);
    let (csp, center) = match kind {
        CspKind::Planted => planted_csp(g, q, density, c.seed),
        CspKind::Neq => (ClassicalCSP::inequality(g.clone(), q), vec![0; g.n()]),
    };
    let sigmas = mixed_assignments(&center, q, trials, c.seed.wrapping_add(1));
    (csp, sigmas)
}

fn graph_params(g: &Graph) -> CliResult<Value> {
    let spec = spectral(g)?;
    Ok(json!({
        "n": g.n(), "m": g.m(), "degree": g.regular_degree(),
        "lambda": spec.lambda, "bipartite": spec.bipartite,
        "c": c_of_lambda(spec.lambda).ok(),
    }))
}

fn camp(a: &CampArgs, c: &Common, report: &mut Report) -> CliResult<()> {
    let g = graph_of(&a.graph)?;
    let t_max = c.t.unwrap_or(4);
    report.params = graph_params(&g)?;
    let (csp, sigmas) = classical_setup(&g, a.csp, a.q, a.density, c, 50);
    let per_trial = sigmas
        .par_iter()
        .enumerate()
        .map(|(trial, sigma)| {
            (1..=t_max)
                .map(|t| verify_classical_amp(&csp, sigma, t, trial))
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut reps = Vec::new();
    for (trial, trial_reps) in per_trial.into_iter().enumerate() {
        for rep in trial_reps {
            let p = &rep.params;
            let (u, t) = (
                p["unsat"].as_f64().unwrap_or(0.0),
                p["t"].as_u64().unwrap_or(0) as usize,
            );
            let cval = p["c"].as_f64().unwrap_or(0.0);
            report.rows.push(json!({
                "trial": trial, "t": t, "unsat": u, "unsat_t": p["unsat_t"], "ratio": p["ratio"],
                "bound": qgap_core::amp::classical_bound(cval, u, t), "pass": rep.passed(),
            }));
            reps.push(rep);
        }
    }
    report
        .checks
        .push(fold("classical-amp", json!({"t_max": t_max}), reps));
    Ok(())
}

fn moments(a: &MomentsArgs, c: &Common, report: &mut Report) -> CliResult<()> {
    let g = graph_of(&a.graph)?;
    let t = c.t.unwrap_or(8);
    report.params = graph_params(&g)?;
    let (csp, sigmas) = classical_setup(&g, CspKind::Planted, a.q, a.density, c, 20);
    let results = sigmas
        .par_iter()
        .enumerate()
        .map(|(trial, sigma)| {
            let bad = csp.unsat_edges(sigma)?;
            let rep = verify_moments(&g, &bad, t, trial)?;
            let mo = walk_moments(&g, &bad, t);
            let frac = bad.len() as f64 / g.m() as f64;
            let row = json!({
                "trial": trial, "t": t, "bad": bad.len(), "bad_fraction": frac,
                "ez": mo.ez, "ez_expected": t as f64 * frac, "ez2": mo.ez2,
                "hit_probability": 1.0 - walk_avoid_probability(&g, &bad, t),
                "second_moment_bound": if mo.ez2 > 0.0 { Some(mo.ez * mo.ez / mo.ez2) } else { None },
                "pass": rep.passed(),
            });
            Ok((row, rep))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut reps = Vec::new();
    for (row, rep) in results {
        report.rows.push(row);
        reps.push(rep);
    }
    report.checks.push(fold("walk-moments", json!({"t": t}), reps));
    Ok(())
}

/// Experiment file for `qamp`. `graph` is a path or an inline
/// `{"n": .., "edges": [[u, v], ..]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSpec {
    graph: Value,
    family: String,
    #[serde(default)]
    q: Option<usize>,
    #[serde(default)]
    t: Option<usize>,
    #[serde(default)]
    trials: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    angle: Option<f64>,
    #[serde(default)]
    rank: Option<usize>,
    #[serde(default)]
    instance: Option<String>,
}

struct QampSetup {
    graph: Graph,
    family: QampFamily,
    instance: Option<std::path::PathBuf>,
    q: usize,
    t: usize,
    seed: u64,
    angle: f64,
    rank: usize,
}

fn qamp_setup(a: &QampArgs, c: &Common) -> CliResult<QampSetup> {
    let mut s = QampSetup {
        graph: Graph::complete(1),
        family: a.family,
        instance: a.instance.clone(),
        q: a.q,
        t: c.t.unwrap_or(3),
        seed: c.seed,
        angle: a.angle,
        rank: a.rank,
    };
    let Some(path) = &a.spec else {
        s.graph = match (&a.graph.graph, &a.graph.shape, &a.instance) {
            (None, None, Some(inst)) => edge_graph(&load_system(inst)?)?,
            _ => graph_of(&a.graph)?,
        };
        return Ok(s);
    };
    let spec: ExperimentSpec =
        serde_json::from_slice(&read(path)?).map_err(|e| config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    s.graph = match &spec.graph {
        Value::String(p) => load_graph_file(&base.join(p))?,
        v @ Value::Object(_) => Graph::from_json(v.to_string().as_bytes())?,
        _ => return Err(config("spec graph must be a path or an inline graph")),
    };
    s.family = QampFamily::from_str_kebab(&spec.family)?;
    s.instance = spec.instance.map(|p| base.join(p)).or(s.instance);
    s.q = spec.q.unwrap_or(s.q);
    s.t = spec.t.unwrap_or(s.t);
    s.seed = spec.seed.unwrap_or(s.seed);
    s.angle = spec.angle.unwrap_or(s.angle);
    s.rank = spec.rank.unwrap_or(s.rank);
    let _ = spec.trials;
    Ok(s)
}

impl QampFamily {
    fn from_str_kebab(s: &str) -> CliResult<Self> {
        <Self as clap::ValueEnum>::from_str(s, false).map_err(|_| config(format!("unknown family {s:?}")))
    }
}

/// The graph whose edges are the supports of a two-local system.
fn edge_graph(sys: &QSatSystem) -> CliResult<Graph> {
    let edges = sys
        .constraints()
        .iter()
        .map(|c| match c.support.as_slice() {
            &[u, v] => Ok((u, v)),
            _ => Err(config(
                "every constraint of a walk instance must act on two qudits",
            )),
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Graph::new(sys.n(), edges)?)
}

fn qamp(a: &QampArgs, c: &Common, report: &mut Report) -> CliResult<()> {
    let s = qamp_setup(a, c)?;
    let base = match s.family {
        QampFamily::DiagonalNeq => diagonal_neq(&s.graph, s.q)?,
        QampFamily::Rank1Entangled => rank1_entangled(&s.graph, s.angle)?,
        QampFamily::RandomRank => random_edge_system(&s.graph, s.rank, s.seed)?,
        QampFamily::File => {
            let p = s
                .instance
                .as_ref()
                .ok_or_else(|| config("family file needs --instance"))?;
            load_system(p)?
        }
    };
    let qws = QuantumWalkSystem::new(s.graph.clone(), base)?;
    let b = system_bounds(qws.base(), c)?;
    let caps = AmpCaps {
        walks: c.cap_enum.unwrap_or(AmpCaps::default().walks),
        dense: c.cap_dense.unwrap_or(AmpCaps::default().dense),
    };
    let rep = verify_quantum_amp_capped(&qws, s.t, &b, &caps)?;
    let mut params = bounds_json(&b, 0);
    params["lambda"] = json!(rep.lambda);
    params["c"] = json!(rep.c);
    params["k_eff"] = json!(rep.k_eff);
    params["q"] = json!(qws.q());
    params["t_max"] = json!(s.t);
    report.params = params;
    report.rows = rep.rows.iter().map(|r| json!(r)).collect();
    report.checks = vec![rep.lemma, rep.monotone, rep.main_amp, rep.sectors, rep.oracle];
    Ok(())
}

fn sweep(c: &Common, report: &mut Report) -> CliResult<()> {
    let mut opts = SweepOptions {
        seed: c.seed,
        ..SweepOptions::default()
    };
    if let Some(t) = c.trials {
        opts.trials = t;
    }
    if let Some(t) = c.t {
        opts.t_classical = t;
    }
    if let Some(l) = c.ell {
        opts.ell_max = l;
    }
    opts.theta = theta_options(c, ThetaMode::Exact);
    if let Some(cap) = c.cap_dense {
        opts.amp_caps.dense = cap;
    }
    report.params = json!(opts);
    let entries = verify_all(&opts)?;
    for e in entries {
        let r = &e.report;
        report.rows.push(json!({
            "instance": e.instance, "check": r.check, "trials": r.trials, "checked": r.checked,
            "failures": r.failures.len(), "worst_margin": r.worst_margin,
            "skipped": r.skipped, "pass": r.passed(),
        }));
        report.checks.push(e.report);
    }
    Ok(())
}
