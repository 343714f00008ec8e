//! One pass of every verification harness over the standard corpus.

use serde::Serialize;
use serde_json::json;

use rayon::prelude::*;

use crate::amp::{verify_classical_amp, verify_quantum_amp_capped, AmpCaps};
use crate::corpus::{
    classical_graphs, mixed_assignments, multi_layer_corpus, planted_csp, quantum_toys, two_layer_corpus,
    valid_regime_corpus, Instance,
};
use crate::detect::{
    decay_spectrum, kitaev_check, verify_aux, verify_decay, verify_detectability, verify_energy_claims,
    SystemBounds,
};
use crate::error::{Error, Result};
use crate::linalg::DENSE_CAP;
use crate::report::CheckReport;
use crate::walks::{spectral, walk_avoid_probability, walk_moments, Graph};
use crate::xy::{seeded_state, ThetaOptions};

#[derive(Clone, Debug, Serialize)]
pub struct SweepOptions {
    /// Random states per instance and assignments per graph.
    pub trials: usize,
    pub seed: u64,
    /// Longest classical walk.
    pub t_classical: usize,
    /// Longest quantum walk.
    pub t_quantum: usize,
    /// Largest `ℓ` tried on each instance.
    pub ell_max: usize,
    pub theta: ThetaOptions,
    pub amp_caps: AmpCaps,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            trials: 20,
            seed: 0,
            t_classical: 8,
            t_quantum: 3,
            ell_max: 2,
            theta: ThetaOptions::default(),
            amp_caps: AmpCaps::default(),
        }
    }
}

/// A harness report tagged with the corpus member it ran on.
#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub instance: String,
    pub report: CheckReport,
}

fn entry(instance: &str, report: CheckReport) -> SweepEntry {
    SweepEntry {
        instance: instance.to_string(),
        report,
    }
}

/// Folds per-trial reports of one check into a single report.
fn fold(check: &str, params: serde_json::Value, parts: impl IntoIterator<Item = CheckReport>) -> CheckReport {
    let mut total = CheckReport::new(check, params);
    for p in parts {
        total.merge(p);
    }
    total
}

fn sweep_instance(inst: &Instance, index: u64, opts: &SweepOptions) -> Result<Vec<SweepEntry>> {
    let sys = &inst.sys;
    let bounds = SystemBounds::compute(sys, &opts.theta)?;
    let dim = sys.total_dim();
    let seed = opts.seed.wrapping_add(1000 * index);
    let psis: Vec<_> = (0..opts.trials)
        .map(|i| seeded_state(dim, seed, i as u64))
        .collect();
    let mut out = Vec::new();
    for ell in 0..=opts.ell_max {
        let p = bounds.params(ell);
        out.push(entry(&inst.name, verify_aux(sys, &bounds, ell, &psis)?));
        out.push(entry(&inst.name, verify_detectability(sys, &bounds, ell, &psis)?));
        if !p.theta_exact {
            out.push(entry(
                &inst.name,
                CheckReport::skipped("decay", json!(p), "theta is a sampled estimate"),
            ));
            continue;
        }
        let mut decay = Vec::new();
        let mut energy = Vec::new();
        for dec in bounds.covers.iter().flatten() {
            for (t, psi) in psis.iter().enumerate() {
                match decay_spectrum(sys, dec, ell, psi) {
                    Ok(spec) => decay.push(verify_decay(&spec, &p, t)?),
                    Err(Error::AllProjectedOut { .. }) => continue,
                    Err(e) => return Err(e),
                }
                energy.push(verify_energy_claims(sys, dec, &p, psi, t)?);
            }
        }
        out.push(entry(&inst.name, fold("decay", json!(p), decay)));
        out.push(entry(&inst.name, fold("energy-claims", json!(p), energy)));
    }
    if sys.g() == 2 {
        let rep = if dim > DENSE_CAP {
            CheckReport::skipped("kitaev", json!(bounds.params(0)), "dimension above the dense cap")
        } else {
            kitaev_check(sys, &bounds)?.report
        };
        out.push(entry(&inst.name, rep));
    }
    Ok(out)
}

/// Pairwise walk moment bounds and the second-moment inequality as one report.
pub fn verify_moments(g: &Graph, bad: &[usize], t_max: usize, trial: usize) -> Result<CheckReport> {
    let lambda = spectral(g)?.lambda;
    let frac = bad.len() as f64 / g.m() as f64;
    let mut rep = CheckReport::new(
        "walk-moments",
        json!({"lambda": lambda, "bad_fraction": frac, "t": t_max}),
    );
    rep.trials = 1;
    for t in 1..=t_max {
        let mo = walk_moments(g, bad, t);
        for i in 0..t {
            for j in 0..i {
                let rhs = frac * (frac + lambda.powi((i - j - 1) as i32));
                rep.check_le_with(
                    trial,
                    &format!("t={t} E[Z_{i} Z_{j}]"),
                    mo.pairwise[i][j],
                    rhs,
                    1e-10,
                );
            }
        }
        if mo.ez2 > 0.0 {
            let pr = 1.0 - walk_avoid_probability(g, bad, t);
            rep.check_ge_with(
                trial,
                &format!("t={t} Pr[Z>0]"),
                pr,
                mo.ez * mo.ez / mo.ez2,
                1e-12,
            );
        }
    }
    Ok(rep)
}

/// Runs every harness over the standard corpus. Instances run in parallel,
/// each on its own seed stream, and entries come back in corpus order.
pub fn verify_all(opts: &SweepOptions) -> Result<Vec<SweepEntry>> {
    let instances: Vec<Instance> = two_layer_corpus()
        .into_iter()
        .chain(multi_layer_corpus())
        .chain(valid_regime_corpus())
        .collect();
    let per_instance = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| sweep_instance(inst, i as u64, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<SweepEntry> = per_instance.into_iter().flatten().collect();
    for (gi, (name, g)) in classical_graphs().into_iter().enumerate() {
        let (csp, planted) = planted_csp(&g, 3, 0.3, opts.seed.wrapping_add(600 + gi as u64));
        let sigmas = mixed_assignments(&planted, 3, opts.trials, opts.seed.wrapping_add(700 + gi as u64));
        let mut amp = Vec::new();
        let mut moments = Vec::new();
        for (si, sigma) in sigmas.iter().enumerate() {
            for t in 1..=opts.t_classical {
                amp.push(verify_classical_amp(&csp, sigma, t, si)?);
            }
            moments.push(verify_moments(
                &g,
                &csp.unsat_edges(sigma)?,
                opts.t_classical,
                si,
            )?);
        }
        out.push(entry(
            &name,
            fold("classical-amp", json!({"t_max": opts.t_classical}), amp),
        ));
        out.push(entry(
            &name,
            fold("walk-moments", json!({"t_max": opts.t_classical}), moments),
        ));
    }
    let toys = quantum_toys()
        .into_par_iter()
        .map(|(name, qws)| {
            let bounds = SystemBounds::compute(qws.base(), &opts.theta)?;
            let rep = verify_quantum_amp_capped(&qws, opts.t_quantum, &bounds, &opts.amp_caps)?;
            Ok([rep.lemma, rep.monotone, rep.main_amp, rep.sectors, rep.oracle].map(|r| entry(&name, r)))
        })
        .collect::<Result<Vec<_>>>()?;
    out.extend(toys.into_iter().flatten());
    Ok(out)
}
