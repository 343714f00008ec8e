//! Closed-form bounds (Δ², r, f, the K constants) and the harnesses that
//! check the decay, detectability and energy inequalities numerically.

use serde::Serialize;
use serde_json::json;

use crate::amp::c_of_lambda;
use crate::error::{Error, Result};
use crate::linalg::{self, kernel, principal_cos, StateVector, RANK_TOL};
use crate::qsat::{project_at_most, QSatSystem};
use crate::report::CheckReport;
use crate::xy::{coarse_components, project_le, ThetaOptions, XYDecomposition};

/// Ground energies with magnitude below this are treated as exactly zero.
pub const EPSILON0_SNAP: f64 = 1e-8;

pub fn snap_epsilon0(e: f64) -> f64 {
    if e.abs() <= EPSILON0_SNAP {
        0.0
    } else {
        e.max(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub epsilon0: f64,
    pub theta: f64,
    pub theta_exact: bool,
    pub k: usize,
    pub g: usize,
    pub f: usize,
    pub r: usize,
    pub ell: usize,
}

impl BoundParams {
    /// `(eps0 / f) - r ell > 1 / (1 - theta)`, the condition for the `ell > 0` bound.
    pub fn regime_valid(&self) -> bool {
        self.ell == 0 || self.regime_gap() > 1.0 / (1.0 - self.theta)
    }

    fn regime_gap(&self) -> f64 {
        self.epsilon0 / self.f as f64 - (self.r * self.ell) as f64
    }
}

/// `Δ²(ℓ)`.
pub fn delta_sq(p: &BoundParams) -> Result<f64> {
    if !(0.0..1.0).contains(&p.theta) {
        return Err(Error::InvalidRegime(format!(
            "theta = {} is not in [0, 1)",
            p.theta
        )));
    }
    if p.f == 0 {
        return Err(Error::InvalidRegime("f must be at least 1".into()));
    }
    let eps = snap_epsilon0(p.epsilon0);
    if p.ell == 0 {
        if p.theta == 0.0 {
            return Ok(if eps > 0.0 { 1.0 } else { 0.0 });
        }
        let t2 = p.theta * p.theta;
        let cprime = (1.0 - t2).powi(3) / t2;
        return Ok(1.0 - 1.0 / ((eps / p.f as f64) * cprime + 1.0));
    }
    let gap = eps / p.f as f64 - (p.r * p.ell) as f64;
    if gap <= 1.0 / (1.0 - p.theta) {
        return Err(Error::InvalidRegime(format!(
            "eps0/f - r*ell = {gap:.6} does not exceed 1/(1-theta) = {:.6}",
            1.0 / (1.0 - p.theta)
        )));
    }
    Ok(1.0 - 1.0 / ((1.0 - p.theta) * gap))
}

/// Left-hand side of the sufficient condition for `r`, compared against
/// `ln(1/theta)`.
pub fn r_condition_lhs(r: usize, k: usize, g: usize) -> f64 {
    let r = r as f64;
    let g = g as f64;
    let k = k.max(2) as f64;
    (2.0 * g + 1.0) * r.ln() / r + (4.0 * g + 2.0 * g * g * k.ln()) / r
}

/// Smallest integer `r >= 4` with
/// `(2g+1) ln r / r + (4g + 2g² ln k) / r < ln(1/θ)`. Support sizes below 2
/// are treated as 2. `θ = 0` gives 4.
pub fn find_r(theta: f64, k: usize, g: usize) -> Result<usize> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidRegime(format!("theta = {theta} is not in [0, 1)")));
    }
    if theta == 0.0 {
        return Ok(4);
    }
    let target = (1.0 / theta).ln();
    let mut r = 4;
    while r_condition_lhs(r, k, g) >= target {
        r += 1;
    }
    Ok(r)
}

/// Greedy cover of layer `top`: decompositions are added until every
/// constraint of that layer is the apex of some pyramid. Each new family
/// prefers apexes that are still uncovered.
pub fn cover(sys: &QSatSystem, top: usize, opts: &ThetaOptions) -> Result<Vec<XYDecomposition>> {
    let layer = sys.layer(top)?.to_vec();
    let mut uncovered: Vec<usize> = layer.clone();
    let mut out = Vec::new();
    while !uncovered.is_empty() {
        let mut priority = uncovered.clone();
        priority.extend(layer.iter().copied().filter(|id| !uncovered.contains(id)));
        let dec = XYDecomposition::build(sys, top, &priority, opts)?;
        let apexes = dec.apexes();
        uncovered.retain(|id| !apexes.contains(id));
        out.push(dec);
    }
    Ok(out)
}

/// `(f1, decompositions)` for the top layer.
pub fn cover_count(sys: &QSatSystem, opts: &ThetaOptions) -> Result<(usize, Vec<XYDecomposition>)> {
    let c = cover(sys, 0, opts)?;
    Ok((c.len(), c))
}

/// Everything the bound formulas need for one system.
#[derive(Clone, Debug)]
pub struct SystemBounds {
    pub epsilon0: f64,
    pub theta: f64,
    pub theta_exact: bool,
    pub k: usize,
    pub g: usize,
    pub f1: usize,
    pub f: usize,
    pub r: usize,
    /// `covers[i]` is the cover of layer `i`, each pyramid reaching down to the bottom.
    pub covers: Vec<Vec<XYDecomposition>>,
}

impl SystemBounds {
    pub fn compute(sys: &QSatSystem, opts: &ThetaOptions) -> Result<Self> {
        let eps = sys.ground_energy()?;
        Self::with_epsilon0(sys, eps, opts)
    }

    /// θ is the largest pyramid θ over the covers of every layer (each layer
    /// acts as the top of the sub-system below it); `f1` is the largest cover
    /// size, `f = g f1`, and `r` is [`find_r`] plus one.
    pub fn with_epsilon0(sys: &QSatSystem, epsilon0: f64, opts: &ThetaOptions) -> Result<Self> {
        let g = sys.g();
        if g == 0 {
            return Err(Error::NoLayers);
        }
        let covers = (0..g)
            .map(|top| cover(sys, top, opts))
            .collect::<Result<Vec<_>>>()?;
        let all = || covers.iter().flatten();
        let theta = all().map(XYDecomposition::theta).fold(0.0, f64::max);
        let theta_exact = all().all(XYDecomposition::theta_exact);
        let f1 = covers.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let k = sys.k();
        let r = if theta < 1.0 {
            find_r(theta, k, g)? + 1
        } else {
            usize::MAX
        };
        Ok(Self {
            epsilon0: snap_epsilon0(epsilon0),
            theta,
            theta_exact,
            k,
            g,
            f1,
            f: g * f1,
            r,
            covers,
        })
    }

    pub fn params(&self, ell: usize) -> BoundParams {
        BoundParams {
            epsilon0: self.epsilon0,
            theta: self.theta,
            theta_exact: self.theta_exact,
            k: self.k,
            g: self.g,
            f: self.f,
            r: self.r,
            ell,
        }
    }

    /// Decompositions of the top layer.
    pub fn top_cover(&self) -> &[XYDecomposition] {
        &self.covers[0]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecaySpectrum {
    pub x: f64,
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
    pub ell: usize,
    /// Number of layers taking part (`g - top`).
    pub layers: usize,
    #[serde(skip)]
    pub omega: StateVector,
}

/// Builds `Ω = Π^g ⋯ Π^1 ψ / x` over the layers of `dec` and its weights
/// `λ_s = ||P_s Ω||`, together with `η_s` from the states
/// `Φ_j = Π^rest_{g, ℓ-j_g} ⋯ Π^rest_{1, ℓ-j_1} ψ`:
/// `η_s² = (ℓ+1)^{-g} Σ_j ||P_s Φ_j||²`.
pub fn decay_spectrum(
    sys: &QSatSystem,
    dec: &XYDecomposition,
    ell: usize,
    psi: &StateVector,
) -> Result<DecaySpectrum> {
    let g = sys.g();
    let layers: Vec<usize> = (dec.top..g).collect();
    let mut omega = psi.clone();
    for &l in &layers {
        omega = project_le(sys, l, ell, &omega)?;
    }
    let x = omega.norm();
    if x <= 1e-12 {
        return Err(Error::AllProjectedOut { x });
    }
    omega /= linalg::C64::from(x);
    let lambda: Vec<f64> = coarse_components(dec, sys.dims(), &omega)?
        .iter()
        .map(|c| c.norm())
        .collect();

    let outside: Vec<Vec<usize>> = layers
        .iter()
        .map(|&l| dec.outside(sys, l))
        .collect::<Result<_>>()?;
    let mut eta_sq = vec![0.0; dec.pyramids.len() + 1];
    let mut stack: Vec<(usize, StateVector)> = vec![(0, psi.clone())];
    let mut count = 0usize;
    while let Some((depth, v)) = stack.pop() {
        if depth == layers.len() {
            for (s, c) in coarse_components(dec, sys.dims(), &v)?.iter().enumerate() {
                eta_sq[s] += c.norm_squared();
            }
            count += 1;
            continue;
        }
        for j in (0..=ell).rev() {
            let next = project_at_most(sys, &outside[depth], ell - j, &v)?;
            stack.push((depth + 1, next));
        }
    }
    let eta = eta_sq.iter().map(|e| (e / count as f64).sqrt()).collect();
    Ok(DecaySpectrum {
        x,
        lambda,
        eta,
        ell,
        layers: layers.len(),
        omega,
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// The decay bound for sector size `s`:
/// `(1/x) k^{g²ℓ} ((ℓ+1)/ℓ!)^g s^{gℓ} θ^s η_s`.
pub fn decay_bound(p: &BoundParams, layers: usize, x: f64, s: usize, eta: f64) -> f64 {
    let g = layers as i32;
    let l = p.ell as i32;
    let k = p.k as f64;
    let comb = ((p.ell as f64 + 1.0) / factorial(p.ell)).powi(g);
    k.powi(g * g * l) * comb * (s as f64).powi(g * l) * p.theta.powi(s as i32) * eta / x
}

/// Checks `λ_s <= bound(s)` for every `s >= ℓ`.
pub fn verify_decay(spec: &DecaySpectrum, p: &BoundParams, trial: usize) -> Result<CheckReport> {
    if !p.theta_exact {
        return Err(Error::InexactTheta);
    }
    let mut rep = CheckReport::new("decay", json!(p));
    rep.trials = 1;
    for s in p.ell..spec.lambda.len() {
        let rhs = decay_bound(p, spec.layers, spec.x, s, spec.eta[s]);
        rep.check_le(trial, &format!("lambda_{s}"), spec.lambda[s], rhs);
    }
    Ok(rep)
}

/// `||Π^{≤ℓ}_g ⋯ Π^{≤ℓ}_1 ψ||²`.
pub fn projected_norm_sq(sys: &QSatSystem, ell: usize, psi: &StateVector) -> Result<f64> {
    let mut v = psi.clone();
    for l in 0..sys.g() {
        v = project_le(sys, l, ell, &v)?;
    }
    Ok(v.norm_squared())
}

/// Checks `x² <= 1 - Δ²(ℓ)` for every trial state.
pub fn verify_aux(
    sys: &QSatSystem,
    bounds: &SystemBounds,
    ell: usize,
    psis: &[StateVector],
) -> Result<CheckReport> {
    let p = bounds.params(ell);
    let name = "aux";
    if !p.theta_exact {
        return Ok(CheckReport::skipped(
            name,
            json!(p),
            "theta is a sampled estimate",
        ));
    }
    if !p.regime_valid() {
        return Ok(CheckReport::skipped(name, json!(p), "regime-invalid"));
    }
    let d2 = delta_sq(&p)?;
    let mut rep = CheckReport::new(name, json!({"bounds": p, "delta_sq": d2}));
    for (t, psi) in psis.iter().enumerate() {
        rep.trials += 1;
        let x2 = projected_norm_sq(sys, ell, psi)?;
        rep.check_le(t, "x^2", x2, 1.0 - d2);
    }
    Ok(rep)
}

/// `||Π^{>ℓ}_i ψ||²` for every layer `i`.
pub fn violation_probabilities(sys: &QSatSystem, ell: usize, psi: &StateVector) -> Result<Vec<f64>> {
    let n2 = psi.norm_squared();
    (0..sys.g())
        .map(|l| Ok(n2 - project_le(sys, l, ell, psi)?.norm_squared()))
        .collect()
}

/// Layer with the largest `||Π^{>ℓ}_i ψ||²`, when it clears `threshold`.
pub fn detect_witness(
    sys: &QSatSystem,
    ell: usize,
    psi: &StateVector,
    threshold: f64,
) -> Result<(Option<usize>, f64)> {
    let probs = violation_probabilities(sys, ell, psi)?;
    let (best, value) =
        probs.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    Ok(((value >= threshold).then_some(best), value))
}

/// Checks that some layer has `||Π^{>ℓ}_i ψ||² >= Δ²(ℓ) / (2g)²`.
pub fn verify_detectability(
    sys: &QSatSystem,
    bounds: &SystemBounds,
    ell: usize,
    psis: &[StateVector],
) -> Result<CheckReport> {
    let p = bounds.params(ell);
    let name = "detectability";
    if !p.theta_exact {
        return Ok(CheckReport::skipped(
            name,
            json!(p),
            "theta is a sampled estimate",
        ));
    }
    if !p.regime_valid() {
        return Ok(CheckReport::skipped(name, json!(p), "regime-invalid"));
    }
    let d2 = delta_sq(&p)?;
    let g = p.g as f64;
    let threshold = d2 / (4.0 * g * g);
    let mut rep = CheckReport::new(name, json!({"bounds": p, "delta_sq": d2, "threshold": threshold}));
    for (t, psi) in psis.iter().enumerate() {
        rep.trials += 1;
        let (_, best) = detect_witness(sys, ell, psi, threshold)?;
        rep.check_ge_with(t, "max_i ||Pi^>l_i psi||^2", best, threshold, 1e-7);
    }
    Ok(rep)
}

/// Sectors whose weight `λ_s²` falls below this are not checked.
pub const SECTOR_WEIGHT_FLOOR: f64 = 1e-14;

/// Checks `<Ω_s|E^top|Ω_s> <= s + ℓ` per sector and, for `ℓ = 0` and
/// `s >= 1`, `η_s² <= (1-x²)/(1-θ²)`. `E^top` sums the pyramid apexes.
pub fn verify_energy_claims(
    sys: &QSatSystem,
    dec: &XYDecomposition,
    p: &BoundParams,
    psi: &StateVector,
    trial: usize,
) -> Result<CheckReport> {
    if !p.theta_exact {
        return Err(Error::InexactTheta);
    }
    let spec = decay_spectrum(sys, dec, p.ell, psi)?;
    let mut rep = CheckReport::new("energy-claims", json!(p));
    rep.trials = 1;
    let comps = coarse_components(dec, sys.dims(), &spec.omega)?;
    for (s, c) in comps.iter().enumerate() {
        let w = c.norm_squared();
        if w < SECTOR_WEIGHT_FLOOR {
            continue;
        }
        let mut e = 0.0;
        for &apex in &dec.apexes() {
            e += c.dotc(&sys.apply_constraint(apex, c)?).re;
        }
        rep.check_le(trial, &format!("E_top(Omega_{s})"), e / w, (s + p.ell) as f64);
    }
    if p.ell == 0 && p.theta < 1.0 {
        let rhs = (1.0 - spec.x * spec.x) / (1.0 - p.theta * p.theta);
        for s in 1..spec.eta.len() {
            rep.check_le(trial, &format!("eta_{s}^2"), spec.eta[s] * spec.eta[s], rhs);
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct KitaevReport {
    pub cos_alpha: Option<f64>,
    pub epsilon0: f64,
    pub delta_sq: f64,
    pub report: CheckReport,
}

/// The chain `Δ²(0) <= 1 - cos α <= ε₀`, with α the principal angle between
/// the kernels of the two layer Hamiltonians.
pub fn kitaev_check(sys: &QSatSystem, bounds: &SystemBounds) -> Result<KitaevReport> {
    let g = sys.g();
    if g != 2 {
        return Err(Error::NotTwoLayers(g));
    }
    let p = bounds.params(0);
    let eps = bounds.epsilon0;
    let d2 = if p.theta_exact { delta_sq(&p)? } else { f64::NAN };
    let cap = linalg::DENSE_CAP;
    let k0 = kernel(&sys.dense_sum(sys.layer(0)?, cap)?, RANK_TOL)?;
    let k1 = kernel(&sys.dense_sum(sys.layer(1)?, cap)?, RANK_TOL)?;
    let params = json!({"bounds": p, "delta_sq": d2});
    if k0.is_empty() || k1.is_empty() {
        return Ok(KitaevReport {
            cos_alpha: None,
            epsilon0: eps,
            delta_sq: d2,
            report: CheckReport::skipped("kitaev", params, "a layer Hamiltonian has a trivial kernel"),
        });
    }
    let cos = principal_cos(&k0, &k1)?;
    let mut rep = CheckReport::new("kitaev", params);
    rep.trials = 1;
    rep.check_le(0, "1 - cos(alpha) <= eps0", 1.0 - cos, eps);
    if p.theta_exact {
        rep.check_le(0, "delta_sq(0) <= 1 - cos(alpha)", d2, 1.0 - cos);
    }
    Ok(KitaevReport {
        cos_alpha: Some(cos),
        epsilon0: eps,
        delta_sq: d2,
        report: rep,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k_eff: f64,
    pub c: f64,
}

/// `K2 = 1/(2 f r 16 g²)`, `K3 = 1/(16 g²)` and
/// `K1 = (c'/f) / (ε_max c'/f + 1) / (2g)²` with `c' = (1-θ²)³/θ²` and
/// `ε_max = f (2r + 4/(1-θ))`; `K_eff` is their minimum. `c = c(λ)`.
pub fn k_branch_constants(p: &BoundParams, lambda: f64) -> Result<KConstants> {
    if !(0.0..1.0).contains(&p.theta) {
        return Err(Error::InvalidRegime(format!(
            "theta = {} is not in [0, 1)",
            p.theta
        )));
    }
    if p.f == 0 || p.g == 0 || p.r == 0 {
        return Err(Error::InvalidRegime("f, g and r must be positive".into()));
    }
    let c = c_of_lambda(lambda)?;
    let f = p.f as f64;
    let g = p.g as f64;
    let r = p.r as f64;
    let k2 = 1.0 / (2.0 * f * r * 16.0 * g * g);
    let k3 = 1.0 / (16.0 * g * g);
    let eps_max = f * (2.0 * r + 4.0 / (1.0 - p.theta));
    let ratio = if p.theta == 0.0 {
        // Limit c' -> infinity.
        1.0 / eps_max
    } else {
        let t2 = p.theta * p.theta;
        let cp = (1.0 - t2).powi(3) / t2 / f;
        cp / (eps_max * cp + 1.0)
    };
    let k1 = ratio / (4.0 * g * g);
    Ok(KConstants {
        k1,
        k2,
        k3,
        k_eff: k1.min(k2).min(k3),
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(epsilon0: f64, theta: f64, f: usize, r: usize, ell: usize) -> BoundParams {
        BoundParams {
            epsilon0,
            theta,
            theta_exact: true,
            k: 2,
            g: 2,
            f,
            r,
            ell,
        }
    }

    #[test]
    fn delta_sq_examples() {
        assert_eq!(delta_sq(&params(0.0, 0.5, 2, 48, 0)).unwrap(), 0.0);
        // (1 - 0.25)^3 / 0.25 = 1.6875
        let expected = 1.0 - 1.0 / (0.5 * 1.6875 + 1.0);
        assert!((delta_sq(&params(1.0, 0.5, 2, 48, 0)).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.45763).abs() < 1e-5);
        // eps0 chosen so that eps0/f - r ell = 4.
        let eps = 2.0 * (48.0 + 4.0);
        assert!((delta_sq(&params(eps, 0.5, 2, 48, 1)).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            delta_sq(&params(2.0 * 49.0, 0.5, 2, 48, 1)),
            Err(Error::InvalidRegime(_))
        ));
        assert_eq!(delta_sq(&params(1.0, 0.0, 2, 4, 0)).unwrap(), 1.0);
    }

    #[test]
    fn find_r_examples() {
        assert_eq!(find_r(0.5, 2, 2).unwrap(), 48);
        let target = 2f64.ln();
        assert!(r_condition_lhs(47, 2, 2) >= target);
        assert!(r_condition_lhs(48, 2, 2) < target);
        assert_eq!(find_r((-10f64).exp(), 2, 1).unwrap(), 4);
        assert!(find_r(0.7, 2, 2).unwrap() >= find_r(0.5, 2, 2).unwrap());
    }

    #[test]
    fn k_constants_example() {
        let k = k_branch_constants(&params(1.0, 0.5, 2, 48, 0), 1.0 / 3.0).unwrap();
        assert_eq!(k.k3, 1.0 / 64.0);
        assert_eq!(k.k2, 1.0 / 12288.0);
        assert!(k.k_eff <= k.k3);
        assert!((k.c - 0.2).abs() < 1e-15);
    }
}
