//! Channel Rényi mutual informations and the bipartite sandwiched Rényi
//! mutual information, via certified minimax solvers.
//!
//! The central quantities are divergence radii: for a classical channel,
//! `I_α(W) = inf_q max_x D_α(W(·|x) ‖ q)` over output distributions `q`, and
//! for a classical–quantum channel `Ĩ_α(W) = inf_σ max_x D̃_α(W_x ‖ σ)` over
//! output states `σ`.  Both equal the corresponding `sup_p inf` form for
//! `α ≥ 1/2`, which is the regime this module accepts.
//!
//! Every solver is *certificate-first*: alongside the value it returns
//!
//! * an **upper certificate** — the objective `max_x D_α(W_x‖·)` evaluated
//!   exactly at the returned feasible minimizer, and
//! * a **lower certificate** — a weak-duality bound obtained either from the
//!   input-mixture side (classically, the closed-form
//!   `inf_q D_α(p∘W ‖ p⊗q) = (α/(α−1)) log Σ_y (Σ_x p_x W(y|x)^α)^{1/α}`)
//!   or, in the quantum case, from an affine under/over-estimator of the
//!   trace functional `Q̃_α(σ) = Tr (ρ^{1/2} σ^{(1−α)/α} ρ^{1/2})^α`, which is
//!   convex in `σ` for `α > 1` and concave for `α ∈ [1/2, 1)`, minimized or
//!   maximized in closed form over the state set via an extreme eigenvalue.
//!
//! The reported value is the bracket midpoint, so its error is at most half
//! the certified gap.  The search path (dual ascent over input mixtures with
//! certified inner optimizations) never enters the correctness argument.

use crate::chan::{ClassicalChannel, CqChannel, DensityMatrix, ProbDist};
use crate::error::{Error, Result};
use crate::info::{log_sum_exp, rel_entropy, rel_entropy_classical, RenyiOrder};
use crate::linalg::{
    dk_adjoint, eigh, from_spectrum, hermitize, hs_inner, kron, partial_trace_b,
    psd_pseudo_power, trace_re, CMat, C64, SUPPORT_EIG_THRESHOLD,
};

/// Default certificate gap requested by callers that do not care.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Iteration cap for all solvers in this module.
pub const MAX_ITERATIONS: usize = 100_000;

/// Default Hilbert-space dimension cap for the quantum channel solver.
pub const DEFAULT_DIM_CAP: usize = 6;

/// Smallest order accepted by the inf–sup radius form.
pub const MIN_ORDER: f64 = 0.5;

/// The optimizing reference argument of a radius problem.
#[derive(Debug, Clone)]
pub enum Minimizer {
    /// Output distribution `q` of a classical radius.
    Output(ProbDist),
    /// Output state `σ` of a quantum radius.
    State(DensityMatrix),
}

impl Minimizer {
    /// The classical output distribution, when this is one.
    pub fn output(&self) -> Option<&ProbDist> {
        match self {
            Minimizer::Output(q) => Some(q),
            Minimizer::State(_) => None,
        }
    }

    /// The output state, when this is one.
    pub fn state(&self) -> Option<&DensityMatrix> {
        match self {
            Minimizer::Output(_) => None,
            Minimizer::State(s) => Some(s),
        }
    }
}

/// A certified radius computation.
///
/// Invariant: `lower_cert ≤ value ≤ upper_cert` and
/// `upper_cert − lower_cert ≤` the requested tolerance.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    /// Bracket midpoint, in nats.
    pub value: f64,
    /// Weak-duality lower bound (exact evaluation at a dual-feasible point).
    pub lower_cert: f64,
    /// Objective at the returned feasible minimizer.
    pub upper_cert: f64,
    /// Iterations the search spent before the bracket closed.
    pub iterations: usize,
    /// The feasible minimizer achieving `upper_cert`.
    pub minimizer: Minimizer,
    /// Input-side mixture certifying `lower_cert`, when one exists.
    pub dual: Option<ProbDist>,
}

fn check_order_and_tol(order: RenyiOrder, tol: f64) -> Result<f64> {
    let alpha = order.get();
    if alpha < MIN_ORDER - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "the inf–sup radius form needs order ≥ 1/2, got {alpha}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(alpha)
}

fn nonconvergence(lower: f64, upper: f64, tol: f64) -> Error {
    Error::NonConvergence(format!(
        "iteration cap hit with certified bracket [{lower:.12}, {upper:.12}] \
         (gap {:.3e} > tol {tol:.3e})",
        upper - lower
    ))
}

// ---------------------------------------------------------------------------
// Classical solver
// ---------------------------------------------------------------------------

/// Sibson mixture value: `inf_q D_α(p∘W ‖ p⊗q)` in closed form, plus the
/// minimizing `q ∝ (Σ_x p_x W(y|x)^α)^{1/α}`.  Valid lower bound on the
/// radius for every `p` by weak duality.
fn sibson_value_and_q(walpha: &[Vec<f64>], p: &[f64], alpha: f64) -> (f64, Vec<f64>) {
    let ny = walpha[0].len();
    let mut a = vec![0.0; ny];
    for (x, row) in walpha.iter().enumerate() {
        if p[x] <= 0.0 {
            continue;
        }
        for y in 0..ny {
            a[y] += p[x] * row[y];
        }
    }
    let mut q: Vec<f64> = a
        .iter()
        .map(|&ay| if ay > 0.0 { ay.powf(1.0 / alpha) } else { 0.0 })
        .collect();
    let h: f64 = q.iter().sum();
    for qy in &mut q {
        *qy /= h;
    }
    let value = alpha / (alpha - 1.0) * h.ln();
    (value, q)
}

/// `D_α(W(·|x) ‖ q)` for every input `x`, evaluated in the log domain.
fn divergences_at_q(
    walpha: &[Vec<f64>],
    lnw_scaled: &[Vec<Option<f64>>],
    q: &[f64],
    alpha: f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(walpha.len());
    for x in 0..walpha.len() {
        let mut terms = Vec::with_capacity(q.len());
        let mut infinite = false;
        for (y, &qy) in q.iter().enumerate() {
            if let Some(lw) = lnw_scaled[x][y] {
                if qy > 0.0 {
                    terms.push(lw + (1.0 - alpha) * qy.ln());
                } else {
                    // A zero output weight under a positive channel entry is
                    // only reachable when the whole column is zero; the
                    // Sibson minimizer never produces it otherwise.
                    infinite = true;
                    break;
                }
            }
        }
        out.push(if infinite {
            f64::INFINITY
        } else {
            log_sum_exp(&terms) / (alpha - 1.0)
        });
    }
    out
}

/// `max_x D_α(W(·|x) ‖ q)` evaluated in the log domain.
fn radius_at_q(walpha: &[Vec<f64>], lnw_scaled: &[Vec<Option<f64>>], q: &[f64], alpha: f64) -> f64 {
    divergences_at_q(walpha, lnw_scaled, q, alpha)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Certified classical channel Rényi mutual information
/// `I_α(W) = inf_q max_x D_α(W(·|x)‖q)` for `α ≥ 1/2`.
///
/// The search ascends the concave (for `α > 1`) or descends the convex (for
/// `α < 1`) Sibson surrogate `Σ_y (Σ_x p_x W(y|x)^α)^{1/α}` over input
/// distributions with multiplicative-weight steps; certificates are exact
/// closed-form evaluations independent of the path.
pub fn renyi_mi_classical(
    w: &ClassicalChannel,
    order: RenyiOrder,
    tol: f64,
) -> Result<CapacityResult> {
    let alpha = check_order_and_tol(order, tol)?;
    if order.is_unit() {
        return classical_mi_order_one(w, tol);
    }
    let nx = w.num_inputs();
    let ny = w.num_outputs();
    let walpha: Vec<Vec<f64>> = (0..nx)
        .map(|x| (0..ny).map(|y| w.w(x, y).powf(alpha)).collect())
        .collect();
    let lnw_scaled: Vec<Vec<Option<f64>>> = (0..nx)
        .map(|x| {
            (0..ny)
                .map(|y| {
                    let v = w.w(x, y);
                    if v > 0.0 {
                        Some(alpha * v.ln())
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();

    let mut p = vec![1.0 / nx as f64; nx];
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_upper = f64::INFINITY;
    let mut best_p = p.clone();
    let mut best_q = vec![1.0 / ny as f64; ny];
    let mut eta = 1.0;
    // Maximize h for α>1 (concave), minimize for α<1 (convex); both are the
    // Sibson surrogate whose log gives the lower certificate.
    let ascend = alpha > 1.0;

    for t in 0..MAX_ITERATIONS {
        let (lower, q) = sibson_value_and_q(&walpha, &p, alpha);
        if lower > best_lower {
            best_lower = lower;
            best_p = p.clone();
        }
        let upper = radius_at_q(&walpha, &lnw_scaled, &q, alpha);
        if upper < best_upper {
            best_upper = upper;
            best_q = q.clone();
        }
        if best_upper - best_lower <= tol {
            return Ok(finish_classical(
                best_lower, best_upper, t + 1, best_q, best_p,
            ));
        }

        // Gradient of h(p) = Σ_y a_y^{1/α} with a_y = Σ_x p_x W(y|x)^α.
        let mut a = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                a[y] += p[x] * walpha[x][y];
            }
        }
        let h_cur: f64 = a.iter().map(|&ay| ay.powf(1.0 / alpha)).sum();
        let mut grad = vec![0.0; nx];
        for x in 0..nx {
            let mut g = 0.0;
            for y in 0..ny {
                if a[y] > 0.0 {
                    g += a[y].powf(1.0 / alpha - 1.0) * walpha[x][y];
                }
            }
            grad[x] = g / alpha;
        }
        let gmax = grad.iter().cloned().fold(0.0, f64::max).max(1e-300);

        // Endgame: multiplicative-weights tails are linear and lock when the
        // optimizer sits near the simplex boundary; Newton steps on the
        // support equalization close the bracket quadratically.  Candidates
        // carry their own certificates, so the attempt is always safe.
        if best_upper - best_lower < 1e-4 && t % 8 == 0 {
            let (cl, cp, cu, cq) = newton_polish_order(&walpha, &lnw_scaled, alpha, &p);
            if cl > best_lower {
                best_lower = cl;
                best_p = cp.clone();
            }
            if cu < best_upper {
                best_upper = cu;
                best_q = cq;
            }
            if best_upper - best_lower <= tol {
                return Ok(finish_classical(
                    best_lower, best_upper, t + 1, best_q, best_p,
                ));
            }
            if cl > lower {
                p = cp;
                continue;
            }
        }

        // Multiplicative-weights step with backtracking on the surrogate.
        let mut accepted = false;
        for _ in 0..30 {
            let sign = if ascend { 1.0 } else { -1.0 };
            let logits: Vec<f64> = p
                .iter()
                .zip(&grad)
                .map(|(&px, &gx)| px.max(1e-300).ln() + sign * eta * gx / gmax)
                .collect();
            let z = log_sum_exp(&logits);
            let cand: Vec<f64> = logits.iter().map(|&l| (l - z).exp()).collect();
            let mut a2 = vec![0.0; ny];
            for x in 0..nx {
                for y in 0..ny {
                    a2[y] += cand[x] * walpha[x][y];
                }
            }
            let h2: f64 = a2.iter().map(|&ay| ay.powf(1.0 / alpha)).sum();
            let improved = if ascend { h2 > h_cur } else { h2 < h_cur };
            if improved {
                p = cand;
                eta = (eta * 1.25).min(1e4);
                accepted = true;
                break;
            }
            eta *= 0.5;
            if eta < 1e-14 {
                break;
            }
        }
        if !accepted && eta < 1e-14 {
            // Stationary point of the surrogate: step sizes below f64
            // resolution.  Polish with Newton equalization, then let the
            // certificates tell the truth about whether the bracket closed.
            let (lower, q) = sibson_value_and_q(&walpha, &p, alpha);
            let upper = radius_at_q(&walpha, &lnw_scaled, &q, alpha);
            if lower > best_lower {
                best_lower = lower;
                best_p = p.clone();
            }
            if upper < best_upper {
                best_upper = upper;
                best_q = q;
            }
            let (cl, cp, cu, cq) = newton_polish_order(&walpha, &lnw_scaled, alpha, &p);
            if cl > best_lower {
                best_lower = cl;
                best_p = cp;
            }
            if cu < best_upper {
                best_upper = cu;
                best_q = cq;
            }
            if best_upper - best_lower <= tol {
                return Ok(finish_classical(
                    best_lower, best_upper, t + 1, best_q, best_p,
                ));
            }
            return Err(nonconvergence(best_lower, best_upper, tol));
        }
    }
    Err(nonconvergence(best_lower, best_upper, tol))
}

/// Blahut–Arimoto at order 1: alternating exact updates with the standard
/// capacity bracket `I(p_t, W) ≤ C ≤ max_x D(W_x ‖ p_t W)`.
fn classical_mi_order_one(w: &ClassicalChannel, tol: f64) -> Result<CapacityResult> {
    let nx = w.num_inputs();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_upper = f64::INFINITY;
    let mut best_p = p.clone();
    let mut best_q: Vec<f64> = Vec::new();
    // Overrelaxation factor for the fixed-point step; plain steps (γ = 1)
    // increase the weighted divergence monotonically, larger γ accelerates
    // the linear tail and is kept only while the increase persists.
    let mut gamma = 1.0f64;
    let mut prev_lower = f64::NEG_INFINITY;
    for t in 0..MAX_ITERATIONS {
        let pd = ProbDist::new(p.clone())?;
        let q = w.output_distribution(&pd)?;
        let mut dvals = vec![0.0; nx];
        let mut upper = f64::NEG_INFINITY;
        let mut lower = 0.0;
        for x in 0..nx {
            let d = rel_entropy_classical(w.row(x), q.as_slice())?.to_f64();
            dvals[x] = d;
            upper = upper.max(d);
            lower += p[x] * d;
        }
        if lower > best_lower {
            best_lower = lower;
            best_p = p.clone();
        }
        if upper < best_upper {
            best_upper = upper;
            best_q = q.as_slice().to_vec();
        }
        if best_upper - best_lower <= tol {
            return Ok(finish_classical(
                best_lower, best_upper, t + 1, best_q, best_p,
            ));
        }
        if lower < prev_lower {
            // Overshoot from the accelerated step: cool down and restart
            // from the best input found so far.
            gamma = (0.5 * gamma).max(1.0);
            p = best_p.clone();
            prev_lower = f64::NEG_INFINITY;
            continue;
        }
        prev_lower = lower;
        gamma = (gamma * 1.25).min(64.0);
        // Endgame: the fixed-point tail is linear and can lock above a tight
        // tolerance, while one Newton step on the support equalization
        // (divergences equal across supported inputs) converges
        // quadratically.  Candidates are only adopted when they improve the
        // certified lower bound, so the attempt is always safe.
        if best_upper - best_lower < 1e-4 && t % 8 == 0 {
            let (cl, cp, cu, cq) = newton_polish_order_one(w, &p)?;
            if cl > best_lower {
                best_lower = cl;
                best_p = cp;
            }
            if cu < best_upper {
                best_upper = cu;
                best_q = cq;
            }
            if best_upper - best_lower <= tol {
                return Ok(finish_classical(
                    best_lower, best_upper, t + 2, best_q, best_p,
                ));
            }
            if cl > lower {
                p = best_p.clone();
                prev_lower = f64::NEG_INFINITY;
                continue;
            }
        }
        // Overrelaxed fixed-point step: p ∝ p·exp(γ·D(W_x‖pW)).
        let logits: Vec<f64> = p
            .iter()
            .zip(&dvals)
            .map(|(&px, &dx)| px.max(1e-300).ln() + gamma * dx)
            .collect();
        let z = log_sum_exp(&logits);
        p = logits.iter().map(|&l| (l - z).exp()).collect();
    }
    Err(nonconvergence(best_lower, best_upper, tol))
}

/// One Newton step of the support-equalization system for the weighted
/// divergence maximization: on the support `S = {x : p_x > τ}`, the optimum
/// has `D(W_x‖pW)` equal across `S`, and the Jacobian
/// `∂D_x/∂p_z = −Σ_y W_{xy}W_{zy}/q_y` is available in closed form, so one
/// constrained Newton step (`Σδ = 0`) moves the input quadratically close.
/// Returns `None` when the step is not well posed.
/// Candidate inputs from Newton equalization over a chain of shrinking
/// supports.  The full support of `p` is tried first; when a coordinate's
/// divergence sits strictly below the radius the equalization system over the
/// full support is inconsistent, so the chain also tries supports with the
/// lowest-divergence coordinate dropped (set exactly to zero).  The caller
/// keeps whichever candidate its certificates prefer.
fn equalization_candidates(
    p: &[f64],
    solve: impl Fn(&[usize]) -> Option<(Vec<f64>, Vec<f64>)>,
) -> Vec<Vec<f64>> {
    let mut support: Vec<usize> = (0..p.len()).filter(|&x| p[x] > 1e-14).collect();
    let mut out = Vec::new();
    while support.len() >= 2 {
        let dropped = if let Some((cand, dvals)) = solve(&support) {
            out.push(cand);
            dvals
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
        } else {
            // No well-posed step: retry without the least-mass coordinate.
            support
                .iter()
                .enumerate()
                .min_by(|a, b| p[*a.1].total_cmp(&p[*b.1]))
                .map(|(i, _)| i)
        };
        match dropped {
            Some(i) => {
                support.remove(i);
            }
            None => break,
        }
    }
    out
}

/// Iterates Newton equalization with active-set refinement from `start`
/// until the certified bracket stops improving, and returns the best
/// certified pair found: `(lower, input, upper, output distribution)`.
///
/// `step(probe, support)` produces one constrained Newton candidate on the
/// given support together with the support divergences; `certify(cand)`
/// returns `(lower, upper, output distribution, all divergences)`, where the
/// bounds hold unconditionally.  Each round evaluates the whole shrinking-
/// support candidate chain, keeps whatever the certificates prefer, advances
/// the probe to the smallest-gap candidate, and reinstates (with small mass)
/// any zeroed coordinate whose divergence exceeds the supported level — such
/// a coordinate provably belongs to the optimal support.
fn equalization_polish(
    start: &[f64],
    step: impl Fn(&[f64], &[usize]) -> Option<(Vec<f64>, Vec<f64>)>,
    mut certify: impl FnMut(&[f64]) -> Result<(f64, f64, Vec<f64>, Vec<f64>)>,
) -> Result<(f64, Vec<f64>, f64, Vec<f64>)> {
    let mut probe = start.to_vec();
    let (mut bl, mut bu, mut bq, _) = certify(&probe)?;
    let mut bp = probe.clone();
    for _ in 0..16 {
        let cands = equalization_candidates(&probe, |s| step(&probe, s));
        if cands.is_empty() {
            break;
        }
        let mut progress = false;
        let mut next: Option<(f64, Vec<f64>, Vec<f64>)> = None;
        for cand in cands {
            let (cl, cu, cq, dall) = certify(&cand)?;
            if cl > bl {
                bl = cl;
                bp = cand.clone();
                progress = true;
            }
            if cu < bu {
                bu = cu;
                bq = cq;
                progress = true;
            }
            let gap = cu - cl;
            if next.as_ref().is_none_or(|(g, _, _)| gap < *g) {
                next = Some((gap, cand, dall));
            }
        }
        let Some((_, mut cand, dall)) = next else {
            break;
        };
        let supported_level = cand
            .iter()
            .zip(&dall)
            .filter(|(c, _)| **c > 1e-14)
            .map(|(_, d)| *d)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut reinstated = false;
        for (c, &d) in cand.iter_mut().zip(&dall) {
            if *c <= 1e-14 && d > supported_level + 1e-12 * (1.0 + supported_level.abs()) {
                *c = 1e-6;
                reinstated = true;
            }
        }
        if reinstated {
            let tot: f64 = cand.iter().sum();
            for c in &mut cand {
                *c /= tot;
            }
        }
        if !progress && !reinstated {
            break;
        }
        probe = cand;
    }
    Ok((bl, bp, bu, bq))
}

/// [`equalization_polish`] specialised to order `α ≠ 1` via the Sibson
/// surrogate certificates.
fn newton_polish_order(
    walpha: &[Vec<f64>],
    lnw_scaled: &[Vec<Option<f64>>],
    alpha: f64,
    start: &[f64],
) -> (f64, Vec<f64>, f64, Vec<f64>) {
    let result = equalization_polish(
        start,
        |probe, s| newton_equalized_input_order(walpha, alpha, probe, s),
        |cand| {
            let (cl, cq) = sibson_value_and_q(walpha, cand, alpha);
            let dall = divergences_at_q(walpha, lnw_scaled, &cq, alpha);
            let cu = dall.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok((cl, cu, cq, dall))
        },
    );
    // The certify closure above is infallible.
    result.expect("infallible certificates")
}

/// [`equalization_polish`] specialised to order 1 via exact relative-entropy
/// certificates.
fn newton_polish_order_one(
    w: &ClassicalChannel,
    start: &[f64],
) -> Result<(f64, Vec<f64>, f64, Vec<f64>)> {
    let nx = w.num_inputs();
    equalization_polish(
        start,
        |probe, s| newton_equalized_input(w, probe, s),
        |cand| {
            let cd = ProbDist::new(cand.to_vec())?;
            let cq = w.output_distribution(&cd)?;
            let mut dall = Vec::with_capacity(nx);
            let mut cl = 0.0;
            let mut cu = f64::NEG_INFINITY;
            for x in 0..nx {
                let d = rel_entropy_classical(w.row(x), cq.as_slice())?.to_f64();
                dall.push(d);
                cu = cu.max(d);
                cl += cand[x] * d;
            }
            Ok((cl, cu, cq.as_slice().to_vec(), dall))
        },
    )
}

/// Order-α analog of [`newton_equalized_input`] driven by the precomputed
/// entry powers `walpha[x][y] = W(y|x)^α`, over an explicit `support`.  With
/// `a_y = Σ_x p_x W_{xy}^α`, `Z = Σ_y a_y^{1/α}` and
/// `S_x = Σ_y W_{xy}^α a_y^{(1−α)/α}`, the divergence to the order-α optimal
/// output distribution is `D_x = ln Z + ln S_x/(α−1)` and its Jacobian
/// `∂D_x/∂p_z = S_z/(αZ) − T_{xz}/(αS_x)` with
/// `T_{xz} = Σ_y (W_{xy}W_{zy})^α a_y^{(1−2α)/α}`, all in closed form.
/// Returns the renormalized candidate (coordinates outside `support` set to
/// zero) and the divergence values on `support`, or `None` when the step is
/// not well posed (tiny support, underflow, or a singular system).
fn newton_equalized_input_order(
    walpha: &[Vec<f64>],
    alpha: f64,
    p: &[f64],
    support: &[usize],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let nx = walpha.len();
    let ny = walpha[0].len();
    let k = support.len();
    if k < 2 {
        return None;
    }
    let mass: f64 = support.iter().map(|&x| p[x]).sum();
    if !(mass > 0.0) {
        return None;
    }
    let mut a = vec![0.0f64; ny];
    for &x in support {
        for y in 0..ny {
            a[y] += p[x] / mass * walpha[x][y];
        }
    }
    let z: f64 = a
        .iter()
        .map(|&ay| if ay > 0.0 { ay.powf(1.0 / alpha) } else { 0.0 })
        .sum();
    if !(z > 0.0) || !z.is_finite() {
        return None;
    }
    let e1 = (1.0 - alpha) / alpha;
    let e2 = (1.0 - 2.0 * alpha) / alpha;
    let mut s = vec![0.0f64; k];
    let mut dvals = vec![0.0f64; k];
    for (i, &x) in support.iter().enumerate() {
        let mut sx = 0.0;
        for y in 0..ny {
            if a[y] > 0.0 && walpha[x][y] > 0.0 {
                sx += walpha[x][y] * a[y].powf(e1);
            }
        }
        if !(sx > 0.0) || !sx.is_finite() {
            return None;
        }
        s[i] = sx;
        dvals[i] = z.ln() + sx.ln() / (alpha - 1.0);
    }
    let mean_d = dvals.iter().sum::<f64>() / k as f64;
    let mut m = nalgebra::DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut rhs = nalgebra::DVector::<f64>::zeros(k + 1);
    for (i, &x) in support.iter().enumerate() {
        for (j, &xz) in support.iter().enumerate() {
            let mut t_xz = 0.0;
            for y in 0..ny {
                if a[y] > 0.0 {
                    let ww = walpha[x][y] * walpha[xz][y];
                    if ww > 0.0 {
                        t_xz += ww * a[y].powf(e2);
                    }
                }
            }
            let jac = s[j] / (alpha * z) - t_xz / (alpha * s[i]);
            if !jac.is_finite() {
                return None;
            }
            m[(i, j)] = jac;
        }
        m[(i, k)] = 1.0;
        m[(k, i)] = 1.0;
        rhs[i] = -(dvals[i] - mean_d);
    }
    let delta = m.lu().solve(&rhs)?;
    let mut cand = vec![0.0; nx];
    for (i, &x) in support.iter().enumerate() {
        cand[x] = (p[x] / mass + delta[i]).max(0.0);
    }
    let tot: f64 = cand.iter().sum();
    if !(tot > 0.0) || !tot.is_finite() {
        return None;
    }
    for c in &mut cand {
        *c /= tot;
    }
    Some((cand, dvals))
}

fn newton_equalized_input(
    w: &ClassicalChannel,
    p: &[f64],
    support: &[usize],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let nx = w.num_inputs();
    let ny = w.num_outputs();
    let k = support.len();
    if k < 2 {
        return None;
    }
    let mass: f64 = support.iter().map(|&x| p[x]).sum();
    if !(mass > 0.0) {
        return None;
    }
    let mut q = vec![0.0f64; ny];
    for &x in support {
        for y in 0..ny {
            q[y] += p[x] / mass * w.w(x, y);
        }
    }
    let mut dvals = vec![0.0f64; k];
    for (i, &x) in support.iter().enumerate() {
        let mut d = 0.0;
        for y in 0..ny {
            let wxy = w.w(x, y);
            if wxy > 0.0 {
                if q[y] <= 0.0 {
                    return None;
                }
                d += wxy * (wxy / q[y]).ln();
            }
        }
        dvals[i] = d;
    }
    let mean_d = dvals.iter().sum::<f64>() / k as f64;
    // Augmented KKT system: equalize residuals subject to Σδ = 0.
    let mut a = nalgebra::DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut rhs = nalgebra::DVector::<f64>::zeros(k + 1);
    for (i, &x) in support.iter().enumerate() {
        for (j, &z) in support.iter().enumerate() {
            let mut jac = 0.0;
            for y in 0..ny {
                if q[y] > 0.0 {
                    jac -= w.w(x, y) * w.w(z, y) / q[y];
                }
            }
            a[(i, j)] = jac;
        }
        a[(i, k)] = 1.0;
        a[(k, i)] = 1.0;
        rhs[i] = -(dvals[i] - mean_d);
    }
    let delta = a.lu().solve(&rhs)?;
    let mut cand = vec![0.0; nx];
    for (i, &x) in support.iter().enumerate() {
        cand[x] = (p[x] / mass + delta[i]).max(0.0);
    }
    let z: f64 = cand.iter().sum();
    if !(z > 0.0) || !z.is_finite() {
        return None;
    }
    for c in &mut cand {
        *c /= z;
    }
    Some((cand, dvals))
}

fn finish_classical(
    lower: f64,
    upper: f64,
    iterations: usize,
    q: Vec<f64>,
    p: Vec<f64>,
) -> CapacityResult {
    let q = ProbDist::new(q).expect("solver output distribution is valid");
    let p = ProbDist::new(p).expect("solver input distribution is valid");
    CapacityResult {
        value: 0.5 * (lower + upper),
        lower_cert: lower,
        upper_cert: upper,
        iterations,
        minimizer: Minimizer::Output(q),
        dual: Some(p),
    }
}

/// Classical max-information radius `inf_q max_x D_max(W(·|x)‖q)` in closed
/// form: `log Σ_y max_x W(y|x)`, with minimizer `q ∝ max_x W(·|x)`.
pub fn max_mi_classical(w: &ClassicalChannel) -> (f64, ProbDist) {
    let ny = w.num_outputs();
    let mut m = vec![0.0f64; ny];
    for x in 0..w.num_inputs() {
        for y in 0..ny {
            m[y] = m[y].max(w.w(x, y));
        }
    }
    let z: f64 = m.iter().sum();
    let q: Vec<f64> = m.iter().map(|&v| v / z).collect();
    (z.ln(), ProbDist::new(q).expect("valid by construction"))
}

// ---------------------------------------------------------------------------
// Quantum solver core
// ---------------------------------------------------------------------------

/// Which space the affine certificate lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
enum CertSpace {
    /// `φ_x = Q̃_x` convex, radius = `(α−1)^{-1} log(min_σ max_x φ)`, `α > 1`.
    TraceConvex { alpha: f64 },
    /// `φ_x = Q̃_x` concave, radius = `(α−1)^{-1} log(max_σ min_x φ)`, `α < 1`.
    TraceConcave { alpha: f64 },
    /// `φ_x = D_x` convex, radius = `min_σ max_x φ` directly (order 1).
    DivergenceConvex,
}

/// One constraint's evaluation at the current σ.
#[derive(Clone)]
struct ConstraintEval {
    /// Divergence value (reporting scale).
    d: f64,
    /// Certificate-space value φ_x(σ).
    phi: f64,
    /// Certificate-space gradient ∇φ_x(σ).
    grad: CMat,
}

/// Affine certificate from convexity/concavity: for any mixture λ,
/// an exact extreme-eigenvalue optimization of the linearization over the
/// state set bounds the radius from below.  Returns the bound in divergence
/// units (−∞ when the trace-space bound degenerates to a nonpositive value).
fn affine_certificate(
    lambda: &[f64],
    evals: &[ConstraintEval],
    sigma: &CMat,
    space: CertSpace,
) -> f64 {
    let d = sigma.nrows();
    let mut c = 0.0;
    let mut gbar = CMat::zeros(d, d);
    for (lx, ev) in lambda.iter().zip(evals) {
        if *lx <= 0.0 {
            continue;
        }
        c += lx * (ev.phi - hs_inner(&ev.grad, sigma));
        gbar += &ev.grad * C64::new(*lx, 0.0);
    }
    let (gvals, _) = eigh(&hermitize(&gbar));
    match space {
        CertSpace::TraceConvex { alpha } => {
            let bound = c + gvals.first().copied().unwrap_or(0.0);
            if bound > 0.0 {
                bound.ln() / (alpha - 1.0)
            } else {
                f64::NEG_INFINITY
            }
        }
        CertSpace::TraceConcave { alpha } => {
            let bound = c + gvals.last().copied().unwrap_or(0.0);
            if bound > 0.0 {
                bound.ln() / (alpha - 1.0)
            } else {
                f64::NEG_INFINITY
            }
        }
        CertSpace::DivergenceConvex => c + gvals.first().copied().unwrap_or(0.0),
    }
}

/// Improve the certificate mixture λ on the affine-bound objective
/// `ψ(λ) = Σλ_x c_x + extreme-eig(Σλ_x G_x)` (concave for min-side spaces,
/// convex for max-side), by pairwise Frank–Wolfe with golden-section line
/// search.  Pairwise steps move mass between two coordinates, so mixtures
/// with small-but-nonzero optimal weights are reachable (a multiplicative
/// update would drive those weights to zero exponentially).  Every candidate
/// costs only one small eigendecomposition; no constraint evaluations.
fn polish_lambda(
    lambda0: &[f64],
    evals: &[ConstraintEval],
    sigma: &CMat,
    space: CertSpace,
    rounds: usize,
) -> (Vec<f64>, f64) {
    let nx = evals.len();
    let d = sigma.nrows();
    let maximize_psi = !matches!(space, CertSpace::TraceConcave { .. });
    let cs: Vec<f64> = evals
        .iter()
        .map(|ev| ev.phi - hs_inner(&ev.grad, sigma))
        .collect();
    let psi_and_vec = |lam: &[f64]| -> (f64, nalgebra::DVector<C64>) {
        let mut c = 0.0;
        let mut gbar = CMat::zeros(d, d);
        for x in 0..nx {
            if lam[x] <= 0.0 {
                continue;
            }
            c += lam[x] * cs[x];
            gbar += &evals[x].grad * C64::new(lam[x], 0.0);
        }
        let (gvals, gvecs) = eigh(&hermitize(&gbar));
        let idx = if maximize_psi { 0 } else { gvals.len() - 1 };
        (c + gvals[idx], gvecs.column(idx).into_owned())
    };
    let psi_of = |lam: &[f64]| psi_and_vec(lam).0;
    // Signed so that "larger is better" in both cases.
    let score = |p: f64| if maximize_psi { p } else { -p };

    let mut lam = lambda0.to_vec();
    let mut psi = psi_of(&lam);
    for _ in 0..rounds {
        let (_, v) = psi_and_vec(&lam);
        // Supergradient/subgradient of the extreme eigenvalue term.
        let g: Vec<f64> = (0..nx)
            .map(|x| {
                let gv = &evals[x].grad * &v;
                let quad: C64 = v.dotc(&gv);
                cs[x] + quad.re
            })
            .collect();
        // Toward atom: best vertex for the linear model.  Away atom: worst
        // supported vertex.
        let (s, gs) = g
            .iter()
            .enumerate()
            .map(|(i, &t)| (i, if maximize_psi { t } else { -t }))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty mixture");
        let (a, ga) = g
            .iter()
            .enumerate()
            .filter(|&(i, _)| lam[i] > 0.0)
            .map(|(i, &t)| (i, if maximize_psi { t } else { -t }))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("mixture has support");
        if s == a || gs - ga <= 1e-13 * (1.0 + gs.abs()) || lam[a] <= 0.0 {
            break;
        }
        // Golden-section line search on t ∈ [0, λ_a] for λ + t(e_s − e_a);
        // ψ is convex/concave along the segment, hence unimodal.
        let tmax = lam[a];
        let eval_t = |t: f64| -> f64 {
            let mut c = lam.clone();
            c[s] += t;
            c[a] = (c[a] - t).max(0.0);
            score(psi_of(&c))
        };
        let inv_phi = 0.618_033_988_749_894_8;
        let (mut lo, mut hi) = (0.0f64, tmax);
        let mut t1 = hi - inv_phi * (hi - lo);
        let mut t2 = lo + inv_phi * (hi - lo);
        let (mut f1, mut f2) = (eval_t(t1), eval_t(t2));
        for _ in 0..40 {
            if f1 < f2 {
                lo = t1;
                t1 = t2;
                f1 = f2;
                t2 = lo + inv_phi * (hi - lo);
                f2 = eval_t(t2);
            } else {
                hi = t2;
                t2 = t1;
                f2 = f1;
                t1 = hi - inv_phi * (hi - lo);
                f1 = eval_t(t1);
            }
        }
        let tstar = if eval_t(tmax) >= f1.max(f2) {
            tmax
        } else if f1 >= f2 {
            t1
        } else {
            t2
        };
        let cand_score = eval_t(tstar);
        if cand_score <= score(psi) || tstar <= 0.0 {
            break;
        }
        lam[s] += tstar;
        lam[a] = (lam[a] - tstar).max(0.0);
        psi = if maximize_psi { cand_score } else { -cand_score };
    }
    let bound = affine_certificate(&lam, evals, sigma, space);
    (lam, bound)
}

/// λ-weighted trace objective.
fn weighted_phi(lam: &[f64], evals: &[ConstraintEval]) -> f64 {
    lam.iter().zip(evals).map(|(l, e)| l * e.phi).sum()
}

/// Trace-space optimality defect of the weighted inner problem and the
/// weighted gradient: the gap between `⟨Σλ∇φ, σ⟩` and the extreme eigenvalue
/// of `Σλ∇φ`, zero exactly when σ is supported on the extreme eigenspace,
/// i.e. at an inner optimum.
fn weighted_defect(
    lam: &[f64],
    evals: &[ConstraintEval],
    sigma: &CMat,
    maximize_inner: bool,
) -> (f64, CMat) {
    let dim = sigma.nrows();
    let mut gbar = CMat::zeros(dim, dim);
    for (l, e) in lam.iter().zip(evals) {
        gbar += &e.grad * C64::new(*l, 0.0);
    }
    let gbar = hermitize(&gbar);
    let (gvals, _) = eigh(&gbar);
    let pairing = hs_inner(&gbar, sigma);
    let defect = if maximize_inner {
        gvals.last().copied().unwrap_or(0.0) - pairing
    } else {
        pairing - gvals.first().copied().unwrap_or(0.0)
    };
    (defect.max(0.0), gbar)
}

/// Optimize the λ-weighted objective over density matrices by entropic
/// mirror steps with a backtracking line search (the weighted sum is smooth,
/// so monotone descent/ascent converges), until the optimality defect drops
/// below `target_div` in divergence units or a budget runs out.  Counts every
/// constraint evaluation in `calls` against `call_cap`.
#[allow(clippy::too_many_arguments)]
fn optimize_weighted(
    space: CertSpace,
    evaluate: &dyn Fn(&CMat) -> Result<Vec<ConstraintEval>>,
    lam: &[f64],
    sigma: &mut CMat,
    evals: &mut Vec<ConstraintEval>,
    eta: &mut f64,
    calls: &mut usize,
    call_cap: usize,
    target_div: f64,
) -> Result<()> {
    let dim = sigma.nrows();
    let maximize_inner = matches!(space, CertSpace::TraceConcave { .. });
    let tr_factor = match space {
        CertSpace::TraceConvex { alpha } | CertSpace::TraceConcave { alpha } => {
            (alpha - 1.0).abs()
        }
        CertSpace::DivergenceConvex => 0.0,
    };
    loop {
        let g_cur = weighted_phi(lam, evals);
        let unit = if tr_factor > 0.0 {
            tr_factor * g_cur.abs().max(1e-300)
        } else {
            1.0
        };
        let (defect, gbar) = weighted_defect(lam, evals, sigma, maximize_inner);
        if defect <= target_div * unit || *calls >= call_cap {
            return Ok(());
        }
        // Far from the optimum, accept on the objective.  In the endgame the
        // objective's differences become quadratic and sink below f64 noise
        // while the certificate g ∓ defect still improves at first order, so
        // accept on the certificate there.
        let endgame = defect <= 100.0 * target_div * unit;
        let sgn = if maximize_inner { 1.0 } else { -1.0 };
        let cert_cur = g_cur + sgn * defect;
        let mut dir = gbar;
        let mean_eig = trace_re(&dir) / dim as f64;
        for i in 0..dim {
            dir[(i, i)] -= C64::new(mean_eig, 0.0);
        }
        let (dvals, _) = eigh(&dir);
        let dscale = dvals.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        let (svals, svecs) = eigh(&hermitize(sigma));
        let log_sigma = from_spectrum(
            &svals.iter().map(|&v| v.max(1e-280).ln()).collect::<Vec<_>>(),
            &svecs,
        );
        let mut accepted = false;
        while *eta >= 1e-14 && *calls < call_cap {
            let h = hermitize(&(&log_sigma + &dir * C64::new(sgn * *eta / dscale, 0.0)));
            let (hvals, hvecs) = eigh(&h);
            let hmax = hvals.last().copied().unwrap_or(0.0);
            let expd: Vec<f64> = hvals.iter().map(|&v| (v - hmax).exp()).collect();
            let z: f64 = expd.iter().sum();
            let cand = from_spectrum(&expd.iter().map(|&e| e / z).collect::<Vec<_>>(), &hvecs);
            let cand_evals = evaluate(&cand)?;
            *calls += 1;
            let g_cand = weighted_phi(lam, &cand_evals);
            let improved = if endgame {
                let (defect_cand, _) = weighted_defect(lam, &cand_evals, &cand, maximize_inner);
                let cert_cand = g_cand + sgn * defect_cand;
                if maximize_inner {
                    cert_cand < cert_cur
                } else {
                    cert_cand > cert_cur
                }
            } else if maximize_inner {
                g_cand > g_cur
            } else {
                g_cand < g_cur
            };
            if improved {
                *sigma = cand;
                *evals = cand_evals;
                *eta = (*eta * 1.5).min(256.0);
                accepted = true;
                break;
            }
            *eta *= 0.5;
        }
        if !accepted {
            // Line search exhausted: σ is an inner optimum to machine
            // resolution; certificates computed here report it honestly.
            return Ok(());
        }
    }
}

/// Divergence-space gradient of constraint `x` at the current evaluation
/// (chain rule through `d = log φ / (α−1)` for the trace spaces).
fn divergence_grad(ev: &ConstraintEval, space: CertSpace) -> CMat {
    match space {
        CertSpace::TraceConvex { alpha } | CertSpace::TraceConcave { alpha } => {
            &ev.grad * C64::new(1.0 / ((alpha - 1.0) * ev.phi), 0.0)
        }
        CertSpace::DivergenceConvex => ev.grad.clone(),
    }
}

/// Locally reduce the true objective `max_x d_x(σ)` by steepest descent in
/// the equalizing direction: the negated least-norm convex combination of the
/// active constraints' gradients (computed by a Gram solve with negative
/// weights dropped), which decreases every active constraint simultaneously
/// and so does not zigzag at the kinks of the max.  Entropic steps keep σ a
/// density matrix.  Counts evaluations in `calls` against `call_cap`.
///
/// Returns the last least-norm mixture over the active set (scattered to full
/// length).  At the minimax saddle these weights satisfy the stationarity
/// condition of the max, i.e. they are the optimal dual mixture, so the
/// caller can recycle them as a candidate for the certificate track.
fn equalizing_descent(
    space: CertSpace,
    evaluate: &dyn Fn(&CMat) -> Result<Vec<ConstraintEval>>,
    sigma: &mut CMat,
    evals: &mut Vec<ConstraintEval>,
    eta: &mut f64,
    calls: &mut usize,
    call_cap: usize,
    rounds: usize,
    slack: f64,
) -> Result<Option<Vec<f64>>> {
    let dim = sigma.nrows();
    let mut last_mu: Option<Vec<f64>> = None;
    for _ in 0..rounds {
        if *calls >= call_cap {
            return Ok(last_mu);
        }
        let ds: Vec<f64> = evals.iter().map(|e| e.d).collect();
        let dmax = ds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let active: Vec<usize> = (0..ds.len())
            .filter(|&x| ds[x] >= dmax - slack)
            .collect();
        let ghat: Vec<CMat> = active
            .iter()
            .map(|&x| {
                let mut g = divergence_grad(&evals[x], space);
                let mean_eig = trace_re(&g) / dim as f64;
                for i in 0..dim {
                    g[(i, i)] -= C64::new(mean_eig, 0.0);
                }
                g
            })
            .collect();
        // Minimum-norm point of the active gradients' convex hull by
        // pairwise Frank–Wolfe with exact line search (linearly convergent
        // on this quadratic): the negated point decreases every active
        // constraint simultaneously; a (near-)zero point is the optimality
        // condition for the max.
        let na = active.len();
        let mut mu = vec![1.0 / na as f64; na];
        let mut dir = CMat::zeros(dim, dim);
        for (g, &m) in ghat.iter().zip(&mu) {
            dir += g * C64::new(m, 0.0);
        }
        for _ in 0..1000 {
            let pairings: Vec<f64> = ghat.iter().map(|g| hs_inner(g, &dir)).collect();
            let (s, pmin) = pairings
                .iter()
                .enumerate()
                .map(|(i, &p)| (i, p))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty active set");
            let (a, _) = pairings
                .iter()
                .enumerate()
                .filter(|&(i, _)| mu[i] > 0.0)
                .map(|(i, &p)| (i, p))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("mixture has support");
            let vv = hs_inner(&dir, &dir);
            if vv - pmin <= 1e-12 * (1.0 + vv) || s == a {
                break;
            }
            let swap = (&ghat[s] - &ghat[a]).clone_owned();
            let ss = hs_inner(&swap, &swap);
            if ss <= 0.0 {
                break;
            }
            let gamma = (-hs_inner(&swap, &dir) / ss).clamp(0.0, mu[a]);
            if gamma <= 0.0 {
                break;
            }
            mu[a] -= gamma;
            mu[s] += gamma;
            dir += &swap * C64::new(gamma, 0.0);
        }
        let mut mu_full = vec![0.0; evals.len()];
        for (&x, &m) in active.iter().zip(&mu) {
            mu_full[x] = m.max(0.0);
        }
        let mu_sum: f64 = mu_full.iter().sum();
        if mu_sum > 0.0 {
            for m in &mut mu_full {
                *m /= mu_sum;
            }
            last_mu = Some(mu_full);
        }
        let dir = hermitize(&dir);
        let dirnorm = hs_inner(&dir, &dir).sqrt();
        if dirnorm < 1e-300 {
            return Ok(last_mu);
        }
        // Linear retraction: straight steps keep the Euclidean first-order
        // model exact (the equalizing property lives in that metric); the
        // direction is traceless, and the step cap keeps σ positive.
        let (dvals, _) = eigh(&dir);
        let dscale = dvals.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        let (svals, _) = eigh(&hermitize(sigma));
        let eig_floor = svals.first().copied().unwrap_or(0.0).max(0.0);
        let mut accepted = false;
        while *eta >= 1e-14 && *calls < call_cap {
            let step = (*eta).min(0.45 * eig_floor / dscale.max(1e-300));
            if step <= 0.0 {
                break;
            }
            let raw = hermitize(&(&*sigma - &dir * C64::new(step, 0.0)));
            let tr = trace_re(&raw).max(1e-300);
            let cand = (&raw * C64::new(1.0 / tr, 0.0)).clone_owned();
            let cand_evals = evaluate(&cand)?;
            *calls += 1;
            let cmax = cand_evals
                .iter()
                .map(|e| e.d)
                .fold(f64::NEG_INFINITY, f64::max);
            if cmax < dmax {
                *sigma = cand;
                *evals = cand_evals;
                *eta = (*eta * 1.5).min(256.0);
                accepted = true;
                break;
            }
            *eta *= 0.5;
        }
        if !accepted {
            return Ok(last_mu);
        }
    }
    Ok(last_mu)
}

/// Dual-ascent engine for `inf_σ max_x D_x(σ)` over density matrices.
///
/// The mixture λ over constraints is searched on the simplex; each round
/// optimizes the λ-weighted trace objective over σ to a certified inner
/// defect.  At an inner optimum the affine certificate for that λ is tight,
/// so the lower track is exactly the concave dual value and the inner
/// optimizer's constraint values form its supergradient; the mixture then
/// moves by multiplicative weights toward the far constraints, with step
/// control by restart from the best certified mixture.  A separate upper
/// track refines the incumbent σ by [`equalizing_descent`] on the true
/// maximum.  Iteration accounting counts constraint evaluations against
/// [`MAX_ITERATIONS`].
fn solve_sigma_radius(
    sigma0: CMat,
    space: CertSpace,
    evaluate: &dyn Fn(&CMat) -> Result<Vec<ConstraintEval>>,
    inner_exact: Option<&dyn Fn(&[f64]) -> CMat>,
    tol: f64,
) -> Result<(f64, f64, f64, CMat, Vec<f64>, usize)> {
    let mut sigma = sigma0;
    let mut evals = evaluate(&sigma)?;
    let mut calls = 1usize;
    let nx = evals.len();
    let mut lam = vec![1.0 / nx as f64; nx];

    let mut best_upper = f64::INFINITY;
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_sigma = sigma.clone();
    let mut best_lambda = lam.clone();
    let mut last_upper;
    let mut eta = 0.5f64;
    let mut s_out = 1.0f64;
    let mut q_prev = f64::NEG_INFINITY;
    let mut sigma_u = sigma.clone();
    let mut evals_u = evals.clone();
    let mut eta_u = 0.5f64;
    // Latest least-norm active-set mixture from the upper track; at the
    // saddle it coincides with the optimal dual mixture, so it doubles as a
    // candidate start when the certificate walk stalls.
    let mut lam_eq: Option<Vec<f64>> = None;
    let mut stall = 0usize;

    for round in 0..MAX_ITERATIONS {
        // --- Inner optimization of the λ-weighted objective ---
        if let Some(exact) = inner_exact {
            sigma = exact(&lam);
            evals = evaluate(&sigma)?;
            calls += 1;
        } else {
            let gap_div = (best_upper - best_lower).max(tol);
            let target_div = (0.1 * tol).max(0.02 * gap_div);
            eta = eta.max(1e-3);
            optimize_weighted(
                space,
                evaluate,
                &lam,
                &mut sigma,
                &mut evals,
                &mut eta,
                &mut calls,
                MAX_ITERATIONS,
                target_div,
            )?;
        }

        // --- Certificates at the inner optimizer ---
        let upper_div = evals.iter().map(|e| e.d).fold(f64::NEG_INFINITY, f64::max);
        last_upper = upper_div;
        if upper_div < best_upper {
            best_upper = upper_div;
            best_sigma = sigma.clone();
        }
        let q_lam = affine_certificate(&lam, &evals, &sigma, space);
        let pol_rounds = if best_upper - best_lower < 50.0 * tol { 120 } else { 40 };
        let (lam_pol, q_pol) = polish_lambda(&lam, &evals, &sigma, space, pol_rounds);
        let (mut q_round, mut lam_round) = if q_pol > q_lam {
            (q_pol, lam_pol)
        } else {
            (q_lam, lam.clone())
        };
        if let Some(le) = &lam_eq {
            let (lam_pe, q_pe) = polish_lambda(le, &evals, &sigma, space, pol_rounds);
            if q_pe > q_round {
                q_round = q_pe;
                lam_round = lam_pe;
            }
        }
        if q_round > best_lower {
            best_lower = q_round;
            best_lambda = lam_round.clone();
        }

        // --- Upper track: refine the incumbent on the true maximum ---
        if best_upper - best_lower > tol && calls < MAX_ITERATIONS {
            let up_u = evals_u.iter().map(|e| e.d).fold(f64::NEG_INFINITY, f64::max);
            if upper_div < up_u {
                sigma_u = sigma.clone();
                evals_u = evals.clone();
            }
            let gap_now = best_upper - best_lower;
            let eq_rounds = if gap_now < 50.0 * tol { 24 } else { 6 };
            eta_u = eta_u.max(1e-3);
            let mu = equalizing_descent(
                space,
                evaluate,
                &mut sigma_u,
                &mut evals_u,
                &mut eta_u,
                &mut calls,
                MAX_ITERATIONS,
                eq_rounds,
                gap_now.max(1e-10),
            )?;
            if mu.is_some() {
                lam_eq = mu;
            }
            let up_u = evals_u.iter().map(|e| e.d).fold(f64::NEG_INFINITY, f64::max);
            if up_u < best_upper {
                best_upper = up_u;
                best_sigma = sigma_u.clone();
            }
        }
        if best_upper - best_lower <= tol {
            return Ok((best_lower, best_upper, last_upper, best_sigma, best_lambda, calls));
        }
        if calls >= MAX_ITERATIONS {
            break;
        }
        if std::env::var_os("CHANSIM_SOLVER_TRACE").is_some() && round % 10 == 0 {
            eprintln!(
                "round {round} (calls {calls}): upper {best_upper:.12} lower {best_lower:.12} \
                 gap {:.3e} s_out {s_out:.2e} eta {eta:.2e}",
                best_upper - best_lower
            );
        }

        // --- Mixture step: multiplicative weights toward far constraints ---
        if q_round < q_prev {
            s_out *= 0.5;
            stall += 1;
            // Alternate restarts between the best certified mixture and the
            // upper track's stationarity weights: near the saddle the latter
            // approach the optimal dual mixture from a direction the
            // far-constraint reweighting cannot reach.
            lam = match &lam_eq {
                Some(le) if stall % 2 == 1 => le.clone(),
                _ => best_lambda.clone(),
            };
        } else {
            s_out = (s_out * 1.2).min(1e6);
            stall = 0;
            lam = lam_round;
        }
        q_prev = q_round;
        let dmax = upper_div;
        let dmin = evals.iter().map(|e| e.d).fold(f64::INFINITY, f64::min);
        let scale = (dmax - dmin).max(1e-3 * (1.0 + dmax.abs()));
        let logits: Vec<f64> = lam
            .iter()
            .zip(&evals)
            .map(|(&l, e)| l.max(1e-300).ln() + s_out * (e.d - dmax) / scale)
            .collect();
        let zlog = log_sum_exp(&logits);
        lam = logits.iter().map(|&l| (l - zlog).exp()).collect();
    }
    Err(nonconvergence(best_lower, best_upper, tol))
}

/// Constraint evaluations for the channel radius at order `α ≠ 1`:
/// `Q̃_x(σ) = Tr(ρ_x^{1/2} σ^{(1−α)/α} ρ_x^{1/2})^α` with its gradient
/// through the Daleckii–Krein kernel of `t ↦ t^{(1−α)/α}`.
fn cq_trace_evals(
    sqrt_rhos: &[CMat],
    alpha: f64,
    sigma: &CMat,
) -> Result<Vec<ConstraintEval>> {
    let s = (1.0 - alpha) / alpha;
    let (svals, svecs) = eigh(&hermitize(sigma));
    let svals: Vec<f64> = svals.iter().map(|&v| v.max(1e-280)).collect();
    let sigma_s = from_spectrum(
        &svals.iter().map(|&v| v.powf(s)).collect::<Vec<_>>(),
        &svecs,
    );
    let mut out = Vec::with_capacity(sqrt_rhos.len());
    for sr in sqrt_rhos {
        let m = hermitize(&(sr * &sigma_s * sr));
        let (mvals, mvecs) = eigh(&m);
        let mmax = mvals.iter().cloned().fold(0.0, f64::max);
        let thr = SUPPORT_EIG_THRESHOLD * (1.0 + mmax);
        let q: f64 = mvals
            .iter()
            .map(|&v| if v > thr { v.powf(alpha) } else { 0.0 })
            .sum();
        if q <= 0.0 {
            return Err(Error::InvalidState(
                "channel state vanished on the reference support".into(),
            ));
        }
        let d = q.ln() / (alpha - 1.0);
        // ∇Q̃ = DK_{σ, t^s}(α ρ^{1/2} M^{α−1} ρ^{1/2}); zero modes of M are
        // fixed by supp(ρ), so the support-restricted power is the true
        // derivative.
        let mpow = from_spectrum(
            &mvals
                .iter()
                .map(|&v| if v > thr { v.powf(alpha - 1.0) } else { 0.0 })
                .collect::<Vec<_>>(),
            &mvecs,
        );
        let inner = hermitize(&(sr * &mpow * sr)) * C64::new(alpha, 0.0);
        let grad = hermitize(&dk_adjoint(
            &svals,
            &svecs,
            &inner,
            |t| t.powf(s),
            |t| s * t.powf(s - 1.0),
        ));
        out.push(ConstraintEval { d, phi: q, grad });
    }
    Ok(out)
}

/// Constraint evaluations at order 1: `D(ρ_x‖σ)` with gradient
/// `−DK_{σ, log}(ρ_x)`.
fn cq_divergence_evals(
    rhos: &[CMat],
    entropies: &[f64],
    sigma: &CMat,
) -> Result<Vec<ConstraintEval>> {
    let (svals, svecs) = eigh(&hermitize(sigma));
    let svals: Vec<f64> = svals.iter().map(|&v| v.max(1e-280)).collect();
    let log_sigma = from_spectrum(
        &svals.iter().map(|&v| v.ln()).collect::<Vec<_>>(),
        &svecs,
    );
    let mut out = Vec::with_capacity(rhos.len());
    for (rho, &negent) in rhos.iter().zip(entropies) {
        let d = negent - hs_inner(rho, &log_sigma);
        let grad = hermitize(&dk_adjoint(&svals, &svecs, rho, |t| t.ln(), |t| 1.0 / t))
            * C64::new(-1.0, 0.0);
        out.push(ConstraintEval { d, phi: d, grad });
    }
    Ok(out)
}

/// Exact inner minimizer over σ of the λ-weighted objective, where one is
/// available in closed form.
type ExactInner = Box<dyn Fn(&[f64]) -> CMat>;

/// Certificate space, constraint evaluator, and (at order 1) the closed-form
/// inner minimizer for the channel radius of a classical–quantum channel.
fn cq_space_and_evaluate(
    w: &CqChannel,
    order: RenyiOrder,
) -> (
    CertSpace,
    Box<dyn Fn(&CMat) -> Result<Vec<ConstraintEval>>>,
    Option<ExactInner>,
) {
    let alpha = order.get();
    if order.is_unit() {
        let rhos: Vec<CMat> = w.states().iter().map(|s| s.mat().clone()).collect();
        let entropies: Vec<f64> = rhos
            .iter()
            .map(|r| {
                let (vals, _) = eigh(&hermitize(r));
                vals.iter()
                    .filter(|&&v| v > SUPPORT_EIG_THRESHOLD)
                    .map(|&v| v * v.ln())
                    .sum()
            })
            .collect();
        // By the Gibbs variational principle, min_σ Σ_x λ_x D(ρ_x‖σ) is
        // attained exactly at the barycenter σ = Σ_x λ_x ρ_x.
        let rhos_exact = rhos.clone();
        let d = w.dim();
        let exact: ExactInner = Box::new(move |lam: &[f64]| {
            let mut bary = CMat::zeros(d, d);
            for (l, r) in lam.iter().zip(&rhos_exact) {
                bary += r * C64::new(*l, 0.0);
            }
            let tr = trace_re(&bary).max(1e-300);
            (&bary * C64::new(1.0 / tr, 0.0)).clone_owned()
        });
        (
            CertSpace::DivergenceConvex,
            Box::new(move |sigma: &CMat| cq_divergence_evals(&rhos, &entropies, sigma)),
            Some(exact),
        )
    } else {
        let sqrt_rhos: Vec<CMat> = w
            .states()
            .iter()
            .map(|s| psd_pseudo_power(s.mat(), 0.5))
            .collect();
        let space = if alpha > 1.0 {
            CertSpace::TraceConvex { alpha }
        } else {
            CertSpace::TraceConcave { alpha }
        };
        (
            space,
            Box::new(move |sigma: &CMat| cq_trace_evals(&sqrt_rhos, alpha, sigma)),
            None,
        )
    }
}

/// Certified sandwiched Rényi mutual information of a classical–quantum
/// channel, `Ĩ_α(W) = inf_σ max_x D̃_α(W_x‖σ)`, for `α ≥ 1/2`, with the
/// default output-dimension cap.
pub fn renyi_mi_cq(w: &CqChannel, order: RenyiOrder, tol: f64) -> Result<CapacityResult> {
    renyi_mi_cq_capped(w, order, tol, DEFAULT_DIM_CAP)
}

/// [`renyi_mi_cq`] with an explicit output-dimension cap.
pub fn renyi_mi_cq_capped(
    w: &CqChannel,
    order: RenyiOrder,
    tol: f64,
    dim_cap: usize,
) -> Result<CapacityResult> {
    check_order_and_tol(order, tol)?;
    let d = w.dim();
    if d > dim_cap {
        return Err(Error::CapExceeded(format!(
            "output dimension {d} exceeds the solver cap {dim_cap}"
        )));
    }
    let nx = w.num_inputs();
    let uniform = ProbDist::uniform(nx);
    let avg = w.average_output(&uniform)?;
    let eye = CMat::identity(d, d);
    let sigma0 = (avg.mat() * C64::new(1.0 - 1e-3, 0.0) + &eye * C64::new(1e-3 / d as f64, 0.0))
        .clone_owned();

    let (space, evaluate, inner_exact) = cq_space_and_evaluate(w, order);
    let (lower, upper, _, sigma, lambda, iterations) = solve_sigma_radius(
        sigma0,
        space,
        evaluate.as_ref(),
        inner_exact.as_deref(),
        tol,
    )?;
    let minimizer = DensityMatrix::new(sigma)?;
    let dual = ProbDist::new(lambda).ok();
    Ok(CapacityResult {
        value: 0.5 * (lower + upper),
        lower_cert: lower,
        upper_cert: upper,
        iterations,
        minimizer: Minimizer::State(minimizer),
        dual,
    })
}

// ---------------------------------------------------------------------------
// Bipartite sandwiched mutual information
// ---------------------------------------------------------------------------

/// Certified bipartite sandwiched Rényi mutual information
/// `Ĩ_α(A:B)_ρ = inf_{σ_B} D̃_α(ρ_AB ‖ ρ_A ⊗ σ_B)` for `α ≥ 1/2`.
///
/// Order 1 reduces in closed form to `S(ρ_A) + S(ρ_B) − S(ρ_AB)` with
/// minimizer `ρ_B`; other orders run the same certified descent as the
/// channel solver with a single constraint, using the product structure
/// `(ρ_A ⊗ σ_B)^s = ρ_A^s ⊗ σ_B^s`.
pub fn bipartite_smi(
    rho: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    order: RenyiOrder,
    tol: f64,
) -> Result<CapacityResult> {
    let alpha = check_order_and_tol(order, tol)?;
    if rho.dim() != d_a * d_b {
        return Err(Error::Dimension(format!(
            "state has dimension {}, expected {}x{}",
            rho.dim(),
            d_a,
            d_b
        )));
    }
    let rho_b = DensityMatrix::new(partial_trace_b(
        &swap_factors(rho.mat(), d_a, d_b),
        d_b,
        d_a,
    )?)?;
    let rho_a_mat = partial_trace_b(rho.mat(), d_a, d_b)?;

    if order.is_unit() {
        // D(ρ_AB ‖ ρ_A⊗σ) = −S(ρ_AB) − Tr ρ_A log ρ_A − Tr ρ_B log σ is
        // minimized at σ = ρ_B by the Gibbs variational principle.
        let value = rel_entropy(rho.mat(), &kron(&rho_a_mat, rho_b.mat()))?.to_f64();
        return Ok(CapacityResult {
            value,
            lower_cert: value,
            upper_cert: value,
            iterations: 0,
            minimizer: Minimizer::State(rho_b),
            dual: None,
        });
    }

    let s = (1.0 - alpha) / alpha;
    let sqrt_rho = psd_pseudo_power(rho.mat(), 0.5);
    let rho_a_s = psd_pseudo_power(&rho_a_mat, s);
    let eye_b = CMat::identity(d_b, d_b);
    let rho_a_s_ext = kron(&rho_a_s, &eye_b);

    let evaluate = move |sigma_b: &CMat| -> Result<Vec<ConstraintEval>> {
        let (bvals, bvecs) = eigh(&hermitize(sigma_b));
        let bvals: Vec<f64> = bvals.iter().map(|&v| v.max(1e-280)).collect();
        let sigma_b_s = from_spectrum(
            &bvals.iter().map(|&v| v.powf(s)).collect::<Vec<_>>(),
            &bvecs,
        );
        let t_full = kron(&rho_a_s, &sigma_b_s);
        let m = hermitize(&(&sqrt_rho * &t_full * &sqrt_rho));
        let (mvals, mvecs) = eigh(&m);
        let mmax = mvals.iter().cloned().fold(0.0, f64::max);
        let thr = SUPPORT_EIG_THRESHOLD * (1.0 + mmax);
        let q: f64 = mvals
            .iter()
            .map(|&v| if v > thr { v.powf(alpha) } else { 0.0 })
            .sum();
        if q <= 0.0 {
            return Err(Error::InvalidState(
                "joint state vanished on the reference support".into(),
            ));
        }
        let d = q.ln() / (alpha - 1.0);
        let mpow = from_spectrum(
            &mvals
                .iter()
                .map(|&v| if v > thr { v.powf(alpha - 1.0) } else { 0.0 })
                .collect::<Vec<_>>(),
            &mvecs,
        );
        let x_full = hermitize(&(&sqrt_rho * &mpow * &sqrt_rho)) * C64::new(alpha, 0.0);
        // Reduce the full-space gradient onto σ_B through the fixed ρ_A^s
        // factor: ∇_{σ_B^s} = Tr_A[(ρ_A^s ⊗ I)·X].
        let z = partial_trace_a(&(&rho_a_s_ext * &x_full), d_a, d_b)?;
        let grad = hermitize(&dk_adjoint(
            &bvals,
            &bvecs,
            &hermitize(&z),
            |t| t.powf(s),
            |t| s * t.powf(s - 1.0),
        ));
        Ok(vec![ConstraintEval { d, phi: q, grad }])
    };

    let space = if alpha > 1.0 {
        CertSpace::TraceConvex { alpha }
    } else {
        CertSpace::TraceConcave { alpha }
    };
    let eye = CMat::identity(d_b, d_b);
    let sigma0 = (rho_b.mat() * C64::new(1.0 - 1e-3, 0.0)
        + &eye * C64::new(1e-3 / d_b as f64, 0.0))
        .clone_owned();
    let (lower, upper, _, sigma, _, iterations) =
        solve_sigma_radius(sigma0, space, &evaluate, None, tol)?;
    Ok(CapacityResult {
        value: 0.5 * (lower + upper),
        lower_cert: lower,
        upper_cert: upper,
        iterations,
        minimizer: Minimizer::State(DensityMatrix::new(sigma)?),
        dual: None,
    })
}

use crate::linalg::partial_trace_a;

/// Reorder a bipartite operator from `A⊗B` to `B⊗A`.
fn swap_factors(m: &CMat, d_a: usize, d_b: usize) -> CMat {
    let d = d_a * d_b;
    CMat::from_fn(d, d, |r, c| {
        let (rb, ra) = (r / d_a, r % d_a);
        let (cb, ca) = (c / d_a, c % d_a);
        m[(ra * d_b + rb, ca * d_b + cb)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chan::CqChannel;
    use crate::info::{renyi_div_classical, sandwiched_div};
    use crate::random::{random_channel, random_cq_channel, rng_from_seed, trial_rng};
    use approx::assert_abs_diff_eq;

    const LN2: f64 = std::f64::consts::LN_2;

    fn order(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    fn check_bracket(r: &CapacityResult, tol: f64) {
        assert!(
            r.lower_cert <= r.value + 1e-15 && r.value <= r.upper_cert + 1e-15,
            "value {} outside bracket [{}, {}]",
            r.value,
            r.lower_cert,
            r.upper_cert
        );
        assert!(
            r.upper_cert - r.lower_cert <= tol * (1.0 + 1e-9),
            "bracket gap {} exceeds tol {}",
            r.upper_cert - r.lower_cert,
            tol
        );
    }

    #[test]
    fn classical_identity_channel_radius_is_log_two() {
        let w = ClassicalChannel::identity(2);
        for a in [0.5, 0.8, 1.0, 2.0, 5.0] {
            let r = renyi_mi_classical(&w, order(a), 1e-9).unwrap();
            check_bracket(&r, 1e-9);
            assert_abs_diff_eq!(r.value, LN2, epsilon = 1e-8);
            let q = r.minimizer.output().unwrap();
            assert_abs_diff_eq!(q[0], 0.5, epsilon = 1e-6);
        }
    }

    #[test]
    fn classical_constant_channel_radius_is_zero() {
        let w = ClassicalChannel::new(vec![vec![0.2, 0.5, 0.3], vec![0.2, 0.5, 0.3]]).unwrap();
        for a in [0.5, 1.0, 3.0] {
            let r = renyi_mi_classical(&w, order(a), 1e-9).unwrap();
            assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-8);
            let q = r.minimizer.output().unwrap();
            assert_abs_diff_eq!(q[1], 0.5, epsilon = 1e-6);
        }
    }

    #[test]
    fn classical_bsc_order_one_matches_closed_form() {
        let w = ClassicalChannel::bsc(0.1).unwrap();
        let r = renyi_mi_classical(&w, order(1.0), 1e-9).unwrap();
        check_bracket(&r, 1e-9);
        let h = -(0.1f64.ln() * 0.1 + 0.9f64.ln() * 0.9);
        assert_abs_diff_eq!(r.value, LN2 - h, epsilon = 1e-8);
    }

    #[test]
    fn classical_certificates_recompute_exactly() {
        // The reported certificates must be reproducible from the returned
        // minimizer and dual mixture alone.
        for trial in 0..20 {
            let mut rng = trial_rng(101, trial);
            let w = random_channel(3, 4, 1.0, &mut rng);
            for a in [0.5, 0.85, 1.6] {
                let r = renyi_mi_classical(&w, order(a), 1e-6).unwrap();
                check_bracket(&r, 1e-6);
                let q = r.minimizer.output().unwrap();
                let mut upper = f64::NEG_INFINITY;
                for x in 0..w.num_inputs() {
                    let d = renyi_div_classical(w.row(x), q.as_slice(), order(a))
                        .unwrap()
                        .to_f64();
                    upper = upper.max(d);
                }
                assert_abs_diff_eq!(upper, r.upper_cert, epsilon = 1e-9);
                let p = r.dual.as_ref().unwrap();
                if (a - 1.0f64).abs() > 1e-6 {
                    let walpha: Vec<Vec<f64>> = (0..w.num_inputs())
                        .map(|x| w.row(x).iter().map(|&v| v.powf(a)).collect())
                        .collect();
                    let (lower, _) = sibson_value_and_q(&walpha, p.as_slice(), a);
                    assert_abs_diff_eq!(lower, r.lower_cert, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn classical_radius_monotone_in_order() {
        let grid = [0.5, 0.75, 1.0, 1.5, 2.0];
        for trial in 0..50 {
            let mut rng = trial_rng(103, trial);
            let w = random_channel(3, 3, 0.8, &mut rng);
            let mut prev = f64::NEG_INFINITY;
            for &a in &grid {
                let r = renyi_mi_classical(&w, order(a), 1e-7).unwrap();
                assert!(
                    r.value >= prev - 2e-7,
                    "trial {trial}: radius fell from {prev} to {} at order {a}",
                    r.value
                );
                prev = r.value;
            }
        }
    }

    #[test]
    fn classical_rejects_small_orders_and_bad_tolerance() {
        let w = ClassicalChannel::bsc(0.1).unwrap();
        assert!(renyi_mi_classical(&w, order(0.4), 1e-6).is_err());
        assert!(renyi_mi_classical(&w, order(1.0), 0.0).is_err());
    }

    #[test]
    fn classical_max_information_closed_form() {
        // Identity: log Σ_y max_x W = log 2; BSC(0.1): log(2·0.9).
        let (v, q) = max_mi_classical(&ClassicalChannel::identity(2));
        assert_abs_diff_eq!(v, LN2, epsilon = 1e-12);
        assert_abs_diff_eq!(q[0], 0.5, epsilon = 1e-12);
        let (v, _) = max_mi_classical(&ClassicalChannel::bsc(0.1).unwrap());
        assert_abs_diff_eq!(v, (1.8f64).ln(), epsilon = 1e-12);
    }

    // --- classical–quantum --------------------------------------------------

    #[test]
    fn cq_single_state_channel_radius_is_zero() {
        let mut rng = rng_from_seed(7);
        let w = random_cq_channel(1, 3, &mut rng);
        for a in [0.5, 1.0, 2.0] {
            let r = renyi_mi_cq(&w, order(a), 1e-7).unwrap();
            check_bracket(&r, 1e-7);
            assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn cq_orthogonal_pure_states_radius_is_log_two() {
        let w = CqChannel::from_classical(&ClassicalChannel::identity(2));
        let r = renyi_mi_cq(&w, order(1.0), 1e-8).unwrap();
        check_bracket(&r, 1e-8);
        assert_abs_diff_eq!(r.value, LN2, epsilon = 1e-7);
    }

    #[test]
    fn cq_diagonal_channel_matches_classical() {
        for trial in 0..8 {
            let mut rng = trial_rng(109, trial);
            let wc = random_channel(3, 3, 1.0, &mut rng);
            let wq = CqChannel::from_classical(&wc);
            for a in [0.5, 0.7, 1.0, 1.8, 3.0] {
                let tol = 1e-6;
                let rc = renyi_mi_classical(&wc, order(a), tol).unwrap();
                let rq = renyi_mi_cq(&wq, order(a), tol).unwrap();
                assert!(
                    (rc.value - rq.value).abs() <= 2.0 * tol,
                    "trial {trial} order {a}: classical {} vs quantum {}",
                    rc.value,
                    rq.value
                );
            }
        }
    }

    #[test]
    fn cq_certificates_recompute_exactly() {
        for trial in 0..5 {
            let mut rng = trial_rng(113, trial);
            let w = random_cq_channel(3, 3, &mut rng);
            for a in [0.6, 1.0, 2.0] {
                let r = renyi_mi_cq(&w, order(a), 1e-6).unwrap();
                check_bracket(&r, 1e-6);
                let sigma = r.minimizer.state().unwrap();
                let mut upper = f64::NEG_INFINITY;
                for x in 0..w.num_inputs() {
                    let d = sandwiched_div(w.state(x).mat(), sigma.mat(), order(a))
                        .unwrap()
                        .to_f64();
                    upper = upper.max(d);
                }
                // The minimizer is re-validated (clamped) when packaged, so
                // allow linear-algebra noise.
                assert_abs_diff_eq!(upper, r.upper_cert, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn cq_dimension_cap_enforced() {
        let mut rng = rng_from_seed(17);
        let w = random_cq_channel(2, 3, &mut rng);
        assert!(matches!(
            renyi_mi_cq_capped(&w, order(2.0), 1e-6, 2),
            Err(Error::CapExceeded(_))
        ));
    }

    // --- bipartite ----------------------------------------------------------

    #[test]
    fn bipartite_product_state_has_zero_information() {
        let mut rng = rng_from_seed(23);
        let a = crate::random::random_state(2, &mut rng);
        let b = crate::random::random_state(3, &mut rng);
        let rho = a.tensor(&b);
        for al in [0.5, 1.0, 2.0] {
            let r = bipartite_smi(&rho, 2, 3, order(al), 1e-7).unwrap();
            assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn bipartite_maximally_entangled_order_one_is_two_log_two() {
        let v = [
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let rho = DensityMatrix::pure_state(&v).unwrap();
        let r = bipartite_smi(&rho, 2, 2, order(1.0), 1e-8).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 * LN2, epsilon = 1e-9);
        let sig = r.minimizer.state().unwrap();
        assert_abs_diff_eq!(sig.mat()[(0, 0)].re, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn bipartite_correlated_bits_match_grid_oracle_at_half() {
        // ρ = ½(|00⟩⟨00| + |11⟩⟨11|).  Dephasing in the joint eigenbasis
        // fixes ρ and ρ_A⊗σ's diagonal, and can only decrease the divergence,
        // so a diagonal σ = (t, 1−t) grid is an exact oracle.
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(3, 3)] = C64::new(0.5, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        let tol = 1e-7;
        let r = bipartite_smi(&rho, 2, 2, order(0.5), tol).unwrap();
        check_bracket(&r, tol);
        let mut oracle = f64::INFINITY;
        let steps = 4000;
        for i in 1..steps {
            let t = i as f64 / steps as f64;
            // Diagonal case: D̃_{1/2}(diag p ‖ diag q) classical formula.
            let p = [0.5, 0.0, 0.0, 0.5];
            let q = [0.5 * t, 0.5 * (1.0 - t), 0.5 * t, 0.5 * (1.0 - t)];
            let d = renyi_div_classical(&p, &q, order(0.5)).unwrap().to_f64();
            oracle = oracle.min(d);
        }
        assert!(
            (r.value - oracle).abs() <= tol + 1e-6,
            "solver {} vs grid oracle {}",
            r.value,
            oracle
        );
    }

    #[test]
    fn bipartite_additivity_on_product_states() {
        // Ĩ_α(AA′:BB′) of ρ⊗ς = Ĩ_α(A:B)_ρ + Ĩ_α(A′:B′)_ς after reordering
        // AA′BB′; spot-checked through the channel additivity test below at
        // the channel level, and here directly for a product of two copies.
        let mut rng = rng_from_seed(29);
        let rho = crate::random::random_state(4, &mut rng);
        let tol = 1e-6;
        for al in [0.75, 2.0] {
            let single = bipartite_smi(&rho, 2, 2, order(al), tol).unwrap();
            let doubled_mat = reorder_pair_to_blocks(rho.mat());
            let doubled = DensityMatrix::new(doubled_mat).unwrap();
            let joint = bipartite_smi(&doubled, 4, 4, order(al), tol).unwrap();
            assert!(
                (joint.value - 2.0 * single.value).abs() <= 3.0 * tol + 1e-6,
                "order {al}: joint {} vs 2×single {}",
                joint.value,
                2.0 * single.value
            );
        }
    }

    /// Reorder ρ_{A B} ⊗ ρ_{A′B′} into (AA′ : BB′) block order.
    fn reorder_pair_to_blocks(rho: &CMat) -> CMat {
        let big = kron(rho, rho);
        // Index (a b a' b') → (a a' b b'), each factor a qubit.
        let perm = |i: usize| -> usize {
            let b2 = i & 1;
            let a2 = (i >> 1) & 1;
            let b1 = (i >> 2) & 1;
            let a1 = (i >> 3) & 1;
            (a1 << 3) | (a2 << 2) | (b1 << 1) | b2
        };
        CMat::from_fn(16, 16, |r, c| big[(invert(perm, r), invert(perm, c))])
    }

    fn invert(perm: impl Fn(usize) -> usize, target: usize) -> usize {
        (0..16).find(|&i| perm(i) == target).unwrap()
    }

    // --- channel additivity --------------------------------------------------

    #[test]
    fn classical_radius_additive_under_tensor_powers() {
        for trial in 0..5 {
            let mut rng = trial_rng(127, trial);
            let w = random_channel(2, 3, 1.0, &mut rng);
            let w2 = w.tensor_power(2, 1 << 20).unwrap();
            for a in [0.5, 1.0, 2.5] {
                let tol = 1e-7;
                let single = renyi_mi_classical(&w, order(a), tol).unwrap();
                let double = renyi_mi_classical(&w2, order(a), tol).unwrap();
                assert!(
                    (double.value - 2.0 * single.value).abs() <= 3.0 * tol,
                    "trial {trial} order {a}: {} vs 2×{}",
                    double.value,
                    single.value
                );
            }
        }
    }

    #[test]
    fn cq_radius_additive_under_tensor_powers() {
        for trial in 0..3 {
            let mut rng = trial_rng(131, trial);
            let w = random_cq_channel(2, 3, &mut rng);
            let w2 = w.tensor_power(2, 1 << 20).unwrap();
            for a in [0.75, 1.5] {
                let tol = 1e-6;
                let single = renyi_mi_cq(&w, order(a), tol).unwrap();
                let double = renyi_mi_cq_capped(&w2, order(a), tol, 9).unwrap();
                assert!(
                    (double.value - 2.0 * single.value).abs() <= 3.0 * tol,
                    "trial {trial} order {a}: {} vs 2×{}",
                    double.value,
                    single.value
                );
            }
        }
    }
}
