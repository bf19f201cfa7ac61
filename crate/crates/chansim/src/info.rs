//! Divergences, fidelities, divergence variance, and the pinching channel.
//!
//! All quantities are measured in nats (natural logarithms).  Conventions
//! shared by every operation in this module:
//!
//! * **Support rules.**  An eigenvalue (or probability) counts as part of the
//!   support when it exceeds [`SUPPORT_EIG_THRESHOLD`](crate::linalg::SUPPORT_EIG_THRESHOLD).
//!   Divergences that are infinite under the defining support rules return the
//!   explicit tag [`Div::Infinite`], never a sentinel float, so the support
//!   cases themselves are testable.
//! * **Order one.**  The Rényi family dispatches to the relative entropy when
//!   `|α − 1| <` [`ALPHA_ONE_WINDOW`]; the `1/(α−1)` prefactor is numerically
//!   useless inside that window.
//! * **Matrix functions** are taken through Hermitian eigendecompositions,
//!   with powers of a positive-semidefinite operator evaluated on its support.
//! * **Divergence variance** is only defined here for commuting pairs
//!   (classically this is automatic); genuinely non-commuting pairs are
//!   rejected rather than silently approximated.
//!
//! The sandwiched Rényi divergence of order `α` between `ρ` and positive `σ`
//! is `log Tr (σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α / (α−1)`; on commuting pairs it
//! reduces to the classical `log Σ p^α q^{1−α} / (α−1)`, and as `α → ∞` it
//! increases to the max-relative entropy `log λ_max(σ^{−1/2} ρ σ^{−1/2})`.

use crate::chan::{ClassicalChannel, CqChannel};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh, from_spectrum, hermiticity_defect, hermitize, max_eig, psd_pseudo_power, CMat,
    SUPPORT_EIG_THRESHOLD,
};

/// Orders closer to 1 than this dispatch to the relative entropy.
pub const ALPHA_ONE_WINDOW: f64 = 1e-6;

/// Overlap mass below this is treated as numerically zero when deciding the
/// infinite cases of the support rules.  Looser than the eigenvalue support
/// threshold because rotated bases scatter genuine zeros into O(1e−14) dust.
pub const PERP_MASS_THRESHOLD: f64 = 1e-10;

/// Two operators count as commuting when every entry of their commutator has
/// magnitude at most this.
pub const COMMUTATOR_TOLERANCE: f64 = 1e-9;

/// Adjacent eigenvalues closer than this (relative to the spectral scale) are
/// merged into one spectral projector when building a pinching map.
pub const EIGENVALUE_GROUP_TOLERANCE: f64 = 1e-8;

/// A divergence value: finite nats or an explicit infinity.
///
/// The infinite case carries the meaning "the defining support rule is
/// violated"; it is deliberately not a float so callers must acknowledge it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Div {
    /// Finite value in nats.
    Finite(f64),
    /// The divergence is +∞ under its support rules.
    Infinite,
}

impl Div {
    /// True when the value is the infinite tag.
    pub fn is_infinite(self) -> bool {
        matches!(self, Div::Infinite)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Div::Finite(v) => Some(v),
            Div::Infinite => None,
        }
    }

    /// Collapse to a float, mapping the infinite tag to `f64::INFINITY`.
    /// Useful inside suprema/infima where IEEE semantics do the right thing.
    pub fn to_f64(self) -> f64 {
        match self {
            Div::Finite(v) => v,
            Div::Infinite => f64::INFINITY,
        }
    }

    /// Classify a float produced by exact arithmetic on divergences.
    pub fn from_f64(v: f64) -> Div {
        if v.is_finite() {
            Div::Finite(v)
        } else {
            Div::Infinite
        }
    }
}

impl std::fmt::Display for Div {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Div::Finite(v) => write!(f, "{v}"),
            Div::Infinite => write!(f, "inf"),
        }
    }
}

/// A validated Rényi order: a finite `α > 0`.
///
/// `α = 1` is allowed; every Rényi-family operation dispatches the window
/// around 1 to the relative entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    /// Validate an order.  Requires a finite `alpha > 0`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "Rényi order must be a finite positive real, got {alpha}"
            )));
        }
        Ok(RenyiOrder(alpha))
    }

    /// The raw order.
    pub fn get(self) -> f64 {
        self.0
    }

    /// True when the order falls in the dispatch window around 1.
    pub fn is_unit(self) -> bool {
        (self.0 - 1.0).abs() < ALPHA_ONE_WINDOW
    }
}

/// `log Σ exp(t_i)` evaluated stably; `−∞` for an empty list.
pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
    m + s.ln()
}

fn check_len(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "distributions have lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

fn check_square_pair(a: &CMat, b: &CMat, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() {
        return Err(Error::Dimension(format!("{what}: operators must be square")));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "{what}: operators have dimensions {} and {}",
            a.nrows(),
            b.nrows()
        )));
    }
    Ok(())
}

/// Classical relative entropy `Σ p log(p/q)` in nats.
///
/// Returns [`Div::Infinite`] iff some `p_i` above the support threshold sits
/// on a `q_i` below it.  Inputs need not be normalized.
pub fn rel_entropy_classical(p: &[f64], q: &[f64]) -> Result<Div> {
    check_len(p, q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > SUPPORT_EIG_THRESHOLD {
            if qi <= SUPPORT_EIG_THRESHOLD {
                return Ok(Div::Infinite);
            }
            acc += pi * (pi.ln() - qi.ln());
        }
    }
    Ok(Div::Finite(acc))
}

/// Quantum relative entropy `Tr ρ log ρ − Tr ρ log σ` in nats.
///
/// Returns [`Div::Infinite`] iff `ρ` has mass above [`PERP_MASS_THRESHOLD`]
/// outside the support of `σ`.  Reduces to the classical formula on commuting
/// inputs.
pub fn rel_entropy(rho: &CMat, sigma: &CMat) -> Result<Div> {
    check_square_pair(rho, sigma, "relative entropy")?;
    let (rvals, rvecs) = eigh(&hermitize(rho));
    let (svals, svecs) = eigh(&hermitize(sigma));
    // Overlaps |⟨u_i|v_j⟩|² between the two eigenbases.
    let overlap = rvecs.adjoint() * &svecs;
    let d = rvals.len();
    let mut perp_mass = 0.0;
    let mut cross = 0.0;
    let mut self_term = 0.0;
    for i in 0..d {
        let ri = rvals[i];
        if ri <= SUPPORT_EIG_THRESHOLD {
            continue;
        }
        self_term += ri * ri.ln();
        for j in 0..d {
            let w = overlap[(i, j)].norm_sqr();
            if svals[j] > SUPPORT_EIG_THRESHOLD {
                cross += ri * w * svals[j].ln();
            } else {
                perp_mass += ri * w;
            }
        }
    }
    if perp_mass > PERP_MASS_THRESHOLD {
        return Ok(Div::Infinite);
    }
    Ok(Div::Finite(self_term - cross))
}

/// Classical Rényi divergence `log(Σ p^α q^{1−α})/(α−1)` in nats.
///
/// Support rules: for `α > 1` the value is infinite unless `supp(p) ⊆
/// supp(q)`; for `α < 1` it is infinite iff the supports are disjoint.
/// Orders inside the window around 1 dispatch to the relative entropy.
pub fn renyi_div_classical(p: &[f64], q: &[f64], order: RenyiOrder) -> Result<Div> {
    check_len(p, q)?;
    if order.is_unit() {
        return rel_entropy_classical(p, q);
    }
    let alpha = order.get();
    let mut terms = Vec::with_capacity(p.len());
    let mut has_support = false;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= SUPPORT_EIG_THRESHOLD {
            continue;
        }
        has_support = true;
        if qi <= SUPPORT_EIG_THRESHOLD {
            if alpha > 1.0 {
                return Ok(Div::Infinite);
            }
            continue;
        }
        // Work in the log domain: q^{1−α} overflows directly for small q.
        terms.push(alpha * pi.ln() + (1.0 - alpha) * qi.ln());
    }
    if !has_support {
        return Err(Error::InvalidArgument(
            "first argument has empty support".into(),
        ));
    }
    if terms.is_empty() {
        // α < 1 with disjoint supports.
        return Ok(Div::Infinite);
    }
    Ok(Div::Finite(log_sum_exp(&terms) / (alpha - 1.0)))
}

/// Sandwiched Rényi divergence
/// `log Tr (σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α / (α−1)` in nats.
///
/// Powers of `σ` are taken on its support.  For `α > 1` the value is infinite
/// unless `supp(ρ) ⊆ supp(σ)`; for `α < 1` it is infinite iff the supports
/// are perpendicular.  Orders inside the window around 1 dispatch to the
/// relative entropy.  `σ` may be any positive-semidefinite operator (it need
/// not have unit trace).
pub fn sandwiched_div(rho: &CMat, sigma: &CMat, order: RenyiOrder) -> Result<Div> {
    check_square_pair(rho, sigma, "sandwiched divergence")?;
    if order.is_unit() {
        return rel_entropy(rho, sigma);
    }
    let alpha = order.get();
    let rho_h = hermitize(rho);
    let (svals, svecs) = eigh(&hermitize(sigma));
    // Mass of ρ on and off the support of σ.
    let in_basis = svecs.adjoint() * &rho_h * &svecs;
    let mut on_mass = 0.0;
    let mut perp_mass = 0.0;
    for (j, &s) in svals.iter().enumerate() {
        let m = in_basis[(j, j)].re.max(0.0);
        if s > SUPPORT_EIG_THRESHOLD {
            on_mass += m;
        } else {
            perp_mass += m;
        }
    }
    if alpha > 1.0 && perp_mass > PERP_MASS_THRESHOLD {
        return Ok(Div::Infinite);
    }
    if alpha < 1.0 && on_mass <= PERP_MASS_THRESHOLD {
        return Ok(Div::Infinite);
    }
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let powered: Vec<f64> = svals
        .iter()
        .map(|&s| if s > SUPPORT_EIG_THRESHOLD { s.powf(gamma) } else { 0.0 })
        .collect();
    let sigma_gamma = from_spectrum(&powered, &svecs);
    let sandwiched = hermitize(&(&sigma_gamma * &rho_h * &sigma_gamma));
    let (avals, _) = eigh(&sandwiched);
    let terms: Vec<f64> = avals
        .iter()
        .filter(|&&a| a > 0.0)
        .map(|&a| alpha * a.ln())
        .collect();
    if terms.is_empty() {
        // No spectral weight survived the sandwich; only reachable when ρ is
        // numerically zero on the support of σ.
        return Ok(Div::Infinite);
    }
    Ok(Div::Finite(log_sum_exp(&terms) / (alpha - 1.0)))
}

/// Max-relative entropy `log λ_max(σ^{−1/2} ρ σ^{−1/2})` in nats, the
/// smallest `λ` with `ρ ⪯ e^λ σ`.
///
/// Returns [`Div::Infinite`] iff `ρ` has mass outside the support of `σ`.
pub fn max_rel_entropy(rho: &CMat, sigma: &CMat) -> Result<Div> {
    check_square_pair(rho, sigma, "max-relative entropy")?;
    let rho_h = hermitize(rho);
    let (svals, svecs) = eigh(&hermitize(sigma));
    let in_basis = svecs.adjoint() * &rho_h * &svecs;
    let mut perp_mass = 0.0;
    for (j, &s) in svals.iter().enumerate() {
        if s <= SUPPORT_EIG_THRESHOLD {
            perp_mass += in_basis[(j, j)].re.max(0.0);
        }
    }
    if perp_mass > PERP_MASS_THRESHOLD {
        return Ok(Div::Infinite);
    }
    let inv_sqrt = psd_pseudo_power(&hermitize(sigma), -0.5);
    let conj = hermitize(&(&inv_sqrt * &rho_h * &inv_sqrt));
    let lam = max_eig(&conj);
    if lam <= 0.0 {
        return Err(Error::InvalidArgument(
            "first argument has empty support".into(),
        ));
    }
    Ok(Div::Finite(lam.ln()))
}

/// Classical max-relative entropy `max_i log(p_i/q_i)` over the support of `p`.
pub fn max_rel_entropy_classical(p: &[f64], q: &[f64]) -> Result<Div> {
    check_len(p, q)?;
    let mut best = f64::NEG_INFINITY;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > SUPPORT_EIG_THRESHOLD {
            if qi <= SUPPORT_EIG_THRESHOLD {
                return Ok(Div::Infinite);
            }
            best = best.max(pi.ln() - qi.ln());
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument(
            "first argument has empty support".into(),
        ));
    }
    Ok(Div::Finite(best))
}

/// Root fidelity `Tr √(√ρ σ √ρ)`.
///
/// Accepts arbitrary positive-semidefinite operators; for unit-trace states
/// the value lies in `[0, 1]` up to roundoff.
pub fn root_fidelity(rho: &CMat, sigma: &CMat) -> Result<f64> {
    check_square_pair(rho, sigma, "fidelity")?;
    let sqrt_rho = psd_pseudo_power(&hermitize(rho), 0.5);
    let inner = hermitize(&(&sqrt_rho * hermitize(sigma) * &sqrt_rho));
    let (vals, _) = eigh(&inner);
    Ok(vals.iter().map(|&v| v.max(0.0).sqrt()).sum())
}

/// Fidelity `F(ρ,σ) = (Tr √(√ρ σ √ρ))²`, clamped into `[0, 1]`.
pub fn fidelity(rho: &CMat, sigma: &CMat) -> Result<f64> {
    let rf = root_fidelity(rho, sigma)?;
    Ok((rf * rf).min(1.0))
}

/// Purified distance `P(ρ,σ) = √(1 − F(ρ,σ))`.
///
/// Evaluated as `√((1−√F)(1+√F))` so that near-identical states keep the
/// precision of `1 − √F` instead of losing it to squaring.
pub fn purified_distance(rho: &CMat, sigma: &CMat) -> Result<f64> {
    let rf = root_fidelity(rho, sigma)?.clamp(0.0, 1.0);
    Ok(((1.0 - rf) * (1.0 + rf)).sqrt())
}

/// Classical root fidelity `Σ √(p_i q_i)`.
pub fn root_fidelity_classical(p: &[f64], q: &[f64]) -> Result<f64> {
    check_len(p, q)?;
    Ok(p.iter()
        .zip(q)
        .map(|(&pi, &qi)| (pi.max(0.0) * qi.max(0.0)).sqrt())
        .sum())
}

/// Classical fidelity `(Σ √(p_i q_i))²`, clamped into `[0, 1]`.
pub fn fidelity_classical(p: &[f64], q: &[f64]) -> Result<f64> {
    let rf = root_fidelity_classical(p, q)?;
    Ok((rf * rf).min(1.0))
}

/// Classical purified distance `√(1 − F(p,q))`, cancellation-safe.
pub fn purified_distance_classical(p: &[f64], q: &[f64]) -> Result<f64> {
    let rf = root_fidelity_classical(p, q)?.clamp(0.0, 1.0);
    Ok(((1.0 - rf) * (1.0 + rf)).sqrt())
}

/// Worst-case purified distance between two classical channels:
/// the maximum over inputs of the purified distance between output rows.
pub fn channel_purified_distance_classical(
    w: &ClassicalChannel,
    v: &ClassicalChannel,
) -> Result<f64> {
    if w.num_inputs() != v.num_inputs() || w.num_outputs() != v.num_outputs() {
        return Err(Error::Dimension(format!(
            "channels are {}x{} and {}x{}",
            w.num_inputs(),
            w.num_outputs(),
            v.num_inputs(),
            v.num_outputs()
        )));
    }
    let mut worst = 0.0f64;
    for x in 0..w.num_inputs() {
        worst = worst.max(purified_distance_classical(w.row(x), v.row(x))?);
    }
    Ok(worst)
}

/// Worst-case purified distance between two classical–quantum channels.
pub fn channel_purified_distance_cq(w: &CqChannel, v: &CqChannel) -> Result<f64> {
    if w.num_inputs() != v.num_inputs() || w.dim() != v.dim() {
        return Err(Error::Dimension(format!(
            "channels have {} inputs into dim {} vs {} inputs into dim {}",
            w.num_inputs(),
            w.dim(),
            v.num_inputs(),
            v.dim()
        )));
    }
    let mut worst = 0.0f64;
    for x in 0..w.num_inputs() {
        worst = worst.max(purified_distance(w.state(x).mat(), v.state(x).mat())?);
    }
    Ok(worst)
}

/// Classical divergence variance: the variance of `log(p/q)` under `p`.
///
/// Requires `supp(p) ⊆ supp(q)`.
pub fn div_variance_classical(p: &[f64], q: &[f64]) -> Result<f64> {
    check_len(p, q)?;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > SUPPORT_EIG_THRESHOLD {
            if qi <= SUPPORT_EIG_THRESHOLD {
                return Err(Error::InvalidArgument(
                    "divergence variance needs supp(p) ⊆ supp(q)".into(),
                ));
            }
            let l = pi.ln() - qi.ln();
            m1 += pi * l;
            m2 += pi * l * l;
        }
    }
    Ok((m2 - m1 * m1).max(0.0))
}

/// Divergence variance of a commuting pair: the variance of `log(ρ/ω)` under
/// `ρ`, computed in a joint eigenbasis.
///
/// Rejects pairs whose commutator exceeds [`COMMUTATOR_TOLERANCE`] — the
/// non-commuting variance is out of scope — and requires `supp(ρ) ⊆ supp(ω)`.
pub fn div_variance(rho: &CMat, omega: &CMat) -> Result<f64> {
    check_square_pair(rho, omega, "divergence variance")?;
    let comm = rho * omega - omega * rho;
    let defect = comm.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if defect > COMMUTATOR_TOLERANCE {
        return Err(Error::Unsupported(format!(
            "divergence variance needs commuting inputs; commutator entry of magnitude {defect:.2e}"
        )));
    }
    let pairs = joint_spectrum(rho, omega);
    let (ps, qs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    div_variance_classical(&ps, &qs)
}

/// Joint spectrum of a commuting Hermitian pair: eigenvalues of `a` paired
/// with the eigenvalue of `b` on the same joint eigenvector.  Diagonalizes
/// `b`, then re-diagonalizes `a` inside each near-degenerate eigenspace.
fn joint_spectrum(a: &CMat, b: &CMat) -> Vec<(f64, f64)> {
    let (bvals, bvecs) = eigh(&hermitize(b));
    let in_basis = hermitize(&(bvecs.adjoint() * hermitize(a) * &bvecs));
    let scale = bvals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let tol = EIGENVALUE_GROUP_TOLERANCE * (1.0 + scale);
    let mut pairs = Vec::with_capacity(bvals.len());
    let mut start = 0;
    while start < bvals.len() {
        let mut end = start + 1;
        while end < bvals.len() && bvals[end] - bvals[end - 1] <= tol {
            end += 1;
        }
        let rep: f64 = bvals[start..end].iter().sum::<f64>() / (end - start) as f64;
        let block = in_basis.view((start, start), (end - start, end - start)).into_owned();
        let (avals, _) = eigh(&block);
        for av in avals {
            pairs.push((av, rep));
        }
        start = end;
    }
    pairs
}

/// The pinching channel of a Hermitian operator: `A ↦ Σ_i Π_i A Π_i` over the
/// spectral projectors `Π_i` of near-degenerate eigenvalue groups.
#[derive(Debug, Clone)]
pub struct PinchingMap {
    dim: usize,
    projectors: Vec<CMat>,
    values: Vec<f64>,
}

impl PinchingMap {
    /// Build the pinching map of a Hermitian `h`.  Eigenvalues closer than
    /// [`EIGENVALUE_GROUP_TOLERANCE`] (relative to the spectral scale) share
    /// a projector.
    pub fn new(h: &CMat) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::Dimension("pinching reference must be square".into()));
        }
        let scale = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if hermiticity_defect(h) > 1e-8 * (1.0 + scale) {
            return Err(Error::InvalidArgument(
                "pinching reference must be Hermitian".into(),
            ));
        }
        let (vals, vecs) = eigh(&hermitize(h));
        let d = vals.len();
        let vscale = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let tol = EIGENVALUE_GROUP_TOLERANCE * (1.0 + vscale);
        let mut projectors = Vec::new();
        let mut values = Vec::new();
        let mut start = 0;
        while start < d {
            let mut end = start + 1;
            while end < d && vals[end] - vals[end - 1] <= tol {
                end += 1;
            }
            let cols = vecs.columns(start, end - start);
            projectors.push(&cols * cols.adjoint());
            values.push(vals[start..end].iter().sum::<f64>() / (end - start) as f64);
            start = end;
        }
        let map = PinchingMap {
            dim: d,
            projectors,
            values,
        };
        debug_assert!(map.resolution_defect() <= 1e-9);
        Ok(map)
    }

    /// Dimension of the space the map acts on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct eigenvalue groups ν.
    pub fn count(&self) -> usize {
        self.projectors.len()
    }

    /// The spectral projectors, ordered by ascending eigenvalue.
    pub fn projectors(&self) -> &[CMat] {
        &self.projectors
    }

    /// Representative eigenvalue of each group, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest deviation of `Σ_i Π_i` from the identity, entrywise.
    pub fn resolution_defect(&self) -> f64 {
        let mut sum = CMat::zeros(self.dim, self.dim);
        for p in &self.projectors {
            sum += p;
        }
        let eye = CMat::identity(self.dim, self.dim);
        (sum - eye).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Apply the map: `Σ_i Π_i A Π_i`.
    pub fn apply(&self, a: &CMat) -> Result<CMat> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "pinching acts on dimension {}, operator is {}x{}",
                self.dim,
                a.nrows(),
                a.ncols()
            )));
        }
        if self.projectors.len() == 1 {
            return Ok(a.clone());
        }
        let mut out = CMat::zeros(self.dim, self.dim);
        for p in &self.projectors {
            out += p * a * p;
        }
        Ok(out)
    }
}

/// Pinch `a` with respect to the eigenbasis structure of `h`.
pub fn pinch(h: &CMat, a: &CMat) -> Result<CMat> {
    PinchingMap::new(h)?.apply(a)
}

/// Number of distinct eigenvalues ν of `h` at the pinching resolution.
pub fn pinching_count(h: &CMat) -> Result<usize> {
    Ok(PinchingMap::new(h)?.count())
}
