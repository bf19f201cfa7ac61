//! Channels, distributions, states, tensor powers, and type classes.
//!
//! Everything downstream (divergences, capacity solvers, simulation
//! programs, constructions) consumes the validated models defined here.
//! Sequences over an alphabet of size `k` are indexed mixed-radix
//! little-endian: position 0 is the fastest digit, so the sequence
//! `(x_0, ..., x_{n-1})` has index `sum_i x_i k^i`. Tensor powers, type
//! aggregation, and the command-line tools all share this convention.

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{eigh, from_spectrum, hermiticity_defect, CMat, C64};

/// Probability entries in `[-CLAMP_THRESHOLD, 0)` are clamped to zero;
/// anything more negative is a validation error.
pub const CLAMP_THRESHOLD: f64 = 1e-12;

/// Probability vectors must sum to 1 within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Density matrices must be Hermitian within this entrywise tolerance.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Density-matrix eigenvalues must be at least `-PSD_TOLERANCE`
/// (then clamped to zero).
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Default cap on the number of matrix entries a tensor power may produce.
pub const DEFAULT_ENTRY_CAP: usize = 1 << 26;

/// Entries at or below this threshold count as zero for support questions.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// A validated probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    weights: Vec<f64>,
}

impl ProbDist {
    /// Validate and build: entries ≥ −1e−12 (clamped to 0), sum 1 within 1e−9.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        let mut w = weights;
        for (i, v) in w.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} is not finite: {v}"
                )));
            }
            if *v < -CLAMP_THRESHOLD {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} is negative beyond tolerance: {v:e}"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {sum}, not 1 within {SUM_TOLERANCE:e}"
            )));
        }
        Ok(Self { weights: w })
    }

    /// Uniform distribution on `n` symbols.
    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on symbol `i` of an `n`-symbol alphabet.
    pub fn point(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Self { weights: w }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// Indices with weight above the support threshold.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.weights[i] > SUPPORT_THRESHOLD)
            .collect()
    }
}

impl std::ops::Index<usize> for ProbDist {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.weights[i]
    }
}

/// A validated row-stochastic channel `W: X -> Y`, stored row-major with
/// row index = input.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    nx: usize,
    ny: usize,
    rows: Vec<f64>,
}

impl ClassicalChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidChannel("no rows".into()));
        }
        let ny = rows[0].len();
        let nx = rows.len();
        let mut flat = Vec::with_capacity(nx * ny);
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != ny {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has length {}, expected {ny}",
                    row.len()
                )));
            }
            let dist = ProbDist::new(row)
                .map_err(|e| Error::InvalidChannel(format!("row {x}: {e}")))?;
            flat.extend_from_slice(dist.as_slice());
        }
        Ok(Self { nx, ny, rows: flat })
    }

    /// Identity channel on `k` symbols.
    pub fn identity(k: usize) -> Self {
        let mut rows = vec![0.0; k * k];
        for i in 0..k {
            rows[i * k + i] = 1.0;
        }
        Self {
            nx: k,
            ny: k,
            rows,
        }
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn num_inputs(&self) -> usize {
        self.nx
    }

    pub fn num_outputs(&self) -> usize {
        self.ny
    }

    /// Transition probability `W(y|x)`.
    pub fn w(&self, x: usize, y: usize) -> f64 {
        self.rows[x * self.ny + y]
    }

    /// Row `x` as a slice of length `|Y|`.
    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x * self.ny..(x + 1) * self.ny]
    }

    /// Smallest strictly positive entry (`W_min`).
    pub fn min_positive_entry(&self) -> Result<f64> {
        self.rows
            .iter()
            .copied()
            .filter(|&v| v > SUPPORT_THRESHOLD)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            })
            .ok_or_else(|| Error::InvalidChannel("channel has no positive entry".into()))
    }

    /// Output distribution of `x -> W(.|x)` under input distribution `p`.
    pub fn output_distribution(&self, p: &ProbDist) -> Result<ProbDist> {
        if p.len() != self.nx {
            return Err(Error::Dimension(format!(
                "input distribution has {} symbols, channel expects {}",
                p.len(),
                self.nx
            )));
        }
        let mut out = vec![0.0; self.ny];
        for x in 0..self.nx {
            let px = p[x];
            for y in 0..self.ny {
                out[y] += px * self.w(x, y);
            }
        }
        ProbDist::new(out)
    }

    /// `n`-fold memoryless extension `W^{(x) n}` with the little-endian
    /// sequence indexing; entry `(y^n | x^n) = prod_i W(y_i | x_i)`.
    pub fn tensor_power(&self, n: usize, entry_cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("tensor power needs n >= 1".into()));
        }
        let nxn = checked_pow(self.nx, n, entry_cap)?;
        let nyn = checked_pow(self.ny, n, entry_cap)?;
        let entries = nxn
            .checked_mul(nyn)
            .ok_or_else(|| Error::CapExceeded("tensor power entry count overflows".into()))?;
        if entries > entry_cap {
            return Err(Error::CapExceeded(format!(
                "tensor power needs {entries} entries, cap is {entry_cap}"
            )));
        }
        let mut rows = Vec::with_capacity(entries);
        let mut xdigits = vec![0usize; n];
        for xn in 0..nxn {
            decode_sequence(xn, self.nx, &mut xdigits);
            // build the row as an iterated product, position 0 fastest
            let mut row = vec![1.0f64];
            for &xi in xdigits.iter() {
                let stride = row.len();
                let mut next = vec![0.0; stride * self.ny];
                for y in 0..self.ny {
                    let wyx = self.w(xi, y);
                    for (old, &val) in row.iter().enumerate() {
                        next[old + y * stride] = val * wyx;
                    }
                }
                row = next;
            }
            rows.extend_from_slice(&row);
        }
        Ok(Self {
            nx: nxn,
            ny: nyn,
            rows,
        })
    }
}

/// A validated density matrix (Hermitian, PSD up to clamping, unit trace).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validate and build. Eigenvalues in `[-1e-10, 0)` are clamped to zero
    /// (and the matrix rebuilt from the clamped spectrum) so downstream
    /// spectral operations see a genuinely PSD operator.
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let defect = hermiticity_defect(&mat);
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |A - A^dagger| entry is {defect:e}"
            )));
        }
        let (vals, vecs) = eigh(&mat);
        if vals[0] < -PSD_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e} beyond tolerance",
                vals[0]
            )));
        }
        let trace: f64 = vals.iter().sum();
        if (trace - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "trace is {trace}, not 1 within {SUM_TOLERANCE:e}"
            )));
        }
        let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let mat = if vals[0] < 0.0 {
            from_spectrum(&clamped, &vecs)
        } else {
            mat
        };
        Ok(Self { mat })
    }

    /// Diagonal state from a probability distribution.
    pub fn from_distribution(p: &ProbDist) -> Self {
        let d = p.len();
        let mut m = CMat::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = C64::new(p[i], 0.0);
        }
        Self { mat: m }
    }

    /// Pure state `|v><v| / <v|v>`.
    pub fn pure_state(v: &[C64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let d = v.len();
        let m = CMat::from_fn(d, d, |i, j| v[i] * v[j].conj() / C64::new(norm2, 0.0));
        Ok(Self { mat: m })
    }

    /// Maximally mixed state on dimension `d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: CMat::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    /// Tensor product with another state.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: self.mat.kronecker(&other.mat),
        }
    }
}

/// A classical-quantum channel `x -> W_x`, all outputs on one `d`-dimensional
/// system.
#[derive(Debug, Clone)]
pub struct CqChannel {
    dim: usize,
    states: Vec<DensityMatrix>,
}

impl CqChannel {
    pub fn new(states: Vec<DensityMatrix>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidChannel("no input states".into()));
        }
        let dim = states[0].dim();
        for (x, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::InvalidChannel(format!(
                    "state {x} has dimension {}, expected {dim}",
                    s.dim()
                )));
            }
        }
        Ok(Self { dim, states })
    }

    /// Embed a classical channel as diagonal states.
    pub fn from_classical(w: &ClassicalChannel) -> Self {
        let states = (0..w.num_inputs())
            .map(|x| {
                DensityMatrix::from_distribution(
                    &ProbDist::new(w.row(x).to_vec()).expect("validated row"),
                )
            })
            .collect();
        Self {
            dim: w.num_outputs(),
            states,
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, x: usize) -> &DensityMatrix {
        &self.states[x]
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Average output state under an input distribution.
    pub fn average_output(&self, p: &ProbDist) -> Result<DensityMatrix> {
        if p.len() != self.num_inputs() {
            return Err(Error::Dimension(format!(
                "input distribution has {} symbols, channel expects {}",
                p.len(),
                self.num_inputs()
            )));
        }
        let mut m = CMat::zeros(self.dim, self.dim);
        for (x, s) in self.states.iter().enumerate() {
            m += s.mat() * C64::new(p[x], 0.0);
        }
        DensityMatrix::new(m)
    }

    /// `n`-fold memoryless extension with little-endian sequence indexing.
    pub fn tensor_power(&self, n: usize, entry_cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("tensor power needs n >= 1".into()));
        }
        let nxn = checked_pow(self.num_inputs(), n, entry_cap)?;
        let dn = checked_pow(self.dim, n, entry_cap)?;
        let entries = nxn
            .checked_mul(dn * dn)
            .ok_or_else(|| Error::CapExceeded("tensor power entry count overflows".into()))?;
        if entries > entry_cap {
            return Err(Error::CapExceeded(format!(
                "tensor power needs {entries} entries, cap is {entry_cap}"
            )));
        }
        let mut states = Vec::with_capacity(nxn);
        let mut digits = vec![0usize; n];
        for xn in 0..nxn {
            decode_sequence(xn, self.num_inputs(), &mut digits);
            // little-endian: position 0 fastest means it is the *left* factor
            // index stride 1, so later positions kronecker from the left.
            let mut m = self.states[digits[0]].mat().clone();
            for &xi in digits.iter().skip(1) {
                m = self.states[xi].mat().kronecker(&m);
            }
            states.push(DensityMatrix { mat: m });
        }
        Ok(Self { dim: dn, states })
    }
}

/// Either kind of channel, as read from a channel file.
#[derive(Debug, Clone)]
pub enum ChannelSpec {
    Classical(ClassicalChannel),
    Cq(CqChannel),
}

impl ChannelSpec {
    pub fn num_inputs(&self) -> usize {
        match self {
            ChannelSpec::Classical(w) => w.num_inputs(),
            ChannelSpec::Cq(w) => w.num_inputs(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            ChannelSpec::Classical(w) => w.num_outputs(),
            ChannelSpec::Cq(w) => w.dim(),
        }
    }
}

/// Message size / rate pair for a block simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSize {
    n: usize,
    rate: f64,
    size: f64,
}

impl SimulationSize {
    /// From a rate in nats: `M = exp(n r)`.
    pub fn from_rate(n: usize, rate: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("block length must be >= 1".into()));
        }
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rate must be finite and nonnegative, got {rate}"
            )));
        }
        Ok(Self {
            n,
            rate,
            size: (n as f64 * rate).exp(),
        })
    }

    /// From a message count `M >= 1` (need not be an integer).
    pub fn from_size(n: usize, size: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("block length must be >= 1".into()));
        }
        if !size.is_finite() || size < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "message size must be finite and >= 1, got {size}"
            )));
        }
        Ok(Self {
            n,
            rate: size.ln() / n as f64,
            size,
        })
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn size(&self) -> f64 {
        self.size
    }
}

/// A type class (empirical histogram) of sequences of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeClass {
    counts: Vec<usize>,
}

impl TypeClass {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument("type needs >= 1 symbol".into()));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// Empirical distribution `counts / n`.
    pub fn empirical(&self) -> ProbDist {
        let n = self.n() as f64;
        ProbDist::new(self.counts.iter().map(|&c| c as f64 / n).collect())
            .expect("counts/n is a distribution")
    }

    /// The canonical sequence of this type: symbols in sorted order,
    /// e.g. counts (2,1) -> (0,0,1).
    pub fn representative(&self) -> Vec<usize> {
        let mut seq = Vec::with_capacity(self.n());
        for (sym, &c) in self.counts.iter().enumerate() {
            seq.extend(std::iter::repeat(sym).take(c));
        }
        seq
    }

    /// Natural log of the number of sequences of this type
    /// (`n! / prod_x n_x!`).
    pub fn ln_multiplicity(&self) -> f64 {
        let n = self.n();
        ln_factorial(n) - self.counts.iter().map(|&c| ln_factorial(c)).sum::<f64>()
    }

    /// Type of an explicit sequence over an alphabet of size `k`.
    pub fn of_sequence(seq: &[usize], k: usize) -> Self {
        let mut counts = vec![0usize; k];
        for &s in seq {
            counts[s] += 1;
        }
        Self { counts }
    }
}

/// All types of length-`n` sequences over `k` symbols, in lexicographically
/// decreasing order of counts. The count is `C(n+k-1, k-1) <= (n+1)^k`.
pub fn enumerate_types(n: usize, k: usize) -> Result<Vec<TypeClass>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument(
            "type enumeration needs n >= 1 and k >= 1".into(),
        ));
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; k];
    fill_types(n, 0, &mut current, &mut out);
    Ok(out)
}

fn fill_types(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<TypeClass>) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(TypeClass {
            counts: current.clone(),
        });
        return;
    }
    for c in (0..=remaining).rev() {
        current[pos] = c;
        fill_types(remaining - c, pos + 1, current, out);
    }
}

/// Dominant type of a permutation-invariant distribution over `X^n`.
///
/// `p` must have length `k^n` (little-endian sequence indexing).
/// Permutation invariance is spot-checked on sampled transpositions at
/// tolerance 1e−9; the returned type always carries aggregated weight at
/// least `(n+1)^{-k}`.
pub fn dominant_type_weight(p: &ProbDist, n: usize, k: usize) -> Result<(TypeClass, f64)> {
    let total = checked_pow(k, n, usize::MAX)?;
    if p.len() != total {
        return Err(Error::Dimension(format!(
            "distribution has {} entries, expected {k}^{n} = {total}",
            p.len()
        )));
    }
    check_permutation_invariance(p, n, k)?;
    let types = enumerate_types(n, k)?;
    let mut index_of = std::collections::HashMap::new();
    for (i, t) in types.iter().enumerate() {
        index_of.insert(t.counts.clone(), i);
    }
    let mut weights = vec![0.0f64; types.len()];
    let mut digits = vec![0usize; n];
    for idx in 0..total {
        decode_sequence(idx, k, &mut digits);
        let t = TypeClass::of_sequence(&digits, k);
        weights[index_of[&t.counts]] += p[idx];
    }
    let (best, &w) = weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let gamma = ((n + 1) as f64).powi(-(k as i32));
    debug_assert!(w >= gamma - 1e-12);
    Ok((types[best].clone(), w))
}

fn check_permutation_invariance(p: &ProbDist, n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Ok(());
    }
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    // deterministic sampling: this is a validation aid, not a statistic
    let mut rng = ChaCha8Rng::seed_from_u64(0x7f4a_91d3);
    let total = p.len();
    let full_scan = total <= 1 << 14;
    let pairs = n.min(6);
    let mut digits = vec![0usize; n];
    for _ in 0..pairs {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n);
        while j == i {
            j = rng.random_range(0..n);
        }
        let indices: Vec<usize> = if full_scan {
            (0..total).collect()
        } else {
            (0..4096).map(|_| rng.random_range(0..total)).collect()
        };
        for idx in indices {
            decode_sequence(idx, k, &mut digits);
            digits.swap(i, j);
            let swapped = encode_sequence(&digits, k);
            digits.swap(i, j);
            if (p[idx] - p[swapped]).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "distribution is not permutation-invariant: transposing \
                     positions {i},{j} changes the weight of sequence {idx} \
                     by {:e}",
                    (p[idx] - p[swapped]).abs()
                )));
            }
        }
    }
    Ok(())
}

/// Decode `idx` into `digits` (little-endian, base `k`).
pub fn decode_sequence(idx: usize, k: usize, digits: &mut [usize]) {
    let mut rest = idx;
    for d in digits.iter_mut() {
        *d = rest % k;
        rest /= k;
    }
}

/// Encode a little-endian digit string in base `k`.
pub fn encode_sequence(digits: &[usize], k: usize) -> usize {
    let mut idx = 0usize;
    for &d in digits.iter().rev() {
        idx = idx * k + d;
    }
    idx
}

/// `base^n`, failing loudly when it exceeds `cap`.
pub fn checked_pow(base: usize, n: usize, cap: usize) -> Result<usize> {
    let mut out = 1usize;
    for _ in 0..n {
        out = out
            .checked_mul(base)
            .ok_or_else(|| Error::CapExceeded(format!("{base}^{n} overflows")))?;
        if out > cap {
            return Err(Error::CapExceeded(format!("{base}^{n} exceeds cap {cap}")));
        }
    }
    Ok(out)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Whether the support of `v` is contained in the support of `w`
/// (strict threshold on both sides).
pub fn support_contained(v: &[f64], w: &[f64]) -> bool {
    v.iter()
        .zip(w.iter())
        .all(|(&a, &b)| a <= SUPPORT_THRESHOLD || b > SUPPORT_THRESHOLD)
}

// ---------------------------------------------------------------------------
// channel files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum RawChannel {
    #[serde(rename = "classical")]
    Classical { matrix: Vec<Vec<f64>> },
    #[serde(rename = "cq")]
    Cq {
        dim: usize,
        states: Vec<RawState>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

/// Parse a channel file: `{"kind":"classical","matrix":[[...]]}` with
/// `matrix[x][y] = W(y|x)`, or `{"kind":"cq","dim":d,"states":[{"re":...,
/// "im":...}]}`. Validation reports the first violated invariant.
pub fn parse_channel(text: &str) -> Result<ChannelSpec> {
    let raw: RawChannel =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel file: {e}")))?;
    match raw {
        RawChannel::Classical { matrix } => {
            Ok(ChannelSpec::Classical(ClassicalChannel::new(matrix)?))
        }
        RawChannel::Cq { dim, states } => {
            if states.is_empty() {
                return Err(Error::InvalidChannel("no input states".into()));
            }
            let mut parsed = Vec::with_capacity(states.len());
            for (x, s) in states.into_iter().enumerate() {
                parsed.push(parse_state(x, dim, s)?);
            }
            Ok(ChannelSpec::Cq(CqChannel::new(parsed)?))
        }
    }
}

fn parse_state(x: usize, dim: usize, raw: RawState) -> Result<DensityMatrix> {
    let check_shape = |name: &str, m: &[Vec<f64>]| -> Result<()> {
        if m.len() != dim || m.iter().any(|r| r.len() != dim) {
            return Err(Error::Parse(format!(
                "state {x}: '{name}' is not a {dim}x{dim} matrix"
            )));
        }
        Ok(())
    };
    check_shape("re", &raw.re)?;
    if let Some(im) = &raw.im {
        check_shape("im", im)?;
    }
    let m = CMat::from_fn(dim, dim, |i, j| {
        C64::new(
            raw.re[i][j],
            raw.im.as_ref().map_or(0.0, |im| im[i][j]),
        )
    });
    DensityMatrix::new(m).map_err(|e| Error::InvalidState(format!("state {x}: {e}")))
}

/// Serialize a classical channel into the channel-file format.
pub fn classical_to_json(w: &ClassicalChannel) -> String {
    let rows: Vec<Vec<f64>> = (0..w.num_inputs()).map(|x| w.row(x).to_vec()).collect();
    serde_json::json!({"kind": "classical", "matrix": rows}).to_string()
}

/// Convert a CQ channel's states to plain matrices (helper for tests/tools).
pub fn cq_state_mats(w: &CqChannel) -> Vec<DMatrix<C64>> {
    w.states().iter().map(|s| s.mat().clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn probdist_clamps_dust_and_rejects_garbage() {
        let p = ProbDist::new(vec![0.5, 0.5 + 5e-13, -5e-13]).unwrap();
        assert_eq!(p[2], 0.0);
        assert!(ProbDist::new(vec![0.5, 0.5, -1e-9]).is_err());
        assert!(ProbDist::new(vec![0.6, 0.6]).is_err());
    }

    #[test]
    fn identity_tensor_power_is_identity() {
        let w = ClassicalChannel::identity(2);
        let w2 = w.tensor_power(2, DEFAULT_ENTRY_CAP).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(w2.w(x, y), if x == y { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn singleton_tensor_power() {
        let w = ClassicalChannel::new(vec![vec![1.0]]).unwrap();
        let w5 = w.tensor_power(5, DEFAULT_ENTRY_CAP).unwrap();
        assert_eq!(w5.num_inputs(), 1);
        assert_eq!(w5.num_outputs(), 1);
        assert_eq!(w5.w(0, 0), 1.0);
    }

    #[test]
    fn bsc_tensor_power_entries_are_products() {
        let w = ClassicalChannel::bsc(0.1).unwrap();
        let w2 = w.tensor_power(2, DEFAULT_ENTRY_CAP).unwrap();
        // (00|00): 0.9 * 0.9
        assert_relative_eq!(w2.w(0, 0), 0.81, epsilon = 1e-15);
        // little-endian: x = (0,1) has index 2, y = (1,1) has index 3
        assert_relative_eq!(w2.w(2, 3), 0.1 * 0.9, epsilon = 1e-15);
        // rows are stochastic
        for x in 0..4 {
            let s: f64 = w2.row(x).iter().sum();
            assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tensor_power_respects_cap() {
        let w = ClassicalChannel::identity(4);
        assert!(matches!(
            w.tensor_power(9, 1 << 26),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn type_enumeration_matches_binomial_counts() {
        let ts = enumerate_types(2, 2).unwrap();
        let counts: Vec<&[usize]> = ts.iter().map(|t| t.counts()).collect();
        assert_eq!(counts, vec![&[2, 0][..], &[1, 1], &[0, 2]]);
        assert_eq!(enumerate_types(1, 1).unwrap().len(), 1);
        assert_eq!(enumerate_types(3, 2).unwrap().len(), 4);
        // C(n+k-1, k-1) for n=4, k=3 is 15
        assert_eq!(enumerate_types(4, 3).unwrap().len(), 15);
        // and the coarse bound (n+1)^k holds for all small cases
        for n in 1..=12 {
            for k in 1..=4 {
                let c = enumerate_types(n, k).unwrap().len();
                assert!(c <= (n + 1usize).pow(k as u32));
            }
        }
    }

    #[test]
    fn representatives_are_sorted_sequences() {
        assert_eq!(TypeClass::new(vec![2, 1]).unwrap().representative(), vec![0, 0, 1]);
        assert_eq!(TypeClass::new(vec![0, 3]).unwrap().representative(), vec![1, 1, 1]);
        assert_eq!(
            TypeClass::new(vec![1, 1, 1]).unwrap().representative(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn dominant_type_of_uniform_pairs() {
        let p = ProbDist::uniform(4); // uniform over {0,1}^2
        let (t, w) = dominant_type_weight(&p, 2, 2).unwrap();
        assert_eq!(t.counts(), &[1, 1]);
        assert_relative_eq!(w, 0.5, epsilon = 1e-12);
        assert!(w >= 1.0 / 9.0);
    }

    #[test]
    fn dominant_type_point_mass_and_bernoulli() {
        let p = ProbDist::point(8, 0); // delta on (0,0,0)
        let (t, w) = dominant_type_weight(&p, 3, 2).unwrap();
        assert_eq!(t.counts(), &[3, 0]);
        assert_relative_eq!(w, 1.0, epsilon = 1e-15);

        let p = ProbDist::uniform(8); // iid Bern(1/2)^3: type weights 1/8,3/8,3/8,1/8
        let (_, w) = dominant_type_weight(&p, 3, 2).unwrap();
        assert_relative_eq!(w, 0.375, epsilon = 1e-12);
        assert!(w >= 1.0 / 16.0);
    }

    #[test]
    fn permutation_invariance_is_enforced() {
        // not permutation invariant: weight differs between (0,1) and (1,0)
        let p = ProbDist::new(vec![0.4, 0.3, 0.1, 0.2]).unwrap();
        assert!(dominant_type_weight(&p, 2, 2).is_err());
    }

    #[test]
    fn simulation_size_round_trips() {
        let s = SimulationSize::from_rate(4, 0.25).unwrap();
        assert_relative_eq!(s.size(), 1.0f64.exp(), epsilon = 1e-12);
        let t = SimulationSize::from_size(4, s.size()).unwrap();
        assert_relative_eq!(t.rate(), 0.25, epsilon = 1e-12);
        assert!(SimulationSize::from_size(2, 0.5).is_err());
        assert!(SimulationSize::from_rate(2, -0.1).is_err());
    }

    #[test]
    fn parse_classical_channel_file() {
        let spec = parse_channel(r#"{"kind":"classical","matrix":[[0.9,0.1],[0.2,0.8]]}"#).unwrap();
        match spec {
            ChannelSpec::Classical(w) => {
                assert_eq!(w.num_inputs(), 2);
                assert_relative_eq!(w.w(1, 0), 0.2);
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn parse_reports_first_violation() {
        let err = parse_channel(r#"{"kind":"classical","matrix":[[0.9,0.2],[0.2,0.8]]}"#)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 0"), "unexpected message: {msg}");
    }

    #[test]
    fn parse_cq_channel_file() {
        let text = r#"{
            "kind": "cq", "dim": 2,
            "states": [
                {"re": [[1.0, 0.0], [0.0, 0.0]]},
                {"re": [[0.5, 0.0], [0.0, 0.5]], "im": [[0.0, -0.25], [0.25, 0.0]]}
            ]
        }"#;
        match parse_channel(text).unwrap() {
            ChannelSpec::Cq(w) => {
                assert_eq!(w.num_inputs(), 2);
                assert_eq!(w.dim(), 2);
                assert_relative_eq!(w.state(1).mat()[(0, 1)].im, -0.25, epsilon = 1e-15);
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn parse_rejects_non_state() {
        let text = r#"{
            "kind": "cq", "dim": 2,
            "states": [{"re": [[0.9, 0.0], [0.0, 0.0]]}]
        }"#;
        let err = parse_channel(text).unwrap_err();
        assert!(err.to_string().contains("state 0"));
    }

    #[test]
    fn cq_tensor_power_matches_classical_diagonal() {
        let w = ClassicalChannel::new(vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
        let wq = CqChannel::from_classical(&w);
        let w2 = w.tensor_power(2, DEFAULT_ENTRY_CAP).unwrap();
        let wq2 = wq.tensor_power(2, DEFAULT_ENTRY_CAP).unwrap();
        assert_eq!(wq2.num_inputs(), 4);
        assert_eq!(wq2.dim(), 4);
        // position 0 is the fastest joint index in both models
        for x in 0..4 {
            for y in 0..4 {
                assert_relative_eq!(wq2.state(x).mat()[(y, y)].re, w2.w(x, y), epsilon = 1e-14);
            }
        }
        // explicitly: x = (x_0=1, x_1=0) has index 1 and state
        // W_{x_1} (x) W_{x_0} in kron order (position 0 innermost / fastest)
        let expect = wq.state(0).mat().kronecker(wq.state(1).mat());
        assert!((wq2.state(1).mat() - expect).norm() < 1e-14);
    }

    #[test]
    fn sequence_codec_round_trips() {
        let mut digits = vec![0usize; 3];
        for idx in 0..27 {
            decode_sequence(idx, 3, &mut digits);
            assert_eq!(encode_sequence(&digits, 3), idx);
        }
    }
}
