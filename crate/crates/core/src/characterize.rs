//! Limit characterizations along `Z → ∞`.
//!
//! `Z → ∞` means the smallest eigenvalue modulus grows without bound. A path
//! fixes a unit-modulus eigenvalue direction `v` and walks `u = t·v` over
//! increasing scales `t`. Along it, channel `i` of `S (Z·D[F]·F⁺) S⁻¹` is
//! `u_i F_i'(u_i) / F_i(u_i)`, which tends to the divisor of `F_i` when `F_i`
//! is rational and diverges otherwise. The error tail is `c/t`, so one level
//! of Richardson extrapolation is applied before rounding.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circulant::Circulant;
use crate::error::{Error, Result};
use crate::funcalc::{ChannelFunction, CircFunction, CircPoly, ScalarPoly, DEFAULT_CLASSIFY_TOL};
use crate::spectral::{self, Spectrum};

/// Fractional part of the golden ratio.
pub const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_9;

/// Slack allowed when checking that errors decrease, to absorb rounding.
const MONOTONE_SLACK: f64 = 1e-9;

/// `v_i = exp(2πi · φ · (i − 1))`.
pub fn golden_direction(d: usize) -> Vec<Complex64> {
    (0..d).map(|i| Complex64::from_polar(1.0, std::f64::consts::TAU * GOLDEN_FRACTION * i as f64)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSpec {
    /// Unit-modulus eigenvalue direction, one entry per channel.
    pub direction: Vec<Complex64>,
    /// Strictly increasing positive scales.
    pub scales: Vec<f64>,
    /// Extra attempts with random directions after a singular or
    /// non-convergent pass.
    pub phase_retries: usize,
    pub seed: u64,
    pub richardson: bool,
    pub round_tol: f64,
}

impl PathSpec {
    /// Golden-ratio direction, six scales from `10³` to `10⁸`.
    pub fn new(d: usize) -> Self {
        Self::geometric(d, 1e3, 1e8, 6).expect("default scales are valid")
    }

    pub fn geometric(d: usize, t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if t_min.is_nan() || t_min <= 0.0 || !t_max.is_finite() || t_max <= t_min {
            return Err(Error::InvalidPath(format!("need 0 < t_min < t_max, got {t_min} and {t_max}")));
        }
        if points < 4 {
            return Err(Error::InvalidPath(format!("need at least 4 scales, got {points}")));
        }
        let ratio = (t_max / t_min).ln() / (points - 1) as f64;
        let scales = (0..points).map(|k| t_min * (ratio * k as f64).exp()).collect();
        Ok(Self {
            direction: golden_direction(d),
            scales,
            phase_retries: 5,
            seed: 0,
            richardson: true,
            round_tol: 1e-3,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.direction.len() != d {
            return Err(Error::InvalidPath(format!(
                "direction has {} entries, function order is {d}",
                self.direction.len()
            )));
        }
        if self.direction.iter().any(|v| (v.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidPath("direction entries must have unit modulus".into()));
        }
        if self.scales.iter().any(|t| !t.is_finite() || *t <= 0.0) || self.scales.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath("scales must be positive, finite and increasing".into()));
        }
        let needed = if self.richardson { 4 } else { 3 };
        if self.scales.len() < needed {
            return Err(Error::InvalidPath(format!("need at least {needed} scales")));
        }
        if self.round_tol.is_nan() || self.round_tol <= 0.0 {
            return Err(Error::InvalidTolerance(self.round_tol));
        }
        Ok(())
    }

    /// The circulant with eigenvalues `t · direction`.
    pub fn point(&self, t: f64) -> Result<Circulant> {
        spectral::from_values(self.direction.iter().map(|v| v * t).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelStatus {
    Converged,
    Divergent,
    /// The channel function vanishes identically or has an identically zero
    /// denominator; no limit is defined.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelEstimate {
    /// 1-based channel index.
    pub channel: usize,
    pub status: ChannelStatus,
    /// Raw estimates, one per scale.
    pub estimates: Vec<Complex64>,
    /// Final estimate after extrapolation (or the raw final value when
    /// extrapolation is off).
    pub final_estimate: Option<Complex64>,
    /// Rounded limit, present when converged.
    pub limit: Option<i64>,
    /// `|final_estimate − limit|`.
    pub error: Option<f64>,
}

fn richardson(scales: &[f64], est: &[Complex64]) -> Vec<Complex64> {
    scales.windows(2).zip(est.windows(2)).map(|(t, e)| (e[1] * t[1] - e[0] * t[0]) / (t[1] - t[0])).collect()
}

fn analyze(channel: usize, scales: &[f64], est: Vec<Complex64>, path: &PathSpec) -> ChannelEstimate {
    let seq = if path.richardson { richardson(scales, &est) } else { est.clone() };
    let last = *seq.last().expect("validated length");
    let mut out = ChannelEstimate {
        channel,
        status: ChannelStatus::Divergent,
        estimates: est,
        final_estimate: Some(last),
        limit: None,
        error: None,
    };
    if !seq.iter().all(|z| z.is_finite()) || last.re.abs() > 1e15 {
        return out;
    }
    let k = last.re.round();
    let errs: Vec<f64> = seq[seq.len() - 3..].iter().map(|z| (z - Complex64::new(k, 0.0)).norm()).collect();
    let close = errs.iter().all(|&e| e <= path.round_tol);
    let decreasing = errs.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    if close && decreasing {
        out.status = ChannelStatus::Converged;
        out.limit = Some(k as i64);
        out.error = Some(errs[2]);
    }
    out
}

enum Pass {
    Singular { channel: usize },
    Done(Vec<ChannelEstimate>),
}

/// Runs one quantity along the path with phase retries.
///
/// `quantity(channel, u)` returns `None` at a zero or pole of the channel.
/// Degenerate channels are reported as indeterminate and never evaluated.
fn trace<Q>(d: usize, degenerate: &[bool], path: &PathSpec, quantity: Q) -> Result<(Vec<ChannelEstimate>, PathSpec)>
where
    Q: Fn(usize, Complex64) -> Option<Complex64>,
{
    path.validate(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(path.seed);
    let mut current = path.clone();
    let mut attempt = 0;
    loop {
        let pass = run_pass(&current, degenerate, &quantity)?;
        let retry = match &pass {
            Pass::Singular { .. } => true,
            Pass::Done(ch) => ch.iter().any(|c| c.status == ChannelStatus::Divergent),
        };
        if !retry || attempt >= path.phase_retries {
            return match pass {
                Pass::Singular { channel } => Err(Error::ChannelSingularity { channel }),
                Pass::Done(ch) => Ok((ch, current)),
            };
        }
        attempt += 1;
        current.direction =
            (0..d).map(|_| Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())).collect();
    }
}

fn run_pass<Q>(path: &PathSpec, degenerate: &[bool], quantity: &Q) -> Result<Pass>
where
    Q: Fn(usize, Complex64) -> Option<Complex64>,
{
    let d = degenerate.len();
    let mut est = vec![Vec::with_capacity(path.scales.len()); d];
    for &t in &path.scales {
        let u = spectral::spectrum(&path.point(t)?);
        for (i, &ui) in u.values().iter().enumerate() {
            if degenerate[i] {
                continue;
            }
            match quantity(i, ui) {
                Some(v) => est[i].push(v),
                None => return Ok(Pass::Singular { channel: i + 1 }),
            }
        }
    }
    Ok(Pass::Done(
        est.into_iter()
            .enumerate()
            .map(|(i, e)| {
                if degenerate[i] {
                    ChannelEstimate {
                        channel: i + 1,
                        status: ChannelStatus::Indeterminate,
                        estimates: Vec::new(),
                        final_estimate: None,
                        limit: None,
                        error: None,
                    }
                } else {
                    analyze(i + 1, &path.scales, e, path)
                }
            })
            .collect(),
    ))
}

/// Channel functions with negligible leading coefficients dropped, so that
/// rounding residue in a singular coefficient does not masquerade as a
/// genuine high-order term once `|u|` is large. Also flags degenerate
/// channels.
fn path_channels(f: &CircFunction) -> (Vec<ChannelFunction>, Vec<bool>) {
    let tol = |p: &CircPoly| DEFAULT_CLASSIFY_TOL * p.spectral_scale();
    let trim = |p: &CircPoly| -> Vec<ScalarPoly> {
        let abs = tol(p);
        p.channel_polys().iter().map(|c| c.trimmed(abs)).collect()
    };
    let channels: Vec<ChannelFunction> = match f {
        CircFunction::Poly(p) => trim(p).into_iter().map(ChannelFunction::Poly).collect(),
        CircFunction::Rational { p, q } => {
            trim(p).into_iter().zip(trim(q)).map(|(p, q)| ChannelFunction::Rational { p, q }).collect()
        }
        CircFunction::ExpPoly { p, g } => {
            trim(p).into_iter().zip(trim(g)).map(|(p, g)| ChannelFunction::ExpPoly { p, g }).collect()
        }
    };
    let degenerate = channels
        .iter()
        .zip(f.channel_functions())
        .map(|(_, raw)| {
            let abs = match f {
                CircFunction::Poly(p) | CircFunction::ExpPoly { p, .. } => tol(p),
                CircFunction::Rational { p, q } => tol(p).max(tol(q)),
            };
            raw.is_degenerate(abs)
        })
        .collect();
    (channels, degenerate)
}

/// Channel values `u_i F_i'(u_i) / F_i(u_i)`: the diagonal of
/// `S (Z·D[F(Z)]·F(Z)⁺) S⁻¹`.
pub fn logderiv_diag(f: &CircFunction, z: &Circulant) -> Result<Spectrum> {
    if f.order() != z.order() {
        return Err(Error::OrderMismatch { expected: f.order(), found: z.order() });
    }
    let u = spectral::spectrum(z);
    let values = f
        .channel_functions()
        .iter()
        .zip(u.values())
        .enumerate()
        .map(|(i, (fi, &ui))| fi.log_derivative(ui).map(|l| ui * l).ok_or(Error::ChannelSingularity { channel: i + 1 }))
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisorVerdict {
    Rational,
    NotRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorReport {
    pub verdict: DivisorVerdict,
    pub channels: Vec<ChannelEstimate>,
    /// Common divisor `k` when every channel converged to the same value.
    pub divisor: Option<i64>,
    /// Nominal degrees `n` of `P` and `m` of `Q`.
    pub numerator_degree: usize,
    pub denominator_degree: usize,
    /// Whether every converged channel lies in `[-m, n]`.
    pub within_bounds: bool,
    /// When both `P` and `Q` are regular: whether the divisor equals `n − m`.
    pub regular_check: Option<bool>,
    pub scales: Vec<f64>,
    /// Direction actually used (after any phase retries).
    pub direction: Vec<Complex64>,
}

fn common_limit(channels: &[ChannelEstimate]) -> Option<i64> {
    let first = channels.first()?.limit?;
    channels.iter().all(|c| c.status == ChannelStatus::Converged && c.limit == Some(first)).then_some(first)
}

/// Divisor estimation for polynomial and rational functions.
pub fn estimate_divisor(f: &CircFunction, path: &PathSpec) -> Result<DivisorReport> {
    let (p, q): (&CircPoly, Option<&CircPoly>) = match f {
        CircFunction::Poly(p) => (p, None),
        CircFunction::Rational { p, q } => (p, Some(q)),
        CircFunction::ExpPoly { .. } => {
            return Err(Error::InvalidFunction("divisor estimation needs a polynomial or rational function".into()))
        }
    };
    let (channels, degenerate) = path_channels(f);
    if degenerate.iter().all(|&x| x) {
        return Err(Error::InvalidFunction("function vanishes identically".into()));
    }
    let (estimates, used) = trace(f.order(), &degenerate, path, |i, u| channels[i].log_derivative(u).map(|l| u * l))?;

    let n = p.degree();
    let m = q.map_or(0, CircPoly::degree);
    let verdict = if estimates.iter().any(|c| c.status == ChannelStatus::Divergent) {
        DivisorVerdict::NotRational
    } else {
        DivisorVerdict::Rational
    };
    let divisor = common_limit(&estimates);
    let within_bounds = estimates.iter().filter_map(|c| c.limit).all(|k| -(m as i64) <= k && k <= n as i64);
    let both_regular = p.is_regular() && q.is_none_or(CircPoly::is_regular);
    let regular_check = both_regular.then(|| divisor == Some(n as i64 - m as i64));
    Ok(DivisorReport {
        verdict,
        channels: estimates,
        divisor,
        numerator_degree: n,
        denominator_degree: m,
        within_bounds,
        regular_check,
        scales: used.scales,
        direction: used.direction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ZeroBound {
    Matched {
        n: u64,
        /// `n^d`; `None` if it does not fit in 128 bits.
        bound: Option<u128>,
    },
    NotMatched,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroBoundReport {
    pub result: ZeroBound,
    pub channels: Vec<ChannelEstimate>,
    /// When the witness equals `G'` channel-wise: whether `n` equals the
    /// effective degree of every `P_i`.
    pub degree_check: Option<bool>,
    pub scales: Vec<f64>,
    pub direction: Vec<Complex64>,
}

/// Zero-count bound for an entire function `F = P·exp(G)` (or a polynomial)
/// with a caller-supplied entire witness `qent`: the channels of
/// `S (Z·D[F]·F⁺ − Z·qent(Z)) S⁻¹`, i.e. `u_i (F_i'/F_i − q_i(u_i))`, must
/// all tend to one integer `n ≥ 0`.
pub fn entire_zero_bound(f: &CircFunction, qent: &CircFunction, path: &PathSpec) -> Result<ZeroBoundReport> {
    let (p, g) = match f {
        CircFunction::ExpPoly { p, g } => (p, Some(g)),
        CircFunction::Poly(p) => (p, None),
        CircFunction::Rational { .. } => {
            return Err(Error::InvalidFunction("zero bound needs an entire function".into()))
        }
    };
    if matches!(qent, CircFunction::Rational { .. }) {
        return Err(Error::InvalidFunction("witness must be entire (poly or exppoly)".into()));
    }
    if qent.order() != f.order() {
        return Err(Error::OrderMismatch { expected: f.order(), found: qent.order() });
    }
    let (channels, degenerate) = path_channels(f);
    let witness = qent.channel_functions();
    if degenerate.iter().any(|&x| x) {
        return Err(Error::InvalidFunction("entire function must be nonzero on every channel".into()));
    }
    // When the witness is a polynomial, form `G_i' − q_i` coefficient-wise so
    // a witness equal to `G'` cancels exactly instead of in floating point.
    let shifts: Vec<Option<(ChannelFunction, ScalarPoly)>> = channels
        .iter()
        .zip(&witness)
        .map(|(fi, wi)| {
            let (ChannelFunction::Poly(q), p, g_prime) = (wi, fi_numerator(fi), fi_exponent_derivative(fi)) else {
                return None;
            };
            Some((ChannelFunction::Poly(p), poly_sub(&g_prime, q)))
        })
        .collect();
    let (estimates, used) = trace(f.order(), &degenerate, path, |i, u| match &shifts[i] {
        Some((pf, shift)) => Some(u * (pf.log_derivative(u)? + shift.eval(u))),
        None => Some(u * (channels[i].log_derivative(u)? - witness[i].value(u))),
    })?;

    let result = match common_limit(&estimates) {
        Some(n) if n >= 0 => {
            let n = n as u64;
            ZeroBound::Matched { n, bound: (n as u128).checked_pow(f.order() as u32) }
        }
        _ => ZeroBound::NotMatched,
    };

    let degree_check = match (&result, qent) {
        (ZeroBound::Matched { n, .. }, CircFunction::Poly(w)) if witness_is_exponent_derivative(w, g) => {
            let abs = DEFAULT_CLASSIFY_TOL * p.spectral_scale();
            Some(p.channel_polys().iter().all(|c| c.effective_degree(abs) == Some(*n as usize)))
        }
        _ => None,
    };
    Ok(ZeroBoundReport { result, channels: estimates, degree_check, scales: used.scales, direction: used.direction })
}

fn fi_numerator(f: &ChannelFunction) -> ScalarPoly {
    match f {
        ChannelFunction::Poly(p) | ChannelFunction::ExpPoly { p, .. } | ChannelFunction::Rational { p, .. } => {
            p.clone()
        }
    }
}

fn fi_exponent_derivative(f: &ChannelFunction) -> ScalarPoly {
    match f {
        ChannelFunction::ExpPoly { g, .. } => g.derivative(),
        ChannelFunction::Poly(p) | ChannelFunction::Rational { p, .. } => ScalarPoly::new(p.channel, Vec::new()),
    }
}

/// `a − b` on leading-first coefficient lists.
fn poly_sub(a: &ScalarPoly, b: &ScalarPoly) -> ScalarPoly {
    let (na, nb) = (a.coeffs().len(), b.coeffs().len());
    let n = na.max(nb);
    let coeffs = (0..n)
        .map(|k| {
            let x = if k + na >= n { a.coeffs()[k + na - n] } else { Complex64::new(0.0, 0.0) };
            let y = if k + nb >= n { b.coeffs()[k + nb - n] } else { Complex64::new(0.0, 0.0) };
            x - y
        })
        .collect();
    ScalarPoly::new(a.channel, coeffs)
}

fn witness_is_exponent_derivative(w: &CircPoly, g: Option<&CircPoly>) -> bool {
    let d = w.order();
    let g_prime = match g {
        Some(g) => g.formal_derivative(),
        None => CircPoly::constant(Circulant::zero(d).expect("order >= 2")),
    };
    let Ok(diff) = w.add(
        &g_prime.scale_by(&Circulant::scalar(d, Complex64::new(-1.0, 0.0)).expect("order >= 2")).expect("equal orders"),
    ) else {
        return false;
    };
    let scale = w.spectral_scale().max(g_prime.spectral_scale()).max(1.0);
    diff.coeffs().iter().all(|c| c.frobenius_norm() <= 1e-12 * scale)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DegreeOutcome {
    Degree { n: u64 },
    NotPolynomial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport {
    pub result: DegreeOutcome,
    pub channels: Vec<ChannelEstimate>,
    pub scales: Vec<f64>,
    pub direction: Vec<Complex64>,
}

/// Degree detection: `n` when every channel of `u F'/F` tends to the same
/// integer `n ≥ 0`.
pub fn detect_poly_degree(f: &CircFunction, path: &PathSpec) -> Result<DegreeReport> {
    let (channels, degenerate) = path_channels(f);
    if degenerate.iter().all(|&x| x) {
        return Err(Error::InvalidFunction("function vanishes identically".into()));
    }
    let (estimates, used) = trace(f.order(), &degenerate, path, |i, u| channels[i].log_derivative(u).map(|l| u * l))?;
    let result = match common_limit(&estimates) {
        Some(n) if n >= 0 => DegreeOutcome::Degree { n: n as u64 },
        _ => DegreeOutcome::NotPolynomial,
    };
    Ok(DegreeReport { result, channels: estimates, scales: used.scales, direction: used.direction })
}
