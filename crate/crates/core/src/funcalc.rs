//! Polynomial, rational and exponential-polynomial functions with circulant
//! coefficients.
//!
//! Every such function acts channel by channel: conjugating by `S` turns
//! `F(Z)` into `diag(F_1(u_1), …, F_d(u_d))`, where `F_i` is an ordinary
//! scalar function whose coefficients are the `i`-th eigenvalues of the
//! circulant coefficients. Derivatives are taken through that reduction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circulant::Circulant;
use crate::error::{Error, Result};
use crate::spectral::{self, default_rank_tol, Spectrum};

/// Default relative tolerance used by [`CircPoly::classify`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One channel of a circulant polynomial: `c_0 u^n + … + c_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarPoly {
    /// 0-based channel index.
    pub channel: usize,
    coeffs: Vec<Complex64>,
}

impl ScalarPoly {
    /// Coefficients are leading-first. An empty list is the zero polynomial.
    pub fn new(channel: usize, coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![ZERO] } else { coeffs };
        Self { channel, coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs.iter().fold(ZERO, |acc, &c| acc * u + c)
    }

    /// Value together with `Σ |c_k| |u|^{n-k}`, the scale against which
    /// rounding in the value should be judged.
    pub fn eval_with_scale(&self, u: Complex64) -> (Complex64, f64) {
        let r = u.norm();
        let mut value = ZERO;
        let mut scale = 0.0;
        for &c in &self.coeffs {
            value = value * u + c;
            scale = scale * r + c.norm();
        }
        (value, scale)
    }

    pub fn derivative(&self) -> ScalarPoly {
        let n = self.nominal_degree();
        if n == 0 {
            return ScalarPoly::new(self.channel, vec![ZERO]);
        }
        let coeffs = self.coeffs[..n].iter().enumerate().map(|(k, &c)| c * (n - k) as f64).collect();
        ScalarPoly::new(self.channel, coeffs)
    }

    /// Largest coefficient modulus.
    pub fn coefficient_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients with modulus `≤ abs_tol`, keeping at least one.
    pub fn trimmed(&self, abs_tol: f64) -> ScalarPoly {
        let first = self.coeffs.iter().position(|c| c.norm() > abs_tol).unwrap_or(self.nominal_degree());
        ScalarPoly::new(self.channel, self.coeffs[first..].to_vec())
    }

    /// `None` when every coefficient is within `abs_tol` of zero.
    pub fn effective_degree(&self, abs_tol: f64) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm() > abs_tol).map(|first| self.nominal_degree() - first)
    }
}

/// `A_0 Z^n + A_1 Z^{n-1} + … + A_n` with circulant coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CircPoly {
    coeffs: Vec<Circulant>,
}

/// Outcome of [`CircPoly::classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyClass {
    Regular,
    Singular,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub class: PolyClass,
    /// Eigenvalues of the leading coefficient, by channel.
    pub leading: Vec<Complex64>,
    /// 1-based channels whose leading eigenvalue vanishes.
    pub vanishing_channels: Vec<usize>,
}

impl CircPoly {
    /// Coefficients are leading-first and must share one order.
    pub fn new(coeffs: Vec<Circulant>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::InvalidFunction("polynomial needs at least one coefficient".into()));
        };
        let d = first.order();
        if let Some(bad) = coeffs.iter().find(|c| c.order() != d) {
            return Err(Error::OrderMismatch { expected: d, found: bad.order() });
        }
        Ok(Self { coeffs })
    }

    pub fn constant(a: Circulant) -> Self {
        Self { coeffs: vec![a] }
    }

    /// The identity function `Z`.
    pub fn variable(d: usize) -> Result<Self> {
        Self::monomial(d, 1)
    }

    /// `Z^n`.
    pub fn monomial(d: usize, n: usize) -> Result<Self> {
        let mut coeffs = vec![Circulant::zero(d)?; n + 1];
        coeffs[0] = Circulant::identity(d)?;
        Ok(Self { coeffs })
    }

    /// Polynomial whose coefficients are scalar multiples of `I`, leading-first.
    pub fn from_scalars(d: usize, scalars: &[Complex64]) -> Result<Self> {
        let coeffs = scalars.iter().map(|&a| Circulant::scalar(d, a)).collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    /// Real-valued shorthand for [`CircPoly::from_scalars`].
    pub fn from_real_scalars(d: usize, scalars: &[f64]) -> Result<Self> {
        let s: Vec<Complex64> = scalars.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_scalars(d, &s)
    }

    pub fn order(&self) -> usize {
        self.coeffs[0].order()
    }

    /// Nominal degree `n` (number of coefficients minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Circulant] {
        &self.coeffs
    }

    pub fn leading(&self) -> &Circulant {
        &self.coeffs[0]
    }

    fn check_order(&self, d: usize) -> Result<()> {
        if self.order() != d {
            return Err(Error::OrderMismatch { expected: self.order(), found: d });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        other.check_order(self.order())?;
        let n = self.degree().max(other.degree());
        let d = self.order();
        let mut coeffs = vec![Circulant::zero(d)?; n + 1];
        for (src, off) in [(self, n - self.degree()), (other, n - other.degree())] {
            for (k, c) in src.coeffs.iter().enumerate() {
                coeffs[off + k] = coeffs[off + k].add(c)?;
            }
        }
        Ok(Self { coeffs })
    }

    /// Polynomial product in the commutative ring.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        other.check_order(self.order())?;
        let d = self.order();
        let mut coeffs = vec![Circulant::zero(d)?; self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(Self { coeffs })
    }

    /// `A · P(Z)`.
    pub fn scale_by(&self, a: &Circulant) -> Result<Self> {
        self.check_order(a.order())?;
        let coeffs = self.coeffs.iter().map(|c| a.mul(c)).collect::<Result<Vec<_>>>()?;
        Ok(Self { coeffs })
    }

    /// Term-by-term derivative `Σ (n-k) A_k Z^{n-k-1}`.
    pub fn formal_derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self { coeffs: vec![Circulant::zero(self.order()).expect("order >= 2")] };
        }
        let coeffs =
            self.coeffs[..n].iter().enumerate().map(|(k, c)| c.scale(Complex64::new((n - k) as f64, 0.0))).collect();
        Self { coeffs }
    }

    /// Horner evaluation in the circulant ring.
    pub fn eval(&self, z: &Circulant) -> Result<Circulant> {
        self.check_order(z.order())?;
        let mut acc = self.coeffs[0].clone();
        for c in &self.coeffs[1..] {
            acc = acc.mul(z)?.add(c)?;
        }
        Ok(acc)
    }

    /// The `d` scalar polynomials obtained by diagonalizing every coefficient.
    pub fn channel_polys(&self) -> Vec<ScalarPoly> {
        let spectra: Vec<Spectrum> = self.coeffs.iter().map(spectral::spectrum).collect();
        (0..self.order()).map(|i| ScalarPoly::new(i, spectra.iter().map(|s| s.values()[i]).collect())).collect()
    }

    /// Largest eigenvalue modulus over all coefficients.
    pub fn spectral_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| spectral::spectrum(c).max_modulus()).fold(0.0, f64::max)
    }

    /// Regular iff every eigenvalue of `A_0` exceeds `rel_tol` times the
    /// largest eigenvalue modulus among all coefficients.
    pub fn classify(&self, rel_tol: f64) -> ClassifyReport {
        let leading = spectral::spectrum(&self.coeffs[0]).into_values();
        let cutoff = rel_tol * self.spectral_scale();
        let vanishing_channels: Vec<usize> =
            leading.iter().enumerate().filter(|(_, u)| u.norm() <= cutoff).map(|(i, _)| i + 1).collect();
        let class = if vanishing_channels.is_empty() { PolyClass::Regular } else { PolyClass::Singular };
        ClassifyReport { class, leading, vanishing_channels }
    }

    pub fn is_regular(&self) -> bool {
        self.classify(DEFAULT_CLASSIFY_TOL).class == PolyClass::Regular
    }

    /// True when at least one coefficient is invertible.
    pub fn has_invertible_coefficient(&self) -> bool {
        self.coeffs.iter().any(|c| spectral::is_invertible(c, default_rank_tol(c.order())))
    }
}

/// Free-function form of [`CircPoly::eval`].
pub fn poly_eval(p: &CircPoly, z: &Circulant) -> Result<Circulant> {
    p.eval(z)
}

/// Free-function form of [`CircPoly::channel_polys`].
pub fn channel_polys(p: &CircPoly) -> Vec<ScalarPoly> {
    p.channel_polys()
}

/// A function on the circulant ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionRepr", into = "FunctionRepr")]
pub enum CircFunction {
    Poly(CircPoly),
    /// `P(Z) · Q(Z)⁺`.
    Rational {
        p: CircPoly,
        q: CircPoly,
    },
    /// `P(Z) · exp(G(Z))`, the exponential applied channel-wise.
    ExpPoly {
        p: CircPoly,
        g: CircPoly,
    },
}

impl CircFunction {
    pub fn poly(p: CircPoly) -> Self {
        CircFunction::Poly(p)
    }

    /// Requires equal orders and at least one invertible coefficient in `q`.
    pub fn rational(p: CircPoly, q: CircPoly) -> Result<Self> {
        q.check_order(p.order())?;
        if !q.has_invertible_coefficient() {
            return Err(Error::InvalidFunction("denominator must have at least one invertible coefficient".into()));
        }
        Ok(CircFunction::Rational { p, q })
    }

    pub fn exp_poly(p: CircPoly, g: CircPoly) -> Result<Self> {
        g.check_order(p.order())?;
        Ok(CircFunction::ExpPoly { p, g })
    }

    pub fn order(&self) -> usize {
        match self {
            CircFunction::Poly(p) | CircFunction::Rational { p, .. } | CircFunction::ExpPoly { p, .. } => p.order(),
        }
    }

    /// The numerator polynomial.
    pub fn numerator(&self) -> &CircPoly {
        match self {
            CircFunction::Poly(p) | CircFunction::Rational { p, .. } | CircFunction::ExpPoly { p, .. } => p,
        }
    }

    /// Scalar channel functions `F_1..F_d`.
    pub fn channel_functions(&self) -> Vec<ChannelFunction> {
        match self {
            CircFunction::Poly(p) => p.channel_polys().into_iter().map(ChannelFunction::Poly).collect(),
            CircFunction::Rational { p, q } => p
                .channel_polys()
                .into_iter()
                .zip(q.channel_polys())
                .map(|(p, q)| ChannelFunction::Rational { p, q })
                .collect(),
            CircFunction::ExpPoly { p, g } => p
                .channel_polys()
                .into_iter()
                .zip(g.channel_polys())
                .map(|(p, g)| ChannelFunction::ExpPoly { p, g })
                .collect(),
        }
    }
}

/// The scalar function carried by one channel.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelFunction {
    Poly(ScalarPoly),
    Rational { p: ScalarPoly, q: ScalarPoly },
    ExpPoly { p: ScalarPoly, g: ScalarPoly },
}

/// Relative size under which a polynomial value counts as a zero.
const SINGULAR_REL_TOL: f64 = 1e-14;

fn is_zero_value(value: Complex64, scale: f64) -> bool {
    !value.is_finite() || value.norm() <= SINGULAR_REL_TOL * scale
}

impl ChannelFunction {
    pub fn value(&self, u: Complex64) -> Complex64 {
        match self {
            ChannelFunction::Poly(p) => p.eval(u),
            ChannelFunction::Rational { p, q } => p.eval(u) / q.eval(u),
            ChannelFunction::ExpPoly { p, g } => p.eval(u) * g.eval(u).exp(),
        }
    }

    pub fn derivative(&self, u: Complex64) -> Complex64 {
        match self {
            ChannelFunction::Poly(p) => p.derivative().eval(u),
            ChannelFunction::Rational { p, q } => {
                let (pv, qv) = (p.eval(u), q.eval(u));
                (p.derivative().eval(u) * qv - q.derivative().eval(u) * pv) / (qv * qv)
            }
            ChannelFunction::ExpPoly { p, g } => {
                (p.derivative().eval(u) + p.eval(u) * g.derivative().eval(u)) * g.eval(u).exp()
            }
        }
    }

    /// `F'(u) / F(u)`, or `None` at a zero or pole. Computed without forming
    /// `exp`, so it stays finite far from the origin.
    pub fn log_derivative(&self, u: Complex64) -> Option<Complex64> {
        let ratio = |p: &ScalarPoly| -> Option<Complex64> {
            let (v, scale) = p.eval_with_scale(u);
            if is_zero_value(v, scale) {
                None
            } else {
                Some(p.derivative().eval(u) / v)
            }
        };
        let out = match self {
            ChannelFunction::Poly(p) => ratio(p)?,
            ChannelFunction::Rational { p, q } => ratio(p)? - ratio(q)?,
            ChannelFunction::ExpPoly { p, g } => ratio(p)? + g.derivative().eval(u),
        };
        out.is_finite().then_some(out)
    }

    /// True when the channel function vanishes identically (numerator
    /// identically zero) or is nowhere defined (denominator identically zero).
    pub fn is_degenerate(&self, abs_tol: f64) -> bool {
        match self {
            ChannelFunction::Poly(p) | ChannelFunction::ExpPoly { p, .. } => p.effective_degree(abs_tol).is_none(),
            ChannelFunction::Rational { p, q } => {
                p.effective_degree(abs_tol).is_none() || q.effective_degree(abs_tol).is_none()
            }
        }
    }
}

/// Result of [`func_eval`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: Circulant,
    /// 1-based channels where a rational denominator fell under the rank
    /// threshold and the pseudoinverse zeroed the channel.
    pub flagged_channels: Vec<usize>,
}

pub fn func_eval(f: &CircFunction, z: &Circulant) -> Result<Evaluation> {
    if f.order() != z.order() {
        return Err(Error::OrderMismatch { expected: f.order(), found: z.order() });
    }
    match f {
        CircFunction::Poly(p) => Ok(Evaluation { value: p.eval(z)?, flagged_channels: Vec::new() }),
        CircFunction::Rational { p, q } => {
            let (q_plus, zeroed) = spectral::pseudoinverse_masked(&q.eval(z)?, default_rank_tol(z.order()))?;
            Ok(Evaluation {
                value: p.eval(z)?.mul(&q_plus)?,
                flagged_channels: zeroed.into_iter().map(|i| i + 1).collect(),
            })
        }
        CircFunction::ExpPoly { .. } => {
            let u = spectral::spectrum(z);
            let values = f.channel_functions().iter().zip(u.values()).map(|(fi, &ui)| fi.value(ui)).collect();
            Ok(Evaluation { value: spectral::from_values(values)?, flagged_channels: Vec::new() })
        }
    }
}

/// Derivative by the channel rule: channel `i` of the result is `F_i'(u_i)`.
pub fn derivative(f: &CircFunction, z: &Circulant) -> Result<Circulant> {
    if f.order() != z.order() {
        return Err(Error::OrderMismatch { expected: f.order(), found: z.order() });
    }
    let u = spectral::spectrum(z);
    let channels = f.channel_functions();
    if let CircFunction::Rational { .. } = f {
        let q_values: Vec<Complex64> = channels
            .iter()
            .zip(u.values())
            .map(|(fi, &ui)| match fi {
                ChannelFunction::Rational { q, .. } => q.eval(ui),
                _ => unreachable!("rational function has rational channels"),
            })
            .collect();
        let cutoff = default_rank_tol(z.order()) * q_values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if let Some(i) = q_values.iter().position(|v| v.norm() <= cutoff) {
            return Err(Error::Pole { channel: i + 1 });
        }
    }
    let values = channels.iter().zip(u.values()).map(|(fi, &ui)| fi.derivative(ui)).collect();
    spectral::from_values(values)
}

/// Increment `ΔZ = δ · direction` for [`numeric_derivative`].
#[derive(Clone, Debug, PartialEq)]
pub struct IncrementSpec {
    direction: Circulant,
    delta: f64,
}

impl IncrementSpec {
    pub fn new(direction: Circulant, delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidIncrement(format!("step must be positive and finite, got {delta}")));
        }
        if !spectral::is_invertible(&direction, default_rank_tol(direction.order())) {
            return Err(Error::InvalidIncrement("direction is not invertible".into()));
        }
        Ok(Self { direction, delta })
    }

    pub fn direction(&self) -> &Circulant {
        &self.direction
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn increment(&self) -> Circulant {
        self.direction.scale(Complex64::new(self.delta, 0.0))
    }
}

/// Difference quotient `(F(Z + ΔZ) − F(Z)) · (ΔZ)⁺`.
pub fn numeric_derivative(f: &CircFunction, z: &Circulant, inc: &IncrementSpec) -> Result<Circulant> {
    if inc.direction.order() != z.order() {
        return Err(Error::OrderMismatch { expected: z.order(), found: inc.direction.order() });
    }
    let dz = inc.increment();
    let df = func_eval(f, &z.add(&dz)?)?.value.sub(&func_eval(f, z)?.value)?;
    df.mul(&spectral::pseudoinverse(&dz, default_rank_tol(z.order()))?)
}

/// JSON form: `{"kind": "poly"|"rational"|"exppoly", "d": int, "P": [...], "Q": [...], "G": [...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionRepr {
    kind: FunctionKind,
    d: usize,
    #[serde(rename = "P")]
    p: Vec<Circulant>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    q: Option<Vec<Circulant>>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    g: Option<Vec<Circulant>>,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FunctionKind {
    Poly,
    Rational,
    Exppoly,
}

fn poly_field(name: &str, d: usize, coeffs: Vec<Circulant>) -> Result<CircPoly> {
    if coeffs.is_empty() {
        return Err(Error::InvalidFunction(format!("field `{name}` must contain at least one coefficient")));
    }
    for (k, c) in coeffs.iter().enumerate() {
        if c.order() != d {
            return Err(Error::InvalidFunction(format!(
                "field `{name}[{k}]`: expected order {d}, found {}",
                c.order()
            )));
        }
    }
    CircPoly::new(coeffs)
}

fn required(name: &str, kind: &str, v: Option<Vec<Circulant>>) -> Result<Vec<Circulant>> {
    v.ok_or_else(|| Error::InvalidFunction(format!("field `{name}` is required for kind \"{kind}\"")))
}

impl TryFrom<FunctionRepr> for CircFunction {
    type Error = Error;

    fn try_from(r: FunctionRepr) -> Result<Self> {
        let p = poly_field("P", r.d, r.p)?;
        match r.kind {
            FunctionKind::Poly => Ok(CircFunction::Poly(p)),
            FunctionKind::Rational => {
                let q = poly_field("Q", r.d, required("Q", "rational", r.q)?)?;
                CircFunction::rational(p, q).map_err(|e| Error::InvalidFunction(format!("field `Q`: {e}")))
            }
            FunctionKind::Exppoly => {
                let g = poly_field("G", r.d, required("G", "exppoly", r.g)?)?;
                CircFunction::exp_poly(p, g)
            }
        }
    }
}

impl From<CircFunction> for FunctionRepr {
    fn from(f: CircFunction) -> Self {
        let d = f.order();
        match f {
            CircFunction::Poly(p) => FunctionRepr { kind: FunctionKind::Poly, d, p: p.coeffs, q: None, g: None },
            CircFunction::Rational { p, q } => {
                FunctionRepr { kind: FunctionKind::Rational, d, p: p.coeffs, q: Some(q.coeffs), g: None }
            }
            CircFunction::ExpPoly { p, g } => {
                FunctionRepr { kind: FunctionKind::Exppoly, d, p: p.coeffs, q: None, g: Some(g.coeffs) }
            }
        }
    }
}
