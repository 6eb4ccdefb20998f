//! Solutions of `P(Z) = O` over the circulant ring.
//!
//! The equation splits into `d` scalar equations `P_i(u_i) = 0`. Every
//! channel is solved on its own, and each choice of one root per channel maps
//! back through the inverse spectral map to one circulant solution. A channel
//! whose polynomial is a nonzero constant rules out every solution; a channel
//! that vanishes identically leaves `u_i` free.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circulant::Circulant;
use crate::error::{Error, Result};
use crate::funcalc::{CircPoly, ScalarPoly, DEFAULT_CLASSIFY_TOL};
use crate::spectral;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A root and how many times it repeats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    /// Only trailing zero coefficients or a linear factor; no iteration needed.
    Direct,
    Aberth,
    Companion,
}

/// All roots of one scalar polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarRoots {
    pub roots: Vec<RootCluster>,
    pub iterations: usize,
    pub max_residual: f64,
    pub method: RootMethod,
}

impl ScalarRoots {
    /// Sum of multiplicities; equals the effective degree.
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSolveOptions {
    pub max_iterations: usize,
    /// Roots closer than `cluster_rel_tol · max(1, largest root modulus)` are
    /// reported as one root with multiplicity.
    pub cluster_rel_tol: f64,
    /// Skip Aberth iteration and go straight to the companion matrix.
    pub force_companion: bool,
}

impl Default for ScalarSolveOptions {
    fn default() -> Self {
        Self { max_iterations: 500, cluster_rel_tol: 1e-7, force_companion: false }
    }
}

/// All complex roots of `p`, each satisfying `|p(r)| ≤ tol · Σ|c_k||r|^{n-k}`.
pub fn solve_scalar_poly(p: &ScalarPoly, tol: f64) -> Result<ScalarRoots> {
    solve_scalar_poly_with(p, tol, &ScalarSolveOptions::default())
}

pub fn solve_scalar_poly_with(p: &ScalarPoly, tol: f64, opts: &ScalarSolveOptions) -> Result<ScalarRoots> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidTolerance(tol));
    }
    let channel = p.channel + 1;
    let p = p.trimmed(1e-14 * p.coefficient_scale());
    match p.effective_degree(0.0) {
        None => return Err(Error::DegeneratePolynomial(format!("channel {channel} is identically zero"))),
        Some(0) => return Err(Error::DegeneratePolynomial(format!("channel {channel} is a nonzero constant"))),
        Some(_) => {}
    }

    let lead = p.coeffs()[0];
    let mut monic: Vec<Complex64> = p.coeffs().iter().map(|c| c / lead).collect();
    let mut raw = Vec::new();
    while monic.len() > 1 && *monic.last().unwrap() == ZERO {
        monic.pop();
        raw.push(ZERO);
    }

    let mut iterations = 0;
    let mut method = RootMethod::Direct;
    match monic.len() - 1 {
        0 => {}
        1 => raw.push(-monic[1]),
        _ => {
            let found = if opts.force_companion { None } else { aberth(&monic, opts.max_iterations) };
            match found {
                Some((roots, iters)) => {
                    iterations = iters;
                    method = RootMethod::Aberth;
                    raw.extend(roots);
                }
                None => {
                    method = RootMethod::Companion;
                    let roots = companion_roots(&monic).ok_or_else(|| Error::SolverFailure {
                        channel,
                        reason: "companion eigenvalue iteration did not converge".into(),
                    })?;
                    raw.extend(roots);
                }
            }
        }
    }

    let polished: Vec<Complex64> = raw.iter().map(|&r| polish_root(&p, r)).collect();
    let roots = cluster(&polished, opts.cluster_rel_tol, &p);

    let mut max_residual = 0.0f64;
    for r in &roots {
        let (v, scale) = p.eval_with_scale(r.value);
        if !v.is_finite() || v.norm() > tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SolverFailure {
                channel,
                reason: format!("root {} has residual {:.3e} above tolerance", r.value, v.norm()),
            });
        }
        max_residual = max_residual.max(v.norm());
    }
    Ok(ScalarRoots { roots, iterations, max_residual, method })
}

/// One Newton step, kept only when it lowers `|p(r)|`.
pub fn polish_root(p: &ScalarPoly, r: Complex64) -> Complex64 {
    let v = p.eval(r);
    if v == ZERO {
        return r;
    }
    let dv = p.derivative().eval(r);
    if dv == ZERO {
        return r;
    }
    let candidate = r - v / dv;
    let cv = p.eval(candidate);
    if cv.is_finite() && cv.norm() < v.norm() {
        candidate
    } else {
        r
    }
}

fn horner_with_derivative(monic: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let r = z.norm();
    let mut v = ZERO;
    let mut dv = ZERO;
    let mut scale = 0.0;
    for &c in monic {
        dv = dv * z + v;
        v = v * z + c;
        scale = scale * r + c.norm();
    }
    (v, dv, scale)
}

/// Aberth–Ehrlich simultaneous iteration on a monic polynomial with nonzero
/// constant term. `None` on non-convergence or non-finite iterates.
fn aberth(monic: &[Complex64], max_iterations: usize) -> Option<(Vec<Complex64>, usize)> {
    let n = monic.len() - 1;
    let center = -monic[1] / n as f64;
    let radius = (1..=n).map(|k| monic[k].norm().powf(1.0 / k as f64)).fold(0.0, f64::max).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| center + Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();

    for iter in 1..=max_iterations {
        let mut done = true;
        for k in 0..n {
            let (v, dv, scale) = horner_with_derivative(monic, z[k]);
            if v.norm() <= 4.0 * f64::EPSILON * scale {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                return None;
            }
            z[k] -= step;
            if step.norm() > 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                done = false;
            }
        }
        if done {
            return Some((z, iter));
        }
    }
    None
}

/// Eigenvalues of the companion matrix of a monic polynomial.
fn companion_roots(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = monic.len() - 1;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -monic[j + 1];
    }
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?;
    let eig = schur.eigenvalues()?;
    let out: Vec<Complex64> = eig.iter().copied().collect();
    out.iter().all(|z| z.is_finite()).then_some(out)
}

/// Single-linkage clustering; each cluster is represented by its centroid and
/// sorted by real then imaginary part.
fn cluster(roots: &[Complex64], rel_tol: f64, p: &ScalarPoly) -> Vec<RootCluster> {
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = rel_tol * scale;
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &r) in roots.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(g, _)| *g == root) {
            Some((_, members)) => members.push(r),
            None => groups.push((root, vec![r])),
        }
    }
    let mut out: Vec<RootCluster> = groups
        .into_iter()
        .map(|(_, members)| {
            let mean = members.iter().sum::<Complex64>() / members.len() as f64;
            let value = if members.len() == 1 { mean } else { best_of(p, mean, &members) };
            RootCluster { value, multiplicity: members.len() }
        })
        .collect();
    out.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    out
}

fn best_of(p: &ScalarPoly, mean: Complex64, members: &[Complex64]) -> Complex64 {
    std::iter::once(mean)
        .chain(members.iter().copied())
        .min_by(|a, b| p.eval(*a).norm().total_cmp(&p.eval(*b).norm()))
        .unwrap_or(mean)
}

/// Classification of `P(Z) = O`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionStatus {
    Finite,
    NoSolution,
    InfiniteFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Roots,
    IdenticallyZero,
    NonzeroConstant,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelReport {
    /// 1-based channel index.
    pub channel: usize,
    pub kind: ChannelKind,
    /// `None` when the channel polynomial vanishes identically.
    pub effective_degree: Option<usize>,
    pub roots: Vec<RootCluster>,
    pub iterations: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionSet {
    pub status: SolutionStatus,
    /// Circulant solutions; populated only for [`SolutionStatus::Finite`].
    pub roots: Vec<Circulant>,
    /// `frobenius_norm(P(R))` for each root, in the same order.
    pub residuals: Vec<f64>,
    pub channels: Vec<ChannelReport>,
    /// 1-based channels that carry a free complex parameter.
    pub free_channels: Vec<usize>,
}

impl SolutionSet {
    /// One member of an infinite family. `root_indices` picks a root (mod
    /// the channel's root count) for each fixed channel in channel order;
    /// `free_values` supplies `u_i` for each free channel in channel order.
    pub fn family_member(&self, root_indices: &[usize], free_values: &[Complex64]) -> Result<Circulant> {
        if self.status != SolutionStatus::InfiniteFamily {
            return Err(Error::InvalidFunction("solution set is not an infinite family".into()));
        }
        let fixed = self.channels.iter().filter(|c| c.kind == ChannelKind::Roots).count();
        if root_indices.len() != fixed || free_values.len() != self.free_channels.len() {
            return Err(Error::InvalidDimension(format!(
                "family member needs {fixed} root choices and {} free values",
                self.free_channels.len()
            )));
        }
        let mut fixed_iter = root_indices.iter();
        let mut free_iter = free_values.iter();
        let values = self
            .channels
            .iter()
            .map(|c| match c.kind {
                ChannelKind::Roots => {
                    let k = fixed_iter.next().expect("counted above");
                    c.roots[k % c.roots.len()].value
                }
                _ => *free_iter.next().expect("counted above"),
            })
            .collect();
        spectral::from_values(values)
    }

    /// `count` seeded family members with free eigenvalues drawn from the
    /// square `[-2, 2]²`.
    pub fn sample_family(&self, count: usize, seed: u64) -> Result<Vec<Circulant>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fixed: Vec<usize> =
            self.channels.iter().filter(|c| c.kind == ChannelKind::Roots).map(|c| c.roots.len()).collect();
        (0..count)
            .map(|_| {
                let picks: Vec<usize> = fixed.iter().map(|&n| rng.random_range(0..n)).collect();
                let free: Vec<Complex64> = self
                    .free_channels
                    .iter()
                    .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                    .collect();
                self.family_member(&picks, &free)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative residual tolerance for scalar roots and for the final
    /// circulant check.
    pub tol: f64,
    /// Channel coefficients at or below `zero_tol` times the largest
    /// coefficient eigenvalue count as zero.
    pub zero_tol: f64,
    pub scalar: ScalarSolveOptions,
    /// Roots within this max-entry distance are merged.
    pub dedup_tol: f64,
    /// Largest Cartesian product of channel roots that will be expanded.
    pub max_tuples: u128,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            zero_tol: DEFAULT_CLASSIFY_TOL,
            scalar: ScalarSolveOptions::default(),
            dedup_tol: 1e-8,
            max_tuples: 1_000_000,
        }
    }
}

/// `frobenius_norm(P(Z))`.
pub fn residual(p: &CircPoly, z: &Circulant) -> Result<f64> {
    Ok(p.eval(z)?.frobenius_norm())
}

pub fn solve_circ_poly(p: &CircPoly, tol: f64) -> Result<SolutionSet> {
    solve_circ_poly_with(p, &SolverOptions { tol, ..SolverOptions::default() })
}

pub fn solve_circ_poly_with(p: &CircPoly, opts: &SolverOptions) -> Result<SolutionSet> {
    if !opts.tol.is_finite() || opts.tol <= 0.0 {
        return Err(Error::InvalidTolerance(opts.tol));
    }
    if p.degree() == 0 {
        return Err(Error::DegeneratePolynomial("equation needs degree at least 1".into()));
    }
    let abs_zero = opts.zero_tol * p.spectral_scale();

    let mut channels = Vec::with_capacity(p.order());
    for ch in p.channel_polys() {
        let channel = ch.channel + 1;
        let trimmed = ch.trimmed(abs_zero);
        let report = match ch.effective_degree(abs_zero) {
            None => ChannelReport {
                channel,
                kind: ChannelKind::IdenticallyZero,
                effective_degree: None,
                roots: Vec::new(),
                iterations: 0,
                max_residual: 0.0,
            },
            Some(0) => ChannelReport {
                channel,
                kind: ChannelKind::NonzeroConstant,
                effective_degree: Some(0),
                roots: Vec::new(),
                iterations: 0,
                max_residual: 0.0,
            },
            Some(deg) => {
                let found = solve_scalar_poly_with(&trimmed, opts.tol, &opts.scalar)?;
                ChannelReport {
                    channel,
                    kind: ChannelKind::Roots,
                    effective_degree: Some(deg),
                    roots: found.roots,
                    iterations: found.iterations,
                    max_residual: found.max_residual,
                }
            }
        };
        channels.push(report);
    }

    let free_channels: Vec<usize> =
        channels.iter().filter(|c| c.kind == ChannelKind::IdenticallyZero).map(|c| c.channel).collect();
    let status = if channels.iter().any(|c| c.kind == ChannelKind::NonzeroConstant) {
        SolutionStatus::NoSolution
    } else if !free_channels.is_empty() {
        SolutionStatus::InfiniteFamily
    } else {
        SolutionStatus::Finite
    };
    if status != SolutionStatus::Finite {
        let free_channels = if status == SolutionStatus::InfiniteFamily { free_channels } else { Vec::new() };
        return Ok(SolutionSet { status, roots: Vec::new(), residuals: Vec::new(), channels, free_channels });
    }

    let counts: Vec<usize> = channels.iter().map(|c| c.roots.len()).collect();
    let total = counts.iter().try_fold(1u128, |acc, &n| acc.checked_mul(n as u128));
    match total {
        Some(t) if t <= opts.max_tuples => {}
        _ => return Err(Error::RecombinationOverflow { count: total.unwrap_or(u128::MAX), limit: opts.max_tuples }),
    }

    let mut roots = Vec::new();
    let mut index = vec![0usize; counts.len()];
    loop {
        let values = channels.iter().zip(&index).map(|(c, &k)| c.roots[k].value).collect();
        roots.push(spectral::from_values(values)?);
        // odometer: last channel varies fastest
        let mut pos = counts.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < counts[pos] {
                break;
            }
            index[pos] = 0;
        }
        if index.iter().all(|&k| k == 0) {
            break;
        }
    }
    let roots = dedup(roots, opts.dedup_tol);

    let coeff_norms: Vec<f64> = p.coeffs().iter().map(Circulant::frobenius_norm).collect();
    let mut residuals = Vec::with_capacity(roots.len());
    for r in &roots {
        let res = residual(p, r)?;
        let rn = r.frobenius_norm();
        let scale = coeff_norms.iter().fold(0.0, |acc, &a| acc * rn + a).max(1.0);
        if !res.is_finite() || res > opts.tol * scale {
            return Err(Error::SolverFailure {
                channel: worst_channel(p, r),
                reason: format!("recombined root has residual {res:.3e} above tolerance"),
            });
        }
        residuals.push(res);
    }
    Ok(SolutionSet { status, roots, residuals, channels, free_channels })
}

fn worst_channel(p: &CircPoly, r: &Circulant) -> usize {
    let u = spectral::spectrum(r);
    p.channel_polys()
        .iter()
        .enumerate()
        .map(|(i, ch)| {
            let (v, s) = ch.eval_with_scale(u.values()[i]);
            (i, v.norm() / s.max(f64::MIN_POSITIVE))
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i + 1)
        .unwrap_or(1)
}

/// Drops later entries within `tol` (max-entry distance) of an earlier one,
/// preserving order. Candidates are bucketed by the real part of `x_0`.
fn dedup(roots: Vec<Circulant>, tol: f64) -> Vec<Circulant> {
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| roots[a].row()[0].re.total_cmp(&roots[b].row()[0].re).then(a.cmp(&b)));
    let mut drop = vec![false; roots.len()];
    for (pos, &i) in order.iter().enumerate() {
        if drop[i] {
            continue;
        }
        let key = roots[i].row()[0].re;
        for &j in &order[pos + 1..] {
            if roots[j].row()[0].re - key > tol {
                break;
            }
            if !drop[j] && roots[i].approx_eq(&roots[j], tol) {
                drop[i.max(j)] = true;
            }
        }
    }
    roots.into_iter().zip(drop).filter(|(_, d)| !d).map(|(r, _)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sp(coeffs: &[f64]) -> ScalarPoly {
        ScalarPoly::new(0, coeffs.iter().map(|&x| c(x, 0.0)).collect())
    }

    fn has_root(r: &ScalarRoots, z: Complex64, mult: usize, tol: f64) -> bool {
        r.roots.iter().any(|x| (x.value - z).norm() < tol && x.multiplicity == mult)
    }

    #[test]
    fn scalar_examples() {
        let r = solve_scalar_poly(&sp(&[1.0, 0.0, -1.0]), 1e-12).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!(has_root(&r, c(1.0, 0.0), 1, 1e-14) && has_root(&r, c(-1.0, 0.0), 1, 1e-14));

        let r = solve_scalar_poly(&sp(&[1.0, 0.0, 1.0]), 1e-12).unwrap();
        assert!(has_root(&r, c(0.0, 1.0), 1, 1e-14) && has_root(&r, c(0.0, -1.0), 1, 1e-14));

        // (u - 2)^2 (u + 1) = u^3 - 3u^2 + 4
        let r = solve_scalar_poly(&sp(&[1.0, -3.0, 0.0, 4.0]), 1e-12).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!(has_root(&r, c(2.0, 0.0), 2, 1e-7), "{r:?}");
        assert!(has_root(&r, c(-1.0, 0.0), 1, 1e-12));
        assert_eq!(r.total_multiplicity(), 3);
    }

    #[test]
    fn zero_roots_and_linear() {
        let r = solve_scalar_poly(&sp(&[2.0, 0.0, 0.0, 0.0]), 1e-12).unwrap();
        assert_eq!(r.roots, vec![RootCluster { value: c(0.0, 0.0), multiplicity: 3 }]);
        assert_eq!(r.method, RootMethod::Direct);
        let r = solve_scalar_poly(&sp(&[0.0, 4.0, -2.0]), 1e-12).unwrap();
        assert_eq!(r.roots, vec![RootCluster { value: c(0.5, 0.0), multiplicity: 1 }]);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(solve_scalar_poly(&sp(&[0.0, 0.0]), 1e-12), Err(Error::DegeneratePolynomial(_))));
        assert!(matches!(solve_scalar_poly(&sp(&[0.0, 3.0]), 1e-12), Err(Error::DegeneratePolynomial(_))));
        assert!(matches!(solve_scalar_poly(&sp(&[1.0, 1.0]), 0.0), Err(Error::InvalidTolerance(_))));
    }

    #[test]
    fn companion_fallback_matches_aberth() {
        let p = ScalarPoly::new(0, vec![c(1.0, 0.5), c(-2.0, 1.0), c(0.3, 0.0), c(4.0, -1.0), c(-0.7, 0.2)]);
        let a = solve_scalar_poly(&p, 1e-10).unwrap();
        let opts = ScalarSolveOptions { force_companion: true, ..Default::default() };
        let b = solve_scalar_poly_with(&p, 1e-10, &opts).unwrap();
        assert_eq!(a.method, RootMethod::Aberth);
        assert_eq!(b.method, RootMethod::Companion);
        assert_eq!(a.roots.len(), 4);
        assert_eq!(b.roots.len(), 4);
        for (x, y) in a.roots.iter().zip(&b.roots) {
            assert!((x.value - y.value).norm() < 1e-10);
        }
    }

    #[test]
    fn newton_polish_never_worsens() {
        let p = sp(&[1.0, -3.0, 0.0, 4.0]);
        for r in [c(2.1, 0.0), c(-0.9, 0.1), c(2.0, 0.0), c(-1.0, 0.0)] {
            let before = p.eval(r).norm();
            let after = p.eval(polish_root(&p, r)).norm();
            assert!(after <= before);
        }
    }

    #[test]
    fn circ_examples() {
        let d = 2;
        let p = CircPoly::from_real_scalars(d, &[1.0, 0.0, -1.0]).unwrap();
        let s = solve_circ_poly(&p, 1e-10).unwrap();
        assert_eq!(s.status, SolutionStatus::Finite);
        assert_eq!(s.roots.len(), 4);
        let i = Circulant::identity(d).unwrap();
        let cc = Circulant::elementary(d).unwrap();
        for want in [i.clone(), cc.clone(), i.neg(), cc.neg()] {
            assert!(s.roots.iter().any(|r| r.approx_eq(&want, 1e-12)), "missing {want:?}");
        }
        assert!(s.residuals.iter().all(|&r| r <= 1e-10));

        let e = Circulant::ones(d).unwrap();
        let p = CircPoly::new(vec![e.clone(), i.clone()]).unwrap();
        let s = solve_circ_poly(&p, 1e-10).unwrap();
        assert_eq!(s.status, SolutionStatus::NoSolution);
        assert_eq!(s.channels[1].kind, ChannelKind::NonzeroConstant);

        let p = CircPoly::new(vec![e.clone(), e]).unwrap();
        let s = solve_circ_poly(&p, 1e-10).unwrap();
        assert_eq!(s.status, SolutionStatus::InfiniteFamily);
        assert_eq!(s.free_channels, vec![2]);
        assert_eq!(s.channels[0].roots.len(), 1);
        assert!((s.channels[0].roots[0].value - c(-1.0, 0.0)).norm() < 1e-12);
        for z in s.sample_family(5, 7).unwrap() {
            assert!(residual(&p, &z).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn residual_examples() {
        let d = 3;
        let p = CircPoly::from_real_scalars(d, &[1.0, 0.0, -1.0]).unwrap();
        let i = Circulant::identity(d).unwrap();
        assert!(residual(&p, &i).unwrap() <= 1e-12);
        let two_i = i.scale(c(2.0, 0.0));
        assert!((residual(&p, &two_i).unwrap() - 3.0 * (d as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let p = CircPoly::from_real_scalars(2, &[1.0, -1.0]).unwrap();
        assert!(matches!(solve_circ_poly(&p, 0.0), Err(Error::InvalidTolerance(_))));
        let p = CircPoly::constant(Circulant::identity(2).unwrap());
        assert!(matches!(solve_circ_poly(&p, 1e-8), Err(Error::DegeneratePolynomial(_))));
    }

    #[test]
    fn recombination_cap() {
        // degree 3 at d = 8: 3^8 = 6561 candidate tuples
        let p = CircPoly::from_real_scalars(8, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let opts = SolverOptions { max_tuples: 1000, ..SolverOptions::default() };
        assert_eq!(
            solve_circ_poly_with(&p, &opts).unwrap_err(),
            Error::RecombinationOverflow { count: 6561, limit: 1000 }
        );
        let s = solve_circ_poly(&p, 1e-8).unwrap();
        assert_eq!(s.roots.len(), 6561);
    }

    #[test]
    fn degree_drop_is_reported() {
        // A_0 = E at d = 2: channel 2 drops to degree 1.
        let d = 2;
        let e = Circulant::ones(d).unwrap();
        let i = Circulant::identity(d).unwrap();
        let p = CircPoly::new(vec![e, i.clone(), i.neg()]).unwrap();
        let s = solve_circ_poly(&p, 1e-10).unwrap();
        assert_eq!(s.status, SolutionStatus::Finite);
        assert_eq!(s.channels[0].effective_degree, Some(2));
        assert_eq!(s.channels[1].effective_degree, Some(1));
        assert_eq!(s.roots.len(), 2);
    }

    #[test]
    fn emission_order_is_lexicographic() {
        let p = CircPoly::from_real_scalars(2, &[1.0, 0.0, -1.0]).unwrap();
        let s = solve_circ_poly(&p, 1e-10).unwrap();
        // channel roots sorted (-1, 1); tuples (-1,-1), (-1,1), (1,-1), (1,1)
        let spectra: Vec<Vec<f64>> =
            s.roots.iter().map(|r| spectral::spectrum(r).values().iter().map(|u| u.re.round()).collect()).collect();
        assert_eq!(spectra, vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]]);
    }
}
