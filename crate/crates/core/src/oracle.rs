//! Brute-force search over ensemble decompositions of a two-qubit density
//! matrix.
//!
//! Every decomposition of `ρ = Σ_k μ_k |v_k><v_k|` into `m` pure states has
//! the form `√p_i |w_i> = Σ_k U_ik √μ_k |v_k>` for an `m × r` isometry `U`.
//! The search starts from random isometries and improves the average
//! entanglement with two-member unitary mixings
//!
//! ```text
//! w_i' =  cos θ · w_i - sin θ · e^{iφ} · w_j
//! w_j' =  sin θ · e^{-iφ} · w_i + cos θ · w_j
//! ```
//!
//! which keep the represented density matrix fixed. Each pair is scanned on a
//! coarse `(θ, φ)` grid, then refined with golden-section line searches; a
//! move is kept only if it improves the objective. The value returned is the
//! average over an actual ensemble, so a maximization result never exceeds
//! the true maximum and a minimization result never falls below the true
//! minimum.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ZERO};
use crate::measures::{self, shannon_entropy};
use crate::states::{stream_rng, Ensemble, PureTripartiteState};

const THETA_GRID: usize = 12;
const PHI_GRID: usize = 4;
const GOLDEN_ITERS: usize = 18;
/// Smoothing levels for minimization, ending with the exact objective.
const SMOOTHING_SCHEDULE: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 0.0];
/// A smoothed stage stops once a sweep gains less than this times its level.
const STAGE_TOL_FACTOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Concurrence,
    Entropy,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concurrence" | "C" => Ok(Self::Concurrence),
            "entropy" | "E" => Ok(Self::Entropy),
            other => Err(Error::OutOfRange(format!("unknown objective `{other}`"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Concurrence => "concurrence",
            Self::Entropy => "entropy",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Self::Min => -1.0,
            Self::Max => 1.0,
        }
    }
}

/// Search budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionSearch {
    /// Number of ensemble members; `None` means twice the rank.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Maximum number of full pair sweeps per restart.
    pub sweeps: usize,
    /// A restart stops once a sweep improves by less than
    /// `tolerance · (1 + |value|)`.
    pub tolerance: f64,
}

impl Default for DecompositionSearch {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 32,
            sweeps: 500,
            tolerance: 1e-9,
        }
    }
}

impl DecompositionSearch {
    pub fn with_budget(restarts: usize, sweeps: usize) -> Self {
        Self {
            restarts,
            sweeps,
            ..Self::default()
        }
    }

    fn validate(&self, rank: usize) -> Result<usize> {
        if self.restarts == 0 || self.sweeps == 0 || self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::OutOfRange("search budget must be positive".into()));
        }
        let m = self.ensemble_size.unwrap_or(2 * rank);
        if m < rank {
            return Err(Error::OutOfRange(format!(
                "ensemble size {m} below rank {rank}"
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Average objective over `ensemble`.
    pub value: f64,
    pub ensemble: Ensemble,
    /// Running value after each sweep of the winning restart.
    pub history: Vec<f64>,
    pub rank: usize,
    pub ensemble_size: usize,
    /// Restart index that produced the result.
    pub restart: usize,
}

/// Range factor `√μ_k |v_k>` of a validated two-qubit density matrix.
fn scaled_eigenvectors(rho: &ComplexMatrix) -> Result<Vec<[C64; 4]>> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::Dimension(format!(
            "decompositions need a 4x4 density matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let factor = measures::range_factor(&measures::density_spectrum(rho)?);
    Ok(factor
        .into_iter()
        .map(|v| [v[0], v[1], v[2], v[3]])
        .collect())
}

/// Numerical rank of a two-qubit density matrix.
pub fn rank(rho: &ComplexMatrix) -> Result<usize> {
    Ok(scaled_eigenvectors(rho)?.len())
}

fn mix(u: &ComplexMatrix, basis: &[[C64; 4]]) -> Vec<[C64; 4]> {
    (0..u.rows())
        .map(|i| {
            let mut w = [ZERO; 4];
            for (k, v) in basis.iter().enumerate() {
                let c = u[(i, k)];
                for (wx, vx) in w.iter_mut().zip(v) {
                    *wx += c * vx;
                }
            }
            w
        })
        .collect()
}

fn to_ensemble(members: &[[C64; 4]]) -> Ensemble {
    Ensemble::from_subnormalized(members.iter().map(|w| w.as_slice()), 0.0)
}

/// Ensemble `√p_i |w_i> = Σ_k U_ik √μ_k |v_k>` for an `m × r` isometry.
pub fn hjw_ensemble(rho: &ComplexMatrix, u: &ComplexMatrix) -> Result<Ensemble> {
    let basis = scaled_eigenvectors(rho)?;
    if u.cols() != basis.len() {
        return Err(Error::Dimension(format!(
            "isometry has {} columns but the density matrix has rank {}",
            u.cols(),
            basis.len()
        )));
    }
    let dev = linalg::isometry_deviation(u);
    if dev > 1e-10 {
        return Err(Error::NotIsometry(dev));
    }
    Ok(to_ensemble(&mix(u, &basis)))
}

/// Haar-random `rows × cols` isometry.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<ComplexMatrix> {
    loop {
        let g = ComplexMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        match linalg::orthonormalize_columns(&g) {
            Ok(q) => return Ok(q),
            Err(Error::Dimension(msg)) if msg.contains("dependent") => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Weighted pure-state objective `p · m(w/‖w‖)` from `f = w0 w3 - w1 w2`
/// and `p = ‖w‖²`. A positive `smoothing` replaces `|f|` by
/// `√(|f|² + (smoothing·p)²)`, rounding off the kink at separable members.
#[inline]
fn term_from(objective: Objective, f_abs: f64, p: f64, smoothing: f64) -> f64 {
    let f_abs = if smoothing > 0.0 {
        f_abs.hypot(smoothing * p)
    } else {
        f_abs
    };
    match objective {
        Objective::Concurrence => 2.0 * f_abs,
        Objective::Entropy => {
            if p <= 0.0 {
                return 0.0;
            }
            let c = (2.0 * f_abs / p).min(1.0);
            let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
            p * shannon_entropy(&[x, 1.0 - x])
        }
    }
}

#[inline]
fn det(w: &[C64; 4]) -> C64 {
    w[0] * w[3] - w[1] * w[2]
}

#[inline]
fn member_term(objective: Objective, w: &[C64; 4], smoothing: f64) -> f64 {
    term_from(objective, det(w).norm(), w.iter().map(|z| z.norm_sqr()).sum(), smoothing)
}

/// The pair objective under [`rotate`] as a function of `(θ, φ)` alone.
///
/// With `e = e^{iφ}`, `a = c·wi - s·e·wj` and `b = s·ē·wi + c·wj`,
/// `det` is quadratic: `det(a) = c² fi - cs·e·k + s²e² fj` and
/// `det(b) = s²ē² fi + cs·ē·k + c² fj` with the polarization
/// `k = wi0 wj3 + wi3 wj0 - wi1 wj2 - wi2 wj1`.
struct PairModel {
    objective: Objective,
    smoothing: f64,
    fi: C64,
    fj: C64,
    k: C64,
    pi: f64,
    pj: f64,
    g: C64,
}

impl PairModel {
    fn new(objective: Objective, smoothing: f64, wi: &[C64; 4], wj: &[C64; 4]) -> Self {
        Self {
            objective,
            smoothing,
            fi: det(wi),
            fj: det(wj),
            k: wi[0] * wj[3] + wi[3] * wj[0] - wi[1] * wj[2] - wi[2] * wj[1],
            pi: wi.iter().map(|z| z.norm_sqr()).sum(),
            pj: wj.iter().map(|z| z.norm_sqr()).sum(),
            g: wi.iter().zip(wj).map(|(x, y)| x.conj() * y).sum(),
        }
    }

    /// Pair objective at `c = cos θ`, `s = sin θ`, `e = e^{iφ}`.
    #[inline]
    fn eval_at(&self, c: f64, s: f64, e: C64) -> f64 {
        let (cc, ss, cs) = (c * c, s * s, c * s);
        let e2 = e * e;
        let fa = self.fi * cc - self.k * e * cs + self.fj * e2 * ss;
        let fb = self.fi * e2.conj() * ss + self.k * e.conj() * cs + self.fj * cc;
        let cross = 2.0 * cs * (e * self.g).re;
        let pa = cc * self.pi + ss * self.pj - cross;
        let pb = ss * self.pi + cc * self.pj + cross;
        term_from(self.objective, fa.norm_sqr().sqrt(), pa, self.smoothing)
            + term_from(self.objective, fb.norm_sqr().sqrt(), pb, self.smoothing)
    }

    #[cfg(test)]
    fn eval(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.eval_at(c, s, C64::from_polar(1.0, phi))
    }
}

#[inline]
fn rotate(wi: &[C64; 4], wj: &[C64; 4], theta: f64, phi: f64) -> ([C64; 4], [C64; 4]) {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    let mut a = [ZERO; 4];
    let mut b = [ZERO; 4];
    for k in 0..4 {
        a[k] = wi[k] * c - e * wj[k] * s;
        b[k] = e.conj() * wi[k] * s + wj[k] * c;
    }
    (a, b)
}

fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Best `(θ, φ)` mixing for one pair; returns the signed score and angles.
///
/// A full scan covers the whole `(θ, φ)` grid; otherwise only small angles
/// are probed, which is enough once the ensemble is near a local optimum.
fn optimize_pair(
    model: &PairModel,
    sign: f64,
    phase_offset: f64,
    full_scan: bool,
) -> (f64, f64, f64) {
    let at_theta = |theta: f64| {
        let (s, c) = theta.sin_cos();
        move |phi: f64| sign * model.eval_at(c, s, C64::from_polar(1.0, phi))
    };
    let at_phi = |phi: f64| {
        let e = C64::from_polar(1.0, phi);
        move |theta: f64| {
            let (s, c) = theta.sin_cos();
            sign * model.eval_at(c, s, e)
        }
    };
    let dtheta = PI / THETA_GRID as f64;
    let dphi = PI / PHI_GRID as f64;
    let mut best = (sign * model.eval_at(1.0, 0.0, C64::new(1.0, 0.0)), 0.0, 0.0);
    let thetas: Vec<f64> = if full_scan {
        (0..THETA_GRID)
            .map(|ti| -FRAC_PI_2 + (ti as f64 + 0.5) * dtheta)
            .collect()
    } else {
        vec![-0.25 * dtheta, 0.25 * dtheta]
    };
    for &theta in &thetas {
        let f = at_theta(theta);
        for pi in 0..PHI_GRID {
            let phi = phase_offset + pi as f64 * dphi;
            let v = f(phi);
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let width = if full_scan { dtheta } else { 0.5 * dtheta };
    let (_, mut theta, mut phi) = best;
    theta = golden_max(theta - width, theta + width, at_phi(phi)).0;
    phi = golden_max(phi - dphi, phi + dphi, at_theta(theta)).0;
    let (t, v) = golden_max(theta - 0.5 * width, theta + 0.5 * width, at_phi(phi));
    (v, t, phi)
}

struct RestartOutcome {
    value: f64,
    members: Vec<[C64; 4]>,
    history: Vec<f64>,
}

fn run_restart(
    basis: &[[C64; 4]],
    m: usize,
    objective: Objective,
    direction: Direction,
    search: &DecompositionSearch,
    seed: u64,
    restart: usize,
) -> Result<RestartOutcome> {
    let mut rng = stream_rng(seed, restart as u64);
    let u = random_isometry(m, basis.len(), &mut rng)?;
    let mut members = mix(&u, basis);
    let sign = direction.sign();
    let total = |ws: &[[C64; 4]], eps: f64| ws.iter().map(|w| member_term(objective, w, eps)).sum::<f64>();
    let mut best = (total(&members, 0.0), members.clone());
    let mut history = Vec::new();
    let mut sweeps_left = search.sweeps;

    // Minimization runs through a sequence of smoothed objectives; the
    // running best is always judged on the exact one.
    let schedule: &[f64] = match direction {
        Direction::Min => &SMOOTHING_SCHEDULE,
        Direction::Max => &[0.0],
    };
    for &eps in schedule {
        let mut value = total(&members, eps);
        let mut full_scan = true;
        while sweeps_left > 0 {
            sweeps_left -= 1;
            let before = value;
            let phase_offset = rng.random::<f64>() * PI;
            for i in 0..m {
                for j in (i + 1)..m {
                    let model = PairModel::new(objective, eps, &members[i], &members[j]);
                    let current = sign * model.eval_at(1.0, 0.0, C64::new(1.0, 0.0));
                    let (score, theta, phi) = optimize_pair(&model, sign, phase_offset, full_scan);
                    if score > current {
                        let (a, b) = rotate(&members[i], &members[j], theta, phi);
                        members[i] = a;
                        members[j] = b;
                    }
                }
            }
            // recompute rather than accumulate deltas
            value = total(&members, eps);
            let exact = if eps > 0.0 { total(&members, 0.0) } else { value };
            if sign * exact > sign * best.0 {
                best = (exact, members.clone());
            }
            history.push(best.0);
            let tol = search.tolerance.max(eps * STAGE_TOL_FACTOR);
            let stalled = sign * (value - before) <= tol * (1.0 + value.abs());
            if stalled && full_scan {
                break;
            }
            // a stalled local sweep is confirmed by a full scan before stopping
            full_scan = stalled;
        }
    }
    Ok(RestartOutcome {
        value: best.0,
        members: best.1,
        history,
    })
}

/// Extremal average entanglement over decompositions of a two-qubit `ρ`.
pub fn optimize_avg(
    rho: &ComplexMatrix,
    objective: Objective,
    direction: Direction,
    search: &DecompositionSearch,
    seed: u64,
) -> Result<OracleResult> {
    let basis = scaled_eigenvectors(rho)?;
    let r = basis.len();
    let m = search.validate(r)?;

    let outcomes: Vec<RestartOutcome> = (0..search.restarts)
        .into_par_iter()
        .map(|k| run_restart(&basis, m, objective, direction, search, seed, k))
        .collect::<Result<_>>()?;

    let sign = direction.sign();
    let (restart, best) = outcomes
        .into_iter()
        .enumerate()
        .reduce(|acc, cur| if sign * cur.1.value > sign * acc.1.value { cur } else { acc })
        .expect("at least one restart");

    let ensemble = to_ensemble(&best.members);
    let value = match objective {
        Objective::Concurrence => ensemble.average(|s| measures::concurrence_pure(s).unwrap_or(0.0)),
        Objective::Entropy => ensemble.average(|s| measures::entropy_pure(s, 2, 2).unwrap_or(0.0)),
    };
    Ok(OracleResult {
        value,
        ensemble,
        history: best.history,
        rank: r,
        ensemble_size: m,
        restart,
    })
}

/// Lower estimate of the entanglement of assistance of a `(2, 2, n)` state.
pub fn estimate_ea(gamma: &PureTripartiteState, search: &DecompositionSearch, seed: u64) -> Result<f64> {
    let d = gamma.dims();
    if d.a != 2 || d.b != 2 {
        return Err(Error::Dimension(format!("entanglement of assistance needs dA = dB = 2, got {d}")));
    }
    let rho = gamma.normalized()?.reduced_ab();
    Ok(optimize_avg(&rho, Objective::Entropy, Direction::Max, search, seed)?.value)
}

/// Rank-one Kraus operators `N_j = |0><v_j|` from the rows of an
/// `m × d` isometry; `Σ N_j† N_j = V†V = I`.
pub fn kraus_from_isometry(v: &ComplexMatrix) -> Vec<ComplexMatrix> {
    (0..v.rows())
        .map(|j| ComplexMatrix::from_fn(1, v.cols(), |_, c| v[(j, c)]))
        .collect()
}

/// `Σ_ij √(q1_ij q2_ij)` with `q_ij = ‖<i|N_j|·>‖²`, for two normalized states.
pub fn outcome_overlap_sum(
    phi: &PureTripartiteState,
    psi: &PureTripartiteState,
    kraus: &[ComplexMatrix],
) -> Result<f64> {
    if phi.dims() != psi.dims() {
        return Err(Error::Dimension("states of differing dims".into()));
    }
    let d = phi.dims();
    let outcome_weight = |s: &PureTripartiteState, k: &ComplexMatrix, i: usize| -> f64 {
        (0..d.ab())
            .map(|ab| {
                (0..d.c)
                    .map(|c| k[(i, c)] * s.amps()[ab * d.c + c])
                    .sum::<C64>()
                    .norm_sqr()
            })
            .sum()
    };
    let mut total = 0.0;
    for k in kraus {
        if k.cols() != d.c {
            return Err(Error::Dimension("Kraus operator does not act on C".into()));
        }
        for i in 0..k.rows() {
            total += (outcome_weight(phi, k, i) * outcome_weight(psi, k, i)).sqrt();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{lambda_spectrum, measures_of};
    use crate::states::{
        bell_product, ghz, measure_ensemble, sample_random, Dims, SampleMode,
    };

    fn quick() -> DecompositionSearch {
        DecompositionSearch::with_budget(8, 200)
    }

    #[test]
    fn pair_model_matches_explicit_rotation() {
        let mut rng = stream_rng(3, 0);
        let mut draw = || {
            let mut w = [ZERO; 4];
            for z in &mut w {
                *z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            w
        };
        for _ in 0..50 {
            let (wi, wj) = (draw(), draw());
            for objective in [Objective::Concurrence, Objective::Entropy] {
                let model = PairModel::new(objective, 0.0, &wi, &wj);
                for (theta, phi) in [(0.0, 0.0), (0.3, 1.1), (-1.2, 2.5), (1.5, -0.4)] {
                    let (a, b) = rotate(&wi, &wj, theta, phi);
                    let direct = member_term(objective, &a, 0.0) + member_term(objective, &b, 0.0);
                    assert!((model.eval(theta, phi) - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn identity_isometry_gives_eigen_ensemble() {
        let rho = ComplexMatrix::from_diag(&[0.5, 0.3, 0.2, 0.0]);
        let e = hjw_ensemble(&rho, &ComplexMatrix::identity(3)).unwrap();
        let mut w: Vec<f64> = e.members.iter().map(|m| m.weight).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in w.iter().zip([0.5, 0.3, 0.2]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(e.reconstruction_error(&rho) < 1e-14);
    }

    #[test]
    fn rank_one_has_unique_member() {
        let rho = bell_product(1).reduced_ab();
        let mut rng = stream_rng(1, 0);
        let u = random_isometry(1, 1, &mut rng).unwrap();
        let e = hjw_ensemble(&rho, &u).unwrap();
        assert_eq!(e.len(), 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let overlap = linalg::inner(&e.members[0].state, &[C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)]);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hjw_rejects_non_isometry() {
        let rho = ComplexMatrix::from_diag(&[0.5, 0.5, 0.0, 0.0]);
        let u = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hjw_ensemble(&rho, &u), Err(Error::NotIsometry(_))));
        assert!(matches!(
            hjw_ensemble(&rho, &ComplexMatrix::identity(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn hjw_reconstructs_random() {
        for seed in 0..20 {
            let s = sample_random(Dims::new(2, 2, 4).unwrap(), seed, SampleMode::ComplexGaussian);
            let rho = s.reduced_ab();
            let mut rng = stream_rng(seed, 1);
            let u = random_isometry(8, 4, &mut rng).unwrap();
            let e = hjw_ensemble(&rho, &u).unwrap();
            assert!((e.total_weight() - 1.0).abs() < 1e-10);
            assert!(e.reconstruction_error(&rho) < 1e-9);
        }
    }

    #[test]
    fn bell_is_fixed_by_the_optimizer() {
        let rho = bell_product(2).normalized().unwrap().reduced_ab();
        for dir in [Direction::Min, Direction::Max] {
            let r = optimize_avg(&rho, Objective::Concurrence, dir, &quick(), 0).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ghz_extremes() {
        let rho = ghz().reduced_ab();
        let min = optimize_avg(&rho, Objective::Concurrence, Direction::Min, &quick(), 1).unwrap();
        let max = optimize_avg(&rho, Objective::Concurrence, Direction::Max, &quick(), 1).unwrap();
        assert!(min.value < 1e-6, "{}", min.value);
        assert!((max.value - 1.0).abs() < 1e-3, "{}", max.value);
        assert!(max.value <= 1.0 + 1e-9);
    }

    #[test]
    fn ghz_assistance_reaches_one() {
        let ea = estimate_ea(&ghz(), &quick(), 3).unwrap();
        assert!(ea >= 1.0 - 1e-6, "{ea}");
        assert!(ea <= 1.0 + 1e-9);
    }

    #[test]
    fn product_state_has_no_assistance() {
        let s = PureTripartiteState::basis(Dims::new(2, 2, 2).unwrap(), 0, 0, 0);
        assert!(estimate_ea(&s, &quick(), 0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn optimizer_respects_closed_forms() {
        for seed in 0..5 {
            let s = sample_random(Dims::new(2, 2, 4).unwrap(), 100 + seed, SampleMode::ComplexGaussian);
            let rho = s.reduced_ab();
            let l = lambda_spectrum(&rho).unwrap();
            let min = optimize_avg(&rho, Objective::Concurrence, Direction::Min, &quick(), seed).unwrap();
            let max = optimize_avg(&rho, Objective::Concurrence, Direction::Max, &quick(), seed).unwrap();
            assert!(max.value <= l.coa() + 1e-9);
            assert!(min.value >= l.concurrence() - 1e-9);
            for r in [&min, &max] {
                assert!((r.ensemble.total_weight() - 1.0).abs() < 1e-10);
                assert!(r.ensemble.reconstruction_error(&rho) < 1e-9);
                assert_eq!(r.ensemble_size, 8);
            }
            let ea = estimate_ea(&s, &quick(), seed).unwrap();
            assert!(ea >= measures_of(&s).unwrap().entropy_e - 1e-6);
        }
    }

    #[test]
    fn running_best_is_monotone() {
        let s = sample_random(Dims::new(2, 2, 4).unwrap(), 7, SampleMode::ComplexGaussian);
        let rho = s.reduced_ab();
        let max = optimize_avg(&rho, Objective::Entropy, Direction::Max, &quick(), 2).unwrap();
        assert!(max.history.windows(2).all(|w| w[1] >= w[0]));
        let min = optimize_avg(&rho, Objective::Concurrence, Direction::Min, &quick(), 2).unwrap();
        assert!(min.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let rho = sample_random(Dims::new(2, 2, 4).unwrap(), 9, SampleMode::ComplexGaussian).reduced_ab();
        let a = optimize_avg(&rho, Objective::Concurrence, Direction::Max, &quick(), 5).unwrap();
        let b = optimize_avg(&rho, Objective::Concurrence, Direction::Max, &quick(), 5).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.ensemble, b.ensemble);
    }

    #[test]
    fn rejects_small_ensembles() {
        let rho = ComplexMatrix::from_diag(&[0.25; 4]);
        let search = DecompositionSearch {
            ensemble_size: Some(3),
            ..quick()
        };
        assert!(optimize_avg(&rho, Objective::Concurrence, Direction::Max, &search, 0).is_err());
    }

    #[test]
    fn cauchy_schwarz_over_outcomes() {
        let d = Dims::new(2, 2, 4).unwrap();
        for seed in 0..50 {
            let phi = sample_random(d, 3 * seed, SampleMode::ComplexGaussian);
            let psi = sample_random(d, 3 * seed + 1, SampleMode::RealUniform);
            let mut rng = stream_rng(seed, 9);
            let v = random_isometry(8, 4, &mut rng).unwrap();
            let kraus = kraus_from_isometry(&v);
            let s = outcome_overlap_sum(&phi, &psi, &kraus).unwrap();
            assert!(s <= 1.0 + 1e-9, "{s}");
        }
    }

    #[test]
    fn rank_one_povm_reproduces_reduction() {
        let d = Dims::new(2, 2, 4).unwrap();
        for seed in 0..20 {
            let s = sample_random(d, seed, SampleMode::ComplexGaussian);
            let mut rng = stream_rng(seed, 3);
            let v = random_isometry(8, 4, &mut rng).unwrap();
            let e = measure_ensemble(&s, &kraus_from_isometry(&v)).unwrap();
            assert!((e.total_weight() - 1.0).abs() < 1e-10);
            assert!(e.reconstruction_error(&s.reduced_ab()) < 1e-9);
        }
    }
}
