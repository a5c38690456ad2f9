//! Upper and lower bounds on the A–B entanglement of a superposed
//! tripartite state `Γ = αΦ + βΨ`.
//!
//! Every upper bound here bounds the *weighted* quantity `‖Γ‖²·m(Γ)` for a
//! measure `m` evaluated on the normalized state. Two families exist:
//!
//! * entropy: `E` (entanglement of formation) and `E_a` (entanglement of
//!   assistance),
//! * concurrence: `C` (Wootters concurrence) and `C_a` (concurrence of
//!   assistance).
//!
//! For the primary measure (`E` or `C`) there are two asymmetric forms and a
//! symmetric one which is their average; [`UpperForms::best`] picks the
//! smallest. The assisted measure has a single form.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::measures::{self, MeasureSet};
use crate::states::{superpose, PureTripartiteState};

/// Tolerance on `|α|² + |β|² = 1`.
pub const COEFF_TOL: f64 = 1e-10;

/// A normalized coefficient pair `(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    alpha: C64,
    beta: C64,
}

impl Coefficients {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > COEFF_TOL {
            return Err(Error::CoefficientNorm(n));
        }
        Ok(Self { alpha, beta })
    }

    /// `α = |α| e^{iφα}`, `β = √(1-|α|²) e^{iφβ}`.
    pub fn from_abs_alpha(abs_alpha: f64, phase_alpha: f64, phase_beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&abs_alpha) {
            return Err(Error::OutOfRange(format!("|alpha| = {abs_alpha}")));
        }
        let abs_beta = (1.0 - abs_alpha * abs_alpha).max(0.0).sqrt();
        Self::new(
            C64::from_polar(abs_alpha, phase_alpha),
            C64::from_polar(abs_beta, phase_beta),
        )
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    fn weights(&self) -> (f64, f64, f64) {
        let (a, b) = (self.alpha.norm(), self.beta.norm());
        (a * a, b * b, a * b)
    }
}

/// Primary and assisted measure of one component state, e.g. `(C, C_a)` or
/// `(E, E_a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentMeasures {
    pub primary: f64,
    pub assisted: f64,
}

impl ComponentMeasures {
    pub fn new(primary: f64, assisted: f64) -> Self {
        Self { primary, assisted }
    }

    pub fn concurrence(m: &MeasureSet) -> Self {
        Self::new(m.concurrence_c, m.coa_ca)
    }

    fn check(&self) -> Result<()> {
        for x in [self.primary, self.assisted] {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::OutOfRange(format!("measure value {x}")));
            }
        }
        Ok(())
    }

    fn weighted(&self, w: f64) -> Self {
        Self::new(w * self.primary, w * self.assisted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Entropy,
    Concurrence,
}

/// The symmetric and the two asymmetric upper bounds on the primary measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperForms {
    pub sym: f64,
    /// Uses the primary measure of the first state, assisted of the second.
    pub asym1: f64,
    /// Uses the assisted measure of the first state, primary of the second.
    pub asym2: f64,
}

impl UpperForms {
    pub fn best(&self) -> f64 {
        self.sym.min(self.asym1).min(self.asym2)
    }
}

/// Bounds from pre-weighted inputs: `first`/`second` already carry the
/// factors `|a|²`/`|b|²`, and `cross` is `|a||b|`.
fn weighted_forms(
    family: Family,
    first: ComponentMeasures,
    second: ComponentMeasures,
    cross: f64,
) -> (UpperForms, f64) {
    match family {
        Family::Entropy => {
            let forms = UpperForms {
                sym: first.primary + first.assisted + second.assisted + second.primary + 4.0 * cross,
                asym1: 2.0 * (first.primary + second.assisted + 2.0 * cross),
                asym2: 2.0 * (first.assisted + second.primary + 2.0 * cross),
            };
            (forms, 2.0 * (first.assisted + second.assisted + 2.0 * cross))
        }
        Family::Concurrence => {
            let forms = UpperForms {
                sym: 0.5 * (first.primary + first.assisted)
                    + 0.5 * (second.assisted + second.primary)
                    + 2.0 * cross,
                asym1: first.primary + second.assisted + 2.0 * cross,
                asym2: first.assisted + second.primary + 2.0 * cross,
            };
            (forms, first.assisted + second.assisted + 2.0 * cross)
        }
    }
}

fn theorem(
    family: Family,
    first: ComponentMeasures,
    second: ComponentMeasures,
    coeffs: Coefficients,
) -> Result<(UpperForms, f64)> {
    first.check()?;
    second.check()?;
    let (wa, wb, cross) = coeffs.weights();
    Ok(weighted_forms(family, first.weighted(wa), second.weighted(wb), cross))
}

/// Upper bounds on `‖Γ‖² E(ρ_AB)` from `(E, E_a)` of both components.
pub fn thm1_upper_e(
    first: ComponentMeasures,
    second: ComponentMeasures,
    coeffs: Coefficients,
) -> Result<UpperForms> {
    Ok(theorem(Family::Entropy, first, second, coeffs)?.0)
}

/// Upper bound on `‖Γ‖² E_a(Γ)`: `2(|α|² Ea1 + |β|² Ea2 + 2|αβ|)`.
pub fn thm1_upper_ea(ea1: f64, ea2: f64, coeffs: Coefficients) -> Result<f64> {
    let first = ComponentMeasures::new(0.0, ea1);
    let second = ComponentMeasures::new(0.0, ea2);
    Ok(theorem(Family::Entropy, first, second, coeffs)?.1)
}

/// Upper bounds on `‖Γ‖² C(ρ_AB)` from `(C, C_a)` of both components.
pub fn thm2_upper_c(
    first: ComponentMeasures,
    second: ComponentMeasures,
    coeffs: Coefficients,
) -> Result<UpperForms> {
    Ok(theorem(Family::Concurrence, first, second, coeffs)?.0)
}

/// Upper bound on `‖Γ‖² C_a(Γ)`: `|α|² Ca1 + |β|² Ca2 + 2|αβ|`.
pub fn thm2_upper_ca(ca1: f64, ca2: f64, coeffs: Coefficients) -> Result<f64> {
    let first = ComponentMeasures::new(0.0, ca1);
    let second = ComponentMeasures::new(0.0, ca2);
    Ok(theorem(Family::Concurrence, first, second, coeffs)?.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Thm1E,
    Thm1Ea,
    Thm2C,
    Thm2Ca,
}

impl BoundKind {
    pub fn family(&self) -> Family {
        match self {
            Self::Thm1E | Self::Thm1Ea => Family::Entropy,
            Self::Thm2C | Self::Thm2Ca => Family::Concurrence,
        }
    }

    pub fn is_assisted(&self) -> bool {
        matches!(self, Self::Thm1Ea | Self::Thm2Ca)
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm1_E" | "E" => Ok(Self::Thm1E),
            "thm1_Ea" | "Ea" => Ok(Self::Thm1Ea),
            "thm2_C" | "C" => Ok(Self::Thm2C),
            "thm2_Ca" | "Ca" => Ok(Self::Thm2Ca),
            other => Err(Error::OutOfRange(format!("unknown bound kind `{other}`"))),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Thm1E => "thm1_E",
            Self::Thm1Ea => "thm1_Ea",
            Self::Thm2C => "thm2_C",
            Self::Thm2Ca => "thm2_Ca",
        })
    }
}

/// All upper forms for coefficients `(a, b)` with `|a|² + |b|²` arbitrary.
///
/// The bound is applied at `(a/t, b/t)` with `t² = |a|² + |b|²` and the
/// result multiplied by `t²`, giving an upper bound on `‖aΦ + bΨ‖² m(·)`.
/// For assisted kinds all three forms coincide.
pub fn bound_unnormalized_forms(
    a: C64,
    b: C64,
    first: ComponentMeasures,
    second: ComponentMeasures,
    kind: BoundKind,
) -> Result<UpperForms> {
    let t2 = a.norm_sqr() + b.norm_sqr();
    if t2 == 0.0 || !t2.is_finite() {
        return Err(Error::OutOfRange("both coefficients are zero".into()));
    }
    let t = t2.sqrt();
    let coeffs = Coefficients::new(a / t, b / t)?;
    let (forms, assisted) = theorem(kind.family(), first, second, coeffs)?;
    Ok(if kind.is_assisted() {
        UpperForms {
            sym: t2 * assisted,
            asym1: t2 * assisted,
            asym2: t2 * assisted,
        }
    } else {
        UpperForms {
            sym: t2 * forms.sym,
            asym1: t2 * forms.asym1,
            asym2: t2 * forms.asym2,
        }
    })
}

/// Best upper bound on `‖aΦ + bΨ‖² m(·)` for unnormalized `(a, b)`.
pub fn bound_unnormalized(
    a: C64,
    b: C64,
    first: ComponentMeasures,
    second: ComponentMeasures,
    kind: BoundKind,
) -> Result<f64> {
    Ok(bound_unnormalized_forms(a, b, first, second, kind)?.best())
}

/// Lower bound on `‖Γ‖² C(ρ_AB)`.
///
/// `Φ = (‖Γ‖/α) Γ̂ - (β/α) Ψ` expresses `Φ` as a superposition of the
/// normalized `Γ̂` and `Ψ`; the first asymmetric concurrence bound on that
/// superposition is linear in `C(Γ̂)` and rearranges into
/// `‖Γ‖² C ≥ |α|² C1 - |β|² Ca2 - 2‖Γ‖|β|`. The mirrored expression for `Ψ`
/// gives the second candidate; the larger of the two (clamped at zero) is
/// returned.
pub fn lower_bounds_c(
    first: ComponentMeasures,
    second: ComponentMeasures,
    norm_gamma: f64,
    coeffs: Coefficients,
) -> Result<f64> {
    first.check()?;
    second.check()?;
    if !norm_gamma.is_finite() || norm_gamma <= 0.0 {
        return Err(Error::OutOfRange(format!("‖Γ‖ = {norm_gamma}")));
    }
    let ng = C64::new(norm_gamma, 0.0);
    let mut best = 0.0f64;
    // (target coefficient, other coefficient, target measures, other measures)
    let branches = [
        (coeffs.alpha, coeffs.beta, first, second),
        (coeffs.beta, coeffs.alpha, second, first),
    ];
    for (own, other, own_m, other_m) in branches {
        if own.norm() == 0.0 {
            continue;
        }
        let a = ng / own;
        let b = -other / own;
        // C(Γ̂) is set to zero to isolate the constant part of the bound.
        let probe = ComponentMeasures::new(0.0, 1.0);
        let constant = bound_unnormalized_forms(a, b, probe, other_m, BoundKind::Thm2C)?.asym1;
        best = best.max(own.norm_sqr() * (own_m.primary - constant));
    }
    Ok(best)
}

/// Bounds on one measure, with the actual weighted value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureBounds {
    pub upper_sym: f64,
    pub upper_asym1: f64,
    pub upper_asym2: f64,
    pub upper_best: f64,
    pub lower_best: f64,
    /// `upper_best - ‖Γ‖²·actual`.
    pub slack: f64,
}

/// Concurrence-family bounds and actual values for one superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub alpha: C64,
    pub beta: C64,
    pub norm_sq_gamma: f64,
    pub actual: MeasureSet,
    pub components: [MeasureSet; 2],
    pub concurrence: MeasureBounds,
    pub coa: MeasureBounds,
}

impl BoundReport {
    /// Computes `Γ = αΦ + βΨ` and all concurrence bounds for it.
    pub fn evaluate(
        coeffs: Coefficients,
        phi: &PureTripartiteState,
        psi: &PureTripartiteState,
    ) -> Result<Self> {
        let m1 = measures::measures_of(phi)?;
        let m2 = measures::measures_of(psi)?;
        Self::evaluate_with(coeffs, phi, psi, m1, m2)
    }

    /// Like [`BoundReport::evaluate`] but reuses precomputed component measures.
    pub fn evaluate_with(
        coeffs: Coefficients,
        phi: &PureTripartiteState,
        psi: &PureTripartiteState,
        m1: MeasureSet,
        m2: MeasureSet,
    ) -> Result<Self> {
        let gamma = superpose(coeffs.alpha, phi, coeffs.beta, psi)?;
        let norm_sq = gamma.norm_sq();
        if norm_sq == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let actual = measures::measures_of(&gamma)?;
        Self::from_measures(coeffs, norm_sq, actual, [m1, m2])
    }

    pub fn from_measures(
        coeffs: Coefficients,
        norm_sq_gamma: f64,
        actual: MeasureSet,
        components: [MeasureSet; 2],
    ) -> Result<Self> {
        let first = ComponentMeasures::concurrence(&components[0]);
        let second = ComponentMeasures::concurrence(&components[1]);
        let forms = thm2_upper_c(first, second, coeffs)?;
        let best = forms.best();
        let lower = lower_bounds_c(first, second, norm_sq_gamma.sqrt(), coeffs)?;
        let ca_upper = thm2_upper_ca(first.assisted, second.assisted, coeffs)?;
        Ok(Self {
            alpha: coeffs.alpha,
            beta: coeffs.beta,
            norm_sq_gamma,
            actual,
            components,
            concurrence: MeasureBounds {
                upper_sym: forms.sym,
                upper_asym1: forms.asym1,
                upper_asym2: forms.asym2,
                upper_best: best,
                lower_best: lower,
                slack: best - norm_sq_gamma * actual.concurrence_c,
            },
            coa: MeasureBounds {
                upper_sym: ca_upper,
                upper_asym1: ca_upper,
                upper_asym2: ca_upper,
                upper_best: ca_upper,
                lower_best: 0.0,
                slack: ca_upper - norm_sq_gamma * actual.coa_ca,
            },
        })
    }

    /// `upper_best / (‖Γ‖² C)`, or `None` when the actual concurrence is
    /// below `min_actual`.
    pub fn concurrence_ratio(&self, min_actual: f64) -> Option<f64> {
        let c = self.actual.concurrence_c;
        (c >= min_actual).then(|| self.concurrence.upper_best / (self.norm_sq_gamma * c))
    }
}

/// Entropy-family check of `‖Γ‖² E(ρ_AB)` against the three upper forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyCheck {
    pub weighted_actual: f64,
    pub forms: UpperForms,
}

impl EntropyCheck {
    /// Smallest of `form - weighted_actual` over the three forms.
    pub fn min_slack(&self) -> f64 {
        self.forms.best() - self.weighted_actual
    }
}

/// Evaluates the entropy bounds with caller-supplied `(E, E_a)` inputs.
///
/// Passing lower estimates of `E_a` (as produced by the decomposition
/// optimizer) lowers every form, so a passed check stays sound.
pub fn theorem1_check(
    coeffs: Coefficients,
    norm_sq_gamma: f64,
    entropy_gamma: f64,
    first: ComponentMeasures,
    second: ComponentMeasures,
) -> Result<EntropyCheck> {
    Ok(EntropyCheck {
        weighted_actual: norm_sq_gamma * entropy_gamma,
        forms: thm1_upper_e(first, second, coeffs)?,
    })
}

/// Upper bound for a superposition of several terms, folding left.
///
/// With partial sum `P = Σ_{i≤k} c_i Φ_i` and `n = ‖P‖²`, the carried values
/// bound `n·m(P̂)` for the primary and assisted measure. Adding `c Θ` applies
/// the two-term bound to `√n·P̂ + c·Θ`, substituting the carried bounds for
/// the weighted measures of `P̂`; the cross term is `√n·|c|`.
///
/// `measure` supplies `(primary, assisted)` for each normalized term.
pub fn multi_term_upper_with(
    terms: &[(C64, &PureTripartiteState)],
    kind: BoundKind,
    mut measure: impl FnMut(&PureTripartiteState) -> Result<ComponentMeasures>,
) -> Result<f64> {
    if terms.len() < 2 {
        return Err(Error::OutOfRange(format!(
            "multi-term bound needs at least 2 terms, got {}",
            terms.len()
        )));
    }
    let weight: f64 = terms.iter().map(|(c, _)| c.norm_sqr()).sum();
    if (weight - 1.0).abs() > COEFF_TOL {
        return Err(Error::CoefficientNorm(weight));
    }
    let dims = terms[0].1.dims();
    for (_, s) in terms {
        if s.dims() != dims {
            return Err(Error::Dimension("terms have differing dims".into()));
        }
        if !s.is_normalized() {
            return Err(Error::NotNormalized(s.norm_sq()));
        }
    }

    let family = kind.family();
    let (c0, s0) = terms[0];
    let m0 = measure(s0)?;
    m0.check()?;
    let mut carried = m0.weighted(c0.norm_sqr());
    let mut partial = s0.scaled(c0);

    for &(c, s) in &terms[1..] {
        let m = measure(s)?;
        m.check()?;
        let cross = partial.norm_sq().sqrt() * c.norm();
        let (forms, assisted) = weighted_forms(family, carried, m.weighted(c.norm_sqr()), cross);
        carried = ComponentMeasures::new(forms.best(), assisted);
        partial = partial.add(&s.scaled(c))?;
    }
    Ok(if kind.is_assisted() {
        carried.assisted
    } else {
        carried.primary
    })
}

/// [`multi_term_upper_with`] using closed-form concurrences.
///
/// Entropy kinds have no closed-form `E_a`; use [`multi_term_upper_with`]
/// with explicit measure values for those.
pub fn multi_term_upper(terms: &[(C64, &PureTripartiteState)], kind: BoundKind) -> Result<f64> {
    if kind.family() != Family::Concurrence {
        return Err(Error::Unsupported(format!(
            "{kind} needs explicit entanglement-of-assistance values"
        )));
    }
    multi_term_upper_with(terms, kind, |s| {
        Ok(ComponentMeasures::concurrence(&measures::measures_of(s)?))
    })
}

/// Minimum of [`multi_term_upper`] over every ordering of the terms.
pub fn multi_term_upper_any_order(
    terms: &[(C64, &PureTripartiteState)],
    kind: BoundKind,
) -> Result<f64> {
    if terms.len() > 8 {
        return Err(Error::OutOfRange("at most 8 terms for the permutation search".into()));
    }
    // measures are order-independent; compute once
    let cache: Vec<ComponentMeasures> = terms
        .iter()
        .map(|(_, s)| Ok(ComponentMeasures::concurrence(&measures::measures_of(s)?)))
        .collect::<Result<_>>()?;
    if kind.family() != Family::Concurrence {
        return Err(Error::Unsupported(format!(
            "{kind} needs explicit entanglement-of-assistance values"
        )));
    }
    let mut best = f64::INFINITY;
    for perm in permutations(terms.len()) {
        let ordered: Vec<(C64, &PureTripartiteState)> = perm.iter().map(|&i| terms[i]).collect();
        let mut next = perm.iter().map(|&i| cache[i]);
        let v = multi_term_upper_with(&ordered, kind, |_| Ok(next.next().expect("one per term")))?;
        best = best.min(v);
    }
    Ok(best)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, sample_random, w_state, Dims, SampleMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn coeffs(a: f64) -> Coefficients {
        Coefficients::from_abs_alpha(a, 0.0, 0.0).unwrap()
    }

    fn cm(p: f64, a: f64) -> ComponentMeasures {
        ComponentMeasures::new(p, a)
    }

    #[test]
    fn thm1_endpoint() {
        let f = thm1_upper_e(cm(0.5, 0.7), cm(0.3, 0.9), coeffs(1.0)).unwrap();
        // sym is the mean of the asymmetric forms: (1.0 + 1.4) / 2
        assert!((f.sym - 1.2).abs() < 1e-15);
        assert!((f.asym1 - 1.0).abs() < 1e-15);
        assert!((f.asym2 - 1.4).abs() < 1e-15);
    }

    #[test]
    fn thm1_pure_cross_term() {
        let f = thm1_upper_e(cm(0.0, 0.0), cm(0.0, 0.0), coeffs(H)).unwrap();
        assert!((f.sym - 2.0).abs() < 1e-12);
    }

    #[test]
    fn thm1_ea_values() {
        assert!((thm1_upper_ea(0.4, 0.9, coeffs(1.0)).unwrap() - 0.8).abs() < 1e-15);
        assert!((thm1_upper_ea(1.0, 1.0, coeffs(H)).unwrap() - 4.0).abs() < 1e-12);
        assert!((thm1_upper_ea(0.0, 0.0, coeffs(0.6)).unwrap() - 1.92).abs() < 1e-12);
    }

    #[test]
    fn thm2_values() {
        let f = thm2_upper_c(cm(0.2, 0.6), cm(0.1, 0.3), coeffs(1.0)).unwrap();
        assert!((f.sym - 0.4).abs() < 1e-15);
        assert!(f.sym >= 0.2);
        assert!((thm2_upper_ca(0.6, 0.1, coeffs(1.0)).unwrap() - 0.6).abs() < 1e-15);
        assert!((thm2_upper_ca(1.0, 1.0, coeffs(H)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_pair_symmetric_bound() {
        let g = ghz();
        let r = BoundReport::evaluate(coeffs(H), &g, &g).unwrap();
        assert!((r.norm_sq_gamma - 2.0).abs() < 1e-12);
        assert!(r.actual.concurrence_c.abs() < 1e-10);
        assert!((r.concurrence.upper_sym - 1.5).abs() < 1e-10);
        assert!(r.concurrence.slack >= 0.0);
    }

    #[test]
    fn rejects_unnormalized_coefficients() {
        assert!(matches!(
            Coefficients::new(re(1.0), re(1.0)),
            Err(Error::CoefficientNorm(_))
        ));
        assert!(thm2_upper_c(cm(-0.1, 0.2), cm(0.0, 0.0), coeffs(0.5)).is_err());
    }

    #[test]
    fn symmetric_is_mean_of_asymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let a = cm(rng.random(), rng.random());
            let b = cm(rng.random(), rng.random());
            let k = Coefficients::from_abs_alpha(rng.random(), rng.random::<f64>() * 6.0, 1.0).unwrap();
            for f in [thm1_upper_e(a, b, k).unwrap(), thm2_upper_c(a, b, k).unwrap()] {
                assert!((f.sym - 0.5 * (f.asym1 + f.asym2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bounds_depend_only_on_moduli() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let a = cm(rng.random(), rng.random());
            let b = cm(rng.random(), rng.random());
            let abs = rng.random();
            let k0 = Coefficients::from_abs_alpha(abs, 0.0, 0.0).unwrap();
            let k1 = Coefficients::from_abs_alpha(abs, rng.random::<f64>() * 6.3, rng.random::<f64>() * 6.3).unwrap();
            let (f0, f1) = (thm2_upper_c(a, b, k0).unwrap(), thm2_upper_c(a, b, k1).unwrap());
            assert!((f0.best() - f1.best()).abs() < 1e-12);
            assert!((f0.sym - f1.sym).abs() < 1e-12);
            let (e0, e1) = (thm1_upper_e(a, b, k0).unwrap(), thm1_upper_e(a, b, k1).unwrap());
            assert!((e0.sym - e1.sym).abs() < 1e-12);
            let d = (thm2_upper_ca(a.assisted, b.assisted, k0).unwrap()
                - thm2_upper_ca(a.assisted, b.assisted, k1).unwrap())
            .abs();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn unnormalized_reduces_and_scales() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [BoundKind::Thm1E, BoundKind::Thm1Ea, BoundKind::Thm2C, BoundKind::Thm2Ca] {
            for _ in 0..100 {
                let first = cm(rng.random(), rng.random());
                let second = cm(rng.random(), rng.random());
                let k = Coefficients::from_abs_alpha(rng.random(), 0.3, -1.1).unwrap();
                let direct = match kind {
                    BoundKind::Thm1E => thm1_upper_e(first, second, k).unwrap().best(),
                    BoundKind::Thm1Ea => thm1_upper_ea(first.assisted, second.assisted, k).unwrap(),
                    BoundKind::Thm2C => thm2_upper_c(first, second, k).unwrap().best(),
                    BoundKind::Thm2Ca => thm2_upper_ca(first.assisted, second.assisted, k).unwrap(),
                };
                let t1 = bound_unnormalized(k.alpha(), k.beta(), first, second, kind).unwrap();
                assert!((t1 - direct).abs() < 1e-12);
                // doubling both coefficients quadruples the weighted bound
                let t2 = bound_unnormalized(k.alpha() * 2.0, k.beta() * 2.0, first, second, kind).unwrap();
                assert!((t2 / 4.0 - direct).abs() < 1e-12);

                // manual normalization
                let (a, b) = (C64::new(rng.random(), rng.random()), C64::new(rng.random(), -rng.random::<f64>()));
                let t = (a.norm_sqr() + b.norm_sqr()).sqrt();
                let manual = match kind {
                    BoundKind::Thm2C => thm2_upper_c(first, second, Coefficients::new(a / t, b / t).unwrap())
                        .unwrap()
                        .best(),
                    _ => continue,
                } * t * t;
                let got = bound_unnormalized(a, b, first, second, kind).unwrap();
                assert!((got - manual).abs() < 1e-12);
            }
        }
        assert!(bound_unnormalized(re(0.0), re(0.0), cm(0.0, 0.0), cm(0.0, 0.0), BoundKind::Thm2C).is_err());
    }

    #[test]
    fn lower_bound_endpoints() {
        let l = lower_bounds_c(cm(0.4, 0.7), cm(0.2, 0.5), 1.0, coeffs(1.0)).unwrap();
        assert!((l - 0.4).abs() < 1e-15);
        let l = lower_bounds_c(cm(0.0, 0.0), cm(0.0, 0.0), 1.0, coeffs(0.3)).unwrap();
        assert_eq!(l, 0.0);
        assert!(lower_bounds_c(cm(0.0, 0.0), cm(0.0, 0.0), 0.0, coeffs(0.3)).is_err());
    }

    #[test]
    fn lower_bound_matches_rearranged_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let f = cm(rng.random(), rng.random());
            let s = cm(rng.random(), rng.random());
            let k = Coefficients::from_abs_alpha(rng.random(), rng.random(), rng.random()).unwrap();
            let ng: f64 = 0.2 + rng.random::<f64>();
            let (a, b) = (k.alpha().norm(), k.beta().norm());
            let expected = (a * a * f.primary - b * b * s.assisted - 2.0 * ng * b)
                .max(b * b * s.primary - a * a * f.assisted - 2.0 * ng * a)
                .max(0.0);
            let got = lower_bounds_c(f, s, ng, k).unwrap();
            assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        }
    }

    #[test]
    fn ghz_w_sandwich() {
        let k = coeffs(0.99);
        let r = BoundReport::evaluate(k, &ghz(), &w_state()).unwrap();
        let weighted = r.norm_sq_gamma * r.actual.concurrence_c;
        assert!(r.concurrence.lower_best <= weighted + 1e-9);
        assert!(weighted <= r.concurrence.upper_best + 1e-9);
        let r = BoundReport::evaluate(k, &w_state(), &ghz()).unwrap();
        let weighted = r.norm_sq_gamma * r.actual.concurrence_c;
        assert!(r.concurrence.lower_best <= weighted + 1e-9);
        assert!(r.concurrence.lower_best > 0.0);
    }

    #[test]
    fn multi_term_two_terms_matches_pair() {
        let d = Dims::new(2, 2, 4).unwrap();
        for seed in 0..20 {
            let p = sample_random(d, 2 * seed, SampleMode::ComplexGaussian);
            let q = sample_random(d, 2 * seed + 1, SampleMode::ComplexGaussian);
            let k = Coefficients::from_abs_alpha(0.37, 0.4, 2.0).unwrap();
            let r = BoundReport::evaluate(k, &p, &q).unwrap();
            let c = multi_term_upper(&[(k.alpha(), &p), (k.beta(), &q)], BoundKind::Thm2C).unwrap();
            let ca = multi_term_upper(&[(k.alpha(), &p), (k.beta(), &q)], BoundKind::Thm2Ca).unwrap();
            assert!((c - r.concurrence.upper_best).abs() < 1e-12);
            assert!((ca - r.coa.upper_best).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_term_degenerate_third() {
        let d = Dims::new(2, 2, 4).unwrap();
        let p = sample_random(d, 10, SampleMode::ComplexGaussian);
        let q = sample_random(d, 11, SampleMode::ComplexGaussian);
        let t = sample_random(d, 12, SampleMode::ComplexGaussian);
        let k = coeffs(0.8);
        for kind in [BoundKind::Thm2C, BoundKind::Thm2Ca] {
            let two = multi_term_upper(&[(k.alpha(), &p), (k.beta(), &q)], kind).unwrap();
            let three = multi_term_upper(&[(k.alpha(), &p), (k.beta(), &q), (re(0.0), &t)], kind).unwrap();
            assert!((two - three).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_term_rejects_bad_input() {
        let g = ghz();
        assert!(multi_term_upper(&[(re(1.0), &g)], BoundKind::Thm2C).is_err());
        assert!(matches!(
            multi_term_upper(&[(re(1.0), &g), (re(1.0), &g)], BoundKind::Thm2C),
            Err(Error::CoefficientNorm(_))
        ));
        assert!(matches!(
            multi_term_upper(&[(re(H), &g), (re(H), &g)], BoundKind::Thm1E),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn multi_term_entropy_with_supplied_measures() {
        // with all measures zero only the cross terms remain:
        // step 1: 2·2|c1||c2|, step 2 doubles that and adds 2·2√n|c3|
        let g = ghz();
        let t = 1.0 / 3f64.sqrt();
        let terms = [(re(t), &g), (re(t), &g), (re(t), &g)];
        let v = multi_term_upper_with(&terms, BoundKind::Thm1Ea, |_| Ok(cm(0.0, 0.0))).unwrap();
        let first = 2.0 * (2.0 * t * t);
        let n = 4.0 * t * t; // ‖2tΦ‖²
        let expected = 2.0 * (first + 2.0 * n.sqrt() * t);
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn any_order_is_no_worse() {
        let d = Dims::new(2, 2, 4).unwrap();
        let s: Vec<_> = (0..3).map(|i| sample_random(d, 40 + i, SampleMode::ComplexGaussian)).collect();
        let w = [re(0.2), C64::new(0.0, 0.5), re(-(1.0f64 - 0.04 - 0.25).sqrt())];
        let terms: Vec<_> = w.iter().copied().zip(s.iter()).collect();
        let fixed = multi_term_upper(&terms, BoundKind::Thm2C).unwrap();
        let any = multi_term_upper_any_order(&terms, BoundKind::Thm2C).unwrap();
        assert!(any <= fixed + 1e-15);
        assert_eq!(permutations(3).len(), 6);
    }
}
