//! Closed-form entanglement quantities for two qubits and for pure states.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, EigenSystem, C64, ZERO};
use crate::states::{PureTripartiteState, NORM_TOL};

/// Trace tolerance for density-matrix inputs.
pub const TRACE_TOL: f64 = 1e-9;
/// Spectral values in `[-LAMBDA_CLAMP, 0)` are treated as zero.
pub const LAMBDA_CLAMP: f64 = 1e-10;

/// `-Σ p log2 p` with `0 log 0 = 0`; small negative roundoff is ignored.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// `h(x) = -x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("binary entropy argument {x}")));
    }
    Ok(shannon_entropy(&[x, 1.0 - x]))
}

/// Von Neumann entropy (in ebits) of either marginal of a bipartite pure state.
pub fn entropy_pure(state: &[C64], da: usize, db: usize) -> Result<f64> {
    Ok(shannon_entropy(&marginal_spectrum(state, da, db, Side::A)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Eigenvalues of `Tr_B |ψ><ψ|` (or `Tr_A`) for a normalized `ψ` on `A ⊗ B`.
pub fn marginal_spectrum(state: &[C64], da: usize, db: usize, side: Side) -> Result<Vec<f64>> {
    if state.len() != da * db || da == 0 || db == 0 {
        return Err(Error::Dimension(format!(
            "{} amplitudes for a {da}x{db} bipartite state",
            state.len()
        )));
    }
    let n = linalg::norm_sq(state);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    let amp = |a: usize, b: usize| state[a * db + b];
    let marginal = match side {
        Side::A => ComplexMatrix::from_fn(da, da, |r, c| {
            (0..db).map(|b| amp(r, b) * amp(c, b).conj()).sum()
        }),
        Side::B => ComplexMatrix::from_fn(db, db, |r, c| {
            (0..da).map(|a| amp(a, r) * amp(a, c).conj()).sum()
        }),
    };
    linalg::eigenvalues_hermitian(&marginal)
}

/// `(σy ⊗ σy) ρ* (σy ⊗ σy)`.
pub fn spin_flip(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::Dimension(format!(
            "spin flip needs a 4x4 matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let yy = linalg::kron(&linalg::sigma_y(), &linalg::sigma_y());
    Ok(&(&yy * &rho.conj()) * &yy)
}

/// Spectral values at or below this are treated as exact zeros of a
/// density matrix when forming its range.
pub const RANK_TOL: f64 = 1e-14;

/// Validates the density-matrix contract (square, Hermitian, unit trace,
/// PSD) and returns the spectral decomposition.
pub fn density_spectrum(rho: &ComplexMatrix) -> Result<EigenSystem> {
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidDensity(format!("trace {tr}")));
    }
    let eig = linalg::eig_hermitian(rho)?;
    let min = *eig.values.last().expect("nonempty");
    if min < -linalg::PSD_ERROR_TOL {
        return Err(Error::NotPsd(min));
    }
    Ok(eig)
}

pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    density_spectrum(rho).map(|_| ())
}

/// Columns `√μ_k |v_k>` for the eigenpairs with `μ_k > RANK_TOL`.
pub fn range_factor(eig: &EigenSystem) -> Vec<Vec<C64>> {
    eig.values
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > RANK_TOL)
        .map(|(k, &mu)| {
            let s = mu.sqrt();
            eig.vectors.column(k).into_iter().map(|z| z * s).collect()
        })
        .collect()
}

/// `(σy ⊗ σy) x` for a real antidiagonal `σy ⊗ σy`.
fn flip(x: &[C64]) -> [C64; 4] {
    [-x[3], x[2], x[1], -x[0]]
}

/// Descending square roots of the eigenvalues of `ρ ρ̃` for a two-qubit `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSpectrum {
    pub lambdas: [f64; 4],
}

impl LambdaSpectrum {
    /// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)`.
    pub fn concurrence(&self) -> f64 {
        let [l1, l2, l3, l4] = self.lambdas;
        (l1 - l2 - l3 - l4).max(0.0)
    }

    /// Concurrence of assistance `Σ λi = F(ρ, ρ̃)`.
    pub fn coa(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

/// The λ-spectrum of a two-qubit density matrix.
///
/// With `ρ = X X†` (`X` the range factor), the nonzero eigenvalues of `ρ ρ̃`
/// are the squared singular values of the complex symmetric matrix
/// `τ = Xᵀ (σy⊗σy) X`. The singular values are read off the Hermitian
/// dilation `[[0, τ], [τ†, 0]]`, whose spectrum is `±σ_i`; this avoids the
/// square root of a near-zero eigenvalue that limits the accuracy of the
/// `√ρ ρ̃ √ρ` route (kept as [`fidelity`]) on rank-deficient inputs.
pub fn lambda_spectrum(rho: &ComplexMatrix) -> Result<LambdaSpectrum> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::Dimension(format!(
            "lambda spectrum needs a 4x4 density matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let x = range_factor(&density_spectrum(rho)?);
    let r = x.len();
    let mut lambdas = [0.0; 4];
    if r == 0 {
        return Ok(LambdaSpectrum { lambdas });
    }
    let flipped: Vec<[C64; 4]> = x.iter().map(|v| flip(v)).collect();
    // τ_ij = Σ_k X_ki (Y X)_kj, no conjugation
    let tau = |i: usize, j: usize| -> C64 { x[i].iter().zip(&flipped[j]).map(|(a, b)| a * b).sum() };
    let dilation = ComplexMatrix::from_fn(2 * r, 2 * r, |p, q| match (p < r, q < r) {
        (true, false) => tau(p, q - r),
        (false, true) => tau(q, p - r).conj(),
        _ => ZERO,
    });
    let values = linalg::eigenvalues_hermitian(&dilation)?;
    for (l, &v) in lambdas.iter_mut().zip(&values[..r]) {
        if v < -LAMBDA_CLAMP {
            return Err(Error::InvalidDensity(format!("negative singular value {v:e}")));
        }
        *l = v.max(0.0);
    }
    Ok(LambdaSpectrum { lambdas })
}

/// Uhlmann fidelity `Tr √(√σ ρ √σ)`.
pub fn fidelity(sigma: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    let s = linalg::psd_sqrt(sigma)?;
    let inner = (&(&s * rho) * &s).hermitian_part();
    Ok(linalg::psd_sqrt(&inner)?.trace().re)
}

/// Pure-state concurrence `|<ψ*| σy⊗σy |ψ>| = 2|ψ00 ψ11 - ψ01 ψ10|`.
///
/// The input is normalized internally.
pub fn concurrence_pure(state: &[C64]) -> Result<f64> {
    if state.len() != 4 {
        return Err(Error::Dimension(format!(
            "pure concurrence needs 4 amplitudes, got {}",
            state.len()
        )));
    }
    let n = linalg::norm_sq(state);
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((2.0 * (state[0] * state[3] - state[1] * state[2]).norm() / n).min(1.0))
}

/// Two-qubit entanglement of formation from concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    shannon_entropy(&[x, 1.0 - x])
}

/// Entanglement of the `A ⊗ B` reduction of a `(2, 2, n)` pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSet {
    /// Entanglement of formation in ebits.
    pub entropy_e: f64,
    /// Wootters concurrence.
    pub concurrence_c: f64,
    /// Concurrence of assistance.
    pub coa_ca: f64,
}

/// C, C_a and E of `Tr_C |Γ><Γ|`, evaluated on the normalized state.
pub fn measures_of(gamma: &PureTripartiteState) -> Result<MeasureSet> {
    let d = gamma.dims();
    if d.a != 2 || d.b != 2 {
        return Err(Error::Dimension(format!(
            "measures need dA = dB = 2, got {d}"
        )));
    }
    let rho = gamma.normalized()?.reduced_ab();
    let spec = lambda_spectrum(&rho)?;
    let c = spec.concurrence();
    Ok(MeasureSet {
        entropy_e: eof_from_concurrence(c),
        concurrence_c: c,
        coa_ca: spec.coa(),
    })
}
