//! Tripartite pure states, superpositions, sampling, fixtures and
//! measurement-induced ensembles.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ZERO};

/// Squared-norm tolerance for the "normalized" flag.
pub const NORM_TOL: f64 = 1e-10;

/// Subsystem dimensions `(dA, dB, dC)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::Dimension(format!("dims must be positive, got ({a},{b},{c})")));
        }
        Ok(Self { a, b, c })
    }

    pub fn total(&self) -> usize {
        self.a * self.b * self.c
    }

    pub fn ab(&self) -> usize {
        self.a * self.b
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.a, self.b, self.c]
    }

    /// Flat index of basis state `|a b c>`.
    pub fn index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.b + b) * self.c + c
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// A (not necessarily normalized) amplitude vector on `A ⊗ B ⊗ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureTripartiteState {
    dims: Dims,
    amps: Vec<C64>,
}

impl PureTripartiteState {
    pub fn new(dims: Dims, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for dims {dims}",
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::OutOfRange("non-finite amplitude".into()));
        }
        Ok(Self { dims, amps })
    }

    pub fn from_real(dims: Dims, amps: &[f64]) -> Result<Self> {
        Self::new(dims, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Basis state `|a b c>`.
    pub fn basis(dims: Dims, a: usize, b: usize, c: usize) -> Self {
        let mut amps = vec![ZERO; dims.total()];
        amps[dims.index(a, b, c)] = C64::new(1.0, 0.0);
        Self { dims, amps }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        linalg::norm_sq(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            dims: self.dims,
            amps: self.amps.iter().map(|z| z / n).collect(),
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::Dimension(format!(
                "inner product of {} and {} states",
                self.dims, other.dims
            )));
        }
        Ok(linalg::inner(&self.amps, &other.amps))
    }

    /// `Tr_C |self><self|` without normalization.
    pub fn reduced_ab(&self) -> ComplexMatrix {
        let d = self.dims;
        let ab = d.ab();
        ComplexMatrix::from_fn(ab, ab, |r, c| {
            let row = &self.amps[r * d.c..(r + 1) * d.c];
            let col = &self.amps[c * d.c..(c + 1) * d.c];
            row.iter().zip(col).map(|(x, y)| x * y.conj()).sum()
        })
    }

    /// Applies `U_A ⊗ U_B ⊗ I_C`.
    pub fn apply_local_ab(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let d = self.dims;
        if ua.rows() != d.a || ua.cols() != d.a || ub.rows() != d.b || ub.cols() != d.b {
            return Err(Error::Dimension("local operator does not match dims".into()));
        }
        let op = linalg::kron(&linalg::kron(ua, ub), &ComplexMatrix::identity(d.c));
        Self::new(d, op.apply(&self.amps)?)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            dims: self.dims,
            amps: self.amps.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::Dimension(format!(
                "cannot add {} and {} states",
                self.dims, other.dims
            )));
        }
        Ok(Self {
            dims: self.dims,
            amps: self.amps.iter().zip(&other.amps).map(|(x, y)| x + y).collect(),
        })
    }
}

/// `a·Φ + b·Ψ`, deliberately left unnormalized.
pub fn superpose(
    a: C64,
    phi: &PureTripartiteState,
    b: C64,
    psi: &PureTripartiteState,
) -> Result<PureTripartiteState> {
    if phi.dims != psi.dims {
        return Err(Error::Dimension(format!(
            "cannot superpose {} and {} states",
            phi.dims, psi.dims
        )));
    }
    for s in [phi, psi] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized(s.norm_sq()));
        }
    }
    phi.scaled(a).add(&psi.scaled(b))
}

/// Expected squared norm of `a·Φ + b·Ψ` from the overlap.
pub fn superposition_norm_sq(a: C64, b: C64, overlap: C64) -> f64 {
    a.norm_sqr() + b.norm_sqr() + 2.0 * (a.conj() * b * overlap).re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// i.i.d. standard complex Gaussians, normalized (Haar measure).
    ComplexGaussian,
    /// i.i.d. uniform `[0, 1)` reals, normalized.
    RealUniform,
}

impl FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex-gaussian" | "gaussian" | "haar" => Ok(Self::ComplexGaussian),
            "real-uniform" | "uniform" => Ok(Self::RealUniform),
            other => Err(Error::OutOfRange(format!("unknown sample mode `{other}`"))),
        }
    }
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ComplexGaussian => "complex-gaussian",
            Self::RealUniform => "real-uniform",
        })
    }
}

/// Counter-based stream `index` under master `seed`.
///
/// Streams are independent of each other and of evaluation order, so sample
/// `k` of a sweep can be regenerated on its own.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn sample_with<R: Rng + ?Sized>(dims: Dims, mode: SampleMode, rng: &mut R) -> PureTripartiteState {
    loop {
        let amps: Vec<C64> = (0..dims.total())
            .map(|_| match mode {
                SampleMode::ComplexGaussian => {
                    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                }
                SampleMode::RealUniform => C64::new(rng.random::<f64>(), 0.0),
            })
            .collect();
        let state = PureTripartiteState { dims, amps };
        if let Ok(s) = state.normalized() {
            return s;
        }
    }
}

pub fn sample_random(dims: Dims, seed: u64, mode: SampleMode) -> PureTripartiteState {
    sample_with(dims, mode, &mut stream_rng(seed, 0))
}

/// The two printed `(2,2,4)` example states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    Phi33,
    Psi34,
}

const PHI33: [f64; 16] = [
    0.4061, 0.1119, 0.1321, 0.4155, //
    0.2188, 0.3618, 0.0422, 0.3351, //
    0.2407, 0.1541, 0.1120, 0.0759, //
    0.2656, 0.2659, 0.2019, 0.2402,
];

const PSI34: [f64; 16] = [
    0.3868, 0.0250, 0.4408, 0.0716, //
    0.1171, 0.1588, 0.1093, 0.0930, //
    0.0581, 0.2613, 0.1253, 0.0290, //
    0.2439, 0.4571, 0.3642, 0.3189,
];

impl Fixture {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Phi33 => "phi33",
            Self::Psi34 => "psi34",
        }
    }

    /// Amplitudes as printed (four decimals, not exactly normalized).
    pub fn raw_amplitudes(&self) -> &'static [f64; 16] {
        match self {
            Self::Phi33 => &PHI33,
            Self::Psi34 => &PSI34,
        }
    }

    pub fn raw_norm_sq(&self) -> f64 {
        self.raw_amplitudes().iter().map(|x| x * x).sum()
    }

    /// Factor applied to the printed amplitudes on load.
    pub fn correction_factor(&self) -> f64 {
        1.0 / self.raw_norm_sq().sqrt()
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi33" | "phi" => Ok(Self::Phi33),
            "psi34" | "psi" => Ok(Self::Psi34),
            other => Err(Error::OutOfRange(format!("unknown fixture `{other}`"))),
        }
    }
}

pub fn load_fixture(fixture: Fixture) -> Result<PureTripartiteState> {
    let norm_sq = fixture.raw_norm_sq();
    if (norm_sq - 1.0).abs() > 1e-3 {
        return Err(Error::FixtureNorm {
            name: fixture.name(),
            norm_sq,
        });
    }
    PureTripartiteState::from_real(Dims { a: 2, b: 2, c: 4 }, fixture.raw_amplitudes())?.normalized()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub weight: f64,
    /// Normalized pure state on `A ⊗ B`.
    pub state: Vec<C64>,
}

/// A weighted set of pure states realizing a density matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ensemble {
    pub members: Vec<EnsembleMember>,
}

impl Ensemble {
    /// Builds an ensemble from subnormalized vectors `√p_i |w_i>`, dropping
    /// members with weight below `min_weight`.
    pub fn from_subnormalized<'a>(
        vectors: impl IntoIterator<Item = &'a [C64]>,
        min_weight: f64,
    ) -> Self {
        let members = vectors
            .into_iter()
            .filter_map(|v| {
                let weight = linalg::norm_sq(v);
                if weight < min_weight || weight == 0.0 {
                    return None;
                }
                let n = weight.sqrt();
                Some(EnsembleMember {
                    weight,
                    state: v.iter().map(|z| z / n).collect(),
                })
            })
            .collect();
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|m| m.weight).sum()
    }

    /// `Σ p_i |w_i><w_i|`.
    pub fn density(&self) -> Option<ComplexMatrix> {
        let n = self.members.first()?.state.len();
        let mut rho = ComplexMatrix::zeros(n, n);
        for m in &self.members {
            for r in 0..n {
                for c in 0..n {
                    rho[(r, c)] += m.state[r] * m.state[c].conj() * m.weight;
                }
            }
        }
        Some(rho)
    }

    pub fn reconstruction_error(&self, rho: &ComplexMatrix) -> f64 {
        self.density().map_or(f64::INFINITY, |d| d.max_abs_diff(rho))
    }

    /// Weighted average of `f` over members.
    pub fn average(&self, f: impl Fn(&[C64]) -> f64) -> f64 {
        self.members.iter().map(|m| m.weight * f(&m.state)).sum()
    }
}

/// Largest deviation of `Σ N_j† N_j` from the identity.
pub fn completeness_deviation(kraus: &[ComplexMatrix]) -> Result<f64> {
    let n = kraus
        .first()
        .map(|k| k.cols())
        .ok_or(Error::Completeness(f64::INFINITY))?;
    let mut sum = ComplexMatrix::zeros(n, n);
    for k in kraus {
        if k.cols() != n {
            return Err(Error::Dimension("Kraus operators of differing input dimension".into()));
        }
        sum = &sum + &(&k.adjoint() * k);
    }
    Ok(sum.max_abs_diff(&ComplexMatrix::identity(n)))
}

/// Ensemble on `A ⊗ B` induced by a generalized measurement on `C`.
///
/// Outcome `(i, j)` has subnormalized state `<i|N_j|Γ> / ‖Γ‖` where `<i|` runs
/// over the computational basis of the Kraus output space. Outcomes with
/// probability below `1e-14` are dropped.
pub fn measure_ensemble(gamma: &PureTripartiteState, kraus: &[ComplexMatrix]) -> Result<Ensemble> {
    let d = gamma.dims;
    if kraus.iter().any(|k| k.cols() != d.c) {
        return Err(Error::Dimension(format!(
            "Kraus operators must act on a {}-dimensional space",
            d.c
        )));
    }
    let dev = completeness_deviation(kraus)?;
    if dev > NORM_TOL {
        return Err(Error::Completeness(dev));
    }
    let norm = gamma.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut outcomes: Vec<Vec<C64>> = Vec::new();
    for k in kraus {
        for i in 0..k.rows() {
            let v: Vec<C64> = (0..d.ab())
                .map(|ab| {
                    (0..d.c)
                        .map(|c| k[(i, c)] * gamma.amps[ab * d.c + c])
                        .sum::<C64>()
                        / norm
                })
                .collect();
            outcomes.push(v);
        }
    }
    Ok(Ensemble::from_subnormalized(outcomes.iter().map(Vec::as_slice), 1e-14))
}

/// Parses the text state format: `dims dA dB dC` then one `re im` line per
/// amplitude. Blank lines and `#` comments are ignored.
pub fn parse_state(text: &str) -> Result<PureTripartiteState> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing `dims` header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "dims" {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("expected `dims dA dB dC`, found `{header}`"),
        });
    }
    let mut d = [0usize; 3];
    for (slot, f) in d.iter_mut().zip(&fields[1..]) {
        *slot = f.parse().map_err(|_| Error::Parse {
            line: header_line,
            msg: format!("invalid dimension `{f}`"),
        })?;
    }
    let dims = Dims::new(d[0], d[1], d[2]).map_err(|e| Error::Parse {
        line: header_line,
        msg: e.to_string(),
    })?;

    let mut amps = Vec::with_capacity(dims.total());
    let mut last_line = header_line;
    for (line, l) in lines {
        last_line = line;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `re im`, found `{l}`"),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            let x: f64 = s.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid number `{s}`"),
            })?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::Parse {
                    line,
                    msg: format!("non-finite number `{s}`"),
                })
            }
        };
        amps.push(C64::new(parse(parts[0])?, parse(parts[1])?));
        if amps.len() > dims.total() {
            return Err(Error::Parse {
                line,
                msg: format!("more than {} amplitudes for dims {dims}", dims.total()),
            });
        }
    }
    if amps.len() != dims.total() {
        return Err(Error::Parse {
            line: last_line,
            msg: format!("{} amplitudes, expected {} for dims {dims}", amps.len(), dims.total()),
        });
    }
    PureTripartiteState::new(dims, amps)
}

pub fn format_state(state: &PureTripartiteState) -> String {
    let d = state.dims;
    let mut out = format!("dims {} {} {}\n", d.a, d.b, d.c);
    for z in &state.amps {
        out.push_str(&format!("{:e} {:e}\n", z.re, z.im));
    }
    out
}

pub fn read_state_file(path: impl AsRef<Path>) -> Result<PureTripartiteState> {
    parse_state(&std::fs::read_to_string(path)?)
}

pub fn write_state_file(path: impl AsRef<Path>, state: &PureTripartiteState) -> Result<()> {
    std::fs::write(path, format_state(state))?;
    Ok(())
}

/// `(|000> + |111>)/√2` on `(2, 2, 2)`.
pub fn ghz() -> PureTripartiteState {
    let dims = Dims { a: 2, b: 2, c: 2 };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 8];
    amps[0] = C64::new(h, 0.0);
    amps[7] = C64::new(h, 0.0);
    PureTripartiteState { dims, amps }
}

/// `(|001> + |010> + |100>)/√3` on `(2, 2, 2)`.
pub fn w_state() -> PureTripartiteState {
    let dims = Dims { a: 2, b: 2, c: 2 };
    let t = 1.0 / 3f64.sqrt();
    let mut amps = vec![ZERO; 8];
    for i in [1, 2, 4] {
        amps[i] = C64::new(t, 0.0);
    }
    PureTripartiteState { dims, amps }
}

/// `(|00> + |11>)/√2 ⊗ |0>` on `(2, 2, dc)`.
pub fn bell_product(dc: usize) -> PureTripartiteState {
    let dims = Dims { a: 2, b: 2, c: dc };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; dims.total()];
    amps[dims.index(0, 0, 0)] = C64::new(h, 0.0);
    amps[dims.index(1, 1, 0)] = C64::new(h, 0.0);
    PureTripartiteState { dims, amps }
}
