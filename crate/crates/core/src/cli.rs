//! Command-line harness: single-state measurements, α-sweeps, Monte-Carlo
//! verification of the bounds and oracle certification.
//!
//! Everything here is deterministic for fixed inputs, seed and flags. Sample
//! `k` of a run draws from its own counter-based stream `(seed, k)`, so the
//! results do not depend on the number of worker threads.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bounds::{
    multi_term_upper, theorem1_check, BoundKind, BoundReport, Coefficients, ComponentMeasures,
};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::measures::{self, MeasureSet};
use crate::oracle::{self, DecompositionSearch, Direction, Objective};
use crate::states::{self, stream_rng, Dims, Fixture, PureTripartiteState, SampleMode};

/// Slack below `-SLACK_TOL` counts as a bound violation.
pub const SLACK_TOL: f64 = 1e-9;
/// Ratio statistics only use samples whose actual concurrence exceeds this.
pub const RATIO_MIN_ACTUAL: f64 = 0.1;
/// The sweep leaves the ratio column empty below this actual concurrence.
pub const SWEEP_RATIO_CUTOFF: f64 = 1e-6;
/// Oracle gaps to the closed forms above this fail certification.
pub const ORACLE_GAP_TOL: f64 = 1e-3;

pub const CSV_HEADER: &str =
    "abs_alpha,norm_sq_gamma,C_actual,C_upper_sym,C_upper_best,C_lower,Ca_actual,Ca_upper,ratio";

/// `printf("%.12g")`.
pub fn fmt_num(x: f64) -> String {
    const SIG: usize = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Oracle budget written as `RESTARTSxSWEEPS`, e.g. `32x500`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub restarts: usize,
    pub sweeps: usize,
}

impl Default for Budget {
    fn default() -> Self {
        let d = DecompositionSearch::default();
        Self {
            restarts: d.restarts,
            sweeps: d.sweeps,
        }
    }
}

impl Budget {
    pub fn search(&self) -> DecompositionSearch {
        DecompositionSearch::with_budget(self.restarts, self.sweeps)
    }
}

impl FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::OutOfRange(format!("budget `{s}` is not RESTARTSxSWEEPS"));
        let (r, w) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let restarts: usize = r.trim().parse().map_err(|_| bad())?;
        let sweeps: usize = w.trim().parse().map_err(|_| bad())?;
        if restarts == 0 || sweeps == 0 {
            return Err(bad());
        }
        Ok(Self { restarts, sweeps })
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.restarts, self.sweeps)
    }
}

/// Where a state comes from: a state file, or one of the built-in
/// references `@phi33`, `@psi34`, `@ghz`, `@w`, `@bell`, `@random`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSource {
    File(PathBuf),
    Fixture(Fixture),
    Ghz,
    W,
    Bell,
    /// Drawn from the stream `(seed, index)` with the given dims and mode.
    Random,
}

impl FromStr for StateSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix('@') {
            None => Ok(Self::File(PathBuf::from(s))),
            Some("ghz") => Ok(Self::Ghz),
            Some("w") => Ok(Self::W),
            Some("bell") => Ok(Self::Bell),
            Some("random") => Ok(Self::Random),
            Some(name) => Ok(Self::Fixture(name.parse()?)),
        }
    }
}

/// Context for resolving `@random`.
#[derive(Debug, Clone, Copy)]
pub struct RandomContext {
    pub dims: Dims,
    pub seed: u64,
    pub mode: SampleMode,
}

impl StateSource {
    pub fn load(&self, ctx: &RandomContext, index: u64) -> Result<PureTripartiteState> {
        match self {
            Self::File(p) => states::read_state_file(p),
            Self::Fixture(f) => states::load_fixture(*f),
            Self::Ghz => Ok(states::ghz()),
            Self::W => Ok(states::w_state()),
            Self::Bell => Ok(states::bell_product(2)),
            Self::Random => {
                let mut rng = stream_rng(ctx.seed, index);
                Ok(states::sample_with(ctx.dims, ctx.mode, &mut rng))
            }
        }
    }
}

fn parse_via<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlphaMode {
    /// `|α|` cycles through an evenly spaced grid, phases zero.
    Grid,
    /// `|α|` uniform on `[0, 1]`, phases uniform.
    Random,
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Grid => "grid",
            Self::Random => "random",
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "entsup", version, about = "Entanglement bounds for superposed tripartite states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print C, C_a and E of the A-B reduction of a (2, 2, n) state.
    Measure(MeasureArgs),
    /// Sweep |α| for Γ = αA + βB and write bound/actual columns as CSV.
    Sweep(SweepArgs),
    /// Monte-Carlo check of every bound on random state pairs.
    Verify(VerifyArgs),
    /// Compare decomposition-search extremes with the closed forms.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Dimensions used for `@random` states.
    #[arg(long, num_args = 3, value_names = ["DA", "DB", "DC"], default_values_t = [2, 2, 4])]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sampling distribution for random states.
    #[arg(long, default_value_t = SampleMode::ComplexGaussian, value_parser = parse_via::<SampleMode>)]
    pub states: SampleMode,
}

impl SourceArgs {
    fn context(&self) -> Result<RandomContext> {
        Ok(RandomContext {
            dims: dims_from(&self.dims)?,
            seed: self.seed,
            mode: self.states,
        })
    }
}

fn dims_from(v: &[usize]) -> Result<Dims> {
    match v {
        [a, b, c] => Dims::new(*a, *b, *c),
        _ => Err(Error::Dimension(format!("expected three dims, got {}", v.len()))),
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// State file or built-in reference (`@phi33`, `@psi34`, `@ghz`, `@w`, `@bell`, `@random`).
    #[arg(value_parser = parse_via::<StateSource>)]
    pub state: StateSource,
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(value_parser = parse_via::<StateSource>)]
    pub first: StateSource,
    #[arg(value_parser = parse_via::<StateSource>)]
    pub second: StateSource,
    /// Number of |α| grid points, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phase_alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phase_beta: f64,
    /// CSV output path; a gnuplot script is written next to it. Without
    /// this the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Three-term superpositions checked against the folded bound.
    #[arg(long, default_value_t = 1_000)]
    pub triples: usize,
    #[arg(long, value_enum, default_value_t = AlphaMode::Random)]
    pub mode: AlphaMode,
    /// Grid size for `--mode grid`.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Fraction of pairs that also get the entropy check with oracle
    /// estimates of the entanglement of assistance.
    #[arg(long, default_value_t = 0.01)]
    pub thm1_fraction: f64,
    #[arg(long, default_value_t = Budget::default(), value_parser = parse_via::<Budget>)]
    pub budget: Budget,
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(value_parser = parse_via::<StateSource>)]
    pub state: StateSource,
    #[arg(long, default_value_t = Budget::default(), value_parser = parse_via::<Budget>)]
    pub budget: Budget,
    /// Also compare the entropy search with the entanglement of formation.
    #[arg(long)]
    pub entropy: bool,
    #[command(flatten)]
    pub source: SourceArgs,
}

/// Result of a command that completed without an input error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    /// A bound violation or failed certification was found.
    pub violation: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            violation: false,
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Measure(a) => cmd_measure(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

/// Runs the parsed command and maps the result to the exit code contract:
/// 0 success, 1 violation, 2 input error.
pub fn run(cli: &Cli) -> ExitCode {
    match execute(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(if out.violation { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn qubit_pair(state: &PureTripartiteState) -> Result<()> {
    let d = state.dims();
    if d.a != 2 || d.b != 2 {
        return Err(Error::Dimension(format!("need dA = dB = 2, got {d}")));
    }
    Ok(())
}

pub fn format_measures(m: &MeasureSet) -> String {
    format!(
        "C {}\nCa {}\nE {}\n",
        fmt_num(m.concurrence_c),
        fmt_num(m.coa_ca),
        fmt_num(m.entropy_e)
    )
}

fn cmd_measure(args: &MeasureArgs) -> Result<Outcome> {
    let state = args.state.load(&args.source.context()?, 0)?;
    qubit_pair(&state)?;
    Ok(Outcome::ok(format_measures(&measures::measures_of(&state)?)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub grid_points: usize,
    pub phase_alpha: f64,
    pub phase_beta: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid_points: 101,
            phase_alpha: 0.0,
            phase_beta: 0.0,
        }
    }
}

/// `i / (n - 1)` for `i = 0..n`, with exact endpoints.
pub fn alpha_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("grid needs at least 2 points, got {n}")));
    }
    Ok((0..n).map(|i| i as f64 / (n - 1) as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub abs_alpha: f64,
    pub report: BoundReport,
}

impl SweepRow {
    pub fn ratio(&self) -> Option<f64> {
        self.report.concurrence_ratio(SWEEP_RATIO_CUTOFF)
    }

    /// `upper - ‖Γ‖²·actual` for the best concurrence bound and the
    /// assisted bound.
    pub fn slacks(&self) -> (f64, f64) {
        (self.report.concurrence.slack, self.report.coa.slack)
    }

    pub fn csv_line(&self) -> String {
        let r = &self.report;
        let cols = [
            fmt_num(self.abs_alpha),
            fmt_num(r.norm_sq_gamma),
            fmt_num(r.actual.concurrence_c),
            fmt_num(r.concurrence.upper_sym),
            fmt_num(r.concurrence.upper_best),
            fmt_num(r.concurrence.lower_best),
            fmt_num(r.actual.coa_ca),
            fmt_num(r.coa.upper_best),
            self.ratio().map(fmt_num).unwrap_or_default(),
        ];
        cols.join(",")
    }
}

pub fn sweep_rows(
    first: &PureTripartiteState,
    second: &PureTripartiteState,
    config: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    if first.dims() != second.dims() {
        return Err(Error::Dimension(format!(
            "states have dims {} and {}",
            first.dims(),
            second.dims()
        )));
    }
    qubit_pair(first)?;
    let m1 = measures::measures_of(first)?;
    let m2 = measures::measures_of(second)?;
    alpha_grid(config.grid_points)?
        .into_iter()
        .map(|a| {
            let coeffs = Coefficients::from_abs_alpha(a, config.phase_alpha, config.phase_beta)?;
            let report = BoundReport::evaluate_with(coeffs, first, second, m1, m2)?;
            Ok(SweepRow {
                abs_alpha: a,
                report,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

/// gnuplot script plotting the two panels of a sweep CSV.
pub fn gnuplot_script(csv_name: &str) -> String {
    let f = csv_name.replace('\'', "''");
    format!(
        "# gnuplot script for {f}\n\
         set datafile separator ','\n\
         set key autotitle columnhead top left\n\
         set xlabel '|alpha|'\n\
         set xrange [0:1]\n\
         set multiplot layout 1,2\n\
         set title 'Concurrence of assistance'\n\
         plot '{f}' using 1:($2*$7) with lines lw 2 title 'actual', \\\n\
         \x20    '' using 1:8 with lines dt 4 lw 2 title 'upper bound'\n\
         set title 'Concurrence'\n\
         plot '{f}' using 1:($2*$3) with lines lw 2 title 'actual', \\\n\
         \x20    '' using 1:4 with lines dt 4 lw 2 title 'upper bound (sym)', \\\n\
         \x20    '' using 1:5 with lines dt 2 title 'upper bound (best)', \\\n\
         \x20    '' using 1:6 with lines dt 3 title 'lower bound'\n\
         unset multiplot\n"
    )
}

/// Script path beside a CSV: `fig.csv` gives `fig.gp`.
pub fn script_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

fn cmd_sweep(args: &SweepArgs) -> Result<Outcome> {
    let ctx = args.source.context()?;
    let first = args.first.load(&ctx, 0)?;
    let second = args.second.load(&ctx, 1)?;
    let config = SweepConfig {
        grid_points: args.grid,
        phase_alpha: args.phase_alpha,
        phase_beta: args.phase_beta,
    };
    let rows = sweep_rows(&first, &second, &config)?;
    let csv = sweep_csv(&rows);
    let violation = rows
        .iter()
        .any(|r| r.slacks().0 < -SLACK_TOL || r.slacks().1 < -SLACK_TOL);

    let Some(out) = &args.out else {
        return Ok(Outcome {
            stdout: csv,
            violation,
        });
    };
    std::fs::write(out, &csv)?;
    let script = script_path(out);
    let name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    std::fs::write(&script, gnuplot_script(&name))?;

    let ratios: Vec<f64> = rows.iter().filter_map(SweepRow::ratio).collect();
    let min_slack = rows
        .iter()
        .map(|r| r.slacks().0.min(r.slacks().1))
        .fold(f64::INFINITY, f64::min);
    let mut s = String::new();
    writeln!(s, "rows {}", rows.len()).ok();
    writeln!(s, "csv {}", out.display()).ok();
    writeln!(s, "script {}", script.display()).ok();
    writeln!(s, "min_slack {}", fmt_num(min_slack)).ok();
    if let (Some(lo), Some(hi)) = (
        ratios.iter().copied().reduce(f64::min),
        ratios.iter().copied().reduce(f64::max),
    ) {
        writeln!(s, "ratio_min {}", fmt_num(lo)).ok();
        writeln!(s, "ratio_max {}", fmt_num(hi)).ok();
    }
    Ok(Outcome {
        stdout: s,
        violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub pairs: usize,
    pub triples: usize,
    pub dims: Dims,
    pub seed: u64,
    pub alpha_mode: AlphaMode,
    pub grid: usize,
    pub states: SampleMode,
    /// Fraction of pairs (by stride) that get the entropy check; 0 disables.
    pub thm1_fraction: f64,
    pub search: DecompositionSearch,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            pairs: 10_000,
            triples: 1_000,
            dims: Dims { a: 2, b: 2, c: 4 },
            seed: 42,
            alpha_mode: AlphaMode::Random,
            grid: 101,
            states: SampleMode::ComplexGaussian,
            thm1_fraction: 0.01,
            search: DecompositionSearch::default(),
        }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if self.pairs == 0 {
            return Err(Error::OutOfRange("--pairs must be at least 1".into()));
        }
        if self.dims.a != 2 || self.dims.b != 2 {
            return Err(Error::Dimension(format!("need dA = dB = 2, got {}", self.dims)));
        }
        if self.alpha_mode == AlphaMode::Grid {
            alpha_grid(self.grid)?;
        }
        if !(0.0..=1.0).contains(&self.thm1_fraction) {
            return Err(Error::OutOfRange(format!(
                "thm1 fraction {} outside [0, 1]",
                self.thm1_fraction
            )));
        }
        Ok(())
    }

    /// Every `stride`-th pair gets the entropy check.
    pub fn thm1_stride(&self) -> Option<usize> {
        (self.thm1_fraction > 0.0).then(|| ((1.0 / self.thm1_fraction).round() as usize).max(1))
    }

    /// State pair and coefficients of sample `k`.
    pub fn sample_pair(&self, k: usize) -> Result<(PureTripartiteState, PureTripartiteState, Coefficients)> {
        let mut rng = stream_rng(self.seed, k as u64);
        let phi = states::sample_with(self.dims, self.states, &mut rng);
        let psi = states::sample_with(self.dims, self.states, &mut rng);
        let coeffs = match self.alpha_mode {
            AlphaMode::Grid => {
                let a = (k % self.grid) as f64 / (self.grid - 1) as f64;
                Coefficients::from_abs_alpha(a, 0.0, 0.0)?
            }
            AlphaMode::Random => {
                let tau = std::f64::consts::TAU;
                let a = rng.random::<f64>();
                let pa = rng.random::<f64>() * tau;
                let pb = rng.random::<f64>() * tau;
                Coefficients::from_abs_alpha(a, pa, pb)?
            }
        };
        Ok((phi, psi, coeffs))
    }

    /// Three states and normalized coefficients of triple `t`; drawn from
    /// streams disjoint from the pair samples.
    pub fn sample_triple(&self, t: usize) -> Vec<(C64, PureTripartiteState)> {
        let mut rng = stream_rng(self.seed, (self.pairs + t) as u64);
        let states: Vec<PureTripartiteState> = (0..3)
            .map(|_| states::sample_with(self.dims, self.states, &mut rng))
            .collect();
        let mut coeffs: Vec<C64> = (0..3)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in &mut coeffs {
            *c /= n;
        }
        coeffs.into_iter().zip(states).collect()
    }
}

/// Slacks of every concurrence-family bound for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCheck {
    pub report: BoundReport,
    pub slack_sym: f64,
    pub slack_asym1: f64,
    pub slack_asym2: f64,
    pub slack_best: f64,
    pub slack_ca: f64,
    /// `‖Γ‖²C - lower_best`.
    pub lower_gap: f64,
}

impl PairCheck {
    pub fn upper_violation(&self) -> bool {
        [self.slack_sym, self.slack_asym1, self.slack_asym2, self.slack_best]
            .iter()
            .any(|&s| s < -SLACK_TOL)
    }

    pub fn ca_violation(&self) -> bool {
        self.slack_ca < -SLACK_TOL
    }

    pub fn lower_violation(&self) -> bool {
        self.lower_gap < -SLACK_TOL
    }
}

pub fn check_pair(
    phi: &PureTripartiteState,
    psi: &PureTripartiteState,
    coeffs: Coefficients,
) -> Result<PairCheck> {
    let report = BoundReport::evaluate(coeffs, phi, psi)?;
    let weighted = report.norm_sq_gamma * report.actual.concurrence_c;
    let c = &report.concurrence;
    Ok(PairCheck {
        report,
        slack_sym: c.upper_sym - weighted,
        slack_asym1: c.upper_asym1 - weighted,
        slack_asym2: c.upper_asym2 - weighted,
        slack_best: c.slack,
        slack_ca: report.coa.slack,
        lower_gap: weighted - c.lower_best,
    })
}

/// Slacks of the folded three-term bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleCheck {
    pub slack_c: f64,
    pub slack_ca: f64,
}

pub fn check_terms(terms: &[(C64, PureTripartiteState)]) -> Result<TripleCheck> {
    let refs: Vec<(C64, &PureTripartiteState)> = terms.iter().map(|(c, s)| (*c, s)).collect();
    let upper_c = multi_term_upper(&refs, BoundKind::Thm2C)?;
    let upper_ca = multi_term_upper(&refs, BoundKind::Thm2Ca)?;
    let mut total = refs[0].1.scaled(refs[0].0);
    for (c, s) in &refs[1..] {
        total = total.add(&s.scaled(*c))?;
    }
    let n = total.norm_sq();
    let actual = measures::measures_of(&total)?;
    Ok(TripleCheck {
        slack_c: upper_c - n * actual.concurrence_c,
        slack_ca: upper_ca - n * actual.coa_ca,
    })
}

/// Entropy-family check with oracle lower estimates of `E_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPairCheck {
    pub ea_first: f64,
    pub ea_second: f64,
    pub weighted_actual: f64,
    pub slack: f64,
}

pub fn check_pair_entropy(
    phi: &PureTripartiteState,
    psi: &PureTripartiteState,
    coeffs: Coefficients,
    search: &DecompositionSearch,
    seed: u64,
) -> Result<EntropyPairCheck> {
    let m1 = measures::measures_of(phi)?;
    let m2 = measures::measures_of(psi)?;
    let ea_first = oracle::estimate_ea(phi, search, seed)?;
    let ea_second = oracle::estimate_ea(psi, search, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let gamma = states::superpose(coeffs.alpha(), phi, coeffs.beta(), psi)?;
    let actual = measures::measures_of(&gamma)?;
    let check = theorem1_check(
        coeffs,
        gamma.norm_sq(),
        actual.entropy_e,
        ComponentMeasures::new(m1.entropy_e, ea_first),
        ComponentMeasures::new(m2.entropy_e, ea_second),
    )?;
    Ok(EntropyPairCheck {
        ea_first,
        ea_second,
        weighted_actual: check.weighted_actual,
        slack: check.min_slack(),
    })
}

/// Running minimum and violation count of one family of slacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackStat {
    pub count: usize,
    pub violations: usize,
    pub min: f64,
}

impl Default for SlackStat {
    fn default() -> Self {
        Self {
            count: 0,
            violations: 0,
            min: f64::INFINITY,
        }
    }
}

impl SlackStat {
    pub fn push(&mut self, slack: f64) {
        self.count += 1;
        if slack < -SLACK_TOL {
            self.violations += 1;
        }
        self.min = self.min.min(slack);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatioStat {
    pub count: usize,
    pub within_1_2: usize,
    pub max: Option<f64>,
    pub min: Option<f64>,
}

impl RatioStat {
    pub fn push(&mut self, r: f64) {
        self.count += 1;
        if (1.0..=2.0).contains(&r) {
            self.within_1_2 += 1;
        }
        self.max = Some(self.max.map_or(r, |m| m.max(r)));
        self.min = Some(self.min.map_or(r, |m| m.min(r)));
    }

    pub fn fraction_within_1_2(&self) -> Option<f64> {
        (self.count > 0).then(|| self.within_1_2 as f64 / self.count as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub config: VerifyConfig,
    pub upper_sym: SlackStat,
    pub upper_asym1: SlackStat,
    pub upper_asym2: SlackStat,
    pub upper_best: SlackStat,
    pub coa: SlackStat,
    pub lower: SlackStat,
    pub multi_c: SlackStat,
    pub multi_ca: SlackStat,
    pub thm1: SlackStat,
    /// `upper_best / (‖Γ‖²C)` over samples with `C > 0.1`.
    pub ratio_best: RatioStat,
    /// Same with the symmetric form.
    pub ratio_sym: RatioStat,
}

impl VerifySummary {
    pub fn violations(&self) -> usize {
        [
            &self.upper_sym,
            &self.upper_asym1,
            &self.upper_asym2,
            &self.upper_best,
            &self.coa,
            &self.lower,
            &self.multi_c,
            &self.multi_ca,
            &self.thm1,
        ]
        .iter()
        .map(|s| s.violations)
        .sum()
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(f, "pairs {}", c.pairs)?;
        writeln!(f, "triples {}", c.triples)?;
        writeln!(f, "dims {} {} {}", c.dims.a, c.dims.b, c.dims.c)?;
        writeln!(f, "seed {}", c.seed)?;
        writeln!(f, "alpha_mode {}", c.alpha_mode)?;
        writeln!(f, "states {}", c.states)?;
        let stat = |f: &mut fmt::Formatter<'_>, name: &str, s: &SlackStat| {
            let min = if s.count == 0 { "-".into() } else { fmt_num(s.min) };
            writeln!(f, "{name} checked {} violations {} min_slack {min}", s.count, s.violations)
        };
        stat(f, "thm2_C_sym", &self.upper_sym)?;
        stat(f, "thm2_C_asym1", &self.upper_asym1)?;
        stat(f, "thm2_C_asym2", &self.upper_asym2)?;
        stat(f, "thm2_C_best", &self.upper_best)?;
        stat(f, "thm2_Ca", &self.coa)?;
        stat(f, "lower_C", &self.lower)?;
        stat(f, "multi_C", &self.multi_c)?;
        stat(f, "multi_Ca", &self.multi_ca)?;
        stat(f, "thm1_E", &self.thm1)?;
        let ratio = |f: &mut fmt::Formatter<'_>, name: &str, r: &RatioStat| {
            let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{name} samples {} min {} max {} fraction_in_1_2 {}",
                r.count,
                opt(r.min),
                opt(r.max),
                opt(r.fraction_within_1_2())
            )
        };
        ratio(f, "ratio_best", &self.ratio_best)?;
        ratio(f, "ratio_sym", &self.ratio_sym)?;
        writeln!(f, "violations {}", self.violations())
    }
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifySummary> {
    config.validate()?;
    let stride = config.thm1_stride();
    let pairs: Vec<(PairCheck, Option<EntropyPairCheck>)> = (0..config.pairs)
        .into_par_iter()
        .map(|k| {
            let (phi, psi, coeffs) = config.sample_pair(k)?;
            let check = check_pair(&phi, &psi, coeffs)?;
            let entropy = match stride {
                Some(s) if k % s == 0 => Some(check_pair_entropy(
                    &phi,
                    &psi,
                    coeffs,
                    &config.search,
                    stream_rng(config.seed, k as u64).random(),
                )?),
                _ => None,
            };
            Ok((check, entropy))
        })
        .collect::<Result<_>>()?;
    let triples: Vec<TripleCheck> = (0..config.triples)
        .into_par_iter()
        .map(|t| check_terms(&config.sample_triple(t)))
        .collect::<Result<_>>()?;

    let mut s = VerifySummary {
        config: *config,
        upper_sym: SlackStat::default(),
        upper_asym1: SlackStat::default(),
        upper_asym2: SlackStat::default(),
        upper_best: SlackStat::default(),
        coa: SlackStat::default(),
        lower: SlackStat::default(),
        multi_c: SlackStat::default(),
        multi_ca: SlackStat::default(),
        thm1: SlackStat::default(),
        ratio_best: RatioStat::default(),
        ratio_sym: RatioStat::default(),
    };
    for (p, e) in &pairs {
        s.upper_sym.push(p.slack_sym);
        s.upper_asym1.push(p.slack_asym1);
        s.upper_asym2.push(p.slack_asym2);
        s.upper_best.push(p.slack_best);
        s.coa.push(p.slack_ca);
        s.lower.push(p.lower_gap);
        if let Some(r) = p.report.concurrence_ratio(RATIO_MIN_ACTUAL) {
            s.ratio_best.push(r);
            s.ratio_sym
                .push(p.report.concurrence.upper_sym / (p.report.norm_sq_gamma * p.report.actual.concurrence_c));
        }
        if let Some(e) = e {
            s.thm1.push(e.slack);
        }
    }
    for t in &triples {
        s.multi_c.push(t.slack_c);
        s.multi_ca.push(t.slack_ca);
    }
    Ok(s)
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let config = VerifyConfig {
        pairs: args.pairs,
        triples: args.triples,
        dims: dims_from(&args.source.dims)?,
        seed: args.source.seed,
        alpha_mode: args.mode,
        grid: args.grid,
        states: args.source.states,
        thm1_fraction: args.thm1_fraction,
        search: args.budget.search(),
    };
    let summary = run_verify(&config)?;
    Ok(Outcome {
        stdout: summary.to_string(),
        violation: summary.violations() > 0,
    })
}

/// Oracle extremes against the closed forms for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub rank: usize,
    pub ensemble_size: usize,
    pub closed: MeasureSet,
    pub min_c: f64,
    pub max_c: f64,
    /// `(EoF search minimum, EoA search maximum)` when requested.
    pub entropy: Option<(f64, f64)>,
}

impl OracleReport {
    /// `oracle min - C`; negative means the search beat the closed form.
    pub fn gap_min(&self) -> f64 {
        self.min_c - self.closed.concurrence_c
    }

    /// `Ca - oracle max`; negative means the search beat the closed form.
    pub fn gap_max(&self) -> f64 {
        self.closed.coa_ca - self.max_c
    }

    pub fn gap_entropy(&self) -> Option<f64> {
        self.entropy.map(|(e, _)| e - self.closed.entropy_e)
    }

    pub fn certified(&self) -> bool {
        let ok = |g: f64| (-SLACK_TOL..=ORACLE_GAP_TOL).contains(&g);
        ok(self.gap_min()) && ok(self.gap_max()) && self.gap_entropy().is_none_or(ok)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {}", self.rank)?;
        writeln!(f, "ensemble_size {}", self.ensemble_size)?;
        writeln!(f, "C {}", fmt_num(self.closed.concurrence_c))?;
        writeln!(f, "Ca {}", fmt_num(self.closed.coa_ca))?;
        writeln!(f, "oracle_min_C {}", fmt_num(self.min_c))?;
        writeln!(f, "oracle_max_C {}", fmt_num(self.max_c))?;
        writeln!(f, "gap_min_C {}", fmt_num(self.gap_min()))?;
        writeln!(f, "gap_max_C {}", fmt_num(self.gap_max()))?;
        if let Some((e, ea)) = self.entropy {
            writeln!(f, "E {}", fmt_num(self.closed.entropy_e))?;
            writeln!(f, "oracle_min_E {}", fmt_num(e))?;
            writeln!(f, "oracle_max_E {}", fmt_num(ea))?;
            writeln!(f, "gap_min_E {}", fmt_num(e - self.closed.entropy_e))?;
        }
        writeln!(f, "certified {}", if self.certified() { "yes" } else { "no" })
    }
}

pub fn run_oracle(
    state: &PureTripartiteState,
    search: &DecompositionSearch,
    seed: u64,
    entropy: bool,
) -> Result<OracleReport> {
    qubit_pair(state)?;
    let closed = measures::measures_of(state)?;
    let rho = state.normalized()?.reduced_ab();
    let min = oracle::optimize_avg(&rho, Objective::Concurrence, Direction::Min, search, seed)?;
    let max = oracle::optimize_avg(&rho, Objective::Concurrence, Direction::Max, search, seed)?;
    let entropy = if entropy {
        let e = oracle::optimize_avg(&rho, Objective::Entropy, Direction::Min, search, seed)?;
        let ea = oracle::optimize_avg(&rho, Objective::Entropy, Direction::Max, search, seed)?;
        Some((e.value, ea.value))
    } else {
        None
    };
    Ok(OracleReport {
        rank: min.rank,
        ensemble_size: min.ensemble_size,
        closed,
        min_c: min.value,
        max_c: max.value,
        entropy,
    })
}

fn cmd_oracle(args: &OracleArgs) -> Result<Outcome> {
    let state = args.state.load(&args.source.context()?, 0)?;
    let report = run_oracle(&state, &args.budget.search(), args.source.seed, args.entropy)?;
    Ok(Outcome {
        violation: !report.certified(),
        stdout: report.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (2.0 / 3.0, "0.666666666667"),
            (123456.789, "123456.789"),
            (1e-7, "1e-07"),
            (1.5e-5, "1.5e-05"),
            (1e-4, "0.0001"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (-0.25, "-0.25"),
            (0.99999999999999, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_num(x), want, "{x}");
        }
    }

    #[test]
    fn budget_round_trip() {
        let b: Budget = "8x200".parse().unwrap();
        assert_eq!(b, Budget { restarts: 8, sweeps: 200 });
        assert_eq!(b.to_string(), "8x200");
        assert_eq!(Budget::default().to_string(), "32x500");
        for bad in ["8", "0x10", "ax3", "3x"] {
            assert!(bad.parse::<Budget>().is_err(), "{bad}");
        }
    }

    #[test]
    fn state_sources() {
        assert_eq!("@phi33".parse::<StateSource>().unwrap(), StateSource::Fixture(Fixture::Phi33));
        assert_eq!("@random".parse::<StateSource>().unwrap(), StateSource::Random);
        assert_eq!("x.state".parse::<StateSource>().unwrap(), StateSource::File("x.state".into()));
        assert!("@nope".parse::<StateSource>().is_err());
    }

    #[test]
    fn grid_has_exact_endpoints() {
        let g = alpha_grid(101).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!(alpha_grid(1).is_err());
    }

    #[test]
    fn sweep_endpoint_reproduces_component_measures() {
        let phi = states::load_fixture(Fixture::Phi33).unwrap();
        let psi = states::load_fixture(Fixture::Psi34).unwrap();
        let rows = sweep_rows(&phi, &psi, &SweepConfig::default()).unwrap();
        let m1 = measures::measures_of(&phi).unwrap();
        let m2 = measures::measures_of(&psi).unwrap();
        let last = rows.last().unwrap().report;
        let first = rows[0].report;
        assert!((last.actual.concurrence_c - m1.concurrence_c).abs() < 1e-12);
        assert!((last.actual.coa_ca - m1.coa_ca).abs() < 1e-12);
        assert!((first.actual.coa_ca - m2.coa_ca).abs() < 1e-12);
        // assisted bound is tight at both ends
        assert!((last.coa.upper_best - m1.coa_ca).abs() < 1e-12);
        assert!((first.coa.upper_best - m2.coa_ca).abs() < 1e-12);
    }

    #[test]
    fn sweep_of_identical_states_is_tight_at_endpoints() {
        let g = states::ghz();
        let rows = sweep_rows(&g, &g, &SweepConfig { grid_points: 5, ..Default::default() }).unwrap();
        for r in [rows[0], rows[4]] {
            assert!((r.report.coa.slack).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_ratio_column_empty_for_vanishing_concurrence() {
        let g = states::ghz();
        let rows = sweep_rows(&g, &g, &SweepConfig { grid_points: 3, ..Default::default() }).unwrap();
        let csv = sweep_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        for l in lines {
            assert!(l.ends_with(','), "{l}");
            assert_eq!(l.split(',').count(), 9);
        }
    }

    #[test]
    fn identical_pair_at_alpha_one_has_zero_ca_slack() {
        let s = states::sample_random(Dims::new(2, 2, 4).unwrap(), 5, SampleMode::ComplexGaussian);
        let coeffs = Coefficients::from_abs_alpha(1.0, 0.0, 0.0).unwrap();
        let check = check_pair(&s, &s, coeffs).unwrap();
        assert!(check.slack_ca.abs() < 1e-12);
        assert!(!check.upper_violation() && !check.lower_violation());
    }

    #[test]
    fn small_verify_is_clean_and_deterministic() {
        let config = VerifyConfig {
            pairs: 200,
            triples: 50,
            thm1_fraction: 0.0,
            ..Default::default()
        };
        let a = run_verify(&config).unwrap();
        let b = run_verify(&config).unwrap();
        assert_eq!(a.violations(), 0, "{a}");
        assert_eq!(a.to_string(), b.to_string());
        assert_eq!(a.thm1.count, 0);
    }

    #[test]
    fn verify_rejects_bad_config() {
        for config in [
            VerifyConfig { pairs: 0, ..Default::default() },
            VerifyConfig { dims: Dims::new(3, 2, 2).unwrap(), ..Default::default() },
            VerifyConfig { thm1_fraction: 1.5, ..Default::default() },
        ] {
            assert!(run_verify(&config).is_err());
        }
    }

    #[test]
    fn oracle_on_bell_is_exact() {
        let r = run_oracle(&states::bell_product(2), &DecompositionSearch::with_budget(2, 20), 1, false).unwrap();
        assert_eq!(r.rank, 1);
        for v in [r.closed.concurrence_c, r.closed.coa_ca, r.min_c, r.max_c] {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(r.certified());
    }
}
