//! Command-line front end: verification reports and observable tables.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::algebra::{Kinematics, PolarizationSpinor};
use crate::beams::{
    all_summaries, analyze, boosted_centroid, build_spectrum, default_times, hall_shift_prediction, magnetic_moment_z,
    summaries_csv, unpolarized, zitterbewegung_trace, BeamParams, Centroid, OperatorFamily, PacketConfig, RadialProfile,
};
use crate::error::Error;
use crate::format::{fmt17, num17};
use crate::operators::{table1_suite, Table1Config};
use crate::pauli_limit::{
    exact_lower_block_residual, pauli_correspondence, r_squared_identity, soi_potential_term, EvenPolynomial,
    MomentumPacket, SoiComparison, SoiPacket,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DIRAC_OPS_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Relative tolerance of the Hall-shift check.
pub const HALL_TOLERANCE: f64 = 0.02;
/// Relative tolerance of the magnetic-moment check.
pub const MOMENT_TOLERANCE: f64 = 0.01;
/// Relative tolerance of the zitterbewegung frequency.
pub const ZITTER_FREQUENCY_TOLERANCE: f64 = 0.02;
/// Largest deviation from linear motion counted as oscillation-free.
pub const LINEAR_TOLERANCE: f64 = 1e-6;
/// Ring-observable tolerance for the beam table.
pub const BEAM_TOLERANCE: f64 = 1e-9;
const NWFW_ROUTE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "dirac-ops", version, about = "Dirac electron operator families: identity checks and beam observables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed forms of the projected and NWFW operators against their definitions (JSON report)
    Table1(Table1Args),
    /// Spin/orbital/total angular momentum of a Bessel beam for the three families (CSV)
    Beam(BeamArgs),
    /// Transverse centroid shift of a beam seen from a moving frame (CSV)
    Hall(HallArgs),
    /// z-component of the magnetic moment of an annular beam (CSV)
    Moment(MomentArgs),
    /// Centroid trace of an electron/positron superposition (CSV)
    Zitter(ZitterArgs),
    /// Nonrelativistic expansion checks (JSON report)
    Pauli(PauliArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with parameters; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct Table1Args {
    #[command(flatten)]
    common: Common,
    /// Number of sampled momenta
    #[arg(long)]
    samples: Option<usize>,
    /// Use this mass for every sample
    #[arg(long)]
    mass: Option<f64>,
}

#[derive(Debug, Args)]
struct BeamFlags {
    #[arg(long)]
    energy: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<i32>,
    #[arg(long, conflicts_with = "spin_down")]
    spin_up: bool,
    #[arg(long)]
    spin_down: bool,
    #[arg(long)]
    n_phi: Option<usize>,
    #[arg(long)]
    n_radial: Option<usize>,
}

#[derive(Debug, Args)]
struct BeamArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    beam: BeamFlags,
}

#[derive(Debug, Args)]
struct HallArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    beam: BeamFlags,
    /// Frame velocity along x
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,
    /// Frame velocity along y
    #[arg(long, allow_hyphen_values = true)]
    vy: Option<f64>,
}

#[derive(Debug, Args)]
struct MomentArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    beam: BeamFlags,
    /// Average over both spin states
    #[arg(long)]
    unpolarized: bool,
}

#[derive(Debug, Args)]
struct ZitterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    mass: Option<f64>,
    /// Central momentum "px,py,pz"
    #[arg(long, allow_hyphen_values = true)]
    momentum: Option<String>,
    /// "pure", "mixed", or electron/positron amplitudes "a,b"
    #[arg(long)]
    mix: Option<String>,
    /// Number of zitterbewegung periods covered
    #[arg(long)]
    periods: Option<f64>,
    /// Number of time steps
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Args)]
struct PauliArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    mass: Option<f64>,
    /// Largest p/m of the halving studies
    #[arg(long)]
    ratio: Option<f64>,
    /// Potential coefficients "c0,c1,…" of V(r) = Σ c_k r^{2k}
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    /// Vortex charge of the spin-orbit test packet
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<i32>,
    /// Momentum grid points per axis
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Module(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Module(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => f.write_str(s),
            CliError::Module(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code: 0 pass, 1 tolerance failure, 2 usage or parameter error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = pool.install(|| dispatch(cli.command));
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| usage(e.to_string()))
}

fn dispatch(command: Command) -> CliResult<bool> {
    match command {
        Command::Table1(a) => cmd_table1(a),
        Command::Beam(a) => cmd_beam(a),
        Command::Hall(a) => cmd_hall(a),
        Command::Moment(a) => cmd_moment(a),
        Command::Zitter(a) => cmd_zitter(a),
        Command::Pauli(a) => cmd_pauli(a),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> CliResult<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(usage(format!("{}: expected a JSON object", path.display()))),
        Err(e) => Err(usage(format!("{}: {e}", path.display()))),
    }
}

/// Removes `key` from the config map and decodes it.
fn take<T: DeserializeOwned>(map: &mut Map<String, Value>, key: &str) -> CliResult<Option<T>> {
    match map.remove(key) {
        None => Ok(None),
        Some(v) => serde_json::from_value(v).map(Some).map_err(|e| usage(format!("config key {key:?}: {e}"))),
    }
}

fn reject_leftovers(map: &Map<String, Value>) -> CliResult<()> {
    match map.keys().next() {
        Some(k) => Err(usage(format!("unknown config key {k:?}"))),
        None => Ok(()),
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| usage(e.to_string()))
}

fn parse_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("{what}: cannot parse {s:?}"))))
        .collect()
}

fn cmd_table1(a: Table1Args) -> CliResult<bool> {
    let mut file = load_config(&a.common.config)?;
    let mut config = Table1Config::default();
    if let Some(s) = take(&mut file, "seed")? {
        config.seed = s;
    }
    if let Some(n) = take(&mut file, "samples")? {
        config.samples = n;
    }
    config.mass = take(&mut file, "mass")?;
    reject_leftovers(&file)?;
    config.seed = a.common.seed.unwrap_or(config.seed);
    config.samples = a.samples.unwrap_or(config.samples);
    config.mass = a.mass.or(config.mass);
    if config.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    if let Some(m) = config.mass {
        if !(m.is_finite() && m >= 0.0) {
            return Err(usage(format!("--mass must be finite and non-negative, got {m}")));
        }
    }
    let report = table1_suite(&config)?;
    eprint!("{}", report.render());
    emit(&a.common.out, &to_json(&report)?)?;
    Ok(report.all_pass())
}

/// defaults ← config file ← flags
fn resolve_beam(defaults: BeamParams, mut file: Map<String, Value>, flags: &BeamFlags) -> CliResult<BeamParams> {
    let Value::Object(mut merged) = serde_json::to_value(defaults).map_err(|e| usage(e.to_string()))? else {
        return Err(usage("beam defaults did not serialize to an object"));
    };
    merged.append(&mut file);
    let mut p: BeamParams = serde_json::from_value(Value::Object(merged)).map_err(|e| usage(format!("beam parameters: {e}")))?;
    if let Some(e) = flags.energy {
        p.energy = e;
    }
    if let Some(m) = flags.mass {
        p.mass = m;
    }
    if let Some(t) = flags.theta0 {
        p.theta0 = t;
    }
    if let Some(l) = flags.ell {
        p.ell = l;
    }
    if flags.spin_up {
        p.w = PolarizationSpinor::up();
    }
    if flags.spin_down {
        p.w = PolarizationSpinor::down();
    }
    if let Some(n) = flags.n_phi {
        p.n_phi = n;
    }
    if let Some(n) = flags.n_radial {
        p.n_radial = n;
    }
    Ok(p)
}

fn invalid_beam(e: Error) -> CliError {
    match e {
        Error::InvalidBeam(_) | Error::NegativeMass(_) | Error::NonFinite(_) => usage(e.to_string()),
        other => CliError::Module(other),
    }
}

fn cmd_beam(a: BeamArgs) -> CliResult<bool> {
    let file = load_config(&a.common.config)?;
    let defaults = BeamParams::new(2.0, 1.0, PI / 6.0, 1, PolarizationSpinor::up());
    let params = resolve_beam(defaults, file, &a.beam)?;
    let spectrum = build_spectrum(&params).map_err(invalid_beam)?;
    let rows = all_summaries(&spectrum)?;
    let budget = params.ell as f64 + params.w.rest_spin()[2];
    let mut pass = true;
    for r in &rows {
        pass &= (r.sz + r.lz - budget).abs() < BEAM_TOLERANCE && r.imaginary < BEAM_TOLERANCE;
        if r.family == OperatorFamily::Nwfw {
            pass &= r.cross_check.is_some_and(|d| d < NWFW_ROUTE_TOLERANCE);
        }
        eprintln!(
            "{:<9} Sz = {:.12} Lz = {:.12} Jz = {:.12}",
            r.family.to_string(),
            r.sz,
            r.lz,
            r.jz
        );
    }
    emit(&a.common.out, &summaries_csv(&rows))?;
    Ok(pass)
}

fn annulus_defaults(theta0: f64, n_phi: usize, n_radial: usize) -> BeamParams {
    BeamParams::new(2.0, 1.0, theta0, 1, PolarizationSpinor::up())
        .with_profile(RadialProfile::GaussianAnnulus { width: None })
        .with_grid(n_phi, n_radial)
}

fn relative(value: f64, expected: f64) -> f64 {
    let d = (value - expected).abs();
    if expected.abs() > 0.0 {
        d / expected.abs()
    } else {
        d
    }
}

fn cmd_hall(a: HallArgs) -> CliResult<bool> {
    let mut file = load_config(&a.common.config)?;
    let vx: Option<f64> = take(&mut file, "v")?;
    let vy: Option<f64> = take(&mut file, "vy")?;
    let v = Vector2::new(a.v.or(vx).unwrap_or(0.1), a.vy.or(vy).unwrap_or(0.0));
    let params = resolve_beam(annulus_defaults(0.1, 256, 64), file, &a.beam)?;
    let spectrum = build_spectrum(&params).map_err(invalid_beam)?;
    let predicted = hall_shift_prediction(&spectrum, &v);
    let mut csv = String::from("centroid,shift_x,shift_y,predicted_x,predicted_y,relative_error\n");
    let mut pass = true;
    for (which, factor, name) in [(Centroid::Probability, 1.0, "probability"), (Centroid::Energy, 2.0, "energy")] {
        let shift = boosted_centroid(&spectrum, &v, which)?;
        let pred = predicted * factor;
        let err = if pred.norm() > 0.0 { (shift - pred).norm() / pred.norm() } else { shift.norm() };
        pass &= err < HALL_TOLERANCE;
        let _ = writeln!(csv, "{name},{},{},{},{},{}", fmt17(shift[0]), fmt17(shift[1]), fmt17(pred[0]), fmt17(pred[1]), fmt17(err));
        eprintln!("{name:<12} shift = ({:.6}, {:.6})  predicted = ({:.6}, {:.6})  rel. error = {:.3e}", shift[0], shift[1], pred[0], pred[1], err);
    }
    emit(&a.common.out, &csv)?;
    Ok(pass)
}

fn cmd_moment(a: MomentArgs) -> CliResult<bool> {
    let mut file = load_config(&a.common.config)?;
    let unpol = a.unpolarized || take::<bool>(&mut file, "unpolarized")?.unwrap_or(false);
    let params = resolve_beam(annulus_defaults(0.05, 512, 512), file, &a.beam)?;
    let spectrum = build_spectrum(&params).map_err(invalid_beam)?;
    let e = params.energy;
    let ell = params.ell as f64;
    let (moment, expected, label) = if unpol {
        (unpolarized(&spectrum, magnetic_moment_z)?, ell, "unpolarized")
    } else {
        (magnetic_moment_z(&spectrum)?, ell + 2.0 * params.w.rest_spin()[2], "polarized")
    };
    let err = relative(e * moment, expected);
    let pass = err < MOMENT_TOLERANCE;
    let csv = format!(
        "polarization,ell,E,moment,E_moment,expected,relative_error\n{label},{},{},{},{},{},{}\n",
        params.ell,
        fmt17(e),
        fmt17(moment),
        fmt17(e * moment),
        fmt17(expected),
        fmt17(err)
    );
    eprintln!("E·⟨(r×α)_z⟩ = {:.8} (expected {expected}), rel. error {err:.3e}", e * moment);
    emit(&a.common.out, &csv)?;
    Ok(pass)
}

fn parse_mix(text: &str) -> CliResult<[Complex64; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match text.trim() {
        "pure" => Ok([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]),
        "mixed" => Ok([Complex64::new(h, 0.0), Complex64::new(h, 0.0)]),
        other => match parse_list(other, "--mix")?.as_slice() {
            [a, b] => Ok([Complex64::new(*a, 0.0), Complex64::new(*b, 0.0)]),
            _ => Err(usage("--mix takes pure, mixed or two amplitudes \"a,b\"")),
        },
    }
}

fn cmd_zitter(a: ZitterArgs) -> CliResult<bool> {
    let mut file = load_config(&a.common.config)?;
    let mass = a.mass.or(take(&mut file, "mass")?).unwrap_or(1.0);
    let momentum = match a.momentum {
        Some(s) => parse_list(&s, "--momentum")?,
        None => take::<Vec<f64>>(&mut file, "momentum")?.unwrap_or_else(|| vec![0.0, 0.0, 1.0]),
    };
    let mix_text: Option<String> = take(&mut file, "mix")?;
    let mix = parse_mix(a.mix.as_deref().or(mix_text.as_deref()).unwrap_or("mixed"))?;
    let periods = a.periods.or(take(&mut file, "periods")?).unwrap_or(8.0);
    let steps = a.steps.or(take(&mut file, "steps")?).unwrap_or(256);
    reject_leftovers(&file)?;
    let [px, py, pz] = momentum.as_slice() else {
        return Err(usage("--momentum takes three components \"px,py,pz\""));
    };
    if !(periods > 0.0 && periods.is_finite()) || steps < 8 {
        return Err(usage("need periods > 0 and at least 8 steps"));
    }
    let kin = Kinematics::new(Vector3::new(*px, *py, *pz), mass).map_err(|e| usage(e.to_string()))?;
    let times = default_times(&kin, periods, steps);
    let trace = zitterbewegung_trace(&kin, mix, &times, &PacketConfig::default())?;
    let an = analyze(&trace);

    let mut csv = String::from("t,x,y,z,Rx,Ry,Rz\n");
    for ((t, c), r) in trace.times.iter().zip(&trace.canonical).zip(&trace.projected) {
        let _ = writeln!(csv, "{},{},{},{},{},{},{}", fmt17(*t), fmt17(c[0]), fmt17(c[1]), fmt17(c[2]), fmt17(r[0]), fmt17(r[1]), fmt17(r[2]));
    }
    let mixed = mix[0].norm() > 0.0 && mix[1].norm() > 0.0;
    let expected = 2.0 * kin.energy();
    let mut pass = an.projected_nonlinearity < LINEAR_TOLERANCE;
    if mixed {
        pass &= an.frequency.is_some_and(|f| relative(f, expected) < ZITTER_FREQUENCY_TOLERANCE);
    } else {
        pass &= an.amplitude < LINEAR_TOLERANCE;
    }
    eprintln!(
        "amplitude = {:.6e}  frequency = {}  (2E = {expected:.8})  projected deviation from linear = {:.3e}",
        an.amplitude,
        an.frequency.map_or("none".to_string(), |f| format!("{f:.8}")),
        an.projected_nonlinearity
    );
    emit(&a.common.out, &csv)?;
    Ok(pass)
}

#[derive(Serialize)]
struct SoiRow {
    spin: &'static str,
    #[serde(flatten)]
    comparison: SoiComparison,
    relative_error: Value,
    pass: bool,
}

fn cmd_pauli(a: PauliArgs) -> CliResult<bool> {
    let mut file = load_config(&a.common.config)?;
    let seed = a.common.seed.or(take(&mut file, "seed")?).unwrap_or(7);
    let mass = a.mass.or(take(&mut file, "mass")?).unwrap_or(1.0);
    let ratio = a.ratio.or(take(&mut file, "ratio")?).unwrap_or(0.2);
    let potential = match a.potential {
        Some(s) => parse_list(&s, "--potential")?,
        None => take::<Vec<f64>>(&mut file, "potential")?.unwrap_or_else(|| vec![0.0, 0.5]),
    };
    let ell = a.ell.or(take(&mut file, "ell")?).unwrap_or(1);
    let grid = a.grid.or(take(&mut file, "grid")?).unwrap_or(crate::pauli_limit::DEFAULT_GRID);
    reject_leftovers(&file)?;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(usage(format!("--mass must be positive, got {mass}")));
    }
    if !(ratio > 0.0 && ratio <= crate::pauli_limit::MAX_RATIO) {
        return Err(usage(format!("--ratio must lie in (0, {}]", crate::pauli_limit::MAX_RATIO)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let dir = Vector3::new((1.0 - z * z).sqrt() * phi.cos(), (1.0 - z * z).sqrt() * phi.sin(), z);

    let kin = Kinematics::new(dir * (ratio * mass), mass)?;
    let r_squared = r_squared_identity(&kin)?;
    let packet = MomentumPacket::new(mass, dir * (0.5 * ratio * mass), 0.04 * ratio * mass, PolarizationSpinor::up());
    let correspondence = pauli_correspondence(&packet)?;
    let lower = exact_lower_block_residual(&packet)?;

    let v = EvenPolynomial::new(potential);
    let mut soi = Vec::new();
    for (w, name) in [(PolarizationSpinor::up(), "up"), (PolarizationSpinor::down(), "down")] {
        let c = soi_potential_term(&v, &SoiPacket::new(mass, ell, w).with_grid(grid))?;
        soi.push(SoiRow {
            spin: name,
            comparison: c,
            relative_error: num17(c.relative_error()),
            pass: c.pass(),
        });
    }
    let lower_pass = lower < 1e-12;
    let pass = r_squared.pass && correspondence.pass && lower_pass && soi.iter().all(|r| r.pass);

    let mut report = Map::new();
    report.insert("seed".into(), Value::from(seed));
    report.insert("pass".into(), Value::from(pass));
    report.insert("r_squared".into(), serde_json::to_value(&r_squared).map_err(|e| usage(e.to_string()))?);
    report.insert("correspondence".into(), serde_json::to_value(&correspondence).map_err(|e| usage(e.to_string()))?);
    report.insert("exact_lower_block".into(), num17(lower));
    report.insert("soi".into(), serde_json::to_value(&soi).map_err(|e| usage(e.to_string()))?);
    eprintln!(
        "r² identity order {:.3}, Pauli correspondence order {:.3}, exact lower block {lower:.2e}, SOI rel. errors {}",
        r_squared.observed_order,
        correspondence.observed_order,
        soi.iter().map(|r| format!("{:.3e}", r.comparison.relative_error())).collect::<Vec<_>>().join(" / ")
    );
    emit(&a.common.out, &to_json(&Value::Object(report))?)?;
    Ok(pass)
}
