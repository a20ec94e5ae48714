use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use zcwell_core::analysis::{kinetic_expectation, momentum_density, momentum_moments, position_samples};
use zcwell_core::asym::{self, AsymmetricWell};
use zcwell_core::design::{triangle_design, twin_designs, DesignOptions, ZcDesign};
use zcwell_core::io::{self, DesignFile, PartnerFile, UnitOverride};
use zcwell_core::oracle::{isospectral_check, verify_design, verify_potential};
use zcwell_core::susy::{isospectral_pair, partner_potential};
use zcwell_core::{UnitSystem, ZcError};

const UNITS_ENV: &str = "ZCWELL_UNITS";

#[derive(Parser)]
#[command(name = "zcwell", version, about = "Zero-curvature eigenstates of square wells with delta spikes")]
struct Cli {
    /// Override as `hbar,mass,a`. Takes precedence over ZCWELL_UNITS.
    #[arg(long, global = true, value_name = "HBAR,MASS,A")]
    units: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the critical spike strengths of a waveform.
    Design(DesignArgs),
    /// Energies, position samples and momentum density of a design.
    Analyze(AnalyzeArgs),
    /// Supersymmetric partner of a nodeless design.
    Susy(SusyArgs),
    /// Asymmetric well with a step of height V0 on the right.
    Asym(AsymArgs),
    /// Check a design against the finite-difference eigensolver.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Triangle,
    TwinSymmetric,
    TwinAntisymmetric,
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long, conflicts_with = "shape", required_unless_present = "shape")]
    input: Option<PathBuf>,
    /// Defaults to standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    shape: Option<Shape>,
    /// Peak position of the triangle.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Well width for the built-in shapes.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    allow_seam_spike: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Momentum grid `lo:hi:n`.
    #[arg(long, default_value = "-40:40:801", allow_hyphen_values = true)]
    pgrid: String,
    /// Stem of the output files `<stem>_x.csv` and `<stem>_p.csv`.
    #[arg(long)]
    out_csv: String,
    /// Evenly spaced position samples; knots are added.
    #[arg(long, default_value_t = 1001)]
    nx: usize,
    /// Probability allowed beyond the momentum cutoff.
    #[arg(long, default_value_t = 1e-8)]
    tail_tol: f64,
}

#[derive(Args)]
struct SusyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Partner JSON; defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also compare the two spectra and write the report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = "599,1199,2399", value_delimiter = ',')]
    ladder: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.01)]
    rel_tol: f64,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct AsymArgs {
    #[command(subcommand)]
    command: Option<AsymCommand>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    v0: Option<f64>,
    #[arg(long, default_value_t = 8)]
    levels: usize,
    /// Level table `n,E,regime`; defaults to standard output.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Write the threshold wave of a tuned well here.
    #[arg(long)]
    wave_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 401)]
    points: usize,
}

#[derive(Subcommand)]
enum AsymCommand {
    /// Step height that makes E = V0 an eigenvalue.
    Tune(TuneArgs),
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 0)]
    branch: usize,
    /// Threshold wave `x,psi`.
    #[arg(long, default_value = "zc_wave.csv")]
    out_csv: PathBuf,
    #[arg(long, default_value_t = 401)]
    points: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "599,1199,2399", value_delimiter = ',')]
    ladder: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Report JSON; defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Zc(ZcError),
    Usage(String),
    Io(PathBuf, std::io::Error),
    Failed(String),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Zc(e) => e.code(),
            CliError::Usage(_) => "Usage",
            CliError::Io(..) => "Io",
            CliError::Failed(_) => "VerificationFailed",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Zc(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Zc(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<ZcError> for CliError {
    fn from(e: ZcError) -> Self {
        CliError::Zc(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn emit(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn distinct(input: &Path, outputs: &[Option<&Path>]) -> CliResult {
    for out in outputs.iter().flatten() {
        if same_file(input, out) {
            return Err(CliError::Usage(format!(
                "output {} would overwrite the input",
                out.display()
            )));
        }
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> CliResult {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {v}")))
    }
}

fn unit_override(flag: Option<&str>) -> CliResult<Option<UnitOverride>> {
    let env = std::env::var(UNITS_ENV).ok();
    match flag.or(env.as_deref()) {
        Some(s) if !s.trim().is_empty() => Ok(Some(UnitOverride::parse(s)?)),
        _ => Ok(None),
    }
}

fn load_design_file(path: &Path, o: Option<&UnitOverride>) -> CliResult<DesignFile> {
    let file = DesignFile::from_json(&read(path)?)?;
    Ok(match o {
        Some(o) => file.with_override(o),
        None => file,
    })
}

fn parse_pgrid(s: &str) -> CliResult<(f64, f64, usize)> {
    let bad = || CliError::Usage(format!("pgrid must be lo:hi:n with lo < hi and n >= 2, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok((lo, hi, n))
}

fn csv_stem(s: &str) -> &str {
    s.strip_suffix(".csv").unwrap_or(s)
}

fn design(args: DesignArgs, o: Option<UnitOverride>) -> CliResult {
    let d: ZcDesign = match (args.input.as_deref(), args.shape) {
        (Some(input), _) => {
            distinct(input, &[args.output.as_deref()])?;
            let file = load_design_file(input, o.as_ref())?;
            let options = DesignOptions { allow_seam_spike: args.allow_seam_spike };
            file.design(options)?
        }
        (None, Some(shape)) => {
            let units = o.map_or(UnitSystem { hbar: 1.0, mass: 1.0 }, |o| o.units());
            let a = args.a.or(o.map(|o| o.a)).unwrap_or(1.0);
            match shape {
                Shape::Triangle => {
                    let c = args.c.ok_or_else(|| CliError::Usage("--shape triangle needs --c".into()))?;
                    triangle_design(c, a, &units)?
                }
                Shape::TwinSymmetric => twin_designs(a, &units)?.0,
                Shape::TwinAntisymmetric => twin_designs(a, &units)?.1,
            }
        }
        (None, None) => return Err(CliError::Usage("give --input or --shape".into())),
    };
    emit(args.output.as_deref(), &DesignFile::from_design(&d).to_json())
}

fn analyze(args: AnalyzeArgs, o: Option<UnitOverride>) -> CliResult {
    positive("tail tolerance", args.tail_tol)?;
    let (lo, hi, n) = parse_pgrid(&args.pgrid)?;
    let stem = csv_stem(&args.out_csv);
    let x_path = PathBuf::from(format!("{stem}_x.csv"));
    let p_path = PathBuf::from(format!("{stem}_p.csv"));
    distinct(&args.input, &[Some(&x_path), Some(&p_path)])?;

    let file = load_design_file(&args.input, o.as_ref())?;
    let d = file.design(DesignOptions::default())?;

    let mut xs = position_samples(&d, args.nx.max(2));
    xs.extend(d.wave().knots().iter().map(|k| (k.x, k.psi)));
    xs.sort_by(|p, q| p.0.total_cmp(&q.0));
    xs.dedup_by(|p, q| p.0 == q.0);

    let step = (hi - lo) / (n - 1) as f64;
    let ps: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let p = if i + 1 == n { hi } else { lo + step * i as f64 };
            (p, momentum_density(&d, p))
        })
        .collect();
    write(&x_path, &io::xy_csv(["x", "psi"], &xs))?;
    write(&p_path, &io::xy_csv(["p", "phi2"], &ps))?;

    let window: f64 = ps.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
    let e = kinetic_expectation(&d);
    println!("energy: <T> = {} <V> = {} <T>+<V> = {:e}", e.kinetic_gradient, e.potential, e.total);
    match momentum_moments(&d, args.tail_tol) {
        Ok(m) => println!(
            "parseval: integral |phi|^2 dp = {:.12} (|p| <= {:.6}, tail bound {:e}); window [{lo}, {hi}] = {:.12}; <p^2> = {:.9} (exact {:.9})",
            m.norm_quadrature, m.cutoff, m.norm_tail_bound, window, m.p2_quadrature, m.p2_analytic
        ),
        // wave does not vanish at the walls: only the window integral exists
        Err(ZcError::Domain(_)) => println!("parseval: window [{lo}, {hi}] = {window:.12}"),
        Err(e) => return Err(e.into()),
    }
    println!("wrote {} and {}", x_path.display(), p_path.display());
    Ok(())
}

fn susy(args: SusyArgs, o: Option<UnitOverride>) -> CliResult {
    distinct(&args.input, &[args.out.as_deref(), args.report.as_deref()])?;
    let file = load_design_file(&args.input, o.as_ref())?;
    let d = file.design(DesignOptions::default())?;
    let partner = partner_potential(&d)?;
    emit(args.out.as_deref(), &PartnerFile::from_partner(&partner).to_json())?;
    if let Some(path) = &args.report {
        positive("relative tolerance", args.rel_tol)?;
        let pair = isospectral_pair(&d)?;
        let report = isospectral_check(&pair, args.k, &args.ladder, args.rel_tol)?;
        write(path, &io::isospectral_report_json(&report))?;
        if !report.passed {
            return Err(CliError::Failed(format!(
                "spectra differ beyond relative tolerance {}; see {}",
                args.rel_tol,
                path.display()
            )));
        }
    }
    Ok(())
}

fn wave_csv(w: &asym::AsymZcWave, points: usize) -> String {
    let width = w.well.width();
    let n = points.max(2);
    let mut pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = if i + 1 == n { width } else { width * i as f64 / (n - 1) as f64 };
            (x, w.eval(x))
        })
        .collect();
    pts.push((w.well.a, w.eval(w.well.a)));
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    pts.dedup_by(|p, q| p.0 == q.0);
    io::xy_csv(["x", "psi"], &pts)
}

fn asym_cmd(args: AsymArgs, o: Option<UnitOverride>) -> CliResult {
    let units = o.map_or(UnitSystem { hbar: 1.0, mass: 1.0 }, |o| o.units());
    if let Some(AsymCommand::Tune(t)) = args.command {
        let tuning = asym::solve_zc_v0(t.a, t.b, t.branch, &units)?;
        let well = AsymmetricWell::new(t.a, t.b, tuning.v0)?;
        let w = asym::zc_wave(&well, &units)?;
        write(&t.out_csv, &wave_csv(&w, t.points))?;
        let (pl, pr) = w.region_probabilities();
        println!("V0 = {}", tuning.v0);
        println!("chi = {}", tuning.chi);
        println!("probabilities: free = {pl} step = {pr}");
        return Ok(());
    }
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Usage(format!("asym needs --{name}")));
    let well = AsymmetricWell::new(need(args.a, "a")?, need(args.b, "b")?, need(args.v0, "v0")?)?;
    let levels = asym::solve_levels(&well, &units, args.levels)?;
    let table = io::csv(
        &["n", "E", "regime"],
        levels.iter().map(|l| [l.index.to_string(), io::float(l.energy), l.regime.to_string()]),
    );
    emit(args.out_csv.as_deref(), &table)?;
    if let Some(path) = &args.wave_csv {
        let w = asym::zc_wave(&well, &units)?;
        write(path, &wave_csv(&w, args.points))?;
    }
    Ok(())
}

fn verify(args: VerifyArgs, o: Option<UnitOverride>) -> CliResult {
    distinct(&args.input, &[args.out.as_deref()])?;
    let file = load_design_file(&args.input, o.as_ref())?;
    let report = match file.listed_potential()? {
        Some(listed) => verify_potential(&file.wave()?, &listed, &file.units()?, &args.ladder, args.k)?,
        None => verify_design(&file.design(DesignOptions::default())?, &args.ladder, args.k)?,
    };
    emit(args.out.as_deref(), &io::spectral_report_json(&report))?;
    if args.out.is_some() {
        for (i, n) in report.ladder.iter().enumerate() {
            println!(
                "n = {n}: E0 = {:e} (floor {:e}) overlap = {:.12}",
                report.zero_mode[i], report.roundoff_floor[i], report.overlaps[i]
            );
        }
    }
    if !report.passed {
        return Err(CliError::Failed("zero mode does not converge along the ladder".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let o = unit_override(cli.units.as_deref())?;
    match cli.command {
        Command::Design(a) => design(a, o),
        Command::Analyze(a) => analyze(a, o),
        Command::Susy(a) => susy(a, o),
        Command::Asym(a) => asym_cmd(a, o),
        Command::Verify(a) => verify(a, o),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zcwell: error [{}]: {e}", e.code());
            ExitCode::from(e.exit_code())
        }
    }
}
