//! `opfam`: spectra, local spectra and equivalence tests for matrix families.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 on input
//! errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use opfam::bracket::{bracket_seq_checked, root_test, QnParams};
use opfam::family::{
    asym_qn_equivalent, asymptotically_equivalent, commute_in_limit, io::read_family, HGrid, OperatorFamily, TailParams,
};
use opfam::harness::{parse_csv, render_plot, run_suite, PlotFormat, ScenarioConfig, Suite};
use opfam::linalg::io::{read_matrix, read_vector};
use opfam::linalg::{CMatrix, CVector};
use opfam::local::{family_local_spectrum_grid, local_spectral_space_member, Region, MEMBER_RADIUS_ORDER};
use opfam::spectra::{family_spectrum_grid, spectral_radius_bound, PointClass, Rect, RegionGrid};

#[derive(Parser)]
#[command(
    name = "opfam",
    version,
    about = "Spectral analysis of h-parametrized matrix families"
)]
struct Cli {
    /// Seed for generated instances.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Sampling grid `h0:ratio:count:tail`.
    #[arg(long, global = true, default_value = "1:0.5:40:6")]
    grid: HGrid,
    /// Directory receiving output files instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for grids (default: from the output file extension, else csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pgm,
    Svg,
}

impl From<Format> for PlotFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => PlotFormat::Csv,
            Format::Pgm => PlotFormat::Pgm,
            Format::Svg => PlotFormat::Svg,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Family spectrum on a rectangular grid.
    Spectrum(SpectrumArgs),
    /// Local spectrum of a vector on a rectangular grid.
    LocalSpectrum(LocalSpectrumArgs),
    /// Membership of a vector in a local spectral space.
    LocalMember(LocalMemberArgs),
    /// Bracket root table and quasinilpotent-equivalence verdict of two matrices.
    Bracket(BracketArgs),
    /// Asymptotic or asymptotic-quasinilpotent equivalence of two families.
    Equivalence(EquivalenceArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Re-render a grid CSV in another format.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Rectangle `re_min:re_max:im_min:im_max`; defaults to a square covering the spectral radius bound.
    #[arg(long)]
    rect: Option<Rect>,
    /// Cells per side.
    #[arg(long, default_value_t = 64)]
    res: usize,
    /// Output file (overrides `--out`).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Additional CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Additional PGM output.
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Additional SVG output.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Family file.
    #[arg(long)]
    family: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct LocalSpectrumArgs {
    #[arg(long)]
    family: PathBuf,
    /// Vector file.
    #[arg(long)]
    x: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct LocalMemberArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    x: PathBuf,
    /// Region: `empty | disc re,im,r | rect a:b:c:d | union(..) | inter(..)`.
    #[arg(long)]
    a: Region,
    #[arg(long)]
    rect: Option<Rect>,
    #[arg(long, default_value_t = 64)]
    res: usize,
}

#[derive(Args)]
struct BracketArgs {
    /// Matrix file for T.
    #[arg(long)]
    t: PathBuf,
    /// Matrix file for S.
    #[arg(long)]
    s: PathBuf,
    #[arg(long, default_value_t = 40)]
    nmax: usize,
    /// Also write the root table as CSV.
    #[arg(long, value_enum)]
    emit: Option<Emit>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Asym,
    Qn,
}

#[derive(Args)]
struct EquivalenceArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Qn)]
    mode: Mode,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest dimension of random instances (2..=8).
    #[arg(long, default_value_t = 6)]
    dim: usize,
    /// Suites to run (repeatable or comma separated); all by default.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<Suite>,
    /// Run a single check id.
    #[arg(long)]
    check: Option<String>,
    /// Print the machine-readable report instead of the human one.
    #[arg(long)]
    machine: bool,
    /// Final bracket root below which a pair is equivalent.
    #[arg(long, default_value_t = 0.05)]
    eps_q: f64,
    /// Root floor above which a pair is not equivalent.
    #[arg(long, default_value_t = 0.2)]
    delta_q: f64,
    /// Resolvent threshold on the smallest singular value, relative to the family scale.
    #[arg(long, default_value_t = 1e-6)]
    delta_res: f64,
    /// Relative size `‖P_i x‖/‖x‖` below which a spectral component of `x` counts as absent.
    #[arg(long, default_value_t = 1e-8)]
    tol_loc: f64,
    /// `B_max` as a multiple of `‖x‖/scale`.
    #[arg(long, default_value_t = 1e8)]
    b_max: f64,
}

#[derive(Args)]
struct PlotArgs {
    /// Grid CSV written by `spectrum` or `local-spectrum`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn output_format(cli: &Cli, output: Option<&Path>) -> PlotFormat {
    match cli.format {
        Some(f) => PlotFormat::from(f),
        None => output
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
            .and_then(|e| e.parse().ok())
            .unwrap_or(PlotFormat::Csv),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_family(path: &Path) -> Result<OperatorFamily> {
    read_family(&read_text(path)?).with_context(|| format!("{}", path.display()))
}

fn load_matrix(path: &Path) -> Result<CMatrix> {
    read_matrix(&read_text(path)?).with_context(|| format!("{}", path.display()))
}

fn load_vector(path: &Path) -> Result<CVector> {
    read_vector(&read_text(path)?).with_context(|| format!("{}", path.display()))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes to `explicit`, else to `DIR/name` under `--out`, else to stdout.
fn emit(cli: &Cli, explicit: Option<&Path>, name: &str, bytes: &[u8]) -> Result<()> {
    if let Some(p) = explicit {
        return write_bytes(p, bytes);
    }
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        return write_bytes(&dir.join(name), bytes);
    }
    std::io::stdout().write_all(bytes).context("cannot write to stdout")
}

fn covering_rect(f: &OperatorFamily, g: &HGrid) -> Result<Rect> {
    let r = spectral_radius_bound(f, g, MEMBER_RADIUS_ORDER)?.value;
    if !r.is_finite() {
        bail!("spectral radius bound is not finite; pass --rect");
    }
    Ok(Rect::centered(1.1 * r + 0.25)?)
}

fn emit_grid(cli: &Cli, args: &GridArgs, stem: &str, grid: &RegionGrid) -> Result<()> {
    let fmt = output_format(cli, args.output.as_deref());
    emit(
        cli,
        args.output.as_deref(),
        &format!("{stem}.{}", fmt.extension()),
        &render_plot(grid, fmt),
    )?;
    for (path, fmt) in [
        (&args.csv, PlotFormat::Csv),
        (&args.pgm, PlotFormat::Pgm),
        (&args.svg, PlotFormat::Svg),
    ] {
        if let Some(p) = path {
            write_bytes(p, &render_plot(grid, fmt))?;
        }
    }
    eprintln!(
        "{}x{} cells: {} spectrum, {} undetermined, {} resolvent",
        grid.nx,
        grid.ny,
        grid.count(PointClass::Spectrum),
        grid.count(PointClass::Undetermined),
        grid.count(PointClass::Resolvent)
    );
    Ok(())
}

fn spectrum(cli: &Cli, args: &SpectrumArgs) -> Result<()> {
    let f = load_family(&args.family)?;
    let rect = match args.grid.rect {
        Some(r) => r,
        None => covering_rect(&f, &cli.grid)?,
    };
    let grid = family_spectrum_grid(&f, &rect, args.grid.res, args.grid.res, &cli.grid)?;
    emit_grid(cli, &args.grid, "spectrum", &grid)
}

fn local_spectrum(cli: &Cli, args: &LocalSpectrumArgs) -> Result<()> {
    let f = load_family(&args.family)?;
    let x = load_vector(&args.x)?;
    let rect = match args.grid.rect {
        Some(r) => r,
        None => covering_rect(&f, &cli.grid)?,
    };
    let grid = family_local_spectrum_grid(&f, &x, &rect, args.grid.res, args.grid.res, &cli.grid)?;
    emit_grid(cli, &args.grid, "local-spectrum", &grid)
}

fn local_member(cli: &Cli, args: &LocalMemberArgs) -> Result<()> {
    let f = load_family(&args.family)?;
    let x = load_vector(&args.x)?;
    let rect = match args.rect {
        Some(r) => r,
        None => covering_rect(&f, &cli.grid)?,
    };
    let rep = local_spectral_space_member(&f, &x, &args.a, &rect, args.res, args.res, &cli.grid)?;
    let text = format!(
        "member={}\tinconclusive={}\toutside_cells={}\tregion={}\n",
        rep.member,
        rep.inconclusive,
        rep.outside.len(),
        args.a
    );
    emit(cli, None, "local-member.txt", text.as_bytes())
}

fn bracket(cli: &Cli, args: &BracketArgs) -> Result<()> {
    let t = load_matrix(&args.t)?;
    let s = load_matrix(&args.s)?;
    let pair = bracket_seq_checked(&t, &s, args.nmax)?;
    let qn = QnParams {
        n_max: args.nmax,
        ..QnParams::default()
    };
    let rep = root_test(&pair.forward, &pair.backward, &qn);
    let mut table = String::from("n\tnorm(T-S)\trho(T-S)\tnorm(S-T)\trho(S-T)\n");
    let mut csv = String::from("n,norm_ts,rho_ts,norm_st,rho_st\n");
    for k in 0..args.nmax {
        let (f, b) = (&pair.forward, &pair.backward);
        let _ = writeln!(
            table,
            "{}\t{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}",
            k + 1,
            f.norms[k],
            f.roots[k],
            b.norms[k],
            b.roots[k]
        );
        let _ = writeln!(
            csv,
            "{},{:e},{:e},{:e},{:e}",
            k + 1,
            f.norms[k],
            f.roots[k],
            b.norms[k],
            b.roots[k]
        );
    }
    let _ = writeln!(table, "verdict: {} ({})", rep.verdict, rep.diagnostics);
    if let Some(err) = pair.cross_check {
        let _ = writeln!(table, "binomial cross-check: max relative deviation {err:.3e}");
    }
    match args.emit {
        Some(Emit::Csv) => {
            eprint!("{table}");
            emit(cli, None, "bracket.csv", csv.as_bytes())
        }
        None => emit(cli, None, "bracket.txt", table.as_bytes()),
    }
}

fn equivalence(cli: &Cli, args: &EquivalenceArgs) -> Result<()> {
    let f = load_family(&args.f)?;
    let g = load_family(&args.g)?;
    let tp = TailParams::default();
    let mut text = String::new();
    match args.mode {
        Mode::Asym => {
            let s = asymptotically_equivalent(&f, &g, &cli.grid, &tp)?;
            let _ = writeln!(
                text,
                "asymptotic equivalence: ||F(h)-G(h)|| {} (tail max {:.6e}, trend {:.3}, certificate {})",
                s.limit_verdict,
                s.tail_max,
                s.tail_trend,
                s.certificate.map_or("none".to_string(), |c| c.to_string())
            );
        }
        Mode::Qn => {
            let c = commute_in_limit(&f, &g, &cli.grid, &tp)?;
            let rep = asym_qn_equivalent(&f, &g, &cli.grid, &QnParams::default(), &tp)?;
            let _ = writeln!(
                text,
                "commutator [F(h),G(h)]: {} (tail max {:.6e})",
                c.limit_verdict, c.tail_max
            );
            let _ = writeln!(
                text,
                "asymptotic qn-equivalence: {} (final root {:.6e}; {})",
                rep.verdict, rep.final_root, rep.diagnostics
            );
        }
    }
    emit(cli, None, "equivalence.txt", text.as_bytes())
}

/// Returns whether every check passed or was inconclusive.
fn verify(cli: &Cli, args: &VerifyArgs) -> Result<bool> {
    let mut cfg = ScenarioConfig {
        seed: cli.seed,
        dim: args.dim,
        grid: cli.grid,
        delta_res: args.delta_res,
        tol_loc: args.tol_loc,
        b_max_factor: args.b_max,
        only: args.check.clone(),
        ..ScenarioConfig::default()
    };
    cfg.qn.eps_q = args.eps_q;
    cfg.qn.delta_q = args.delta_q;
    if !args.suite.is_empty() {
        cfg.suites = Suite::ALL.into_iter().filter(|s| args.suite.contains(s)).collect();
    }
    let bundle = run_suite(&cfg)?;
    let (machine, human) = (bundle.render_machine(), bundle.render_human());
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            write_bytes(&dir.join("report.tsv"), machine.as_bytes())?;
            write_bytes(&dir.join("report.txt"), human.as_bytes())?;
            print!("{}", if args.machine { &machine } else { &human });
        }
        None => print!("{}", if args.machine { &machine } else { &human }),
    }
    Ok(!bundle.any_failed())
}

fn plot(cli: &Cli, args: &PlotArgs) -> Result<()> {
    let grid = parse_csv(&read_text(&args.input)?).with_context(|| format!("{}", args.input.display()))?;
    let fmt = output_format(cli, args.output.as_deref());
    let stem = args.input.file_stem().and_then(|s| s.to_str()).unwrap_or("grid");
    emit(
        cli,
        args.output.as_deref(),
        &format!("{stem}.{}", fmt.extension()),
        &render_plot(&grid, fmt),
    )
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    match &cli.command {
        Command::Spectrum(a) => spectrum(cli, a)?,
        Command::LocalSpectrum(a) => local_spectrum(cli, a)?,
        Command::LocalMember(a) => local_member(cli, a)?,
        Command::Bracket(a) => bracket(cli, a)?,
        Command::Equivalence(a) => equivalence(cli, a)?,
        Command::Verify(a) => return verify(cli, a),
        Command::Plot(a) => plot(cli, a)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
