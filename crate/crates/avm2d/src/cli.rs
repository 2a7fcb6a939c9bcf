//! Command-line driver: configuration parsing, run orchestration and
//! plain-text output files.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::basis::Family;
use crate::error::{Error, Result};
use crate::flux2d::CornerForm;
use crate::grid::{Assembly, Field, Mode, Scheme, StepDiagnostics};
use crate::physics::euler::Euler;
use crate::physics::mhd::Mhd;
use crate::physics::System;
use crate::problems::{
    column_cut, diagonal_cut, euler_field, exact_accuracy, l1_error, mhd_field, row_cut, Problem,
};
use crate::state::State;

pub const OUTDIR_ENV: &str = "AVM2D_OUTDIR";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cut {
    Diagonal,
    AtX(f64),
    AtY(f64),
}

/// Fully resolved run description.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub problem: Problem,
    pub family: Family,
    pub mode: Mode,
    pub nx: usize,
    pub ny: usize,
    pub delta: f64,
    pub t_final: f64,
    pub powell: bool,
    pub assembly: Assembly,
    pub corner: CornerForm,
    pub outdir: PathBuf,
    pub snapshots: Vec<f64>,
    pub cuts: Vec<Cut>,
}

#[derive(Parser, Debug)]
#[command(name = "avm2d", about = "Finite-volume solver for 2D Euler and ideal MHD")]
struct Flags {
    /// Problem name (accuracy, orszag-tang, rotor, riemann2d, explosion-b*).
    #[arg(long)]
    problem: Option<String>,
    /// Solver family: hll, int-N or pade-M-K (optionally pade-M-K-dN).
    #[arg(long)]
    solver: Option<String>,
    /// Spatial mode: 1d or 2d.
    #[arg(long)]
    mode: Option<String>,
    /// Mesh as NXxNY, e.g. 100x100.
    #[arg(long)]
    mesh: Option<String>,
    /// CFL number; capped at 1 in 2d mode and 0.5 in 1d mode.
    #[arg(long)]
    cfl: Option<String>,
    /// Final time override.
    #[arg(long = "t-final")]
    t_final: Option<String>,
    /// Divergence cleaning: powell or none.
    #[arg(long)]
    divclean: Option<String>,
    /// Edge flux assembly: simpson or speed-weighted.
    #[arg(long)]
    assembly: Option<String>,
    /// Subsonic corner flux form: transverse or star-direct.
    #[arg(long = "corner-flux")]
    corner_flux: Option<String>,
    /// Output directory.
    #[arg(long)]
    outdir: Option<String>,
    /// Comma-separated snapshot times.
    #[arg(long)]
    snapshots: Option<String>,
    /// Cut request: diag, x=VALUE or y=VALUE. Repeatable.
    #[arg(long, action = clap::ArgAction::Append)]
    cut: Vec<String>,
    /// Flat key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<String>,
}

const FILE_KEYS: [&str; 12] = [
    "problem", "solver", "mode", "mesh", "cfl", "t-final", "divclean", "assembly", "corner-flux",
    "outdir", "snapshots", "cut",
];

fn parse_number(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::config(key, format!("malformed value '{s}': expected a number")))
}

fn parse_mesh(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::config("mesh", format!("malformed value '{s}': expected NXxNY"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nx = a.trim().parse::<usize>().map_err(|_| bad())?;
    let ny = b.trim().parse::<usize>().map_err(|_| bad())?;
    if nx == 0 || ny == 0 {
        return Err(bad());
    }
    Ok((nx, ny))
}

fn parse_cuts(specs: &[String]) -> Result<Vec<Cut>> {
    let mut cuts = Vec::new();
    for spec in specs.iter().flat_map(|s| s.split(',')) {
        let spec = spec.trim();
        if spec.is_empty() {
            continue;
        }
        let cut = if spec == "diag" {
            Cut::Diagonal
        } else if let Some(v) = spec.strip_prefix("x=") {
            Cut::AtX(parse_number("cut", v)?)
        } else if let Some(v) = spec.strip_prefix("y=") {
            Cut::AtY(parse_number("cut", v)?)
        } else {
            return Err(Error::config(
                "cut",
                format!("malformed cut '{spec}': expected diag, x=VALUE or y=VALUE"),
            ));
        };
        cuts.push(cut);
    }
    Ok(cuts)
}

fn read_config_file(path: &str) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                "config",
                format!("{path}:{}: expected 'key = value'", lineno + 1),
            )
        })?;
        let key = key.trim().to_string();
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(Error::config(
                &key,
                format!("unknown configuration key in {path}:{}", lineno + 1),
            ));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Parse command-line flags plus an optional flat config file into a
/// validated RunConfig. Flags override file entries; the output directory
/// environment variable overrides both.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("avm2d")).chain(args.into_iter().map(Into::into));
    let flags = Flags::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        let key = match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => "help",
            _ => "args",
        };
        Error::config(key, e.to_string())
    })?;

    let mut raw = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    for (key, value) in [
        ("problem", &flags.problem),
        ("solver", &flags.solver),
        ("mode", &flags.mode),
        ("mesh", &flags.mesh),
        ("cfl", &flags.cfl),
        ("t-final", &flags.t_final),
        ("divclean", &flags.divclean),
        ("assembly", &flags.assembly),
        ("corner-flux", &flags.corner_flux),
        ("outdir", &flags.outdir),
        ("snapshots", &flags.snapshots),
    ] {
        if let Some(v) = value {
            raw.insert(key.to_string(), v.clone());
        }
    }
    if !flags.cut.is_empty() {
        raw.insert("cut".to_string(), flags.cut.join(","));
    }

    if raw.is_empty() {
        return Err(Error::config(
            "problem",
            "no configuration given; required: --problem <name> \
             (optional: --solver, --mode, --mesh, --cfl, --t-final, --divclean, \
             --assembly, --corner-flux, --outdir, --snapshots, --cut, --config)",
        ));
    }

    let mode = match raw.get("mode").map(String::as_str) {
        None | Some("2d") => Mode::TwoD,
        Some("1d") => Mode::OneD,
        Some(other) => {
            return Err(Error::config(
                "mode",
                format!("malformed value '{other}': expected 1d or 2d"),
            ))
        }
    };
    let delta = match raw.get("cfl") {
        Some(s) => parse_number("cfl", s)?,
        None => 0.5,
    };
    let cap = if mode == Mode::OneD { 0.5 } else { 1.0 };
    if !(delta > 0.0 && delta <= cap) {
        return Err(Error::config(
            "cfl",
            format!(
                "delta = {delta} out of range (0, {cap}] for {} mode",
                if mode == Mode::OneD { "1d" } else { "2d" }
            ),
        ));
    }

    let problem: Problem = raw
        .get("problem")
        .ok_or_else(|| Error::config("problem", "required flag --problem is missing"))?
        .parse()?;
    let family: Family = raw.get("solver").map(String::as_str).unwrap_or("hll").parse()?;
    let (nx, ny) = match raw.get("mesh") {
        Some(s) => parse_mesh(s)?,
        None => problem.default_mesh(),
    };
    let t_final = match raw.get("t-final") {
        Some(s) => {
            let t = parse_number("t-final", s)?;
            if t < 0.0 {
                return Err(Error::config("t-final", "final time must be nonnegative"));
            }
            t
        }
        None => problem.t_final(),
    };
    let powell = match raw.get("divclean").map(String::as_str) {
        None => !problem.is_euler(),
        Some("powell") => true,
        Some("none") => false,
        Some(other) => {
            return Err(Error::config(
                "divclean",
                format!("malformed value '{other}': expected powell or none"),
            ))
        }
    };
    if powell && problem.is_euler() {
        return Err(Error::config(
            "divclean",
            "powell cleaning does not apply to the gas system",
        ));
    }
    let assembly = match raw.get("assembly").map(String::as_str) {
        None | Some("simpson") => Assembly::Simpson,
        Some("speed-weighted") => Assembly::SpeedWeighted,
        Some(other) => {
            return Err(Error::config(
                "assembly",
                format!("malformed value '{other}': expected simpson or speed-weighted"),
            ))
        }
    };
    let corner = match raw.get("corner-flux").map(String::as_str) {
        None | Some("transverse") => CornerForm::Transverse,
        Some("star-direct") => CornerForm::StarDirect,
        Some(other) => {
            return Err(Error::config(
                "corner-flux",
                format!("malformed value '{other}': expected transverse or star-direct"),
            ))
        }
    };
    let snapshots = match raw.get("snapshots") {
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| parse_number("snapshots", t))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let cuts = match raw.get("cut") {
        Some(s) => parse_cuts(std::slice::from_ref(&s.clone()))?,
        None => Vec::new(),
    };
    let outdir = std::env::var(OUTDIR_ENV)
        .ok()
        .or_else(|| raw.get("outdir").cloned())
        .unwrap_or_else(|| "avm2d-out".to_string());

    Ok(RunConfig {
        problem,
        family,
        mode,
        nx,
        ny,
        delta,
        t_final,
        powell,
        assembly,
        corner,
        outdir: PathBuf::from(outdir),
        snapshots,
        cuts,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_snapshot_impl<const N: usize>(
    field: &Field<N>,
    gamma: f64,
    time: f64,
    path: &Path,
    names: &[&str],
    derived: impl Fn(&State<N>) -> Vec<f64>,
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {} {} {} {}",
        field.nx,
        field.ny,
        fmt_float(field.dx),
        fmt_float(field.dy),
        fmt_float(gamma),
        fmt_float(time)
    );
    let _ = writeln!(out, "# i j x y {}", names.join(" "));
    for j in 1..=field.ny {
        for i in 1..=field.nx {
            let u = field.at(i, j);
            let _ = write!(
                out,
                "{} {} {} {}",
                i,
                j,
                fmt_float(field.x_center(i)),
                fmt_float(field.y_center(j))
            );
            for c in 0..N {
                let _ = write!(out, " {}", fmt_float(u[c]));
            }
            for v in derived(u) {
                let _ = write!(out, " {}", fmt_float(v));
            }
            let _ = writeln!(out);
        }
    }
    fs::write(path, out).map_err(io_err(path))
}

pub fn write_snapshot_euler(field: &Field<4>, sys: &Euler, time: f64, path: &Path) -> Result<()> {
    write_snapshot_impl(field, sys.gamma, time, path, &["rho", "mx", "my", "e", "p"], |u| {
        vec![sys.pressure(u)]
    })
}

pub fn write_snapshot_mhd(field: &Field<8>, sys: &Mhd, time: f64, path: &Path) -> Result<()> {
    let names = ["rho", "mx", "my", "mz", "bx", "by", "bz", "e", "p", "pmag", "mach"];
    write_snapshot_impl(field, sys.gamma, time, path, &names, |u| {
        vec![sys.pressure(u), sys.magnetic_pressure(u), sys.mach(u)]
    })
}

/// Parsed snapshot file: header values plus raw data rows.
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub gamma: f64,
    pub time: f64,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |msg: &str| Error::InvalidParameter(format!("{}: {msg}", path.display()));
    let mut lines = text.lines();
    let header: Vec<f64> = lines
        .next()
        .ok_or_else(|| bad("empty snapshot"))?
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| bad("malformed header")))
        .collect::<Result<_>>()?;
    if header.len() != 6 {
        return Err(bad("header needs nx ny dx dy gamma time"));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        rows.push(
            line.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad("malformed data row")))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    Ok(Snapshot {
        nx: header[0] as usize,
        ny: header[1] as usize,
        dx: header[2],
        dy: header[3],
        gamma: header[4],
        time: header[5],
        rows,
    })
}

/// Write (scheme, mesh, error) rows grouped by scheme with observed
/// convergence rates log2(e_N / e_2N) against the previous mesh.
pub fn write_error_table(rows: &[(String, usize, f64)], path: &Path) -> Result<()> {
    let mut seen = Vec::new();
    for (scheme, mesh, _) in rows {
        if seen.contains(&(scheme, mesh)) {
            return Err(Error::InvalidParameter(format!(
                "duplicate error-table entry for scheme '{scheme}' on mesh {mesh}"
            )));
        }
        seen.push((scheme, mesh));
    }
    let mut schemes: Vec<&String> = Vec::new();
    for (scheme, _, _) in rows {
        if !schemes.contains(&scheme) {
            schemes.push(scheme);
        }
    }
    let mut out = String::from("# scheme mesh l1 rate\n");
    for scheme in schemes {
        let mut group: Vec<(usize, f64)> = rows
            .iter()
            .filter(|(s, _, _)| s == scheme)
            .map(|&(_, m, e)| (m, e))
            .collect();
        group.sort_by_key(|&(m, _)| m);
        let mut prev: Option<(usize, f64)> = None;
        for (mesh, err) in group {
            let rate = match prev {
                Some((pm, pe)) if err > 0.0 && pe > 0.0 => {
                    let r = (pe / err).log2() / (mesh as f64 / pm as f64).log2();
                    format!("{r:.3}")
                }
                _ => "-".to_string(),
            };
            let _ = writeln!(out, "{scheme} {mesh} {} {rate}", fmt_float(err));
            prev = Some((mesh, err));
        }
    }
    fs::write(path, out).map_err(io_err(path))
}

pub fn write_diagnostics(diags: &[StepDiagnostics], path: &Path) -> Result<()> {
    let mut out = String::from("# step time dt max_speed min_rho min_pressure div_l1 fallbacks\n");
    for (k, d) in diags.iter().enumerate() {
        let div = match d.divergence_l1 {
            Some(v) => fmt_float(v),
            None => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {}",
            k + 1,
            fmt_float(d.time),
            fmt_float(d.dt),
            fmt_float(d.max_speed),
            fmt_float(d.min_rho),
            fmt_float(d.min_pressure),
            div,
            d.fallbacks
        );
    }
    fs::write(path, out).map_err(io_err(path))
}

fn cut_file_name(cut: Cut) -> String {
    match cut {
        Cut::Diagonal => "cut-diag.txt".to_string(),
        Cut::AtX(v) => format!("cut-x{v}.txt"),
        Cut::AtY(v) => format!("cut-y{v}.txt"),
    }
}

fn write_cut<const N: usize>(
    field: &Field<N>,
    cut: Cut,
    names: &[&str],
    dir: &Path,
) -> Result<()> {
    let (coord_name, columns): (&str, Vec<Vec<(f64, f64)>>) = match cut {
        Cut::Diagonal => (
            "s",
            (0..N)
                .map(|c| diagonal_cut(field, c))
                .collect::<Result<_>>()?,
        ),
        Cut::AtX(x) => ("y", (0..N).map(|c| column_cut(field, x, c)).collect()),
        Cut::AtY(y) => ("x", (0..N).map(|c| row_cut(field, y, c)).collect()),
    };
    let mut out = format!("# {coord_name} {}\n", names[..N].join(" "));
    for row in 0..columns[0].len() {
        let _ = write!(out, "{}", fmt_float(columns[0][row].0));
        for col in columns.iter() {
            let _ = write!(out, " {}", fmt_float(col[row].1));
        }
        let _ = writeln!(out);
    }
    let path = dir.join(cut_file_name(cut));
    fs::write(&path, out).map_err(io_err(&path))
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub outdir: PathBuf,
}

fn write_meta(cfg: &RunConfig, summary: &RunSummary) -> Result<()> {
    let mode = if cfg.mode == Mode::OneD { "1d" } else { "2d" };
    let assembly = if cfg.assembly == Assembly::Simpson {
        "simpson"
    } else {
        "speed-weighted"
    };
    let corner = if cfg.corner == CornerForm::Transverse {
        "transverse"
    } else {
        "star-direct"
    };
    let mut out = String::new();
    let _ = writeln!(out, "problem = {}", cfg.problem);
    let _ = writeln!(out, "solver = {}", cfg.family);
    let _ = writeln!(out, "mode = {mode}");
    let _ = writeln!(out, "mesh = {}x{}", cfg.nx, cfg.ny);
    let _ = writeln!(out, "cfl = {}", cfg.delta);
    let _ = writeln!(out, "t-final = {}", cfg.t_final);
    let _ = writeln!(out, "divclean = {}", if cfg.powell { "powell" } else { "none" });
    let _ = writeln!(out, "assembly = {assembly}");
    let _ = writeln!(out, "corner-flux = {corner}");
    let _ = writeln!(out, "steps = {}", summary.steps);
    let _ = writeln!(out, "final-time = {}", summary.final_time);
    let path = cfg.outdir.join("run.meta");
    fs::write(&path, out).map_err(io_err(&path))
}

fn scheme_label(cfg: &RunConfig) -> String {
    format!(
        "{}-{}",
        cfg.family,
        if cfg.mode == Mode::OneD { "1d" } else { "2d" }
    )
}

/// Run the configured problem and write every output file.
pub fn execute(cfg: &RunConfig) -> Result<RunSummary> {
    fs::create_dir_all(&cfg.outdir).map_err(io_err(&cfg.outdir))?;
    if cfg.problem.is_euler() {
        let sys = Euler::new(cfg.problem.gamma());
        let mut scheme =
            Scheme::new(sys, cfg.family, cfg.mode, cfg.assembly, cfg.powell, cfg.delta)?;
        scheme.corner = cfg.corner;
        let mut field = euler_field(cfg.problem, cfg.nx, cfg.ny)?;
        let diags = scheme.run(&mut field, cfg.t_final, &cfg.snapshots, |f, t| {
            let path = cfg.outdir.join(format!("snapshot-t{t:.6}.txt"));
            write_snapshot_euler(f, &sys, t, &path)
        })?;
        write_snapshot_euler(&field, &sys, cfg.t_final, &cfg.outdir.join("final.txt"))?;
        write_diagnostics(&diags, &cfg.outdir.join("diagnostics.txt"))?;
        let names = ["rho", "mx", "my", "e"];
        for &cut in &cfg.cuts {
            write_cut(&field, cut, &names, &cfg.outdir)?;
        }
        let t = cfg.t_final;
        let err = l1_error(&field, 0, |x, y| exact_accuracy(x, y, t)[0]);
        write_error_table(
            &[(scheme_label(cfg), cfg.nx, err)],
            &cfg.outdir.join("error.txt"),
        )?;
        let summary = RunSummary {
            steps: diags.len(),
            final_time: cfg.t_final,
            outdir: cfg.outdir.clone(),
        };
        write_meta(cfg, &summary)?;
        Ok(summary)
    } else {
        let sys = Mhd::new(cfg.problem.gamma());
        let mut scheme =
            Scheme::new(sys, cfg.family, cfg.mode, cfg.assembly, cfg.powell, cfg.delta)?;
        scheme.corner = cfg.corner;
        let mut field = mhd_field(cfg.problem, cfg.nx, cfg.ny)?;
        let diags = scheme.run(&mut field, cfg.t_final, &cfg.snapshots, |f, t| {
            let path = cfg.outdir.join(format!("snapshot-t{t:.6}.txt"));
            write_snapshot_mhd(f, &sys, t, &path)
        })?;
        write_snapshot_mhd(&field, &sys, cfg.t_final, &cfg.outdir.join("final.txt"))?;
        write_diagnostics(&diags, &cfg.outdir.join("diagnostics.txt"))?;
        let names = ["rho", "mx", "my", "mz", "bx", "by", "bz", "e"];
        for &cut in &cfg.cuts {
            write_cut(&field, cut, &names, &cfg.outdir)?;
        }
        let summary = RunSummary {
            steps: diags.len(),
            final_time: cfg.t_final,
            outdir: cfg.outdir.clone(),
        };
        write_meta(cfg, &summary)?;
        Ok(summary)
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_config(args) {
        Ok(cfg) => cfg,
        Err(Error::Config { key, message }) if key == "help" => {
            println!("{message}");
            return 0;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match execute(&cfg) {
        Ok(summary) => {
            println!(
                "completed {} ({}) in {} steps to t = {}; output in {}",
                cfg.problem,
                scheme_label(&cfg),
                summary.steps,
                summary.final_time,
                summary.outdir.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
