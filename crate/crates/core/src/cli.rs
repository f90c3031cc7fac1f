//! Command-line front end.
//!
//! ```text
//! crouzeix-lab ellipse-map --b <real> [--eps <real>] [--at <re,im>]
//! crouzeix-lab verify --suite <jack|schwarz-jack|bicirc|crouzeix> [--b <real>] [--quintic <a,b>] [--grid <n>] [--tol <real>]
//! crouzeix-lab numrange --matrix <a11,a12,a21,a22> [--points <m>] [--out <csv|svg>] [--path <file>]
//! crouzeix-lab ratio --matrix <a11,a12,a21,a22> --degree <d> [--restarts <k>] [--seed <s>]
//! crouzeix-lab domain [--quintic <a,b> | --profile <file>] [--points <m>] --out svg --path <file>
//! ```
//!
//! Exit codes: 0 success, 1 a verification check failed (the report is still
//! printed), 2 usage or input error. A `--path` of `-` means standard output.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::{Parser, Subcommand, ValueEnum};

use crate::conformal::{
    ellipse_constants, phi_eval, phi_inverse, schwarz_jack_verify, verify_symmetry, EllipseMapSeries,
    ProfileDomain, QuinticMap, SymmetryMode, SymmetryReport,
};
use crate::crouzeix::{ratio_search, verify_cp_bound};
use crate::matrices::{nr_boundary, Matrix2};
use crate::numerics::{linspace, CurveSamples};
use crate::{Error, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Series tolerance for the `crouzeix` suite.
const CROUZEIX_SUITE_EPS: f64 = 1e-14;
/// Largest radius sampled by the map verifiers.
const VERIFY_R_MAX: f64 = 0.999;
/// Margin allowed above 2 before `ratio` reports a violation.
const RATIO_SLACK: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "crouzeix-lab", version, about = "Conformal maps, numerical ranges and the 2x2 Crouzeix bound")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constants of the ellipse-to-disk map and optionally phi(z)
    EllipseMap {
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        at: Option<C64>,
    },
    /// Run a verification suite
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, value_parser = parse_pair)]
        quintic: Option<(f64, f64)>,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sample the boundary of a numerical range
    Numrange {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_matrix)]
        matrix: Matrix2,
        #[arg(long, default_value_t = 360)]
        points: usize,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        out: OutFormat,
        #[arg(long, default_value = "-")]
        path: String,
    },
    /// Search for polynomials with a large Crouzeix ratio
    Ratio {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_matrix)]
        matrix: Matrix2,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw a bi-circularly symmetric domain
    Domain {
        #[arg(long, value_parser = parse_pair, conflicts_with = "profile")]
        quintic: Option<(f64, f64)>,
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, default_value_t = 720)]
        points: usize,
        #[arg(long, value_enum)]
        out: OutFormat,
        #[arg(long)]
        path: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Jack,
    SchwarzJack,
    Bicirc,
    Crouzeix,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OutFormat {
    Csv,
    Svg,
}

/// A failure that maps to an exit code.
enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("io error: {e}"))
    }
}

/// Parses `re`, `re+imi`, `re-imi` or `imi` with no spaces.
pub fn parse_complex(token: &str) -> Result<C64, String> {
    let t = token.trim();
    let bad = || format!("invalid complex number '{token}'");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    let im = im.parse::<f64>().map_err(|_| bad())?;
    let z = C64::new(re, im);
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// Four comma-separated entries in row-major order.
pub fn parse_matrix(s: &str) -> Result<Matrix2, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated entries, got {}", parts.len()));
    }
    let e = parts.iter().map(|p| parse_complex(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix2::new(e[0], e[1], e[2], e[3]))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got '{s}'"));
    }
    let a = parts[0].trim().parse::<f64>().map_err(|e| format!("'{}': {e}", parts[0]))?;
    let b = parts[1].trim().parse::<f64>().map_err(|e| format!("'{}': {e}", parts[1]))?;
    Ok((a, b))
}

fn parse_point(s: &str) -> Result<C64, String> {
    parse_pair(s).map(|(re, im)| C64::new(re, im))
}

/// Writes `theta,re,im` rows with 17 significant digits.
pub fn emit_csv(curve: &CurveSamples, sink: &mut dyn Write) -> io::Result<()> {
    writeln!(sink, "theta,re,im")?;
    for (t, z) in curve.params().iter().zip(curve.points()) {
        writeln!(sink, "{t:.16e},{:.16e},{:.16e}", z.re, z.im)?;
    }
    Ok(())
}

/// Parses the output of [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<CurveSamples, Error> {
    let mut lines = text.lines();
    if lines.next() != Some("theta,re,im") {
        return Err(Error::InvalidCurve("missing 'theta,re,im' header".into()));
    }
    let mut params = Vec::new();
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::InvalidCurve(format!("row {}: {e}", i + 1)))?;
        if f.len() != 3 {
            return Err(Error::InvalidCurve(format!("row {} has {} fields", i + 1, f.len())));
        }
        params.push(f[0]);
        points.push(C64::new(f[1], f[2]));
    }
    CurveSamples::new(params, points)
}

/// Canvas size of the longer side of an SVG plot, in user units.
pub const SVG_EXTENT: f64 = 1000.0;

/// Standalone SVG with one closed, unfilled polyline per curve. The joint
/// bounding box plus a 5% margin is mapped onto a canvas whose longer side is
/// [`SVG_EXTENT`] units, with the y axis pointing up.
pub fn emit_svg(curves: &[CurveSamples], sink: &mut dyn Write) -> io::Result<()> {
    if curves.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no curves to draw"));
    }
    let (mut x0, mut y0, mut x1, mut y1) = curves[0].bounding_box();
    for c in &curves[1..] {
        let (a, b, cx, d) = c.bounding_box();
        x0 = x0.min(a);
        y0 = y0.min(b);
        x1 = x1.max(cx);
        y1 = y1.max(d);
    }
    let span = (x1 - x0).max(y1 - y0);
    let margin = if span > 0.0 { 0.05 * span } else { 1.0 };
    let (x0, y0, x1, y1) = (x0 - margin, y0 - margin, x1 + margin, y1 + margin);
    let scale = SVG_EXTENT / (x1 - x0).max(y1 - y0);
    let (w, h) = ((x1 - x0) * scale, (y1 - y0) * scale);

    writeln!(sink, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#)?;
    writeln!(
        sink,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
    )?;
    for c in curves {
        let mut pts: Vec<String> = c
            .points()
            .iter()
            .map(|z| format!("{:.4},{:.4}", (z.re - x0) * scale, (y1 - z.im) * scale))
            .collect();
        pts.push(pts[0].clone());
        writeln!(
            sink,
            r#"  <polyline points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
            pts.join(" ")
        )?;
    }
    writeln!(sink, "</svg>")?;
    Ok(())
}

fn open_sink<'a>(path: &str, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Failure> {
    if path == "-" {
        Ok(Box::new(stdout))
    } else {
        let f = File::create(path).map_err(|e| Failure::Usage(format!("cannot create '{path}': {e}")))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn read_profile(path: &str) -> Result<ProfileDomain, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read profile '{path}': {e}")))?;
    let mut thetas = Vec::new();
    let mut radii = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let (t, r) = parse_pair(line).map_err(|e| Failure::Usage(format!("{path}:{}: {e}", i + 1)))?;
        thetas.push(t);
        radii.push(r);
    }
    Ok(ProfileDomain::new(thetas, radii)?)
}

fn quintic(pair: (f64, f64)) -> Result<QuinticMap, Failure> {
    Ok(QuinticMap::new(pair.0, pair.1)?)
}

fn symmetry_line(out: &mut dyn Write, r: &SymmetryReport) -> io::Result<()> {
    writeln!(
        out,
        "{} {:?}: worst violation {:.3e} ({:?}) at r={:.6}, theta={:.6} over {} points (tol {:.1e})",
        if r.passed { "PASS" } else { "FAIL" },
        r.mode,
        r.worst_violation,
        r.worst_check,
        r.worst_r,
        r.worst_theta,
        r.points_checked,
        r.tol
    )
}

fn verify_map<F>(suite: Suite, f: F, grid: usize, tol: f64, out: &mut dyn Write) -> Result<bool, Failure>
where
    F: Fn(C64) -> C64 + Sync + Send,
{
    if grid < 3 {
        return Err(Failure::Usage("--grid must be at least 3".into()));
    }
    let r_grid: Vec<f64> = (1..=grid).map(|i| VERIFY_R_MAX * i as f64 / grid as f64).collect();
    let theta_grid: Vec<f64> = (0..grid).map(|k| 2.0 * PI * k as f64 / grid as f64).collect();
    match suite {
        Suite::Jack | Suite::Bicirc => {
            let mode = if suite == Suite::Jack { SymmetryMode::Jack } else { SymmetryMode::Bicircular };
            let rep = verify_symmetry(&f, mode, &r_grid, &theta_grid, tol);
            symmetry_line(out, &rep)?;
            Ok(rep.passed)
        }
        Suite::SchwarzJack => {
            let rep = schwarz_jack_verify(&f, &linspace(0.0, VERIFY_R_MAX, grid), tol)?;
            symmetry_line(out, &rep.jack)?;
            for p in &rep.profiles {
                writeln!(
                    out,
                    "{} {:?}: min margin {:.6e} at index {}",
                    if p.passed { "PASS" } else { "FAIL" },
                    p.mode,
                    p.min_margin,
                    p.worst_index
                )?;
            }
            writeln!(out, "max |Im f(x)| = {:.3e}, r_max = {}", rep.max_imag, rep.r_max)?;
            Ok(rep.passed)
        }
        Suite::Crouzeix => unreachable!(),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<bool, Failure> {
    match cli.command {
        Command::EllipseMap { b, eps, at } => {
            let k = ellipse_constants(b, eps)?;
            writeln!(out, "rho = {:.17e}", k.rho)?;
            writeln!(out, "phi(1) = {:.17e}", k.phi_at_1)?;
            writeln!(out, "phi'(0) = {:.17e}", k.phi_prime_at_0)?;
            writeln!(out, "2/rho = {:.17e}", k.two_over_rho())?;
            if let Some(z) = at {
                let m = EllipseMapSeries::new(b, eps)?;
                let w = phi_eval(&m, z)?;
                writeln!(out, "phi({},{}) = {:.17e},{:.17e}", z.re, z.im, w.re, w.im)?;
            }
            Ok(true)
        }
        Command::Verify { suite: Suite::Crouzeix, b, .. } => {
            let rep = verify_cp_bound(b.unwrap_or(1.0), CROUZEIX_SUITE_EPS)?;
            writeln!(out, "b = {}, rho = {:.17e}", rep.b, rep.rho)?;
            writeln!(out, "phi(1) = {:.17e}, phi'(0) = {:.17e}", rep.phi1, rep.phip0)?;
            writeln!(out, "||phi(A) + psi(A)*|| = {:.17e}", rep.cp_norm)?;
            writeln!(out, "||phi(A)|| = {:.17e}", rep.phi_norm)?;
            for c in &rep.checks {
                writeln!(out, "{} {} (margin {:.3e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.margin)?;
            }
            Ok(rep.passed())
        }
        Command::Verify { suite, b, quintic: q, grid, tol } => match (q, b) {
            (Some(pair), _) => {
                let map = quintic(pair)?;
                writeln!(out, "map: z + {}z^3 - {}z^5", map.a(), map.b())?;
                verify_map(suite, |z| map.eval(z), grid, tol, out)
            }
            (None, Some(b)) => {
                let m = EllipseMapSeries::new(b, 1e-15)?;
                writeln!(out, "map: inverse ellipse map, b = {b}")?;
                verify_map(suite, |w| phi_inverse(&m, w, 1e-14).unwrap_or(C64::new(f64::NAN, f64::NAN)), grid, tol, out)
            }
            (None, None) => {
                let map = QuinticMap::new(0.25, 0.05)?;
                writeln!(out, "map: z + 0.25z^3 - 0.05z^5")?;
                verify_map(suite, |z| map.eval(z), grid, tol, out)
            }
        },
        Command::Numrange { matrix, points, out: format, path } => {
            let curve = nr_boundary(&matrix, points)?;
            let mut sink = open_sink(&path, out)?;
            match format {
                OutFormat::Csv => emit_csv(&curve, &mut sink)?,
                OutFormat::Svg => emit_svg(&[curve], &mut sink)?,
            }
            sink.flush()?;
            Ok(true)
        }
        Command::Ratio { matrix, degree, restarts, seed } => {
            let rep = ratio_search(&matrix, degree, restarts, seed)?;
            writeln!(out, "best ratio = {:.17e}", rep.best_ratio)?;
            writeln!(out, "polynomial = {}", rep.best_poly)?;
            writeln!(out, "evaluations = {}, seed = {}", rep.evaluations, rep.seed)?;
            let ok = rep.best_ratio <= 2.0 + RATIO_SLACK;
            if !ok {
                writeln!(out, "FAIL ratio exceeds 2")?;
            }
            Ok(ok)
        }
        Command::Domain { quintic: q, profile, points, out: format, path } => {
            let curve = match (q, profile) {
                (Some(pair), _) => {
                    let map = quintic(pair)?;
                    CurveSamples::from_angle_fn(points, |t| map.eval(C64::from_polar(1.0, t)))?
                }
                (None, Some(file)) => crate::conformal::bicirc_from_profile(&read_profile(&file)?, points)?,
                (None, None) => return Err(Failure::Usage("one of --quintic or --profile is required".into())),
            };
            let mut sink = open_sink(&path, out)?;
            match format {
                OutFormat::Csv => emit_csv(&curve, &mut sink)?,
                OutFormat::Svg => emit_svg(&[curve], &mut sink)?,
            }
            sink.flush()?;
            Ok(true)
        }
    }
}

/// Runs one command; `args` excludes the program name.
pub fn run_with_io<S: AsRef<str>>(args: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = std::iter::once("crouzeix-lab").chain(args.iter().map(|s| s.as_ref()));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            let _ = writeln!(err, "{line}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {}", msg.lines().next().unwrap_or(""));
            EXIT_USAGE
        }
    }
}

/// Runs one command against the process's standard streams.
pub fn run<S: AsRef<str>>(args: &[S]) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run_with_io(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}
