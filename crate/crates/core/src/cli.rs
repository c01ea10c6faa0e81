//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bipoly::PolyJson;
use crate::density::{default_range, density_grid, DensityProfile};
use crate::dsl::{self, Expr};
use crate::encodings::{EncodedDistribution, Kind};
use crate::error::{Error, Result};
use crate::moments::{cumulant_series, fit_recurrence, moment_series, terms_needed, MomentSeries};
use crate::sampler::{compare, histogram, run_trials, Comparison, EmpiricalHistogram, Entries, Options};

#[derive(Parser, Debug)]
#[command(name = "rmcalc", version, about = "Random matrix calculator on bivariate polynomials")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Calculator expression, polynomial JSON, or `@file` holding either.
    pub input: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical Lmz polynomial of an expression.
    Poly(Input),
    /// Polynomial in another encoding.
    Encode {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "mz")]
        kind: String,
    },
    /// Density profile as CSV, with a JSON sidecar next to `--out`.
    Density {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        zmin: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        zmax: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact moments m_0..m_n.
    Moments {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Exact free cumulants k_1..k_n.
    Cumulants {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Polynomial recurrence satisfied by the moments (or cumulants).
    Recurrence {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long)]
        cumulants: bool,
    },
    /// Monte Carlo histogram against the symbolic density.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 200)]
        dim: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 80)]
        bins: usize,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = EntryKind::Normal)]
        entries: EntryKind,
        /// Histogram CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum EntryKind {
    Normal,
    Sign,
}

/// Parsed command input.
pub enum Source {
    Expr(Expr),
    Poly(EncodedDistribution),
}

impl Source {
    pub fn read(text: &str) -> Result<Source> {
        let text = match text.strip_prefix('@') {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?,
            None => text.to_string(),
        };
        if text.trim_start().starts_with('{') {
            Ok(Source::Poly(EncodedDistribution::from_json(&PolyJson::parse(&text)?)?))
        } else {
            Ok(Source::Expr(dsl::parse(&text)?))
        }
    }

    /// The distribution in the Stieltjes encoding.
    pub fn mz(&self) -> Result<EncodedDistribution> {
        match self {
            Source::Expr(e) => e.distribution(),
            Source::Poly(d) => d.convert(Kind::Mz),
        }
    }
}

#[derive(Debug)]
pub struct VerifyReport {
    pub comparison: Comparison,
    pub histogram: EmpiricalHistogram,
    pub profile: DensityProfile,
    pub threshold: f64,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.comparison.l1 <= self.threshold
    }
}

/// Samples `trials` realizations of `expr` and compares them with its density.
pub fn verify(expr: &Expr, dim: usize, trials: usize, seed: u64, bins: usize, threshold: f64, opts: Options) -> Result<VerifyReport> {
    let d = expr.distribution()?;
    let (lo, hi) = default_range(&d)?;
    let profile = density_grid(&d, lo, hi, 1000)?;
    let eigs = run_trials(expr, dim, trials, seed, opts)?.concat();
    let atoms: Vec<f64> = profile.atoms.iter().map(|a| a.location).collect();
    let histogram = histogram(&eigs, trials, lo, hi, bins, &atoms)?;
    let comparison = compare(&histogram, &profile)?;
    Ok(VerifyReport { comparison, histogram, profile, threshold })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

fn join(cs: &[crate::Rational]) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Runs one command, writing its output to `out`; returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let text: String;
    let mut code = 0;
    match &cli.command {
        Command::Poly(i) => {
            let d = Source::read(&i.input)?.mz()?;
            if cli.json {
                text = d.to_json().to_string_pretty();
            } else {
                text = format!("{}\n{}", d.to_json().to_string_pretty(), d.poly());
            }
        }
        Command::Encode { input, kind } => {
            let d = Source::read(&input.input)?.mz()?.convert(kind.parse()?)?;
            text = if cli.json { d.to_json().to_string_pretty() } else { format!("{}\n{}", d.to_json().to_string_pretty(), d.poly()) };
        }
        Command::Density { input, zmin, zmax, points, out: path } => {
            let d = Source::read(&input.input)?.mz()?;
            let (lo, hi) = default_range(&d)?;
            let p = density_grid(&d, zmin.unwrap_or(lo), zmax.unwrap_or(hi), *points)?;
            let side = serde_json::to_string_pretty(&p.sidecar()).expect("serializable");
            match path {
                Some(path) => {
                    write_file(path, &p.to_csv())?;
                    let sc = path.with_extension("json");
                    write_file(&sc, &side)?;
                    text = format!("wrote {} and {}", path.display(), sc.display());
                }
                None => text = p.to_csv().trim_end().to_string(),
            }
        }
        Command::Moments { input, n } => {
            let s = moment_series(&Source::read(&input.input)?.mz()?, *n)?;
            text = if cli.json { s.to_json().to_string() } else { join(&s.coefficients) };
        }
        Command::Cumulants { input, n } => {
            let s = cumulant_series(&Source::read(&input.input)?.mz()?, *n)?;
            let ks = &s.coefficients[..*n];
            text = if cli.json { MomentSeries::from_terms(Kind::Rg, ks.to_vec()).to_json().to_string() } else { join(ks) };
        }
        Command::Recurrence { input, max_order, max_degree, cumulants } => {
            let d = Source::read(&input.input)?.mz()?;
            let n = terms_needed(*max_order, *max_degree);
            let s = if *cumulants { cumulant_series(&d, n)? } else { moment_series(&d, n)? };
            let r = fit_recurrence(&s, *max_order, *max_degree)?;
            text = if cli.json { r.to_json().to_string() } else { r.to_string() };
        }
        Command::Verify { input, dim, trials, seed, bins, threshold, entries, out: path } => {
            let expr = match Source::read(&input.input)? {
                Source::Expr(e) => e,
                Source::Poly(_) => return Err(Error::InvalidParameter("verify needs a calculator expression".into())),
            };
            let entries = match entries {
                EntryKind::Normal => Entries::Normal,
                EntryKind::Sign => Entries::Sign,
            };
            let r = verify(&expr, *dim, *trials, *seed, *bins, *threshold, Options { entries })?;
            if let Some(path) = path {
                write_file(path, &r.histogram.to_csv())?;
            }
            let verdict = if r.pass() { "PASS" } else { "FAIL" };
            text = if cli.json {
                serde_json::json!({
                    "expr": expr.to_string(), "dim": dim, "trials": trials, "seed": seed,
                    "l1": r.comparison.l1, "ks": r.comparison.ks, "threshold": threshold, "pass": r.pass(),
                })
                .to_string()
            } else {
                format!("{expr}: N={dim} trials={trials} seed={seed} l1={:.5} ks={:.5} threshold={threshold} {verdict}", r.comparison.l1, r.comparison.ks)
            };
            if !r.pass() {
                code = 2;
            }
        }
    }
    writeln!(out, "{text}").map_err(|e| Error::InvalidParameter(format!("write failed: {e}")))?;
    Ok(code)
}

/// Parses `args` and runs; exit codes are 0 ok, 1 user error, 2 numeric failure.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_user_error() {
                1
            } else {
                2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let code = main_with(std::iter::once("rmcalc").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn moments_command() {
        let (c, o, _) = run(&["moments", "--n", "4", "mulwishart(identity,2)"]);
        assert_eq!(c, 0);
        assert_eq!(o.trim(), "1,1,3,11,45");
    }

    #[test]
    fn poly_command() {
        let (c, o, _) = run(&["poly", "wigner + wishart(1/2)"]);
        assert_eq!(c, 0);
        let want = EncodedDistribution::parse(Kind::Mz, "m^3+(z+2)*m^2+(2*z-1)*m+2").unwrap();
        let json = &o[..o.rfind('}').unwrap() + 1];
        let got = EncodedDistribution::from_json(&PolyJson::parse(json).unwrap()).unwrap();
        assert!(got.equivalent(&want));
        let (c, o2, _) = run(&["--json", "poly", json]);
        assert_eq!(c, 0);
        assert_eq!(o2.trim(), json.trim());
    }

    #[test]
    fn density_command() {
        let (c, o, _) = run(&["density", "--zmin", "-1", "--zmax", "1", "--points", "3", "wigner"]);
        assert_eq!(c, 0);
        let lines: Vec<&str> = o.lines().collect();
        assert_eq!(lines[0], "z,f");
        let f0: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert!((f0 - 1.0 / std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn density_writes_sidecar() {
        let dir = std::env::temp_dir().join(format!("rmcalc-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let csv = dir.join("mp.csv");
        let (c, _, _) = run(&["density", "--points", "200", "--out", csv.to_str().unwrap(), "wishart(2)"]);
        assert_eq!(c, 0);
        let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("mp.json")).unwrap()).unwrap();
        assert!((side["atoms"][0]["weight"].as_f64().unwrap() - 0.5).abs() < 1e-3);
        assert!(std::fs::read_to_string(&csv).unwrap().starts_with("z,f\n"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn other_commands() {
        let (_, o, _) = run(&["cumulants", "--n", "3", "wishart(2)"]);
        assert_eq!(o.trim(), "1,2,4");
        let (_, o, _) = run(&["recurrence", "--max-order", "2", "--max-degree", "1", "wishart(2)"]);
        assert_eq!(o.trim(), "(n)*a(n) + (-6*n-9)*a(n+1) + (n+3)*a(n+2) = 0");
        let (c, o, _) = run(&["encode", "--kind", "rg", "wigner"]);
        assert_eq!(c, 0);
        assert!(o.contains("\"kind\": \"rg\""));
        let (c, o, _) = run(&["verify", "--dim", "20", "--trials", "5", "atomic(1@1)"]);
        assert_eq!(c, 0, "{o}");
        assert!(o.contains("PASS"));
    }

    #[test]
    fn exit_codes() {
        let (c, _, e) = run(&["poly", "wigner +"]);
        assert_eq!(c, 1);
        assert!(e.contains("1:9"), "{e}");
        assert_eq!(run(&["moments", "--n", "x", "wigner"]).0, 1);
        assert_eq!(run(&["encode", "--kind", "xx", "wigner"]).0, 1);
        assert_eq!(run(&["--help"]).0, 0);
        let (c, _, _) = run(&["moments", "--n", "3", "shift(wigner, 1)"]);
        assert_eq!(c, 0);
    }
}
