//! Command-line front end.
//!
//! Exit codes: 0 for an affirmative answer, 1 for a negative one, 2 for a
//! usage or validation error (reported on one line).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::constructions::{channel_from_metric, interior_grid, interpolation_scan, z_metric, CScale, ZParams};
use crate::error::{Error, Result};
use crate::io::{read_channel, read_distance, render_channel, render_distance, render_reverse, write_text};
use crate::matching::{check_matched, cross_validate_codes, default_max_chain_len, detect_decision_chain, Verdict};
use crate::model::{make_bac, make_bsc, make_z_channel};
use crate::rational::{parse_rational, rat, Rational};
use crate::solver::{bac_scan, find_matched_metric, order_matrix, verify_certificate, Certificate, Solution};

#[derive(Debug, Parser)]
#[command(
    name = "matched",
    version,
    about = "Matched channel/metric pairs over exact rationals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Bsc,
    Z,
    Bac,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the n-fold BSC, Z-channel or BAC.
    Gen {
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational_arg)]
        p: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        q: Option<Rational>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Decide whether a channel and a distance are matched.
    Check {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        /// Also compare ML and NN decoding on every code of size 2..=CODES.
        #[arg(long)]
        codes: Option<usize>,
    },
    /// Search for a decision chain.
    Obstruct {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Find a matched metric or a certificate that none exists.
    Solve {
        #[arg(long)]
        channel: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Print the per-row descending rank matrix.
    Order {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Write the recursive Z-channel metric.
    ZMetric {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        params: ZArgs,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Write the reverse kernel built from a metric.
    FromMetric {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Rational,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Interpolate between the Z-channel metric and Hamming and test against BACs.
    Interpolate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        params: ZArgs,
        /// `p,q;p,q;...`
        #[arg(long, value_parser = grid_arg)]
        bac: Option<Grid>,
    },
    /// Run the solver over a grid of BAC parameters.
    ScanBac {
        #[arg(long)]
        n: usize,
        /// `p,q;p,q;...`
        #[arg(long, value_parser = grid_arg)]
        grid: Grid,
    },
    /// Re-check a certificate against a channel.
    VerifyCert {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ZArgs {
    #[arg(long, value_parser = rational_arg)]
    alpha: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    beta: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    gamma: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    delta: Option<Rational>,
    /// `auto` or a positive rational.
    #[arg(long, value_parser = c_scale_arg)]
    c_scale: Option<CScale>,
}

impl ZArgs {
    fn params(&self) -> Result<ZParams> {
        let mut p = ZParams::default();
        if let Some(a) = &self.alpha {
            p.alpha = a.clone();
        }
        if let Some(b) = &self.beta {
            p.beta = b.clone();
        }
        if let Some(g) = &self.gamma {
            p.gamma = g.clone();
        }
        if let Some(d) = &self.delta {
            p.squeeze_delta = d.clone();
        }
        if let Some(c) = &self.c_scale {
            p.c_scale = c.clone();
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid(pub Vec<(Rational, Rational)>);

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn c_scale_arg(s: &str) -> std::result::Result<CScale, String> {
    if s == "auto" {
        Ok(CScale::Auto)
    } else {
        rational_arg(s).map(CScale::Explicit)
    }
}

pub fn parse_grid(s: &str) -> Result<Grid> {
    s.split(';')
        .filter(|cell| !cell.trim().is_empty())
        .map(|cell| {
            let (p, q) = cell
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("grid cell `{cell}` is not `p,q`")))?;
            Ok((parse_rational(p.trim())?, parse_rational(q.trim())?))
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|cells| {
            if cells.is_empty() {
                Err(Error::Parse("grid is empty".into()))
            } else {
                Ok(Grid(cells))
            }
        })
}

fn grid_arg(s: &str) -> std::result::Result<Grid, String> {
    parse_grid(s).map_err(|e| e.to_string())
}

fn default_bac_samples() -> Vec<(Rational, Rational)> {
    vec![(rat(1, 10), rat(2, 10)), (rat(1, 10), rat(4, 10))]
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let rendered = e.to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let _ = writeln!(err, "{line}");
            return 2;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn write_or_emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => emit(out, text),
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen {
            family,
            n,
            p,
            q,
            output,
        } => {
            let need = |v: &Option<Rational>, flag: &str| {
                v.clone()
                    .ok_or_else(|| Error::OutOfRange(format!("--{flag} is required for this family")))
            };
            let w = match family {
                Family::Bsc => make_bsc(*n, &need(p, "p")?)?,
                Family::Z => make_z_channel(*n, &need(q, "q")?)?,
                Family::Bac => make_bac(*n, &need(p, "p")?, &need(q, "q")?)?,
            };
            write_text(output, &render_channel(&w))?;
            Ok(0)
        }
        Command::Check { channel, metric, codes } => {
            if let Some(c) = codes {
                if *c < 2 {
                    return Err(Error::OutOfRange(format!("--codes must be at least 2, got {c}")));
                }
            }
            let w = read_channel(channel)?;
            let d = read_distance(metric)?;
            let verdict = check_matched(&w, &d)?;
            let mut ok = verdict.is_matched();
            match &verdict {
                Verdict::Matched => emit(out, "matched\n")?,
                Verdict::Violated(v) => emit(out, &format!("violation {v}\n"))?,
            }
            if let Some(c) = codes {
                let agreement = cross_validate_codes(&w, &d, *c)?;
                match &agreement.disagreement {
                    None => emit(out, &format!("codes agree ({} checked)\n", agreement.codes_checked))?,
                    Some(dis) => {
                        ok = false;
                        emit(
                            out,
                            &format!(
                                "codes disagree: code {:?} received {} ml {:?} nn {:?}\n",
                                dis.code, dis.received, dis.ml, dis.nn
                            ),
                        )?
                    }
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Obstruct { channel, max_len } => {
            let w = read_channel(channel)?;
            let len = max_len.unwrap_or_else(|| default_max_chain_len(w.size()));
            match detect_decision_chain(&w, len)? {
                Some(chain) => {
                    emit(out, &format!("{chain}\n"))?;
                    Ok(0)
                }
                None => {
                    emit(out, &format!("no decision chain of length 3..={len}\n"))?;
                    Ok(1)
                }
            }
        }
        Command::Solve { channel, output, cert } => {
            let w = read_channel(channel)?;
            match find_matched_metric(&w)? {
                Solution::Found(d) => {
                    write_or_emit(output.as_deref(), &render_distance(&d), out)?;
                    Ok(0)
                }
                Solution::Refuted(c) => {
                    write_or_emit(cert.as_deref(), &c.to_string(), out)?;
                    Ok(1)
                }
            }
        }
        Command::Order { channel } => {
            let w = read_channel(channel)?;
            emit(out, &order_matrix(&w).to_string())?;
            Ok(0)
        }
        Command::ZMetric { n, params, output } => {
            let d = z_metric(*n, &params.params()?)?;
            write_text(output, &render_distance(&d))?;
            Ok(0)
        }
        Command::FromMetric {
            metric,
            epsilon,
            output,
        } => {
            let d = read_distance(metric)?;
            let k = channel_from_metric(&d, epsilon)?;
            write_text(output, &render_reverse(&k))?;
            Ok(0)
        }
        Command::Interpolate { n, steps, params, bac } => {
            if *steps < 2 {
                return Err(Error::OutOfRange(format!("--steps must be at least 2, got {steps}")));
            }
            let samples = bac.as_ref().map(|g| g.0.clone()).unwrap_or_else(default_bac_samples);
            let report = interpolation_scan(*n, &interior_grid(*steps), &params.params()?, &samples)?;
            emit(out, &report.to_string())?;
            Ok(if report.all_matched() { 0 } else { 1 })
        }
        Command::ScanBac { n, grid } => {
            let report = bac_scan(*n, &grid.0)?;
            emit(out, &report.to_string())?;
            Ok(if report.all_feasible() { 0 } else { 1 })
        }
        Command::VerifyCert { channel, cert } => {
            let w = read_channel(channel)?;
            let text = std::fs::read_to_string(cert).map_err(|e| Error::Parse(format!("{}: {e}", cert.display())))?;
            let c = Certificate::parse(&text).map_err(|e| Error::Parse(format!("{}: {e}", cert.display())))?;
            if verify_certificate(&w, &c) {
                emit(out, "certificate valid\n")?;
                Ok(0)
            } else {
                emit(out, "certificate invalid\n")?;
                Ok(1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("matched").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(
            parse_grid("1/10,1/5;1/8, 3/8").unwrap().0,
            vec![(rat(1, 10), rat(1, 5)), (rat(1, 8), rat(3, 8))]
        );
        assert!(parse_grid("1/10").is_err());
        assert!(parse_grid("0.1,0.2").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = call(&["gen", "bsc", "--n", "2", "--p", "0.1", "-o", "x"]);
        assert_eq!(code, 2);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["scan-bac", "--n", "2", "--grid", "1/10;2/10"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("scan-bac"));
    }

    #[test]
    fn scan_reports() {
        let (code, out, _) = call(&["scan-bac", "--n", "2", "--grid", "1/10,2/10"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n=2 p=1/10 q=1/5 verdict=metric rule_class=0\n");
    }

    #[test]
    fn invalid_params_exit_two() {
        let (code, _, err) = call(&["interpolate", "--n", "2", "--steps", "4", "--alpha", "3/2"]);
        assert_eq!(code, 2);
        assert!(err.contains("alpha"), "{err}");
    }
}
