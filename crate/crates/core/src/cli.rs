//! Command-line front end.
//!
//! Exit codes: 0 when a dependency holds, a statement is derivable or a
//! decomposition is lossless; 1 when it does not; 2 on any error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::decomposition::{lossless_check, render_rows, JoinConfig};
use crate::dependency::{
    check_ffd, check_fmvd_with_threshold, CheckReport, DependencyKind, DependencyStatement,
};
use crate::inference::{
    closure_contains, dependency_basis, parse_dependency_set, DependencySet, RenderedStep,
};
use crate::interval::{intersect, to_interval, AttributeDomain, FuzzyValue, Interval};
use crate::proximity::{
    endpoint_distance, sp_extended_breakdown, sp_improved, sp_liu_breakdown, Form, Measure,
    OverlapBreakdown, ProximityConfig,
};
use crate::relation::{parse_relation, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "fuzzdep",
    version,
    about = "Check fuzzy dependencies over interval-valued relations"
)]
pub struct Cli {
    /// Cut degree for the extended measure.
    #[arg(long, global = true, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, global = true, default_value = "extended", value_parser = parse_measure)]
    measure: Measure,
    /// Defaults to two-term for liu and ratio otherwise.
    #[arg(long, global = true, value_parser = parse_form)]
    form: Option<Form>,
    /// FMVD pairs with left-hand proximity at or below this are vacuous.
    #[arg(long = "beta-min", global = true, default_value_t = 0.0)]
    beta_min: f64,
    #[arg(
        long,
        global = true,
        value_enum,
        env = "FUZZDEP_OUTPUT",
        default_value = "text"
    )]
    output: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse()
}

fn parse_form(s: &str) -> Result<Form, String> {
    s.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Ffd,
    Fmvd,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Proximity of two cells, with intermediate quantities.
    Sp {
        value1: String,
        value2: String,
        #[arg(long, default_value_t = 0.0)]
        lower: f64,
        #[arg(long, default_value_t = 100.0)]
        upper: f64,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Check an FFD or FMVD against a relation file.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        file: PathBuf,
        /// Comma-separated attribute names.
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Decide whether a statement follows from a dependency file.
    Closure {
        deps: PathBuf,
        /// e.g. "A,B ->> C" or "A -> B".
        #[arg(long)]
        query: String,
        #[arg(long = "max-depth", default_value_t = 4)]
        max_depth: usize,
    },
    /// Dependency basis of an attribute set.
    Basis {
        deps: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Check whether a relation splits losslessly into XY and XZ.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        on: String,
        #[arg(long)]
        split: String,
        #[arg(long = "beta-join", default_value_t = 1.0)]
        beta_join: f64,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match execute(&cli) {
        Ok((stdout, code)) => Output {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(e) => Output {
            stdout: String::new(),
            stderr: format!("error: {e:#}\n"),
            code: 2,
        },
    }
}

fn proximity_config(cli: &Cli) -> Result<ProximityConfig> {
    if !(0.0..1.0).contains(&cli.beta_min) {
        bail!("--beta-min must lie in [0, 1), got {}", cli.beta_min);
    }
    let mut cfg = ProximityConfig::new(cli.measure).with_alpha(cli.alpha)?;
    if let Some(form) = cli.form {
        cfg = cfg.with_form(form);
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(String, u8)> {
    let cfg = proximity_config(cli)?;
    let json = cli.output == OutputFormat::Json;
    match &cli.command {
        Command::Sp {
            value1,
            value2,
            lower,
            upper,
            theta,
            epsilon,
        } => {
            let mut domain = AttributeDomain::new(*lower, *upper)?;
            if let Some(theta) = theta {
                domain = domain.with_theta(*theta)?;
            }
            if let Some(epsilon) = epsilon {
                domain = domain.with_epsilon(*epsilon)?;
            }
            let v1: FuzzyValue = value1.parse().context("first value")?;
            let v2: FuzzyValue = value2.parse().context("second value")?;
            for v in [&v1, &v2] {
                if !domain.admits(v) {
                    bail!("value {v} lies outside the domain [{lower},{upper}]");
                }
            }
            let report = sp_report(&v1, &v2, &domain, &cfg)?;
            let text = if json {
                to_json(&report)
            } else {
                report.text()
            };
            Ok((text, 0))
        }
        Command::Check {
            kind,
            file,
            lhs,
            rhs,
        } => {
            let r = read_relation(file)?;
            let kind = match kind {
                CheckKind::Ffd => DependencyKind::Ffd,
                CheckKind::Fmvd => DependencyKind::Fmvd,
            };
            let d = DependencyStatement::from_names(
                r.schema(),
                kind,
                &split_names(lhs),
                &split_names(rhs),
            )?;
            let report = match kind {
                DependencyKind::Ffd => check_ffd(&r, &d, &cfg)?,
                DependencyKind::Fmvd => check_fmvd_with_threshold(&r, &d, &cfg, cli.beta_min)?,
            };
            let code = if report.holds { 0 } else { 1 };
            let text = if json {
                to_json(&report)
            } else {
                check_text(&r, &d, &report)
            };
            Ok((text, code))
        }
        Command::Closure {
            deps,
            query,
            max_depth,
        } => {
            let ds = read_deps(deps)?;
            let q = ds.universe().parse_statement(query)?;
            let m = closure_contains(&ds, &q, *max_depth)?;
            let report = ClosureReport {
                query: q.display(ds.universe()).to_string(),
                derivable: m.derivable,
                trace: m
                    .trace
                    .map(|steps| steps.iter().map(|s| s.render(ds.universe())).collect()),
            };
            let text = if json {
                to_json(&report)
            } else {
                report.text()
            };
            Ok((text, if m.derivable { 0 } else { 1 }))
        }
        Command::Basis { deps, set } => {
            let ds = read_deps(deps)?;
            let x = ds.universe().mask(&split_names(set))?;
            if x.is_empty() {
                bail!("--set must name at least one attribute");
            }
            let mut blocks: Vec<Vec<String>> = dependency_basis(&ds, x)?
                .into_iter()
                .map(|b| {
                    ds.universe()
                        .names_of(b)
                        .into_iter()
                        .map(String::from)
                        .collect()
                })
                .collect();
            blocks.sort();
            let report = BasisReport {
                set: ds.universe().render(x),
                blocks,
            };
            let text = if json {
                to_json(&report)
            } else {
                report.text()
            };
            Ok((text, 0))
        }
        Command::Decompose {
            file,
            on,
            split,
            beta_join,
        } => {
            let r = read_relation(file)?;
            let x = r.schema().resolve(&split_names(on))?;
            let y = r.schema().resolve(&split_names(split))?;
            if x.is_empty() {
                bail!("--on must name at least one attribute");
            }
            let jc = JoinConfig::new(cfg, *beta_join)?;
            let report = lossless_check(&r, &x, &y, &jc)?;
            let code = if report.lossless { 0 } else { 1 };
            let text = if json {
                to_json(&report)
            } else {
                let mut s = format!(
                    "{}\njoined tuples: {}\n",
                    if report.lossless { "lossless" } else { "lossy" },
                    report.joined_count
                );
                for row in render_rows(&report.extra) {
                    let _ = writeln!(s, "extra: {row}");
                }
                for row in render_rows(&report.missing) {
                    let _ = writeln!(s, "missing: {row}");
                }
                s
            };
            Ok((text, code))
        }
    }
}

fn split_names(list: &str) -> Vec<&str> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_relation(path: &Path) -> Result<Relation> {
    parse_relation(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_deps(path: &Path) -> Result<DependencySet> {
    parse_dependency_set(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Four decimals with trailing zeros removed.
fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn opt_interval(i: &Option<Interval>) -> String {
    i.map_or_else(|| "empty".to_string(), |i| i.to_string())
}

#[derive(Debug, Serialize)]
struct SpReport {
    measure: Measure,
    #[serde(skip_serializing_if = "Option::is_none")]
    form: Option<Form>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    overlap: Option<OverlapBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    endpoints: Option<EndpointBreakdown>,
}

#[derive(Debug, Serialize)]
struct EndpointBreakdown {
    left: Interval,
    right: Interval,
    disjoint: bool,
    lower_distance: f64,
    upper_distance: f64,
}

fn sp_report(
    v1: &FuzzyValue,
    v2: &FuzzyValue,
    domain: &AttributeDomain,
    cfg: &ProximityConfig,
) -> Result<SpReport> {
    let mut report = SpReport {
        measure: cfg.measure,
        form: None,
        alpha: None,
        value: 0.0,
        overlap: None,
        endpoints: None,
    };
    match cfg.measure {
        Measure::Liu => {
            let b = sp_liu_breakdown(
                &to_interval(v1, domain)?,
                &to_interval(v2, domain)?,
                domain,
                cfg.form,
                cfg.clamp,
            );
            report.form = Some(cfg.form);
            report.value = b.value;
            report.overlap = Some(b);
        }
        Measure::Extended => {
            let b = sp_extended_breakdown(v1, v2, cfg.alpha, domain, cfg.form, cfg.clamp)?;
            report.form = Some(cfg.form);
            report.alpha = Some(cfg.alpha);
            report.value = b.value;
            report.overlap = Some(b);
        }
        Measure::Improved => {
            let (left, right) = (to_interval(v1, domain)?, to_interval(v2, domain)?);
            report.value = sp_improved(&left, &right)?;
            report.endpoints = Some(EndpointBreakdown {
                left,
                right,
                disjoint: intersect(&left, &right).is_none(),
                lower_distance: endpoint_distance(left.lower(), right.lower())?,
                upper_distance: endpoint_distance(left.upper(), right.upper())?,
            });
        }
    }
    Ok(report)
}

impl SpReport {
    fn text(&self) -> String {
        let mut s = format!("{}\n", num(self.value));
        let _ = write!(s, "measure: {}", self.measure);
        if let Some(form) = self.form {
            let _ = write!(s, " ({form})");
        }
        if let Some(alpha) = self.alpha {
            let _ = write!(s, ", alpha {}", num(alpha));
        }
        s.push('\n');
        if let Some(b) = &self.overlap {
            let _ = writeln!(
                s,
                "operands: {} {}",
                opt_interval(&b.left),
                opt_interval(&b.right)
            );
            let _ = writeln!(
                s,
                "intersection: {} (size {})",
                opt_interval(&b.intersection),
                num(b.intersection_size)
            );
            let _ = writeln!(
                s,
                "hull: {} (size {})",
                opt_interval(&b.hull),
                num(b.hull_size)
            );
        }
        if let Some(e) = &self.endpoints {
            let _ = writeln!(s, "operands: {} {}", e.left, e.right);
            if e.disjoint {
                s.push_str("disjoint\n");
            }
            let _ = writeln!(s, "lower distance: {}", num(e.lower_distance));
            let _ = writeln!(s, "upper distance: {}", num(e.upper_distance));
        }
        s
    }
}

fn check_text(r: &Relation, d: &DependencyStatement, report: &CheckReport) -> String {
    let names = |set| r.schema().names_of(set).join(",");
    let mut s = format!(
        "{} {} {} {}: {}\n",
        d.kind,
        names(&d.lhs),
        d.kind.arrow(),
        names(&d.rhs),
        if report.holds { "holds" } else { "violated" }
    );
    if d.kind == DependencyKind::Fmvd {
        let _ = writeln!(s, "vacuous pairs: {}", report.vacuous_pairs);
    }
    for v in &report.violations {
        let _ = write!(s, "pair ({}, {}): beta {}", v.pair.0, v.pair.1, num(v.beta));
        if let Some(rhs) = v.rhs_proximity {
            let _ = write!(s, ", rhs proximity {}", num(rhs));
        }
        if let Some(w) = &v.best_witness {
            let _ = write!(
                s,
                ", best witness tuple {} fails {} with {}",
                w.tuple,
                w.failing_condition,
                num(w.achieved)
            );
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Serialize)]
struct ClosureReport {
    query: String,
    derivable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<RenderedStep>>,
}

impl ClosureReport {
    fn text(&self) -> String {
        let mut s = format!(
            "{}: {}\n",
            self.query,
            if self.derivable {
                "derivable"
            } else {
                "not derivable"
            }
        );
        for (i, step) in self.trace.iter().flatten().enumerate() {
            let rule = serde_json::to_value(step.rule).expect("rule serializes");
            let rule = rule.as_str().unwrap_or_default().replace('_', "-");
            if step.premises.is_empty() {
                let _ = writeln!(s, "{:>3}. {} [{rule}]", i + 1, step.conclusion);
            } else {
                let _ = writeln!(
                    s,
                    "{:>3}. {} [{rule} from {}]",
                    i + 1,
                    step.conclusion,
                    step.premises.join("; ")
                );
            }
        }
        s
    }
}

#[derive(Debug, Serialize)]
struct BasisReport {
    set: String,
    blocks: Vec<Vec<String>>,
}

impl BasisReport {
    fn text(&self) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", b.join(",")))
            .collect();
        format!("{}\n", blocks.join(" | "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Output {
        run(std::iter::once("fuzzdep").chain(args.iter().copied()))
    }

    #[test]
    fn sp_examples() {
        let out = run_args(&["sp", "[1,9]", "[1,8]", "--measure", "improved"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.starts_with("0.8889\n"), "{}", out.stdout);
        assert!(run_args(&["sp", "3.6", "3.6", "--measure", "improved"])
            .stdout
            .starts_with("1\n"));
        for m in ["liu", "improved", "extended"] {
            let out = run_args(&["sp", "[1,2]", "[5,6]", "--measure", m]);
            assert!(out.stdout.starts_with("0\n"), "{m}: {}", out.stdout);
        }
    }

    #[test]
    fn bad_input_exits_2() {
        assert_eq!(run_args(&["sp", "[9,1]", "1"]).code, 2);
        assert_eq!(run_args(&["sp", "1", "1", "--alpha", "2"]).code, 2);
        assert_eq!(run_args(&["sp", "1", "1", "--measure", "cosine"]).code, 2);
        assert_eq!(
            run_args(&[
                "check",
                "fmvd",
                "/nonexistent.json",
                "--lhs",
                "X",
                "--rhs",
                "Y"
            ])
            .code,
            2
        );
        assert_eq!(run_args(&[]).code, 2);
    }

    #[test]
    fn help_exits_0() {
        let out = run_args(&["--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("closure"));
    }

    #[test]
    fn num_formatting() {
        assert_eq!(num(0.888_888), "0.8889");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.000_01), "0");
        assert_eq!(num(0.5), "0.5");
    }
}
