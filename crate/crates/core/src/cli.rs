//! Command-line front end. All input and output is JSON.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 non-generic or
//! non-integral input, 3 verification failure, 4 internal inconsistency.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::complement::{pn_fan, pn_rays, ComplementMap};
use crate::error::{Error, ErrorClass, Result};
use crate::exact::{ratio, Rational};
use crate::geometry::{Cone, Polytope};
use crate::interpolator::{mu, mu_cross_checked, mu_table, MuValue};
use crate::io::{
    count_json, mu_row, mu_table_json, parse_input, parse_map, parse_mu_table, parse_polytope,
    report_json, to_pretty, Input, MuRowJson, ReportJson,
};
use crate::series::{compose_linear, t2_series, t_series, todd_univariate, LinearForm, TermJson};
use crate::valuations::{
    count_from_table, edge_directions, verify_interpolator, verify_with_table, Direction,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_GENERIC: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Seed used when none is given, so repeated runs agree.
pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Parser)]
#[command(
    name = "sumint",
    version,
    about = "Local Euler-Maclaurin coefficients of cones and polytopes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Complement map JSON; defaults to the standard inner product.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Truncation degree of the coefficient series.
    #[arg(long, default_value_t = 6)]
    pub degree: u32,
    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// mu of a cone, or of every normal cone of a polytope.
    Mu {
        /// Cone `{"generators": ...}` or polytope `{"vertices": ...}` JSON.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Compute basic cones by both pipelines and fail on disagreement.
        #[arg(long)]
        cross_check: bool,
    },
    /// Lattice point count by the local formula and by enumeration.
    Count {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact check of the sum-integral identity along a sampled direction.
    Verify {
        /// A polytope JSON file.
        #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
        input: Option<PathBuf>,
        /// A directory of polytope JSON files.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        /// Comparison order in t (default degree - dim P, at most degree).
        #[arg(long)]
        order: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Use this mu table instead of computing one (single input only).
        #[arg(long, conflicts_with = "corpus")]
        mu_table: Option<PathBuf>,
    },
    /// Coefficients of td(z) = z / (1 - e^{-z}) and T(z) = (td(z) - 1) / z.
    Todd {
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// mu of every cone of the fan of projective space under the
    /// Diaconis-Fulton map.
    PnDemo {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        n: u32,
        #[arg(long, default_value_t = 6)]
        degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Usage => EXIT_USAGE,
        ErrorClass::NotGeneric => EXIT_NOT_GENERIC,
        ErrorClass::Internal => EXIT_INTERNAL,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_map(path: Option<&Path>, ambient: usize) -> Result<ComplementMap> {
    let map = match path {
        Some(p) => parse_map(&read(p)?)?,
        None => ComplementMap::standard_inner_product(ambient),
    };
    if map.ambient() != ambient {
        return Err(Error::DimensionMismatch(format!(
            "map on dimension {} for input of dimension {ambient}",
            map.ambient()
        )));
    }
    Ok(map)
}

/// Runs a parsed command line, printing errors to stderr, and returns the
/// process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Mu {
            input,
            common,
            cross_check,
        } => cmd_mu(&input, &common, cross_check),
        Command::Count { input, common } => cmd_count(&input, &common),
        Command::Verify {
            input,
            corpus,
            common,
            order,
            seed,
            mu_table,
        } => cmd_verify(
            input.as_deref(),
            corpus.as_deref(),
            &common,
            order,
            seed,
            mu_table.as_deref(),
        ),
        Command::Todd { order, out } => cmd_todd(order, out.as_deref()),
        Command::PnDemo { n, degree, out } => cmd_pn_demo(n as usize, degree, out.as_deref()),
    }
}

#[derive(Serialize)]
struct ConeMuJson {
    map: String,
    degree: u32,
    #[serde(flatten)]
    row: MuRowJson,
}

#[derive(Serialize)]
struct TableJson {
    map: String,
    degree: u32,
    faces: Vec<MuRowJson>,
}

fn cmd_mu(input: &Path, common: &Common, cross_check: bool) -> Result<i32> {
    let parsed = parse_input(&read(input)?)?;
    let map = load_map(common.map.as_deref(), parsed.ambient())?;
    let text = match parsed {
        Input::Cone(c) => {
            let value = if cross_check && (c.is_basic() || c.is_zero()) {
                mu_cross_checked(&map, &c, common.degree)?
            } else {
                mu(&map, &c, common.degree)?
            };
            to_pretty(&ConeMuJson {
                map: map.id(),
                degree: common.degree,
                row: mu_row(None, &value),
            })
        }
        Input::Polytope(p) => {
            let table = mu_table(&p, &map, common.degree, cross_check)?;
            to_pretty(&TableJson {
                map: map.id(),
                degree: common.degree,
                faces: mu_table_json(&table),
            })
        }
    };
    emit(common.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_count(input: &Path, common: &Common) -> Result<i32> {
    let p = parse_polytope(&read(input)?)?;
    let map = load_map(common.map.as_deref(), p.ambient())?;
    let table = mu_table(&p, &map, 0, false)?;
    let local = count_from_table(&p, &table)?;
    let brute = p.lattice_points()?.len();
    let out = count_json(&local, brute, &map.id());
    emit(common.out.as_deref(), &to_pretty(&out))?;
    Ok(if out.matches {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn verify_one(
    p: &Polytope,
    map: &ComplementMap,
    common: &Common,
    order: Option<i64>,
    seed: u64,
    table_path: Option<&Path>,
    id: &str,
) -> Result<ReportJson> {
    let dir = Direction::sample(p.ambient(), seed, &edge_directions(p))?;
    let report = match table_path {
        Some(tp) => {
            let table = parse_mu_table(&read(tp)?, p, common.degree, &map.id())?;
            verify_with_table(p, &table, &dir, order, id)?
        }
        None => verify_interpolator(p, map, &dir, common.degree, order, id)?,
    };
    Ok(report_json(&report))
}

#[derive(Serialize)]
struct CorpusJson {
    passed: usize,
    total: usize,
    reports: Vec<ReportJson>,
}

fn cmd_verify(
    input: Option<&Path>,
    corpus: Option<&Path>,
    common: &Common,
    order: Option<i64>,
    seed: u64,
    table_path: Option<&Path>,
) -> Result<i32> {
    if let Some(dir) = corpus {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let reports = files
            .par_iter()
            .map(|f| {
                let p = parse_polytope(&read(f)?)?;
                let map = load_map(common.map.as_deref(), p.ambient())?;
                let id = f
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                verify_one(&p, &map, common, order, seed, None, &id)
            })
            .collect::<Result<Vec<_>>>()?;
        let passed = reports.iter().filter(|r| r.pass).count();
        let out = CorpusJson {
            passed,
            total: reports.len(),
            reports,
        };
        emit(common.out.as_deref(), &to_pretty(&out))?;
        return Ok(if passed == out.total {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        });
    }
    let path = input.ok_or_else(|| Error::Parse("--input or --corpus is required".into()))?;
    let p = parse_polytope(&read(path)?)?;
    let map = load_map(common.map.as_deref(), p.ambient())?;
    let id = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = verify_one(&p, &map, common, order, seed, table_path, &id)?;
    emit(common.out.as_deref(), &to_pretty(&report))?;
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// Coefficients of `td` and `T` as rational strings.
#[derive(Clone, Debug, Serialize)]
pub struct ToddJson {
    pub todd: Vec<String>,
    pub t: Vec<String>,
}

pub fn todd_report(order: usize) -> ToddJson {
    let s = |v: Vec<Rational>| v.iter().map(|c| c.to_string()).collect();
    ToddJson {
        todd: s(todd_univariate(order)),
        t: s(t_series(order)),
    }
}

fn cmd_todd(order: usize, out: Option<&Path>) -> Result<i32> {
    emit(out, &to_pretty(&todd_report(order)))?;
    Ok(EXIT_OK)
}

/// Classification of a cone of the fan of `P^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PnKind {
    Ray,
    Consecutive,
    NonConsecutive,
    Higher,
}

#[derive(Clone, Debug, Serialize)]
pub struct PnCone {
    pub rays: Vec<usize>,
    pub kind: PnKind,
    pub mu0: String,
    pub mu_series: Vec<TermJson>,
    /// Whether the expected constant (and series, for consecutive pairs)
    /// was matched; `None` when there is no expectation.
    pub check: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PnReport {
    pub n: usize,
    pub degree: u32,
    pub pass: bool,
    pub cones: Vec<PnCone>,
}

/// Whether rays `i` and `j` are cyclically adjacent among `0..=n`.
pub fn pn_consecutive(i: usize, j: usize, n: usize) -> bool {
    (i + 1) % (n + 1) == j || (j + 1) % (n + 1) == i
}

/// `mu` for every nonzero cone of the fan of `P^n` under the
/// Diaconis-Fulton map, with the expected constants `1/2` (rays), `1/3`
/// (consecutive pairs) and `1/4` (other pairs), and for a consecutive
/// pair `(w_i, w_{i+1})` the series `T2(u_i, u_{i+1}) + T(u_i + u_{i+1}) T(u_{i+1})`.
pub fn pn_demo(n: usize, degree: u32) -> Result<PnReport> {
    let map = ComplementMap::diaconis_fulton(n);
    let rays = pn_rays(n);
    let u = |i: usize| -> LinearForm {
        let ComplementMap::RayTable { entries } = &map else {
            unreachable!()
        };
        LinearForm::new(entries[&rays[i]].clone())
    };
    let cones: Vec<Vec<usize>> = pn_fan(n).into_iter().filter(|s| !s.is_empty()).collect();
    let results: Vec<(Vec<usize>, MuValue)> = cones
        .par_iter()
        .map(|s| {
            // order a consecutive pair as (w_i, w_{i+1})
            let mut s = s.clone();
            if s.len() == 2 && (s[1] + 1) % (n + 1) == s[0] {
                s.swap(0, 1);
            }
            let cone = Cone::new(s.iter().map(|&i| rays[i].clone()).collect(), n)?;
            Ok((s, mu(&map, &cone, degree)?))
        })
        .collect::<Result<_>>()?;
    let t = t_series(degree as usize);
    let t2 = t2_series(degree);
    let mut out = Vec::new();
    for (s, value) in results {
        let kind = match s.len() {
            1 => PnKind::Ray,
            2 if pn_consecutive(s[0], s[1], n) => PnKind::Consecutive,
            2 => PnKind::NonConsecutive,
            _ => PnKind::Higher,
        };
        let mu0 = value.mu0();
        let check = match kind {
            PnKind::Ray => Some(mu0 == ratio(1, 2)),
            PnKind::NonConsecutive => Some(mu0 == ratio(1, 4)),
            PnKind::Consecutive => {
                let (ui, uj) = (u(s[0]), u(s[1]));
                let want = t2.compose(&[ui.clone(), uj.clone()], degree).add(
                    &compose_linear(&t, &ui.add(&uj), degree).mul(&compose_linear(&t, &uj, degree)),
                );
                Some(mu0 == ratio(1, 3) && value.series == want)
            }
            PnKind::Higher => None,
        };
        out.push(PnCone {
            rays: s,
            kind,
            mu0: mu0.to_string(),
            mu_series: value.series.to_json_terms(),
            check,
        });
    }
    let pass = out.iter().all(|c| c.check != Some(false));
    Ok(PnReport {
        n,
        degree,
        pass,
        cones: out,
    })
}

fn cmd_pn_demo(n: usize, degree: u32, out: Option<&Path>) -> Result<i32> {
    let report = pn_demo(n, degree)?;
    emit(out, &to_pretty(&report))?;
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_USAGE);
        assert_eq!(
            exit_code(&Error::NotGeneric { locus: "x".into() }),
            EXIT_NOT_GENERIC
        );
        assert_eq!(exit_code(&Error::NotIntegral("x".into())), EXIT_NOT_GENERIC);
        assert_eq!(
            exit_code(&Error::PipelineMismatch("x".into())),
            EXIT_INTERNAL
        );
    }

    #[test]
    fn pn_demo_small() {
        let r = pn_demo(2, 3).unwrap();
        assert!(r.pass);
        assert_eq!(r.cones.len(), 6);
        assert!(r
            .cones
            .iter()
            .filter(|c| c.kind == PnKind::Consecutive)
            .all(|c| c.mu0 == "1/3"));
    }

    #[test]
    fn consecutive_is_cyclic() {
        assert!(pn_consecutive(3, 0, 3));
        assert!(pn_consecutive(0, 1, 3));
        assert!(!pn_consecutive(0, 2, 3));
    }
}
