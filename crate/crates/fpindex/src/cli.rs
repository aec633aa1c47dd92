use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use fpindex_core::carrier::VertexRule;

use crate::commands::{self, AxiomChoice, IndexOptions, Report};
use crate::error::CliError;
use crate::input::Bundle;

#[derive(Debug, Parser)]
#[command(
    name = "fpindex",
    version,
    about = "Fixed point index of acyclic carriers on finite polyhedra"
)]
pub struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Fill unlisted simplices of table carriers from their faces.
    #[arg(long, global = true)]
    pub monotone_complete: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxiomArg {
    Add,
    Hom,
    Comm,
    Norm,
}

impl From<AxiomArg> for AxiomChoice {
    fn from(a: AxiomArg) -> Self {
        match a {
            AxiomArg::Add => AxiomChoice::Additivity,
            AxiomArg::Hom => AxiomChoice::Homotopy,
            AxiomArg::Comm => AxiomChoice::Commutativity,
            AxiomArg::Norm => AxiomChoice::Normalization,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Least,
    Greatest,
}

impl From<RuleArg> for VertexRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Least => VertexRule::Least,
            RuleArg::Greatest => VertexRule::Greatest,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integral homology of complex files.
    Homology {
        #[arg(required = true)]
        complexes: Vec<PathBuf>,
        /// Subdivision level.
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long)]
        reduced: bool,
    },
    /// Compare cohomology with Hom and Ext of homology.
    UctCheck {
        #[arg(required = true)]
        complexes: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Lefschetz number at chain level and on homology.
    Lefschetz {
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Fixed point index of problem bundles.
    Index {
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
        /// Target level; defaults to the bundle's.
        #[arg(long)]
        level: Option<usize>,
        /// Try levels up to this one until the problem is admissible.
        #[arg(long)]
        level_cap: Option<usize>,
        /// Compare the index at the target level and the next.
        #[arg(long, conflicts_with = "dominate")]
        stability: bool,
        /// Compute through a polyhedron retracting onto the bundle's complex.
        #[arg(long, value_name = "RETRACTION")]
        dominate: Option<PathBuf>,
    },
    /// Check one index axiom on a set of bundles.
    Verify {
        #[arg(long, value_enum)]
        axiom: AxiomArg,
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Chain approximation of a bundle's carriers.
    Approx {
        bundle: PathBuf,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, value_enum)]
        rule: Option<RuleArg>,
    },
    /// Acyclicity of every carrier value.
    Acyclic {
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
        #[arg(long)]
        level: Option<usize>,
        /// Decide over the rationals; the integer report is kept.
        #[arg(long)]
        oracle_rational: bool,
    },
    /// Nerve of a cover by unions of open stars.
    Nerve {
        #[arg(required = true)]
        covers: Vec<PathBuf>,
    },
}

fn bundles(paths: &[PathBuf], monotone_complete: bool) -> Result<Vec<Bundle>, CliError> {
    paths.iter().map(|p| Bundle::load(p, monotone_complete)).collect()
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let t = cli.threads;
    let mc = cli.monotone_complete;
    match &cli.command {
        Command::Homology {
            complexes,
            level,
            reduced,
        } => commands::each(complexes, t, |p| commands::homology_of(p, *level, *reduced)),
        Command::UctCheck { complexes, level } => commands::each(complexes, t, |p| commands::uct_check(p, *level)),
        Command::Lefschetz { bundles: paths, level } => {
            commands::each(&bundles(paths, mc)?, t, |b| commands::lefschetz(b, *level))
        }
        Command::Index {
            bundles: paths,
            level,
            level_cap,
            stability,
            dominate,
        } => {
            let opts = IndexOptions {
                level: *level,
                level_cap: *level_cap,
                stability: *stability,
                dominate: dominate.clone(),
            };
            commands::each(&bundles(paths, mc)?, t, |b| commands::index(b, &opts))
        }
        Command::Verify {
            axiom,
            bundles: paths,
            level,
        } => commands::verify_all((*axiom).into(), &bundles(paths, mc)?, *level, t),
        Command::Approx { bundle, level, rule } => {
            commands::approx(&Bundle::load(bundle, mc)?, *level, rule.map(Into::into))
        }
        Command::Acyclic {
            bundles: paths,
            level,
            oracle_rational,
        } => commands::each(&bundles(paths, mc)?, t, |b| {
            commands::acyclic(b, *level, *oracle_rational)
        }),
        Command::Nerve { covers } => commands::each(covers, t, |p| commands::nerve_of(p)),
    }
}
