use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dynpair::{AssignmentKind, IeParams};
use num_rational::Ratio;

#[derive(Debug, Parser)]
#[command(
    name = "dynpair",
    about = "Dynamical pair relations, closure ranks and Cantor-Bendixson ranks",
    disable_version_flag = true
)]
pub struct Cli {
    /// Print the version and report schema version.
    #[arg(long)]
    pub version: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Topological entropy of a shift or of its image under a code.
    Entropy {
        #[arg(long)]
        sft: PathBuf,
        #[arg(long)]
        code: Option<PathBuf>,
    },
    /// Allowed words of a given length.
    Words {
        #[arg(long)]
        sft: PathBuf,
        #[arg(long)]
        length: usize,
    },
    /// Pair table of an assignment at block depth, as TSV.
    Pairs {
        #[arg(long)]
        sft: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: AssignmentKind,
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[command(flatten)]
        ie: IeArgs,
        #[command(flatten)]
        budget: Budget,
    },
    /// Closure rank of a relation.
    Rank {
        #[command(flatten)]
        input: RelationInput,
        #[arg(long, default_value_t = dynpair::gamma::DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        ie: IeArgs,
        #[command(flatten)]
        budget: Budget,
    },
    /// Full and realizable verdicts for a relation or an assignment.
    Classify {
        #[command(flatten)]
        input: RelationInput,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long, default_value_t = dynpair::gamma::DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        ie: IeArgs,
        #[command(flatten)]
        budget: Budget,
    },
    /// Cantor-Bendixson rank of an automaton-presented closed set.
    CbRank {
        #[arg(long, conflicts_with = "space", required_unless_present = "space")]
        automaton: Option<PathBuf>,
        #[arg(long)]
        space: Option<PathBuf>,
    },
    /// Invariance, factor, entropy-link and equicontinuity checks.
    CheckAxioms {
        #[arg(long)]
        sft: PathBuf,
        /// Sliding block codes to push pairs through; may be repeated.
        #[arg(long)]
        code: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[command(flatten)]
        ie: IeArgs,
        #[command(flatten)]
        budget: Budget,
    },
    /// Run every fixture of a corpus directory.
    Corpus {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
        /// Rewrite expectation files from the current output.
        #[arg(long)]
        bless: bool,
    },
}

#[derive(Debug, Args)]
pub struct RelationInput {
    #[arg(long)]
    pub space: Option<PathBuf>,
    #[arg(long)]
    pub sft: Option<PathBuf>,
    #[arg(long)]
    pub relation: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    pub assignment: Option<AssignmentKind>,
    #[arg(long, default_value_t = 0)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct IeArgs {
    #[arg(long, default_value = "1/4", value_parser = parse_density)]
    pub density: Ratio<u64>,
    #[arg(long, default_value_t = 12)]
    pub horizon: usize,
    #[arg(long, default_value_t = 8)]
    pub interval: usize,
    #[arg(long, default_value_t = 4096)]
    pub max_choice_sets: usize,
}

impl IeArgs {
    pub fn params(&self) -> IeParams {
        IeParams {
            density: self.density,
            interval_length: self.interval,
            horizon: self.horizon,
            max_choice_sets: self.max_choice_sets,
        }
    }
}

#[derive(Debug, Args)]
pub struct Budget {
    /// Largest number of blocks per depth before giving up with exit code 2.
    #[arg(long, default_value_t = 1024)]
    pub max_blocks: usize,
}

fn parse_kind(s: &str) -> Result<AssignmentKind, String> {
    s.parse()
}

fn parse_density(s: &str) -> Result<Ratio<u64>, String> {
    s.parse::<Ratio<u64>>().map_err(|e| format!("bad density {s:?}: {e}"))
}
