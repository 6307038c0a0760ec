use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pluecker",
    version,
    about = "Plücker matrix of the Lagrangian-Grassmannian"
)]
pub struct Cli {
    /// Emit JSON instead of text where a command supports both.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the Plücker matrix and write it in one of the file formats.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Coord)]
        format: Format,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split the matrix into atlas blocks and check each one.
    Decompose {
        #[arg(long)]
        n: usize,
    },
    /// Run the point-count, relation, minimality and commuting-square checks
    /// over F_q and print a JSON report.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Seed for the random commuting-square spot checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rank of the matrix in a given characteristic (0 for the rationals).
    Rank {
        #[arg(long)]
        n: usize,
        #[arg(long = "char")]
        characteristic: u64,
    },
    /// Number of F_q-rational Lagrangians, by formula and by enumeration.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
    },
    /// Write an atlas member as an LDPC parity-check matrix in alist form.
    ExportLdpc {
        /// Number of pairs; must be even.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Coord,
    Alist,
    Json,
}
