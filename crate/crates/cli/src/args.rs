use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tysys_core::table::{Policy, SystemKind, Window};
use tysys_core::ysystem::FreeChoice;

#[derive(Parser, Debug)]
#[command(name = "tysys", version, about = "Exact T-systems, Y-systems and cluster mutation belts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cartan matrix classification
    #[command(subcommand)]
    Cartan(CartanCmd),
    /// T- and Y-systems of a Cartan matrix
    #[command(subcommand)]
    Sys(SysCmd),
    /// Exchange matrices and the bipartite belt
    #[command(subcommand)]
    Cluster(ClusterCmd),
    /// Period detection on Y-system orbits
    #[command(subcommand)]
    Period(PeriodCmd),
    /// Acceptance suite
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
pub enum CartanCmd {
    /// Axioms, symmetrizer, lacing, bipartition, t and t_a
    Check { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum SysCmd {
    /// Dump the T-system relations on a window
    GenT(SysArgs),
    /// Dump the Y-system relations on a window
    GenY(SysArgs),
    /// Propagate random Cauchy data through the T-system and self-check
    SolveT(SysArgs),
    /// Propagate random Cauchy data through the Y-system and self-check
    SolveY(SysArgs),
    /// Map a T table to Y and verify
    T2y {
        #[command(flatten)]
        sys: SysArgs,
        /// T table dump
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Reconstruct T from a Y table of an unrestricted system
    Y2t {
        #[command(flatten)]
        sys: SysArgs,
        /// Y table dump
        #[arg(long = "in")]
        input: PathBuf,
        /// How the free level-1 values are chosen
        #[arg(long, value_enum, default_value_t = Free::Random)]
        free: Free,
        /// Map the result back to Y and compare with the input
        #[arg(long)]
        roundtrip: bool,
    },
    /// Telescoping identities on random tables
    Identities(IdentityArgs),
}

#[derive(Subcommand, Debug)]
pub enum ClusterCmd {
    /// Run the belt and dump x(u), y(u)
    Run(BeltArgs),
    /// Parity lemmas, T(B), both Y-systems, T to Y and the Laurent property
    Verify(BeltArgs),
    /// Restricted T-system of a simply laced matrix as a belt
    Correspond {
        file: PathBuf,
        #[arg(long)]
        level: i64,
        /// Half-width of the slice window
        #[arg(long, default_value_t = 4)]
        steps: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum PeriodCmd {
    /// Smallest shift returning the initial slab
    Scan {
        file: PathBuf,
        #[arg(long, default_value = "2")]
        level: LevelArg,
        #[arg(long, default_value_t = 2)]
        m_cap: i64,
        #[arg(long, default_value_t = 20)]
        max_period: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Every acceptance criterion
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum LevelArg {
    Level(i64),
    #[serde(serialize_with = "unrestricted")]
    Unrestricted,
}

fn unrestricted<S: serde::Serializer>(s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str("unrestricted")
}

impl std::str::FromStr for LevelArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "unrestricted" {
            return Ok(LevelArg::Unrestricted);
        }
        s.parse().map(LevelArg::Level).map_err(|_| format!("expected an integer level or `unrestricted`, got `{s}`"))
    }
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad window start `{a}`"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad window end `{b}`"))?;
    Window::new(a, b).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct SysArgs {
    /// Cartan matrix text file
    pub file: PathBuf,
    /// Restricted level (at least 2) or `unrestricted`
    #[arg(long, default_value = "2")]
    pub level: LevelArg,
    /// Level cap per node, in units of t_a, for unrestricted systems
    #[arg(long, default_value_t = 2)]
    pub m_cap: i64,
    /// Inclusive slice range A..B
    #[arg(long, value_parser = parse_window)]
    pub window: Option<Window>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Resampling attempts after a zero divisor
    #[arg(long, default_value_t = Policy::default().max_retries)]
    pub retries: u32,
    /// Bit size of random numerators and denominators
    #[arg(long, default_value_t = Policy::default().bits)]
    pub bits: u32,
}

impl SysArgs {
    pub fn kind(&self) -> SystemKind {
        match self.level {
            LevelArg::Level(level) => SystemKind::Restricted { level },
            LevelArg::Unrestricted => SystemKind::Unrestricted { m_cap: self.m_cap },
        }
    }

    pub fn policy(&self) -> Policy {
        Policy { max_retries: self.retries, bits: self.bits }
    }
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    /// Inclusive slice range A..B of centres
    #[arg(long, value_parser = parse_window, default_value = "0..9")]
    pub window: Window,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Policy::default().bits)]
    pub bits: u32,
}

#[derive(Args, Debug)]
pub struct BeltArgs {
    /// Exchange matrix text file with a parity line
    pub file: PathBuf,
    /// Forward steps from u = 0
    #[arg(long, default_value_t = 12)]
    pub steps: i64,
    /// Backward steps from u = 0
    #[arg(long, default_value_t = 0)]
    pub back: i64,
    /// Random positive rationals in place of the generators
    #[arg(long)]
    pub numeric: bool,
    /// Independent random seeds in numeric mode
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Policy::default().bits)]
    pub bits: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Free {
    Random,
    Unit,
}

impl From<Free> for FreeChoice {
    fn from(f: Free) -> Self {
        match f {
            Free::Random => FreeChoice::Random,
            Free::Unit => FreeChoice::Unit,
        }
    }
}
