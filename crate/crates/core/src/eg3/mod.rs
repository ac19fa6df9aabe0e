//! Boundary geometry of the chain `a -> ab | ba | ac | ca` (each 1/4), with
//! `b` and `c` frozen.
//!
//! Every word of the language is `L a R` with `L, R` over `{b, c}`. A boundary
//! point is a mixing ratio `λ` together with the left stream (read from the
//! left end inwards) and the right stream (read from the right end inwards).

mod closed;
mod embed;
mod experiments;
mod metric;
mod point;
mod stream;

pub use closed::{green_closed, kernel_closed, HeadTail};
pub use embed::{generate_cloud, phi, phi_bits, phi_distance, psi, psi_difference, EmbeddedPoint, PhiBits, CLOUD_HEADER};
pub use experiments::{
    box_dimension, fiber_diameter, fiber_dimension, lipschitz_scan, sample_pair, LipschitzReport, NestingTrend,
    PairKind,
};
pub use metric::{agreements, rho, rho_exact, rho_fast, theta_boundary_truncated, theta_tail_bound, Truncated};
pub use point::{converge_to_boundary, kernel_at_boundary, BoundaryPoint};
pub use stream::{Agreement, Generator, Stream};

use crate::words::{Letter, WordError};
use thiserror::Error;

pub const A: Letter = Letter(0);
pub const B: Letter = Letter(1);
pub const C: Letter = Letter(2);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Eg3Error {
    #[error("InsufficientDepth: needed {needed} symbols, stream provides {available}")]
    InsufficientDepth { needed: usize, available: usize },
    #[error("UndecidedAgreement: streams agree on the first {scanned} symbols but are not provably equal")]
    UndecidedAgreement { scanned: usize },
    #[error("InvalidLambda: {0}")]
    InvalidLambda(String),
    #[error("StreamPresence: {0}")]
    StreamPresence(String),
    #[error("InvalidWord: {0}")]
    InvalidWord(String),
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("DegenerateFit: {0}")]
    DegenerateFit(String),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

impl Eg3Error {
    pub fn name(&self) -> &'static str {
        match self {
            Eg3Error::InsufficientDepth { .. } => "InsufficientDepth",
            Eg3Error::UndecidedAgreement { .. } => "UndecidedAgreement",
            Eg3Error::InvalidLambda(_) => "InvalidLambda",
            Eg3Error::StreamPresence(_) => "StreamPresence",
            Eg3Error::InvalidWord(_) => "InvalidWord",
            Eg3Error::Parse(_) => "ParseError",
            Eg3Error::DegenerateFit(_) => "DegenerateFit",
            Eg3Error::InvalidArgument(_) => "InvalidArgument",
            Eg3Error::Word(e) => e.name(),
        }
    }
}

/// A symbol of a boundary stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    B,
    C,
}

impl Symbol {
    pub fn letter(self) -> Letter {
        match self {
            Symbol::B => B,
            Symbol::C => C,
        }
    }

    pub fn from_letter(l: Letter) -> Option<Symbol> {
        match l {
            B => Some(Symbol::B),
            C => Some(Symbol::C),
            _ => None,
        }
    }

    pub fn from_char(ch: char) -> Option<Symbol> {
        match ch {
            'b' => Some(Symbol::B),
            'c' => Some(Symbol::C),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::B => 'b',
            Symbol::C => 'c',
        }
    }

    /// `1` for `c`, `0` for `b`.
    pub fn bit(self) -> u8 {
        (self == Symbol::C) as u8
    }

    /// The digit `1 + 2·[s = c]` of the Euclidean embedding.
    pub fn digit(self) -> u32 {
        1 + 2 * self.bit() as u32
    }
}
