//! Guide RNA design: candidate Cas9 target sites on both strands and
//! off-target counts against a reference.

mod fasta;
mod matcher;
mod seq;
mod sites;

pub use fasta::{parse_fasta, to_fasta};
pub use matcher::{off_targets, Locus, OffTargetReport};
pub use seq::{gc_content, reverse_complement, DnaSequence, Pam};
pub use sites::{design, find_sites, Dedupe, GcRegion, SiteOptions, Strand, TargetSite};

use thiserror::Error;

/// Length of a target site: 20 nt protospacer followed by the PAM.
pub const SITE_LEN: usize = 23;
pub const PROTOSPACER_LEN: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum GrnaError {
    #[error("invalid base {ch:?} at offset {offset}")]
    InvalidBase { offset: usize, ch: char },

    #[error("sequence is empty")]
    Empty,

    #[error("sequence of length {len} is shorter than {SITE_LEN}")]
    TooShort { len: usize },

    #[error("invalid PAM pattern {0:?}")]
    BadPam(String),

    #[error("FASTA line {line}: {message}")]
    Fasta { line: usize, message: String },
}

pub type Result<T, E = GrnaError> = std::result::Result<T, E>;
