//! Analysis of two-input/two-output bipartite correlation boxes: locality,
//! superlocality, dimension-restricted local-hidden-state models
//! (superunsteerability and one-sided semi-device-independent steering),
//! and two-qubit quantum discord.

pub mod boxes;
pub mod certify;
pub mod decomp;
pub mod discord;
pub mod eigen;
pub mod io;
pub mod error;
pub mod lp;
pub mod quantum;
pub mod scalar;

pub use boxes::{CorrBox, Relabeling, Side, SinglePartyBox};
pub use error::{Error, Result};
pub use quantum::{Assemblage, DensityMatrix, Measurement};
pub use scalar::{q, Q};
pub use certify::{classify, reproduce, ClassificationReport, ReproductionReport};
pub use decomp::{FeasibilityResult, HiddenVariableModel, SolverConfig, TrustedKind, Verdict};
pub use discord::{Direction, DiscordResult};
pub use io::ArithmeticMode;
