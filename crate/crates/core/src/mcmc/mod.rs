//! Posterior sampling for AR(1) and linear-regression models with two-piece
//! errors.

pub mod model;
pub mod sampler;
pub mod summary;

pub use model::{loglik_ar_sepd, loglik_reg_sgld, ArSepdModel, ErrorFamily, ModelKind, ModelSpec, RegSgldModel};
pub use sampler::{run_mwg, ActiveBlocks, Block, Chain, MwgConfig, Posterior, ProposalScales, State};
pub use summary::{summarize, ParamSummary, PosteriorSummary};
