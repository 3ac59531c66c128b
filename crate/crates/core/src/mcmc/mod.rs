//! Metropolis-Hastings search over worlds.

pub mod chain;
pub mod kernels;
pub mod schedule;

pub use chain::{accept, run, Chain, ChainConfig, ChainOutcome, ChainState, ChainTrace, TraceRecord};
pub use kernels::{
    propose, KernelParams, KernelProposal, ProposalContext, ProposalUnavailable, RoomProposals, SplitCache,
};
pub use schedule::{select_kernel, KernelKind, Phase, Schedule};
