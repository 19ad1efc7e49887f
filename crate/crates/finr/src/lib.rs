//! Training engine for implicit neural representations built on Fourier
//! feature embeddings, with a bias-free adaptive linear filter in front of
//! the network, a line-searched learning rate for that filter, and a theory
//! lab that checks the kernel-level predictions those pieces rest on.

pub mod embeddings;
pub mod error;
pub mod filter;
pub mod networks;
pub mod numerics;
pub mod optimizer;
pub mod tasks;
pub mod theory;

pub mod cli;

pub use error::{FinrError, Result};
