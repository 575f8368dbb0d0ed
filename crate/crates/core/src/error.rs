use thiserror::Error;

use crate::adversary::AttackError;
use crate::codebook::CodebookError;
use crate::models::ModelError;
use crate::permute::TypeError;
use crate::rd::RdError;
use crate::regions::RegionError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Codebook(#[from] CodebookError),
    #[error(transparent)]
    Types(#[from] TypeError),
    #[error(transparent)]
    Rd(#[from] RdError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Attack(#[from] AttackError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
