//! Numerical toolkit for quantum Darwinism: labeled multipartite states,
//! entropic quantities, quantum discord, channels with recovery maps,
//! partial-information-plot analysis and a collision model with tunable
//! memory.

pub mod certify;
pub mod channels;
pub mod darwinism;
pub mod error;
pub mod infotheory;
pub mod measurement;
pub mod nonmarkov;
pub mod par;
pub mod rng;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
pub use infotheory::Bits;
pub use states::{Ensemble, PointerBasis, QState};
pub use tensor::{CMatrix, HilbertSpace, SubsystemLabel, C64};
