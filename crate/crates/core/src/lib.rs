//! Exact Khovanov homology for links and diskular tangles.

pub mod arc;
pub mod cobordism;
pub mod complex;
pub mod duality;
pub mod equivalence;
pub mod error;
pub mod gluing;
pub mod io;
pub mod jones;
pub mod khcomplex;
pub mod library;
pub mod linalg;
pub mod matching;
pub mod module;
pub mod moves;
pub mod random;
pub mod surgery;
pub mod tangle;
pub mod tqft;
pub mod unionfind;
pub mod verify;

pub use error::{KhError, Result};
