//! Certified weighted Bessel norms `Λ_{d,q}(k)` and the checks that decide
//! when `k = 0` gives the sharp constant of the mixed-norm extension
//! estimate on the sphere. See the guide in `book/` for a walkthrough.

pub mod bounds;
pub mod cli;
pub mod enclosure;
pub mod error;
pub mod lambda;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use enclosure::Enclosure;
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/norms.md")]
    mod norms {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/hierarchy.md")]
    mod hierarchy {}
    #[doc = include_str!("../../../book/src/threshold.md")]
    mod threshold {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
