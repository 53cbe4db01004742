//! Numerical realization of complementary series representations of
//! `SO(n,1)` and of their restriction to `SO(n-1,1)`.

pub mod error;
pub mod exterior;
pub mod group;
pub mod intertwine;
pub mod params;
pub mod report;
pub mod embedding;
pub mod quadrature;
pub mod schwartz;
pub mod suites;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/group.md")]
    mod group {}
    #[doc = include_str!("../../../book/src/exterior.md")]
    mod exterior {}
    #[doc = include_str!("../../../book/src/schwartz.md")]
    mod schwartz {}
    #[doc = include_str!("../../../book/src/intertwine.md")]
    mod intertwine {}
    #[doc = include_str!("../../../book/src/params.md")]
    mod params {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/verify.md")]
    mod verify {}
}
