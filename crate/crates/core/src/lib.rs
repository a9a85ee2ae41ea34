pub mod complexity;
pub mod density;
pub mod engine;
pub mod error;
pub mod harness;
pub mod io;
pub mod math;
pub mod oracles;
pub mod poisson;
pub mod rng;
pub mod sphere;
pub mod tuning;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod chapter0 {}
    #[doc = include_str!("../../../book/src/posterior.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/density.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/poisson.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/complexity.md")]
    pub mod chapter4 {}
    #[doc = include_str!("../../../book/src/sphere.md")]
    pub mod chapter5 {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod chapter6 {}
}
