pub mod blaschke;
pub mod entropy;
pub mod error;
pub mod explore;
pub mod moduli;
pub mod pcf;
pub mod ratmap;
pub mod sphere;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/maps-and-moduli.md")]
    mod maps_and_moduli {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/centers.md")]
    mod centers {}
    #[doc = include_str!("../../../book/src/barrier.md")]
    mod barrier {}
    #[doc = include_str!("../../../book/src/blaschke.md")]
    mod blaschke {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
}
