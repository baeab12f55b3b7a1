//! The guide under `book/` as doc-tests: each chapter becomes the docs of an
//! empty module, so `cargo test -p nakamoto-book` runs every listing against
//! the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/parameters.md")]
pub mod parameters {}
#[doc = include_str!("../../../book/src/upper-bounds.md")]
pub mod upper_bounds {}
#[doc = include_str!("../../../book/src/lower-bounds.md")]
pub mod lower_bounds {}
#[doc = include_str!("../../../book/src/depth.md")]
pub mod depth {}
#[doc = include_str!("../../../book/src/renewal.md")]
pub mod renewal {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/protocols.md")]
pub mod protocols {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
