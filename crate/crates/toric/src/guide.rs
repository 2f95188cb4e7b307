//! The user guide, one module per book chapter. Each chapter file under
//! `book/src/` is included verbatim, so every code block in the book runs
//! as a doc-test and the guide cannot drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/fans.md")]
pub mod fans {}

#[doc = include_str!("../../../book/src/divisors.md")]
pub mod divisors {}

#[doc = include_str!("../../../book/src/cohomology.md")]
pub mod cohomology {}

#[doc = include_str!("../../../book/src/multiplication.md")]
pub mod multiplication {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
