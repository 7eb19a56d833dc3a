//! The guide in `book/`, compiled so that its code blocks run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod chapter0 {}
#[doc = include_str!("../../../book/src/algebra.md")]
pub mod chapter1 {}
#[doc = include_str!("../../../book/src/stabilizer.md")]
pub mod chapter2 {}
#[doc = include_str!("../../../book/src/charts.md")]
pub mod chapter3 {}
#[doc = include_str!("../../../book/src/gallery.md")]
pub mod chapter4 {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod chapter5 {}
