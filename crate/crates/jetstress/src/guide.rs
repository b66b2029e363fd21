//! The user guide, one module per book chapter.
//!
//! The text is included verbatim from `book/src`, which is also the source
//! the rendered book is built from (`mdbook build book`). Including it here
//! makes every code block in the book a doc-test, so the guide cannot drift
//! from the API: `cargo test --doc` compiles and runs all of it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/charts-and-quadrature.md")]
pub mod charts_and_quadrature {}

#[doc = include_str!("../../../book/src/fields-and-forms.md")]
pub mod fields_and_forms {}

#[doc = include_str!("../../../book/src/jets.md")]
pub mod jets {}

#[doc = include_str!("../../../book/src/first-order-stresses.md")]
pub mod first_order_stresses {}

#[doc = include_str!("../../../book/src/second-order-stresses.md")]
pub mod second_order_stresses {}

#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
