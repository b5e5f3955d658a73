//! Exact symbolic engine for blow-ups, coefficient ideals, ridges and flags of
//! weak maximal contact over prime fields, with detection and classification
//! of kangaroo phenomena.

pub mod charts;
pub mod descent;
pub mod error;
pub mod family;
pub mod field;
pub mod gfpoly;
pub mod kangaroo;
pub mod linalg;
pub mod ridge;
pub mod text;

pub use error::{CoreError, ParseError};
pub use field::FieldSpec;
pub use gfpoly::{monomial_content, order_at_origin, Monomial, Polynomial, MAX_VARS};
pub use text::Ring;
