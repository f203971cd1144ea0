//! Exact star-multiplication of solutions of `∇f = M∇g`.

pub mod cli;
pub mod complex;
pub mod error;
pub mod form;
pub mod json;
pub mod matrix;
pub mod poly;
pub mod random;
pub mod real;
pub mod scalar;
pub mod star;
pub mod verify;

pub use error::{Error, Result};
pub use form::{gradient, integrate_exact, is_closed, OneForm};
pub use matrix::Matrix;
pub use poly::{Poly, Ring};
pub use scalar::{Field, Scalar};
pub use star::{check_solution, star_power, star_product, Modulus, MuPoly, StarSystem};
