//! Exact arithmetic for tensor products of finite commutative group schemes
//! over finite fields, through Dieudonné modules and Galois modules.

pub mod boxtensor;
pub mod dieudonne;
pub mod error;
pub mod galois;
pub mod groupscheme;
pub mod hopf;
pub mod linalg;
pub mod poly;
pub mod semilinear;
pub mod twisted;
pub mod unram;
pub mod witt;

pub use error::{Error, Result};
pub use linalg::{Integers, Mat, Pir};
pub use semilinear::{FinLenModule, SemilinearMap};
pub use unram::{UnramElement, UnramRing, Zmod};
