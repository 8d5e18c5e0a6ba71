//! Generators of fundamental data: closed-form, ODE-driven and implicit
//! families, plus a constant-data control.

pub mod cmc;
pub mod ex31;
pub mod ex32;
pub mod ex33;
pub mod ode;
pub mod roots;

pub use cmc::gen_cmc_control;
pub use ex31::{gen_example31, Example31Params};
pub use ex32::{gen_example32, Example32Params};
pub use ex33::{gen_example33, gen_example33_detailed, Branch, Example33Params, Example33Output};
