//! One module per subcommand, each exposing a `run` function.

pub mod calibrate;
pub mod corr;
pub mod density;
pub mod path;
pub mod simulate;
pub mod tail;
