//! Small dense networks with hand-written reverse mode, Adam, and a diagonal
//! Gaussian policy head. 64-bit floats throughout.

mod adam;
mod gradcheck;
mod gaussian;
mod mlp;

pub use adam::{Adam, AdamConfig};
pub use gradcheck::{max_gradient_error, GRADCHECK_SCALE_FLOOR};
pub use gaussian::{gaussian_log_prob, squash_action, GaussianPolicyHead, LOG_STD_INIT, LOG_STD_MAX, LOG_STD_MIN};
pub use mlp::{ForwardCache, Mlp, ShapeError};
