//! Dense numerics for the sequence models: matrices, the LSTM cell,
//! softmax and cross-entropy, clipped SGD, the learning-rate schedule and
//! a finite-difference gradient checker.

pub mod gradcheck;
pub mod linalg;
pub mod lstm;
pub mod ops;
pub mod optim;
pub mod params;

pub use gradcheck::{finite_difference_check, finite_difference_check_sampled, GRADCHECK_SAMPLES};
pub use linalg::Matrix;
pub use lstm::{LstmCache, LstmCell};
pub use ops::{argmax, cross_entropy, softmax};
pub use optim::{lr_schedule, sgd_update, CLIP_NORM};
pub use params::ParamSet;
