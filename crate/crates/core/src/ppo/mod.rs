//! A small from-scratch actor-critic PPO implementation: a shared tanh
//! trunk feeding one categorical head per action dimension plus a scalar
//! value head, trained with the clipped surrogate objective and Adam.

mod adam;
mod buffer;
mod loss;
mod net;
mod train;

pub use adam::Adam;
pub use buffer::{RolloutBuffer, Transition};
pub use loss::{ppo_loss, LossCoeffs, LossStats, Minibatch, Sample};
pub use net::{ForwardCache, NetShape, Network, HIDDEN};
pub use train::{
    evaluate_episode, train, Checkpoint, EpisodeLog, EpisodeMetricsAccumulator, PpoHyperparams,
    TrainResult,
};
