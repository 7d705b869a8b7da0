//! Simulator and training harness for an AUV that tours an underwater
//! sensor grid, delivering energy acoustically and collecting data uplinks.
//!
//! The crate is organized bottom-up:
//!
//! - [`acoustics`]: the underwater link budget and energy-harvesting chain
//! - [`uplink`]: node transmit energetics (exact and approximate)
//! - [`duplex`]: TDD feasibility analysis and time-split solving
//! - [`env`]: the episodic grid-world MDP (TDD and FDD action spaces)
//! - [`policies`]: random-walk, round-robin and greedy baselines
//! - [`ppo`]: a small from-scratch actor-critic PPO trainer
//! - [`harness`]: experiment orchestration, CSV/JSON emission, CLI backend

pub mod acoustics;
pub mod duplex;
pub mod env;
pub mod error;
pub mod harness;
pub mod policies;
pub mod ppo;
pub mod uplink;

pub use error::{Error, Result};
