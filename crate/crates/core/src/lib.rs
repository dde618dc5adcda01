//! Message Exchange (ME) games over discourse structures.
pub mod analysis;
pub mod discourse;
pub mod epistemic;
pub mod game;
mod player;
pub mod rational;
pub mod scenarios;
pub use player::Player;
pub use rational::Rational;
