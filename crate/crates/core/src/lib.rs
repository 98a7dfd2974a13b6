pub mod cli;
pub mod constants;
pub mod error;
pub mod historical;
pub mod ode;
pub mod oscillator;
pub mod perturbation;
pub mod quantity;
pub mod report;
pub mod species;
pub mod vacuum;
pub mod verify;
