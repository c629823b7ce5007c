//! Simulation core for fixed-wing UAV cellular access points.
//!
//! A fleet of fixed-wing UAVs orbits service center-points above randomly
//! placed ground users. Each UAV can adjust its orbit radius and height in
//! discrete increments; the goal is to maximise network energy efficiency
//! (delivered bits per Joule of propulsion energy). The crate provides the
//! world model ([`environment`]), the radio link model ([`radio`]), the
//! propulsion energy model ([`energy`]), four heuristic trajectory policies
//! ([`policies`]), a per-UAV dueling deep Q-network agent ([`agent`], [`nn`])
//! and the episode engine that ties them together ([`harness`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); all float math goes
//! through `libm` so results are identical with or without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub use ndarray;

pub mod agent;
pub mod config;
pub mod energy;
pub mod environment;
pub mod harness;
pub mod nn;
pub mod policies;
pub mod radio;
pub mod rng;
