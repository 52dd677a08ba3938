//! Partial actions of finite groups on finite sets.

pub mod action;
pub mod decomp;
pub mod bimodule;
pub mod exact;
pub mod exact_cover;
pub mod fdcstar;
pub mod globalize;
pub mod grid;
pub mod group;
pub mod harness;
pub mod par;
pub mod rokhlin;
pub mod tuples;
