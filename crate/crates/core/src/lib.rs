//! Singularity confinement and degree growth for the discrete KdV equation
//! and its periodic reductions, in exact arithmetic.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod degree;
pub mod exactnum;
pub mod lattice;
pub mod mapping;
pub mod singularity;
