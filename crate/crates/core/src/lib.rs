#![no_std]
extern crate alloc;

mod fmath;

pub mod control;
pub mod digraph;
pub mod matnum;
pub mod rng;
pub mod sim;
pub mod synthesis;
pub mod treealg;
