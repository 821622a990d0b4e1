pub mod dynmap;
pub mod fib;
pub mod ff;
pub mod mpoly;
pub mod orbits;
pub mod theorems;
pub mod search;
pub mod cli;
