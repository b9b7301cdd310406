#![allow(dead_code)]

pub mod pilot;
pub mod quadrature;
