//! Independent references shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod cubature;
pub mod second_quantization;
