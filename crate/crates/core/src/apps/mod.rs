//! Applications: sofic affine-invariant carpets, integral self-affine
//! measures, and finite-type self-similar measures. Each pipeline reduces its
//! question to a verdict on a matrix tuple built from the input data.

pub mod carpet;
pub mod self_affine;
pub mod self_similar;
