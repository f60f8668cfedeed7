//! Boundary scaling construction.
