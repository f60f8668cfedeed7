//! Experiment driver.
