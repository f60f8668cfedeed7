//! Certified one-sided bounds for the invariant objects.
