//! Stationary mappings, dual maps, left inverses.
