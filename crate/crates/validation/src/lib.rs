//! Nothing here; the acceptance suite is `tests/acceptance.rs`.
