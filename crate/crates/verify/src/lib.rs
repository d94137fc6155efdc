//! Acceptance checks for the revmon workspace live in `tests/acceptance.rs`.
