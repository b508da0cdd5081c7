#[path = "../../../core/tests/support/oracles.rs"]
pub mod oracles;
