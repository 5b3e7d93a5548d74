//! Independent oracles and fixtures for tests. Nothing here calls the
//! pipeline, smoother, fixation detector or engine it is used to check.

pub mod canonical;
pub mod dwell_oracle;
pub mod idt_oracle;
pub mod javadoc;
pub mod random;
