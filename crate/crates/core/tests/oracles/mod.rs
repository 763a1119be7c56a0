//! Independent reference checks shared by the property suites and the
//! acceptance harness.
#![allow(dead_code)]

pub mod bench;
pub mod cdg;
pub mod fixtures;
pub mod inlining;
pub mod matching;
pub mod negation;
pub mod programs;
