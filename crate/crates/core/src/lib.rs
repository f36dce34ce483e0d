//! Statistical audit of gender representation in exhibition and auction
//! corpora.
//!
//! The pipeline runs [`corpus`] → [`bftest`] → [`exnet`] → [`careers`] →
//! [`auctions`] → [`regress`]; [`synth`] builds planted synthetic worlds and
//! the independent numerical oracles the test suites check against.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auctions;
pub mod bftest;
pub mod careers;
pub mod corpus;
pub mod exnet;
pub mod regress;
pub mod special;
pub mod synth;
