//! Certified decisions of the R∞-property for right-angled Artin groups of
//! small graphs.
//!
//! The crate covers graph structure and encodings ([`graph`], [`io`]),
//! automorphisms and isomorphism classes ([`autgrp`]), characteristic vertex
//! sets ([`charclose`]), Lyndon elements of the trace monoid ([`lyndon`]),
//! induced maps on the lower central series ([`lcslin`]), and the rule engine
//! with its independent auditor ([`certify`], [`audit`]).

pub mod audit;
pub mod autgrp;
pub mod certify;
pub mod charclose;
pub mod error;
pub mod graph;
pub mod io;
pub mod lcslin;
pub mod lyndon;

pub use certify::{certify, Certificate, Rule, Verdict};
pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
