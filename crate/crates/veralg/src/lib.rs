//! Exact computation with verbal operations on free algebras: free-magma
//! elements, relatively free algebras of small varieties, word systems and
//! their induced (star) operations, and the parameter-level group algebra of
//! strongly stable automorphisms.

pub mod exactfield;
pub mod scalar;
pub mod poly;
pub mod freemagma;
pub mod relfree;
pub mod verbal;
pub mod autgroup;
pub mod exprio;
pub mod cli;
