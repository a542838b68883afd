//! SYZ mirror construction toolkit for semi-projective toric Calabi-Yau
//! manifolds.
//!
//! From integral fan data and Kahler parameters the crate computes:
//!
//! * exact lattice normal forms, relation lattices and rational LP witnesses
//!   ([`lattice`]),
//! * the Calabi-Yau covector, adapted bases, moment polytopes and their
//!   codimension-2 faces ([`fan`]),
//! * the mirror hypersurface family `u*v = sum C_i z^{w_i}` with its
//!   coefficient constraints and the embedding into the mirror of C^m
//!   ([`mirror`]),
//! * the Gross/Harvey-Lawson fibration data: base embedding, wall, chambers
//!   and discriminant graph ([`fibration`]),
//! * Blaschke-product disk evaluation, areas, Maslov indices, the
//!   superpotential, chamber central charges, wall-crossing checks and a
//!   multi-start Newton critical-point solver ([`disks`]),
//! * file ingestion, reports, SVG figures, caching and the CLI pipeline
//!   ([`fanfile`], [`report`], [`svg`], [`cache`], [`pipeline`]).

pub mod cache;
pub mod disks;
pub mod fan;
pub mod fanfile;
pub mod fibration;
pub mod lattice;
pub mod laurent;
pub mod mirror;
pub mod numeric;
pub mod pipeline;
pub mod qexpr;
pub mod report;
pub mod samples;
pub mod svg;
pub mod verify;
