//! Desk-scale laboratory for Hopcroft's problem: given n lines (or
//! hyperplanes) and m points, decide whether any point lies on any line.
//!
//! The crate implements the classical data structures behind the known
//! sublinear quantum algorithms for the problem, together with a charged
//! cost model that accounts for the quantum subroutines those algorithms
//! would invoke:
//!
//! * [`geom`] — exact rational arithmetic, integer lines/hyperplanes,
//!   instance generation and validation, point-line duality.
//! * [`hiskip`] — history-independent skip lists with hashed levels,
//!   canonical fingerprints, and the tail-swap primitive.
//! * [`arrangement`] — the dynamic planar arrangement storing every
//!   k-level of a line set in skip lists of path points.
//! * [`ptree`] — a kd partition tree over points answering hyperplane
//!   emptiness queries, with crossing-number measurement.
//! * [`qcost`] — charge formulas (Grover, backtracking, MNRS walk) and a
//!   trace ledger that composes nested charges.
//! * [`drivers`] — end-to-end solvers: brute force, classical baseline,
//!   grouped warm-up, partition-tree search, and the walk-shadowed
//!   arrangement solver.
//! * [`harness`] — instance files, bench sweeps, CSV output, log-log
//!   exponent fits, and the verification suites behind the `hoplab` CLI.
//!
//! Every solver computes its boolean answer by exact classical
//! evaluation; the cost model never perturbs answers. See the `examples/`
//! directory for one runnable example per capability.

pub mod arrangement;
pub mod drivers;
pub mod geom;
pub mod harness;
pub mod hiskip;
pub mod ptree;
pub mod qcost;
