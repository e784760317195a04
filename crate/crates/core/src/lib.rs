//! Exhaustive bounded verification of Kishon's poker game.
//!
//! Two players each pick a positive number, publish it in a single-writer
//! shared register, read the other player's register, and announce a verdict:
//! `1` for "I win", `-1` for "I lose", `0` for a tie or an undecided round.
//! The interesting claim is that the verdicts are never contradictory even
//! though reads and writes of the registers may overlap in time.
//!
//! The crate mechanizes both semantic accounts of that claim and checks them
//! exhaustively over bounded domains:
//!
//! * [`global_sem`] — the classical interleaved semantics: global states,
//!   atomic steps, an inductive invariant, and full history enumeration.
//! * [`executions`] — the event-based semantics: finite Tarskian structures
//!   whose events are partially ordered by temporal precedence, with serial,
//!   regular, and safe register specifications.
//! * [`bridge`] — the connection between the two: every interleaved history
//!   denotes an event structure in which both registers behave serially.
//!
//! Supporting modules: [`fol`] (finite first-order structures and formula
//! evaluation), [`orders`] (interval orders and their realizations),
//! [`protocol`] (the algorithm text itself), and [`nonrestricted`] (the
//! single-process history semantics used to state the local invariant).
//!
//! Every theorem-level claim is checked by two independent routes where
//! feasible — a first-order sentence evaluated by the generic model checker,
//! and a native procedural check — and the routes are asserted to agree.

pub mod bridge;
pub mod executions;
pub mod fol;
pub mod global_sem;
pub mod nonrestricted;
pub mod orders;
pub mod outcome;
pub mod protocol;
