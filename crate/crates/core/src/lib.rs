//! Joint fleet deployment and bunker management for a tramp shipping fleet.
//!
//! A fleet of ships serves simultaneous pickup/delivery demands at customer
//! ports around a depot. Fuel burn per mile grows with displacement and the
//! square of cruise speed, fuel is bought under per-port incremental quantity
//! discounts, and every ship may instead be chartered out for a fixed revenue.
//!
//! The crate is organised around the decomposition used by the solver:
//!
//! * [`model`] — immutable domain types, the fuel-consumption and fuel-pricing
//!   laws, and instance validation.
//! * [`verify`] — an independent plan auditor that re-checks every model
//!   constraint on a proposed plan and recomputes its profit.
//! * [`singleship`] — optimal (to tolerance) planning for one ship forced to
//!   visit a given port set: route order, per-leg speeds, cargo quantities,
//!   bunkering ports and volumes.
//! * [`search`] — assignment-space optimization: sequential assignment
//!   evaluation, first-improvement neighborhood search, and a most-promising
//!   -area adaptive random search, plus the dead-port refinement pass.
//! * [`oracle`] — exhaustive discretized baseline for tiny instances, used to
//!   measure optimality gaps.
//!
//! All types are immutable after construction and every operation is pure, so
//! the data-parallel paths (permutation fan-out, sample batches, assignment
//! enumeration) are safe. Parallelism is provided by rayon behind the
//! `parallel` feature (on by default); disabling it yields a sequential build
//! with identical results.

pub mod model;
pub mod oracle;
pub mod par;
pub mod search;
pub mod simplex;
pub mod singleship;
pub mod verify;

pub use model::{
    bunker_cost, fuel_rate, Assignment, FleetPlan, Instance, Leg, ModelError, Port, PriceSchedule,
    PriceTier, Ship, ShipPlan, Visit,
};
pub use verify::{evaluate_fleet_plan, AuditReport, ConstraintClass, Violation};

/// Absolute slack used by feasibility checks on fuel, weight and time values
/// to absorb floating-point drift.
pub const FEAS_TOL: f64 = 1e-6;
