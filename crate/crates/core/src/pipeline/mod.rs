//! Parameter schedule, structural audit, error budget and the desk-scale experiments.

mod budget;
mod experiments;
mod schedule;

pub use budget::{error_budget, BudgetTerm, ErrorBudget, TermKind};
pub use experiments::{
    bootstrap_slope, default_xi_grid, density_checkpoints, density_experiment, gowers_decay, lipschitz_padding,
    s0_decay_experiment, DensityReport, DensityRow, GowersDecay, GowersRow, S0Decay, S0Row, SlopeFit,
};
pub use schedule::{
    audit_schedule, build_schedule, build_schedule_with, find_nu0, scan_grid, violations, AuditReport,
    ParameterSchedule, Rational, DEFAULT_SPLIT_CONSTANT,
};
