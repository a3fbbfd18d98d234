//! Age-structured forest planning as a linear program, plus the majority
//! aggregation and entropy tools used alongside it.

pub mod forest_model;
pub mod info_measures;
pub mod lp_core;
pub mod planner;
pub mod social_choice;
