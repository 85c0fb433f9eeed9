pub mod abstraction;
pub mod bandit;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod transfer;
