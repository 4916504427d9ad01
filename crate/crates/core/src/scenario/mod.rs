//! Configuration-driven scenario runs.

mod config;
mod run;

pub use config::{
    parse_config, parse_config_str, DynamicsSection, InitialState, OutputSection, ScenarioConfig,
    FM_MEV_HBAR, FM_MEV_MASS,
};
pub use run::{check, initial_state, json_number, run_scenario, CheckReport, RunArtifacts, RunOptions};
