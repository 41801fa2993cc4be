//! Command-line entry points, configuration, and every file the toolkit
//! reads or writes. No other module touches the filesystem.

pub mod cli;
pub mod config;
pub mod io;
pub mod replay;

pub use config::{CampaignConfig, FaultSelection, ScenarioSource};
pub use io::{load_scenario, load_scenarios, load_trace, load_verdict, save_trace, write_campaign, write_scenarios, VerdictFile};
pub use replay::{render_topdown, replay};
