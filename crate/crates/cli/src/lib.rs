//! Command-line frontend for the homotopy continuation tracker: JSON system
//! and solution documents, a multi-threaded path driver, and the experiment
//! harness behind `padtrack experiment`.

pub mod experiments;
pub mod formats;
pub mod runner;
pub mod systems;
