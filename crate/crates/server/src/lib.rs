//! HTTP service hosting collaborative workbooks, and the `rdfsheet` CLI.

pub mod api;
pub mod cli;
pub mod session;

pub use api::router;
pub use session::{ChangeEvent, Registry, ServiceConfig};
