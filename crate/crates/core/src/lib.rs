pub mod branch;
pub mod calculus;
pub mod cli;
pub mod model;
pub mod oracle;
pub mod search;
pub mod syntax;
