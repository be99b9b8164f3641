pub mod checks;
pub mod run;
pub mod scenario;
