use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "info")]
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub pass: bool,
}

/// Checks run by one command, written to `report.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Report<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub checks: Vec<Check>,
}

impl<'a> Report<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Self {
            command: config.command_name(),
            config,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, value: f64, relation: Relation, bound: Option<f64>) {
        let pass = match (relation, bound) {
            (Relation::Below, Some(b)) => value < b,
            (Relation::Above, Some(b)) => value > b,
            (Relation::AtMost, Some(b)) => value <= b,
            _ => true,
        };
        self.checks.push(Check {
            name: name.to_string(),
            value,
            relation,
            bound,
            pass,
        });
    }

    pub fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, Relation::Below, Some(bound));
    }

    pub fn above(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, Relation::Above, Some(bound));
    }

    pub fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, Relation::AtMost, Some(bound));
    }

    pub fn info(&mut self, name: &str, value: f64) {
        self.push(name, value, Relation::Info, None);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        bandlattice::io::write_json_file(&dir.join("report.json"), self)?;
        Ok(())
    }

    pub fn print(&self) {
        for c in &self.checks {
            let verdict = match (c.relation, c.pass) {
                (Relation::Info, _) => "INFO",
                (_, true) => "PASS",
                (_, false) => "FAIL",
            };
            match c.bound {
                Some(b) => {
                    let rel = match c.relation {
                        Relation::Below => "<",
                        Relation::Above => ">",
                        _ => "<=",
                    };
                    println!("{verdict} {}: {:.3e} {rel} {:.1e}", c.name, c.value, b);
                }
                None => println!("{verdict} {}: {:.3e}", c.name, c.value),
            }
        }
    }
}
