//! Config files: top-level `out`, `seed`, `threads`, plus one table per
//! command holding that command's flags, e.g.
//!
//! ```toml
//! seed = 7
//! out = "runs/sphere"
//!
//! [fit-kmeans]
//! data = "sphere.mrc"
//! k = 16
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::*;
use crate::error::CliError;

#[derive(Debug, Default)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    sections: toml::Table,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Globals {
    out: Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<usize>,
}

const SECTIONS: [&str; 9] = [
    "sample",
    "fit-kmeans",
    "fit-kflats",
    "bounds",
    "example1",
    "tradeoff",
    "rates",
    "select-k",
    "oracle-check",
];

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
            .map_err(|e| CliError::usage(format!("{}: {}", path.display(), e.message)))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::usage(e.message().to_string()))?;
        let mut sections = toml::Table::new();
        for name in SECTIONS {
            if let Some(v) = table.remove(name) {
                sections.insert(name.to_string(), v);
            }
        }
        let globals: Globals = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::usage(format!("config: {}", e.message())))?;
        for (name, value) in &sections {
            check_section(name, value)?;
        }
        Ok(Self {
            out: globals.out,
            seed: globals.seed,
            threads: globals.threads,
            sections,
        })
    }

    pub fn section(&self, name: &str) -> Option<&toml::Value> {
        self.sections.get(name)
    }
}

fn parse_section<T: DeserializeOwned>(name: &str, value: &toml::Value) -> Result<T, CliError> {
    value
        .clone()
        .try_into()
        .map_err(|e: toml::de::Error| CliError::usage(format!("config [{name}]: {}", e.message())))
}

fn check_section(name: &str, value: &toml::Value) -> Result<(), CliError> {
    match name {
        "sample" => parse_section::<SampleArgs>(name, value).map(drop),
        "fit-kmeans" => parse_section::<FitKmeansArgs>(name, value).map(drop),
        "fit-kflats" => parse_section::<FitKflatsArgs>(name, value).map(drop),
        "bounds" => parse_section::<BoundsArgs>(name, value).map(drop),
        "example1" => parse_section::<Example1Args>(name, value).map(drop),
        "tradeoff" => parse_section::<TradeoffArgs>(name, value).map(drop),
        "rates" => parse_section::<RatesArgs>(name, value).map(drop),
        "select-k" => parse_section::<SelectKArgs>(name, value).map(drop),
        "oracle-check" => parse_section::<OracleCheckArgs>(name, value).map(drop),
        _ => Err(CliError::usage(format!("config: unknown section [{name}]"))),
    }
}

/// Fills every flag left unset on the command line from the config section.
pub fn merge<T>(flags: &T, file: &FileConfig, name: &str) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned + Default,
{
    let Some(section) = file.section(name) else {
        return serde_json::from_value(to_json(flags)?).map_err(internal);
    };
    let base: T = parse_section(name, section)?;
    let mut merged = to_json(&base)?;
    if let (serde_json::Value::Object(m), serde_json::Value::Object(f)) =
        (&mut merged, to_json(flags)?)
    {
        for (key, value) in f {
            if !value.is_null() {
                m.insert(key, value);
            }
        }
    }
    serde_json::from_value(merged).map_err(internal)
}

fn to_json<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(internal)
}

fn internal(e: serde_json::Error) -> CliError {
    CliError::compute(format!("internal: {e}"))
}
