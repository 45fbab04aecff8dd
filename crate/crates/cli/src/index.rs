use std::path::{Path, PathBuf};

use clap::Args;
use midasvol::rmtindex::{construct_index, default_groups, load_groups, GroupConfig};
use midasvol::timeseries::read_wide_monthly_csv;
use midasvol::{MonthlySeries, YearMonth};
use rayon::prelude::*;
use serde::Serialize;

use crate::{ensure_dir, out_dir, write_text, CliError, CliResult, ErrorKind};

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    /// Wide CSV (`month,<label>,...`) or a directory of `month,value` CSVs
    /// named after their labels.
    #[arg(long)]
    pub panel: PathBuf,
    /// Group definitions (TOML `[[group]]` tables); defaults to the bundled baskets.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub name: String,
    pub members: Vec<String>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_month: Option<YearMonth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_month: Option<YearMonth>,
    pub eigenvalues: Vec<f64>,
    pub leading_vector: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexSummary {
    pub schema_version: u32,
    pub groups: Vec<GroupSummary>,
}

pub fn load_panel(path: &Path) -> CliResult<Vec<MonthlySeries>> {
    if !path.is_dir() {
        return Ok(read_wide_monthly_csv(path)?);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();
    Ok(files.iter().map(MonthlySeries::read_csv).collect::<midasvol::Result<Vec<_>>>()?)
}

fn one_group(g: &GroupConfig, panel: &[MonthlySeries], dir: &Path) -> (GroupSummary, Option<CliError>) {
    let mut s = GroupSummary {
        name: g.name.clone(),
        members: g.members.clone(),
        ok: false,
        error: None,
        first_month: None,
        last_month: None,
        eigenvalues: Vec::new(),
        leading_vector: Vec::new(),
        weights: Vec::new(),
    };
    let res = construct_index(g, panel).map_err(CliError::from).and_then(|ep| {
        let index = ep.index.clone().expect("index filled by construct_index");
        index.write_csv(dir.join(format!("{}.csv", g.name)))?;
        Ok((ep, index))
    });
    match res {
        Ok((ep, index)) => {
            s.ok = true;
            s.first_month = index.first_month();
            s.last_month = index.last_month();
            s.eigenvalues = ep.eigenvalues;
            s.leading_vector = ep.leading_vector;
            s.weights = ep.weights;
            (s, None)
        }
        Err(e) => {
            s.error = Some(e.message.clone());
            (s, Some(e))
        }
    }
}

pub fn run(args: &IndexArgs) -> CliResult<()> {
    let groups = match &args.groups {
        Some(p) => load_groups(p)?,
        None => default_groups(),
    };
    let panel = load_panel(&args.panel)?;
    let dir = out_dir(&args.out);
    ensure_dir(&dir)?;
    let results: Vec<(GroupSummary, Option<CliError>)> =
        groups.par_iter().map(|g| one_group(g, &panel, &dir)).collect();

    let mut failures = Vec::new();
    for (s, err) in &results {
        match err {
            None => println!("{:<12} {} members, leading eigenvalue {:.4}", s.name, s.members.len(), s.eigenvalues[0]),
            Some(e) => {
                eprintln!("{:<12} failed: {}", s.name, e.message);
                failures.push(e.kind);
            }
        }
    }
    let summary = IndexSummary {
        schema_version: midasvol::estimate::SCHEMA_VERSION,
        groups: results.into_iter().map(|(s, _)| s).collect(),
    };
    let path = dir.join("index_summary.json");
    write_text(&path, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    println!("wrote {} index files and {}", summary.groups.len() - failures.len(), path.display());
    match failures.first() {
        None => Ok(()),
        Some(&kind) => Err(CliError {
            kind: if failures.contains(&ErrorKind::Usage) { ErrorKind::Usage } else { kind },
            message: format!("{} of {} groups failed", failures.len(), summary.groups.len()),
        }),
    }
}
