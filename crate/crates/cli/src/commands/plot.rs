use std::path::PathBuf;

use camsim::metrics::plot::trend_svg;
use camsim::metrics::{EvalReport, REPORT_SCHEMA_VERSION};
use clap::Args;

use super::Failure;

#[derive(Args)]
pub struct PlotArgs {
    /// Report written by `eval`
    #[arg(long)]
    report: PathBuf,

    /// Output SVG file
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: PlotArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.report).map_err(|e| camsim::Error::io(&args.report, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(camsim::Error::from)?;
    let found = value.get("schema_version").and_then(serde_json::Value::as_u64).unwrap_or(0);
    if found != u64::from(REPORT_SCHEMA_VERSION) {
        return Err(Failure::Data(camsim::Error::SchemaVersion {
            found: found as u32,
            expected: REPORT_SCHEMA_VERSION,
        }));
    }
    let report: EvalReport = serde_json::from_value(value).map_err(camsim::Error::from)?;
    std::fs::write(&args.out, trend_svg(&report)).map_err(|e| camsim::Error::io(&args.out, e))?;
    Ok(())
}
