//! Runs verification suites programmatically and prints the CSV summary.

use daugavet::config::RunConfig;
use daugavet::report::{summary_csv, Status};
use daugavet::suites::{run_suites, Context, Suite};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let mut config = RunConfig::default();
    config.seed = 11;
    config.samples.metric_triples = 100;
    let ctx = Context::new(config);
    let out = run_suites(&ctx, &[Suite::Metric, Suite::Spike, Suite::Stage])?;
    print!("{}", summary_csv(&out.reports));
    let failed = out.reports.iter().filter(|r| r.status == Status::Fail).count();
    println!("{} reports, {failed} failed", out.reports.len());
    Ok(())
}
