//! Runs verification suites from an inline configuration and prints the
//! terminal summary and the JSON report.

use holonomy_forge::suite::{run, SuiteConfig};

const CONFIG: &str = "
# warped Eguchi-Hanson base, a = 1
fixture = warped-eh
fixture.a = 1
suites = connection, codazzi, spinor
seed = 42
grid.samples = 10
tolerance.codazzi9 = 1e-7
";

fn main() -> holonomy_forge::Result<()> {
    let cfg = SuiteConfig::parse(CONFIG)?;
    let report = run(&cfg)?;
    print!("{}", report.text_summary());
    print!("{}", report.to_json(false));
    std::process::exit(report.exit_code());
}
