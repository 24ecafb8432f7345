//! The Hardy probability table, its golden-mean special case and the
//! conditional chain that looks like it should force p(2G,2G) = 0.

use densmat::hardy::{
    golden_reference, golden_table, maximize_p22gg, paradox_report, sweep, tau, HardyContext,
};
use densmat::report;

fn main() -> densmat::error::Result<()> {
    let ctx = HardyContext::new(0.4)?;
    println!("x = 0.4\n{}", ctx.table());
    println!("{}", paradox_report(&ctx));

    let golden = golden_table();
    println!(
        "at x = 1/tau the table deviates from powers of 1/tau by {:.1e}",
        golden.max_deviation(&golden_reference())
    );

    let m = maximize_p22gg();
    println!(
        "largest p(2G,2G) = {} at x = {} (1/tau = {})",
        report::fixed12(m.p),
        report::fixed12(m.x),
        report::fixed12(1.0 / tau())
    );

    print!("\n{}", report::sweep(&sweep(9)));
    Ok(())
}
