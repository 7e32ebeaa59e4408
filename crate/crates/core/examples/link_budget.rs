//! MCS table, CQI selection, BLER and goodput over an SINR sweep, plus the
//! acquisition overheads per user count.
//!
//! `cargo run --example link_budget`

use cran_rf::link::{
    bler, cqi_from_sinr, overhead_csi, overhead_position, realized_goodput, McsTable,
    OverheadConfig,
};
use cran_rf::ScenarioConfig;

fn main() -> cran_rf::Result<()> {
    let cfg = ScenarioConfig::default();
    let table = McsTable::default();
    print!("{}", table.to_text());

    let r = &cfg.radio;
    println!(
        "\n{:>8} {:>4} {:>8} {:>12}",
        "sinr_db", "cqi", "bler", "goodput_Mbps"
    );
    for k in 0..=16 {
        let s = -10.0 + 2.5 * k as f64;
        let cqi = cqi_from_sinr(s, &table);
        let g = realized_goodput(
            cqi,
            s,
            &table,
            r.bandwidth_hz,
            r.frame_s,
            r.goodput_interval_s(),
        );
        let b = if cqi == 0 { 1.0 } else { bler(cqi, s, &table) };
        println!("{s:>8.1} {cqi:>4} {b:>8.4} {:>12.2}", g / 1e6);
    }

    let oh = OverheadConfig::default();
    println!("\n{:>5} {:>10} {:>10}", "users", "OH_pos", "OH_CSI");
    for n in [1, 2, 4, 8, 12, 16, 20, 25, 30] {
        println!(
            "{n:>5} {:>10.5} {:>10.5}",
            overhead_position(&oh, n)?,
            overhead_csi(&oh, n)?
        );
    }
    Ok(())
}
