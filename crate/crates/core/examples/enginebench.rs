use dehnscan_core::engine::{base_configs, run_engine, EngineCaps};
use dehnscan_core::surface::pattern::tetra_pattern;
use std::time::Instant;

fn main() {
    let caps = EngineCaps::default();
    let t = Instant::now();
    let run = run_engine(base_configs(&tetra_pattern()), caps).unwrap();
    println!(
        "DEFAULT caps -> configs={} expanded={} dedup={} cap_events={} frontier={} in {:?}",
        run.configs.len(),
        run.stats.nodes_expanded,
        run.stats.dedup_hits,
        run.stats.cap_events.len(),
        run.stats.frontier.len(),
        t.elapsed()
    );
}
