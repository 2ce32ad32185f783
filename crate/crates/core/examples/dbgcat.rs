use dehnscan_core::engine::catalog::write_catalog;
use dehnscan_core::engine::{base_configs, run_engine, EngineCaps};
use dehnscan_core::surface::pattern::tetra_pattern;
fn main() {
    let caps = EngineCaps { max_stages: 2, max_curve_crossings: 4, ..Default::default() };
    let bases = vec![base_configs(&tetra_pattern()).into_iter().next().unwrap()];
    let run = run_engine(bases, caps).unwrap();
    let text = write_catalog(&run);
    for l in text.lines().take(6) { println!("{l}"); }
}
