use dehnscan_core::complexity::{compare_complexity, compare_extended};
use dehnscan_core::engine::enumerate::op6_decompose;
use dehnscan_core::engine::{base_configs, run_engine, EngineCaps};
use dehnscan_core::surface::pattern::tetra_pattern;

fn main() {
    // Gather all stage<=2 configs, then test each one's op6 children.
    let caps2 = EngineCaps { max_stages: 2, max_curve_crossings: 6, ..EngineCaps::default() };
    let run = run_engine(base_configs(&tetra_pattern()), caps2).unwrap();
    let caps = EngineCaps { max_stages: 3, max_curve_crossings: 6, ..EngineCaps::default() };
    let mut checked = 0;
    for rec in run.configs.values() {
        let cfg = &rec.config;
        let key = rec.key.clone();
        let Ok((kids, _)) = op6_decompose(cfg, &caps, &key) else { continue };
        let (pc, pe) = cfg.measures();
        for child in kids {
            let (cc, ce) = child.measures();
            let ok = match compare_complexity(&cc, &pc) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => compare_extended(&ce, &pe) == std::cmp::Ordering::Less,
                _ => false,
            };
            checked += 1;
            if !ok {
                println!("VIOLATION (stage {} parent, op {:?})", cfg.stage, cfg.op);
                println!("parent C = {:?} n={}", pc.set.triples(), pc.loaded_zero_handles);
                println!("child  C = {:?} n={}", cc.set.triples(), cc.loaded_zero_handles);
                println!("parent C+ = {:?} / child C+ = {:?}", pe.set.triples(), ce.set.triples());
                println!("parent balls:");
                for b in &cfg.balls {
                    println!("--- comps {:?} sutures {}", b.f_components().iter().map(|f| (f.discs.len(), f.bands.len(), f.index, f.gamma_touches)).collect::<Vec<_>>(), b.suture_arcs().len());
                }
                println!("PARENT SERIALIZED:");
                for b in &cfg.balls { println!("{}", b.serialize()); }
                println!("child balls:");
                for b in &child.balls {
                    println!("--- comps {:?} sutures {}", b.f_components().iter().map(|f| (f.discs.len(), f.bands.len(), f.index, f.gamma_touches)).collect::<Vec<_>>(), b.suture_arcs().len());
                }
                return;
            }
        }
    }
    println!("all {checked} transitions descend");
}
