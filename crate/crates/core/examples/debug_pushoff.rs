use dehnscan_core::complexity::{compare_complexity, compare_extended};
use dehnscan_core::engine::enumerate::{enumerate_curves, op6_decompose};
use dehnscan_core::engine::{base_configs, run_engine, EngineCaps};
use dehnscan_core::surface::curves::{Curve, CurveSystem};
use dehnscan_core::surface::pattern::tetra_pattern;
use dehnscan_core::surface::split::split_along;
use dehnscan_core::surface::EdgeKind;

fn main() {
    let caps2 = EngineCaps { max_stages: 2, max_curve_crossings: 6, ..EngineCaps::default() };
    let run = run_engine(base_configs(&tetra_pattern()), caps2).unwrap();
    let caps = EngineCaps { max_stages: 3, max_curve_crossings: 6, ..EngineCaps::default() };
    for rec in run.configs.values() {
        let cfg = &rec.config;
        let Ok((kids, _)) = op6_decompose(cfg, &caps, &rec.key) else { continue };
        let (pc, pe) = cfg.measures();
        let bad = kids.iter().any(|child| {
            let (cc, ce) = child.measures();
            !matches!(compare_complexity(&cc, &pc), std::cmp::Ordering::Less)
                && !(compare_complexity(&cc, &pc) == std::cmp::Ordering::Equal
                    && compare_extended(&ce, &pe) == std::cmp::Ordering::Less)
        });
        if !bad { continue; }
        let ball = &cfg.balls[0];
        println!("=== violating parent: all-attach curve classes:");
        for class in enumerate_curves(ball, 6).unwrap() {
            if class.steps.iter().all(|s| ball.kind(s.dart) == EdgeKind::Attach) {
                let cs = CurveSystem::single(class.steps.clone(), class.co_side);
                let pieces = split_along(ball, &cs)
                    .map(|o| o.pieces.iter().flat_map(|p| p.sc.f_components()).map(|f| (f.discs.len(), f.bands.len(), f.index)).collect::<Vec<_>>())
                    .unwrap_or_default();
                let Curve::Crossing { steps, .. } = &cs.curves[0] else { unreachable!() };
                println!("len {} co={:?} trivial={} -> {:?} darts {:?}", steps.len(), class.co_side, class.pushoff_trivial, pieces, steps.iter().map(|s| s.dart).collect::<Vec<_>>());
            }
        }
        return;
    }
}
