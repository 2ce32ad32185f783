//! Engine worklist runs on the tetrahedral base pattern.

use dehnscan_core::engine::{base_configs, run_engine, EngineCaps};
use dehnscan_core::surface::pattern::tetra_pattern;

#[test]
fn base_stage_has_sixteen_states() {
    let bases = base_configs(&tetra_pattern());
    assert_eq!(bases.len(), 16);
    let caps = EngineCaps { max_stages: 1, ..EngineCaps::default() };
    let run = run_engine(bases, caps).unwrap();
    assert_eq!(run.configs.len(), 16);
    assert!(run.configs.values().all(|r| r.config.stage == 1));
    assert!(run.stats.cap_events.is_empty());
}

#[test]
fn empty_pattern_has_two_states() {
    use dehnscan_core::surface::{Orient, SphereComplex};
    let empty = SphereComplex::empty(Orient::In);
    let bases = base_configs(&empty);
    assert_eq!(bases.len(), 2);
    let caps = EngineCaps { max_stages: 1, ..EngineCaps::default() };
    let run = run_engine(bases, caps).unwrap();
    assert_eq!(run.configs.len(), 2);
}

#[test]
fn stage_two_descends_and_validates() {
    // One base (all regions inward) expanded one stage: every child passes
    // validation, and the engine's internal descent assertion held.
    let pattern = tetra_pattern();
    let bases = vec![base_configs(&pattern).into_iter().next().unwrap()];
    let caps = EngineCaps { max_stages: 2, max_curve_crossings: 4, ..EngineCaps::default() };
    let run = run_engine(bases, caps).unwrap();
    assert!(run.configs.len() > 1, "expansion must produce children");
    for rec in run.configs.values() {
        for ball in &rec.config.balls {
            ball.well_formed().unwrap();
        }
    }
    // Determinism: a second run yields the same key set.
    let pattern2 = tetra_pattern();
    let bases2 = vec![base_configs(&pattern2).into_iter().next().unwrap()];
    let run2 = run_engine(bases2, caps).unwrap();
    let keys1: Vec<_> = run.configs.keys().cloned().collect();
    let keys2: Vec<_> = run2.configs.keys().cloned().collect();
    assert_eq!(keys1, keys2);
}

#[test]
fn dedup_collapses_relabelings() {
    // Two bases that differ by a tetrahedral symmetry stay distinct under
    // anchored keys (they tile differently), but each reaches its own child
    // set; equal-key configs must produce equal child key sets.
    let pattern = tetra_pattern();
    let bases = base_configs(&pattern);
    let caps = EngineCaps { max_stages: 2, max_curve_crossings: 4, ..EngineCaps::default() };
    let a = run_engine(vec![bases[3].clone()], caps).unwrap();
    let b = run_engine(vec![bases[3].clone()], caps).unwrap();
    let ka: Vec<_> = a.configs.keys().cloned().collect();
    let kb: Vec<_> = b.configs.keys().cloned().collect();
    assert_eq!(ka, kb);
}
