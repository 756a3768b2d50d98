//! End-to-end acceptance battery: one line per criterion, then a single verdict.

use collective_lamb::validation::{self, CriterionReport, ValidationOptions};

fn run_timed(f: impl FnOnce() -> CriterionReport) -> CriterionReport {
    let start = std::time::Instant::now();
    let mut r = f();
    r.detail = format!("{} ({:.1} s)", r.detail, start.elapsed().as_secs_f64());
    println!("{}", r.line());
    r
}

#[test]
fn acceptance_criteria() {
    let opts = ValidationOptions::default();
    println!();
    let reports = vec![
        run_timed(validation::free_space_limit),
        run_timed(|| validation::self_consistency(opts.seed)),
        run_timed(validation::small_c_shift_law),
        run_timed(validation::figure_two_features),
        run_timed(|| validation::pair_term_reductions(opts.seed)),
        run_timed(|| validation::dynamics_oracle(opts.seed)),
        run_timed(|| validation::supplement_reduction(opts.seed)),
        run_timed(|| validation::ensemble_limits(&opts)),
        run_timed(|| validation::mc_vs_quadrature(&opts)),
        run_timed(|| validation::determinism(&opts)),
    ];
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{} of {} criteria passed", reports.len() - failed.len(), reports.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
