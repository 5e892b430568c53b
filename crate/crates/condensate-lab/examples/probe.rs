//! Scratch probe for regime exploration (not part of the deliverable).

use condensate_lab::bulk_spectrum::OuterBc;
use condensate_lab::graph_spectrum::WeightSpec;
use condensate_lab::statmech::PhysicalParams;
use condensate_lab::thermo::{
    geometric_schedule, run_sweep, LatticeRule, SweepBulkModel, SweepContext,
};

fn ctx(params: PhysicalParams, delta: f64) -> SweepContext {
    SweepContext {
        d: 1.0,
        outer_bc: OuterBc::Dirichlet,
        lattice: Some(LatticeRule { delta, weight_spec: WeightSpec::Constant { value: 1.0 } }),
        params,
        bulk: SweepBulkModel::Separable,
        cache_dir: None,
    }
}

fn main() {
    let schedule_a = geometric_schedule(25.0, 400.0, 8);
    let schedule_b = geometric_schedule(25.0, 800.0, 8);
    println!("=== balance residual vs improved tolerance, delta=1 lambda=1 alpha=0.5 ===");
    for rho in [1.0, 5.0, 15.0, 20.0, 25.0, 30.0, 38.0, 42.0, 60.0, 80.0, 90.0] {
        let params = PhysicalParams { beta: 1.0, alpha: 0.5, lambda: 1.0, rho, nu: 2.0 };
        let sa = run_sweep(&ctx(params, 1.0), &schedule_a).unwrap();
        println!(
            "rho {rho:6.1}: a400 {:+.4e}  bal {:.3e} tol {:.3e} ok={} warn={:?}",
            sa.extrapolated.rho0_limit,
            sa.balance_residual,
            sa.balance_tolerance,
            sa.balance_residual <= sa.balance_tolerance,
            sa.warnings.len(),
        );
    }
    println!("=== doubled schedule at the high end ===");
    for rho in [60.0, 80.0, 90.0] {
        let params = PhysicalParams { beta: 1.0, alpha: 0.5, lambda: 1.0, rho, nu: 2.0 };
        let sb = run_sweep(&ctx(params, 1.0), &schedule_b).unwrap();
        println!(
            "rho {rho:6.1}: a800 {:+.4e}  bal {:.3e} tol {:.3e} ok={}",
            sb.extrapolated.rho0_limit,
            sb.balance_residual,
            sb.balance_tolerance,
            sb.balance_residual <= sb.balance_tolerance,
        );
    }
    println!("=== criterion 3 config: lambda=0 alpha=1 rho=1 delta=1 ===");
    let params = PhysicalParams { beta: 1.0, alpha: 1.0, lambda: 0.0, rho: 1.0, nu: 2.0 };
    let s = run_sweep(&ctx(params, 1.0), &schedule_a).unwrap();
    println!(
        "rho0 limit {:+.3e} bal {:.3e} tol {:.3e} mu_max {:.6}",
        s.extrapolated.rho0_limit,
        s.balance_residual,
        s.balance_tolerance,
        s.per_l.iter().map(|p| p.solution.mu).fold(f64::NEG_INFINITY, f64::max),
    );
}
