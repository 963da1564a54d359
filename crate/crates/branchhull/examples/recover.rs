//! Plant a sparse pair, observe the entrywise product, recover it.
//!
//! ```sh
//! cargo run --release -p branchhull --example recover
//! ```

use branchhull::{balanced_scaling, make_instance, solve, SolverConfig};

fn main() -> branchhull::Result<()> {
    let (n, k, l, nonzeros, seed) = (60, 60, 70, 3, 2024);
    let instance = make_instance(n, k, l, nonzeros, seed)?;
    let solution = solve(&instance, &SolverConfig::noiseless(1.0))?;

    let (h, m) = instance.truth().expect("generated instances carry truth");
    let balanced = balanced_scaling(h, m)?;
    let err = ((&solution.h_hat - &balanced.h_tilde).norm_squared()
        + (&solution.m_hat - &balanced.m_tilde).norm_squared())
    .sqrt();

    println!("measurements      L = {l}, signal sizes K = {k}, N = {n}");
    println!("nonzeros per factor = {nonzeros}");
    println!("iterations          = {}", solution.iters_used);
    println!("converged           = {}", solution.converged);
    println!("objective           = {:.6}", solution.objective);
    println!("distance to balanced truth = {err:.3e}");
    let support: Vec<usize> = (0..k).filter(|&i| solution.h_hat[i].abs() > 1e-6).collect();
    println!("recovered h support = {support:?}");
    Ok(())
}
