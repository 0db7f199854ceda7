//! Attack models: independent node compromise estimated by Monte Carlo, and a
//! resource-bounded adversary choosing where to spend its budget.

mod correlated;
mod monte_carlo;

pub use correlated::{
    appendix1_crossover, correlated_grid_oracle, correlated_grid_oracle_with_slopes,
    correlated_optimal_attack, crossover_threshold, grid_resolution_gap, single_path_extrema,
    Crossover, GridSearchResult, ResourceAttack, CROSSOVER_REGIME, GRID_NODE_CAP, GRID_STEP_CAP,
};
pub use monte_carlo::{
    batch_rng, simulate_uncorrelated, write_mc_csv, McRow, MonteCarloResult, BATCH_TRIALS,
};
