//! Run the exhaustive ground-truth sweeps: the three dimension-2
//! congruence case grids and the dimension-4 mod-16 representability
//! grid. All four must report zero failures.
//!
//! Run with: cargo run --release --example exhaustive_checks

use genus::oracle::{case_grid_failures, rep_dim4_failures, CaseGrid};

fn main() {
    for (name, grid) in [
        ("even block", CaseGrid::EvenBlock),
        ("odd block, even gap", CaseGrid::OddBlockEvenGap),
        ("odd block, odd gap", CaseGrid::OddBlockOddGap),
    ] {
        let failures = case_grid_failures(grid);
        println!("case grid `{name}`: {failures} failures");
    }
    println!("dimension-4 mod-16 grid: {} unsolvable cells", rep_dim4_failures());
}
