//! Rough memory estimates checked against `THETA_MAX_MEM_MB`.

use theta_core::counting::fib_numbers;

use crate::{Failure, EXIT_UNSUPPORTED, EXIT_USAGE};

const ENV: &str = "THETA_MAX_MEM_MB";

/// Bytes per tree vertex, counting the vector header and allocation slack.
const NODE_BYTES: f64 = 48.0;

fn limit_bytes() -> Result<Option<f64>, Failure> {
    match std::env::var(ENV) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(|mb| Some(mb as f64 * 1024.0 * 1024.0))
            .map_err(|_| Failure { code: EXIT_USAGE, message: format!("{ENV} must be a whole number of megabytes, got {v:?}") }),
    }
}

/// Fails with exit code 3 when the estimate exceeds the cap.
pub fn check(estimate: f64) -> Result<(), Failure> {
    if let Some(limit) = limit_bytes()? {
        if estimate > limit {
            return Err(Failure {
                code: EXIT_UNSUPPORTED,
                message: format!(
                    "estimated memory {:.1} MB exceeds {ENV}={:.0}",
                    estimate / 1048576.0,
                    limit / 1048576.0
                ),
            });
        }
    }
    Ok(())
}

/// Number of level-trees of height `<= n` with `e` edges, as a float.
fn tree_count(n: usize, e: usize) -> f64 {
    // forests[h][k]: ordered forests of trees of height <= h with k edges in total
    let mut trees = vec![vec![0.0f64; e + 1]; n + 1];
    let mut forests = vec![vec![0.0f64; e + 1]; n + 1];
    for h in 0..=n {
        forests[h][0] = 1.0;
        trees[h][0] = 1.0;
        for k in 1..=e {
            if h > 0 {
                trees[h][k] = forests[h - 1][k];
            }
            // first tree has s edges plus its root edge
            forests[h][k] = (1..=k).map(|s| trees[h][s - 1] * forests[h][k - s]).sum();
        }
    }
    trees[n][e]
}

pub fn tree_listing_bytes(n: usize, edges: usize) -> f64 {
    tree_count(n, edges) * (edges as f64 + 1.0) * NODE_BYTES * 2.0
}

fn cells(n: usize, p: u64, d: usize) -> f64 {
    if d == 0 {
        return 1.0;
    }
    if d < n {
        return 0.0;
    }
    fib_numbers(n, p, d - n).ok().and_then(|f| f[d - n].to_string().parse().ok()).unwrap_or(f64::INFINITY)
}

pub fn census_bytes(n: usize, p: u64, max_dim: usize) -> f64 {
    // the census walks the pruned trees; their number is the p = 2 count
    (0..=max_dim).map(|d| cells(n, 2, d) * (d as f64 + 1.0) * NODE_BYTES).sum::<f64>() * 2.0 + p as f64
}

pub fn homology_bytes(n: usize, p: u64, max_dim: usize) -> f64 {
    (0..=max_dim)
        .map(|d| {
            let here = cells(n, p, d);
            let below = if d == 0 { 0.0 } else { cells(n, p, d - 1) };
            here * ((d as f64 + 1.0) * NODE_BYTES + 8.0 * d as f64 + 64.0) + here * below / 8.0
        })
        .sum::<f64>()
        * 4.0
}
