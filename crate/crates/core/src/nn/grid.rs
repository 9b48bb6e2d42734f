use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Exec;

use super::features::SampleSet;
use super::spec::Architecture;
use super::train::{train, TrainConfig};

pub const GRID_WIDTHS: [usize; 3] = [32, 64, 128];
pub const GRID_DEPTH: usize = 5;

/// Every hidden-width assignment over the default widths, lexicographic.
pub fn full_grid() -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..GRID_DEPTH {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                GRID_WIDTHS.iter().map(move |&w| {
                    let mut v = prefix.clone();
                    v.push(w);
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub hidden: Vec<usize>,
    pub final_test_loss: f64,
    pub best_test_loss: f64,
}

/// Trains every candidate and ranks by final test loss. Candidates run in
/// parallel under `exec`; each training run itself is sequential.
pub fn grid_search<F>(
    candidates: &[Vec<usize>],
    make_arch: F,
    out_scale: &[f64; 5],
    train_set: &SampleSet,
    test_set: &SampleSet,
    cfg: &TrainConfig,
    exec: Exec,
) -> Result<Vec<GridResult>>
where
    F: Fn(Vec<usize>) -> Architecture + Sync + Send,
{
    let inner = TrainConfig {
        exec: Exec::Sequential,
        ..*cfg
    };
    let mut results = exec.try_map(candidates.len(), |i| {
        let hidden = candidates[i].clone();
        log::info!("grid candidate {}/{}: {hidden:?}", i + 1, candidates.len());
        let out = train(make_arch(hidden.clone()), out_scale, train_set, test_set, &inner)?;
        let best = out
            .history
            .iter()
            .skip(1)
            .map(|r| r.test_loss)
            .fold(f64::INFINITY, f64::min);
        Ok::<_, crate::Error>(GridResult {
            hidden,
            final_test_loss: out.final_test_loss(),
            best_test_loss: best,
        })
    })?;
    results.sort_by(|a, b| a.final_test_loss.total_cmp(&b.final_test_loss));
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_space_size() {
        let g = full_grid();
        assert_eq!(g.len(), 243);
        assert_eq!(g[0], vec![32; 5]);
        assert_eq!(g[242], vec![128; 5]);
        let mut dedup = g.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 243);
    }
}
