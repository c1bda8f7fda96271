//! Random isolation weights for one Monte-Carlo repetition.
//!
//! A run samples an independent weight in `1..=max_weight` for every
//! potential set member (vertex per vertex variable, edge per edge variable)
//! and for every arc slot (category pair x edge x direction x copy index).
//! The weights of one solution add up on a single monomial slot, so two
//! distinct solutions land on the same monomial only when their weight sums
//! collide; with `max_weight` at least twice the universe size, a uniquely
//! light solution exists with probability at least one half.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone)]
pub struct WeightScheme {
    pub seed: u64,
    pub stream: u64,
    pub max_weight: u64,
    /// per vertex variable: weight per vertex; `None` for cut-side variables
    /// that must not be weighted (their two-sided multiplicity is the point)
    pub vertex_weights: Vec<Option<Vec<u32>>>,
    /// per edge variable: weight per edge
    pub edge_weights: Vec<Vec<u32>>,
    /// `[pair][edge][direction][copy-1]`, direction 0 = from lower endpoint
    pub arc_weights: Vec<Vec<[Vec<u32>; 2]>>,
}

impl WeightScheme {
    /// Draw a full scheme. All positions are drawn in a fixed order so the
    /// scheme is a pure function of `(seed, stream)` and the dimensions;
    /// unweighted variables are blanked afterwards.
    #[allow(clippy::too_many_arguments)]
    pub fn sample(
        seed: u64,
        stream: u64,
        max_weight: u64,
        n: usize,
        m: usize,
        nvv: usize,
        nev: usize,
        ncat: usize,
        d: u32,
        unweighted_vertex_var: &[bool],
    ) -> WeightScheme {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let max_weight = max_weight.max(2);
        let mut vertex_weights = Vec::with_capacity(nvv);
        for _ in 0..nvv {
            let ws: Vec<u32> = (0..n)
                .map(|_| rng.gen_range(1..=max_weight) as u32)
                .collect();
            vertex_weights.push(Some(ws));
        }
        let mut edge_weights = Vec::with_capacity(nev);
        for _ in 0..nev {
            edge_weights.push(
                (0..m)
                    .map(|_| rng.gen_range(1..=max_weight) as u32)
                    .collect(),
            );
        }
        let mut arc_weights = Vec::with_capacity(ncat);
        for _ in 0..ncat {
            let mut per_edge = Vec::with_capacity(m);
            for _ in 0..m {
                let fwd: Vec<u32> = (0..d)
                    .map(|_| rng.gen_range(1..=max_weight) as u32)
                    .collect();
                let bwd: Vec<u32> = (0..d)
                    .map(|_| rng.gen_range(1..=max_weight) as u32)
                    .collect();
                per_edge.push([fwd, bwd]);
            }
            arc_weights.push(per_edge);
        }
        for (k, w) in vertex_weights.iter_mut().enumerate() {
            if k < unweighted_vertex_var.len() && unweighted_vertex_var[k] {
                *w = None;
            }
        }
        WeightScheme {
            seed,
            stream,
            max_weight,
            vertex_weights,
            edge_weights,
            arc_weights,
        }
    }
}
