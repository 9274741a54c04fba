//! Data-parallel helpers. With the `parallel` feature (default) the maps run
//! on rayon; without it they fall back to plain sequential iteration. The
//! sequential variants stay available under either configuration so the
//! criterion benches can compare both in one build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn par_map<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(items: &[T], f: F) -> Vec<U> {
    items.par_iter().map(|t| f(t)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(|t| f(t)).collect()
}

pub fn seq_map<T, U, F: Fn(&T) -> U>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(|t| f(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_and_seq_agree() {
        let xs: Vec<u64> = (0..100).collect();
        assert_eq!(par_map(&xs, |x| x * x), seq_map(&xs, |x| x * x));
    }
}

use crate::arknit::ArWindow;
use crate::matrix::PREFILTER_PRIMES;
use crate::rep::{hom_dim, hom_dim_prefilter, HomDim};

const EXACT_COST_CAP: usize = 40_000;

fn pair_dim(w: &ArWindow, i: usize, j: usize) -> HomDim {
    let (m, n) = (&w.modules[i], &w.modules[j]);
    let unknowns: usize = m.dims.iter().zip(&n.dims).map(|(&a, &b)| a * b).sum();
    if unknowns * unknowns <= EXACT_COST_CAP {
        HomDim::Exact(hom_dim(m, n).expect("same algebra"))
    } else {
        hom_dim_prefilter(m, n, &PREFILTER_PRIMES)
    }
}

/// Pairwise hom dimensions over a window, one entry per ordered pair of
/// distinct modules. Parallel when the `parallel` feature is on.
pub fn hom_dim_table(w: &ArWindow) -> Vec<((usize, usize), HomDim)> {
    let n = w.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .collect();
    par_map(&pairs, |&(i, j)| ((i, j), pair_dim(w, i, j)))
}

/// Sequential reference implementation for the same table; kept for the
/// criterion benches to compare against the parallel path.
pub fn hom_dim_table_seq(w: &ArWindow) -> Vec<((usize, usize), HomDim)> {
    let n = w.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .collect();
    seq_map(&pairs, |&(i, j)| ((i, j), pair_dim(w, i, j)))
}

/// Projective dimensions of all window modules, in index order.
pub fn pd_table(w: &ArWindow, cap: usize) -> Vec<crate::homology::Dim> {
    let idx: Vec<usize> = (0..w.len()).collect();
    par_map(&idx, |&i| {
        crate::homology::proj_dim(&w.modules[i], cap).expect("pd computes")
    })
}

/// Sequential reference for the same computation.
pub fn pd_table_seq(w: &ArWindow, cap: usize) -> Vec<crate::homology::Dim> {
    let idx: Vec<usize> = (0..w.len()).collect();
    seq_map(&idx, |&i| {
        crate::homology::proj_dim(&w.modules[i], cap).expect("pd computes")
    })
}
