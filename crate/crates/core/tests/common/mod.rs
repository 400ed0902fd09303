//! Test-only oracles shared by integration tests.

#![allow(dead_code)]

use msr_core::aset::ASSet;
use msr_core::gf::Field;
use msr_core::linalg::Mat;

pub fn gf(q: u64) -> Field {
    Field::of_order(q).unwrap()
}

pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Materializes every square block submatrix of the parity block matrix
/// `[A_i^t]` (block rows i < k, block columns t < r) and checks each one.
pub fn brute_force_nonsingular(set: &ASSet) -> bool {
    let ell = set.ell;
    let powers: Vec<Vec<Mat>> =
        set.pairs.iter().map(|p| (0..set.r as u64).map(|t| p.a.pow(t).unwrap()).collect()).collect();
    for s in 1..=set.r {
        for rows in subsets(set.k(), s) {
            for cols in subsets(set.r, s) {
                let grid: Vec<Vec<&Mat>> =
                    rows.iter().map(|&i| cols.iter().map(|&t| &powers[i][t]).collect()).collect();
                if Mat::block(&grid).unwrap().rank() != s * ell {
                    return false;
                }
            }
        }
    }
    true
}
