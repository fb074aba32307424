//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumint::complement::ComplementMap;
use sumint::exact::{int_vec_to_rat, IntVec, Matrix};
use sumint::geometry::{Cone, Polytope};
use sumint::io::parse_polytope;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// Corpus polytopes as `(file stem, polytope)`, sorted by name.
pub fn corpus() -> Vec<(String, Polytope)> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let name = f.file_stem().unwrap().to_string_lossy().into_owned();
            (
                name,
                parse_polytope(&fs::read_to_string(&f).unwrap()).unwrap(),
            )
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A non-standard positive definite Gram matrix per dimension.
pub fn gram_map(n: usize) -> ComplementMap {
    let rows: Vec<IntVec> = match n {
        1 => vec![vec![5]],
        2 => vec![vec![2, 1], vec![1, 3]],
        3 => vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 2]],
        _ => panic!("no Gram fixture for dimension {n}"),
    };
    ComplementMap::inner_product(Matrix::from_int_rows(&rows, n)).unwrap()
}

/// A flag generic for every cone met in the corpus.
pub fn flag_map(n: usize) -> ComplementMap {
    let rows: Vec<IntVec> = match n {
        1 => vec![vec![1]],
        2 => vec![vec![3, 7], vec![1, 0]],
        3 => vec![vec![3, 7, 19], vec![2, -5, 11], vec![0, 0, 1]],
        _ => panic!("no flag fixture for dimension {n}"),
    };
    ComplementMap::flag(rows.iter().map(|r| int_vec_to_rat(r)).collect()).unwrap()
}

/// Random unimodular matrix with entries in `[-bound, bound]`; its rows
/// generate a basic full-dimensional cone.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<IntVec> {
    loop {
        let mut m: Vec<IntVec> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        for _ in 0..3 * n {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            let c = if rng.random_bool(0.5) { 1 } else { -1 };
            let src = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(&src) {
                *x += c * y;
            }
        }
        for row in m.iter_mut() {
            if rng.random_bool(0.5) {
                row.iter_mut().for_each(|x| *x = -*x);
            }
        }
        if m.iter().flatten().all(|x| x.abs() <= bound) {
            return m;
        }
    }
}

pub fn random_basic_cone(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Cone {
    let c = Cone::new(random_unimodular(rng, n, bound), n).unwrap();
    assert!(c.is_basic());
    c
}

/// Random positive definite Gram matrix `A^T A + I`.
pub fn random_gram(rng: &mut ChaCha8Rng, n: usize) -> ComplementMap {
    let a: Vec<IntVec> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(-2..=2)).collect())
        .collect();
    let g: Vec<IntVec> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum::<i64>() + i64::from(i == j))
                .collect()
        })
        .collect();
    ComplementMap::inner_product(Matrix::from_int_rows(&g, n)).unwrap()
}

pub fn random_flag(rng: &mut ChaCha8Rng, n: usize) -> ComplementMap {
    loop {
        let rows: Vec<IntVec> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-9..=9)).collect())
            .collect();
        if let Ok(m) = ComplementMap::flag(rows.iter().map(|r| int_vec_to_rat(r)).collect()) {
            return m;
        }
    }
}
