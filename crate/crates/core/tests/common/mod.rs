#![allow(dead_code)]

use std::path::PathBuf;

use forestkit::edgelist::parse_digraph;
use forestkit::{Matrix, WeightedDigraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn fixture_paths() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "edges"))
        .collect();
    paths.sort();
    paths
}

pub fn fixture(name: &str) -> WeightedDigraph {
    let text = std::fs::read_to_string(fixtures_dir().join(name)).expect("fixture");
    parse_digraph(&text).expect("valid fixture")
}

pub fn fixtures() -> Vec<WeightedDigraph> {
    fixture_paths()
        .iter()
        .map(|p| parse_digraph(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect()
}

pub fn path3() -> WeightedDigraph {
    WeightedDigraph::build(3, &[(1, 2, 1.0), (2, 3, 1.0)]).unwrap()
}

/// A digraph with `n` vertices where each ordered pair carries an arc with
/// probability `density`, weights drawn from `weight_range`.
pub fn random_digraph(rng: &mut impl Rng, n: usize, density: f64, weight_range: (f64, f64)) -> WeightedDigraph {
    let mut arcs = Vec::new();
    for t in 1..=n {
        for h in 1..=n {
            if t != h && rng.random::<f64>() < density {
                let w = rng.random_range(weight_range.0..=weight_range.1);
                arcs.push((t, h, w));
            }
        }
    }
    WeightedDigraph::build(n, &arcs).unwrap()
}

/// `count` random digraphs with `2..=max_n` vertices and mixed densities.
pub fn random_family(seed: u64, count: usize, max_n: usize, weight_range: (f64, f64)) -> Vec<WeightedDigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=max_n);
            let density = rng.random_range(0.1..0.9);
            random_digraph(&mut rng, n, density, weight_range)
        })
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Relabels vertex `v` as `perm[v]`.
pub fn permuted(g: &WeightedDigraph, perm: &[usize]) -> WeightedDigraph {
    let arcs: Vec<(usize, usize, f64)> = g
        .arcs()
        .map(|a| (perm[a.tail] + 1, perm[a.head] + 1, a.weight))
        .collect();
    WeightedDigraph::build(g.n(), &arcs).unwrap()
}

/// `m` with rows and columns relabeled by `perm`.
pub fn permuted_matrix(m: &Matrix, perm: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(perm[i], perm[j])] = m[(i, j)];
        }
    }
    out
}

/// One representative per isomorphism class of digraphs on `n` vertices whose
/// arc weights come from `weights` (absent arcs allowed).
pub fn exhaustive_classes(n: usize, weights: &[f64]) -> Vec<WeightedDigraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|t| (0..n).filter(move |&h| h != t).map(move |h| (t, h)))
        .collect();
    let index = |t: usize, h: usize| pairs.iter().position(|&p| p == (t, h)).unwrap();
    let perms = permutations(n);
    let remap: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|&(t, h)| index(p[t], p[h])).collect())
        .collect();
    let base = weights.len() + 1;
    let total = base.pow(pairs.len() as u32);
    let mut code = vec![0u8; pairs.len()];
    let mut image = vec![0u8; pairs.len()];
    let mut classes = Vec::new();
    for mut c in 0..total {
        for slot in code.iter_mut() {
            *slot = (c % base) as u8;
            c /= base;
        }
        let canonical = remap.iter().all(|map| {
            for (slot, &target) in map.iter().enumerate() {
                image[target] = code[slot];
            }
            image.iter().rev().cmp(code.iter().rev()) != std::cmp::Ordering::Less
        });
        if canonical {
            let arcs: Vec<(usize, usize, f64)> = pairs
                .iter()
                .zip(&code)
                .filter(|(_, &c)| c > 0)
                .map(|(&(t, h), &c)| (t + 1, h + 1, weights[c as usize - 1]))
                .collect();
            classes.push(WeightedDigraph::build(n, &arcs).unwrap());
        }
    }
    classes
}

/// Proptest strategy for digraphs with `2..=max_n` vertices.
pub fn arb_digraph(max_n: usize) -> impl Strategy<Value = WeightedDigraph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let slots = n * (n - 1);
            (
                Just(n),
                proptest::collection::vec(proptest::option::weighted(0.45, 0.1f64..4.0), slots),
            )
        })
        .prop_map(|(n, ws)| {
            let mut arcs = Vec::new();
            let mut it = ws.into_iter();
            for t in 1..=n {
                for h in 1..=n {
                    if t != h {
                        if let Some(w) = it.next().unwrap() {
                            arcs.push((t, h, w));
                        }
                    }
                }
            }
            WeightedDigraph::build(n, &arcs).unwrap()
        })
}

/// Like [`arb_digraph`] but with weights in `(0, 1]`.
pub fn arb_probability_digraph(max_n: usize) -> impl Strategy<Value = WeightedDigraph> {
    arb_digraph(max_n).prop_map(|g| {
        let arcs: Vec<(usize, usize, f64)> = g
            .arcs()
            .map(|a| (a.tail + 1, a.head + 1, (a.weight / 4.0).min(1.0)))
            .collect();
        WeightedDigraph::build(g.n(), &arcs).unwrap()
    })
}

pub fn max_abs(m: &Matrix) -> f64 {
    forestkit::linalg::max_abs(m)
}
