//! Naive agglomeration used to cross-check [`super::agglomerate`].
//!
//! Every step recomputes every inter-cluster linkage from the raw
//! observations: point-pair distances for single, complete and average
//! linkage, explicit mean vectors for centroid linkage. Nothing is carried
//! between steps except cluster membership. O(n^4) or worse, so the input
//! size is bounded.

use super::{check_observations, Dendrogram, HacError, Linkage, Merge};

pub const DEFAULT_ORACLE_BOUND: usize = 64;

fn point_distance(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        let d = x[i] - y[i];
        acc += d * d;
    }
    acc.sqrt()
}

fn mean(vectors: &[Vec<f64>], members: &[usize]) -> Vec<f64> {
    let dim = vectors[0].len();
    let mut m = vec![0.0; dim];
    for &i in members {
        for (acc, x) in m.iter_mut().zip(&vectors[i]) {
            *acc += x;
        }
    }
    for v in &mut m {
        *v /= members.len() as f64;
    }
    m
}

fn linkage_distance(vectors: &[Vec<f64>], a: &[usize], b: &[usize], linkage: Linkage) -> f64 {
    match linkage {
        Linkage::Centroid => point_distance(&mean(vectors, a), &mean(vectors, b)),
        _ => {
            let pairs = a
                .iter()
                .flat_map(|&i| b.iter().map(move |&j| (i, j)))
                .map(|(i, j)| point_distance(&vectors[i], &vectors[j]));
            match linkage {
                Linkage::Single => pairs.fold(f64::INFINITY, f64::min),
                Linkage::Complete => pairs.fold(0.0, f64::max),
                _ => pairs.sum::<f64>() / (a.len() * b.len()) as f64,
            }
        }
    }
}

pub fn agglomerate_oracle(vectors: &[Vec<f64>], linkage: Linkage) -> Result<Dendrogram, HacError> {
    agglomerate_oracle_bounded(vectors, linkage, DEFAULT_ORACLE_BOUND)
}

pub fn agglomerate_oracle_bounded(
    vectors: &[Vec<f64>],
    linkage: Linkage,
    bound: usize,
) -> Result<Dendrogram, HacError> {
    check_observations(vectors)?;
    let n = vectors.len();
    if n > bound {
        return Err(HacError::OracleTooLarge { n, bound });
    }
    // (cluster id, leaf members), kept in ascending id order.
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    let mut next_id = n;
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let d = linkage_distance(vectors, &clusters[i].1, &clusters[j].1, linkage);
                let better = match best {
                    None => true,
                    Some((bd, bi, bj)) => {
                        d < bd
                            || (d == bd
                                && (clusters[i].0, clusters[j].0) < (clusters[bi].0, clusters[bj].0))
                    }
                };
                if better {
                    best = Some((d, i, j));
                }
            }
        }
        let (height, i, j) = best.expect("at least two clusters");
        let (right_id, right) = clusters.remove(j);
        let (left_id, left) = clusters.remove(i);
        let mut members = left;
        members.extend(right);
        merges.push(Merge {
            left: left_id,
            right: right_id,
            height,
            id: next_id,
            size: members.len(),
        });
        clusters.push((next_id, members));
        next_id += 1;
    }
    Ok(Dendrogram::from_merges(n, linkage, merges))
}
