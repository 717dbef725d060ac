use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::l2_dist;

#[derive(Debug, Clone)]
pub struct KmeansResult {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
}

fn nearest(centroids: &[Vec<f64>], p: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = l2_dist(c, p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Lloyd iterations from a seeded k-means++ initialization, until the
/// assignment reaches a fixpoint or 300 iterations. A cluster that empties
/// out is reseeded with the point farthest from its centroid assignment.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KmeansResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if points.len() < k {
        return Err(Error::InvalidParameter(format!(
            "{} points cannot form {k} clusters",
            points.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding: next centroid drawn with probability proportional
    // to squared distance from the chosen set
    let mut centroids: Vec<Vec<f64>> = vec![points[rng.gen_range(0..points.len())].clone()];
    while centroids.len() < k {
        let d2: Vec<f64> = points
            .iter()
            .map(|p| {
                let d = l2_dist(p, &centroids[nearest(&centroids, p)]);
                d * d
            })
            .collect();
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut t = rng.gen_range(0.0..total);
            let mut chosen = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if t < w {
                    chosen = i;
                    break;
                }
                t -= w;
            }
            chosen
        } else {
            // all points coincide with some centroid; any pick works
            rng.gen_range(0..points.len())
        };
        centroids.push(points[pick].clone());
    }

    let dim = points[0].len();
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(&centroids, p)).collect();
    for _ in 0..300 {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignment) {
            counts[a] += 1;
            for (s, &x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..points.len())
                    .max_by(|&i, &j| {
                        let di = l2_dist(&points[i], &centroids[assignment[i]]);
                        let dj = l2_dist(&points[j], &centroids[assignment[j]]);
                        di.partial_cmp(&dj).unwrap()
                    })
                    .unwrap();
                centroids[c] = points[far].clone();
            } else {
                for (dst, s) in centroids[c].iter_mut().zip(&sums[c]) {
                    *dst = s / counts[c] as f64;
                }
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(&centroids, p)).collect();
        if next == assignment {
            break;
        }
        assignment = next;
    }
    Ok(KmeansResult { centroids, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_blobs_are_recovered() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let centers = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]];
        let mut points = Vec::new();
        for c in &centers {
            for _ in 0..30 {
                points.push(vec![
                    c[0] + rng.gen_range(-0.5..0.5),
                    c[1] + rng.gen_range(-0.5..0.5),
                ]);
            }
        }
        let r = kmeans(&points, 3, 1).unwrap();
        // every blob lands in a single cluster
        for blob in 0..3 {
            let first = r.assignment[blob * 30];
            assert!(r.assignment[blob * 30..(blob + 1) * 30].iter().all(|&a| a == first));
        }
        let mut labels: Vec<usize> = r.assignment.clone();
        labels.dedup();
        assert_eq!(labels.len(), 3);
    }

    #[test]
    fn k_equal_to_point_count() {
        let points = vec![vec![0.0], vec![1.0], vec![2.0]];
        let r = kmeans(&points, 3, 7).unwrap();
        let mut seen: Vec<usize> = r.assignment.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 3);
        for (p, &a) in points.iter().zip(&r.assignment) {
            assert_eq!(r.centroids[a], *p);
        }
    }

    #[test]
    fn two_pairs_on_a_line() {
        let points = vec![vec![0.0], vec![0.1], vec![0.9], vec![1.0]];
        let r = kmeans(&points, 2, 3).unwrap();
        let mut cs: Vec<f64> = r.centroids.iter().map(|c| c[0]).collect();
        cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((cs[0] - 0.05).abs() < 1e-12);
        assert!((cs[1] - 0.95).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(kmeans(&[vec![0.0]], 2, 0).is_err());
        assert!(kmeans(&[vec![0.0]], 0, 0).is_err());
    }

    #[test]
    fn seed_determinism() {
        let points: Vec<Vec<f64>> = (0..50).map(|i| vec![(i % 7) as f64, (i % 3) as f64]).collect();
        let a = kmeans(&points, 4, 9).unwrap();
        let b = kmeans(&points, 4, 9).unwrap();
        assert_eq!(a.assignment, b.assignment);
    }
}
