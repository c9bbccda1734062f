use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{MetricInstance, ScenarioSet};

/// Scenario family to attach to a random instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioSpec {
    /// `count` scenarios, each a uniformly random `size`-subset of `R2`.
    Explicit { count: usize, size: usize },
    Implicit { k: usize },
}

/// Uniform points in `[0, box_size]^2` with Euclidean distances.
pub fn gen_random_euclidean(
    n_r1: usize,
    n_r2: usize,
    n_d: usize,
    scenarios: &ScenarioSpec,
    box_size: f64,
    seed: u64,
) -> Result<MetricInstance> {
    if n_r1 == 0 || n_r2 == 0 || n_d == 0 {
        return Err(Error::InvalidArgument("counts must be positive".into()));
    }
    if !(box_size >= 0.0) || !box_size.is_finite() {
        return Err(Error::InvalidArgument(format!("bad box size {box_size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = n_r1 + n_r2 + n_d;
    let pts: Vec<(f64, f64)> = (0..nv)
        .map(|_| (rng.gen::<f64>() * box_size, rng.gen::<f64>() * box_size))
        .collect();
    let mut dist = vec![0.0; nv * nv];
    for u in 0..nv {
        for v in u + 1..nv {
            let d = (pts[u].0 - pts[v].0).hypot(pts[u].1 - pts[v].1);
            dist[u * nv + v] = d;
            dist[v * nv + u] = d;
        }
    }
    let set = match *scenarios {
        ScenarioSpec::Implicit { k } => ScenarioSet::Implicit { k },
        ScenarioSpec::Explicit { count, size } => {
            if size == 0 || size > n_r2 || count == 0 {
                return Err(Error::InvalidArgument(format!("cannot draw {count} scenarios of size {size} from {n_r2}")));
            }
            ScenarioSet::Explicit(
                (0..count)
                    .map(|_| {
                        let mut s = index::sample(&mut rng, n_r2, size).into_vec();
                        s.sort_unstable();
                        s
                    })
                    .collect(),
            )
        }
    };
    let labels = (0..n_r2).map(|j| format!("s{j}")).collect();
    MetricInstance::new(n_r1, labels, n_d, dist, set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn deterministic_and_metric() {
        let family = ScenarioSpec::Explicit { count: 3, size: 2 };
        let a = gen_random_euclidean(3, 5, 8, &family, 10.0, 7).unwrap();
        let b = gen_random_euclidean(3, 5, 8, &family, 10.0, 7).unwrap();
        assert_eq!(a, b);
        assert!(validate(&a).is_empty());
        let c = gen_random_euclidean(3, 5, 8, &family, 10.0, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_box() {
        let a = gen_random_euclidean(2, 2, 4, &ScenarioSpec::Implicit { k: 2 }, 0.0, 1).unwrap();
        assert!(a.dist_matrix().iter().all(|&x| x == 0.0));
    }
}
