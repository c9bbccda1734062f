//! Two small line instances that defeat naive strategies.

use crate::error::{Error, Result};
use crate::model::{MetricInstance, ScenarioSet};

use super::on_line;

/// `m` riders and `m + 1` drivers alternating on a line, with one
/// second-stage rider past the right end.
///
/// Driver `i` sits at `i(2 - eps)` and rider `i` at `(i - 1)(2 - eps) + 1`,
/// so each rider is `1` from the driver on its left and `1 - eps` from the
/// driver on its right. Greedy takes every right-hand driver, leaving only
/// driver 0 for the late rider.
pub fn gen_line_counterexample(m: usize, eps: f64) -> Result<MetricInstance> {
    if m == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("need m >= 1 and 0 < eps < 1, got m={m}, eps={eps}")));
    }
    let step = 2.0 - eps;
    let drivers: Vec<f64> = (0..=m).map(|i| i as f64 * step).collect();
    let riders: Vec<f64> = (1..=m).map(|i| (i - 1) as f64 * step + 1.0).collect();
    let late = m as f64 * step + 1.0;
    on_line(&riders, &[late], vec!["late".into()], &drivers, ScenarioSet::Explicit(vec![vec![0]]))
}

/// Two mirrored chains with one spare driver and single-rider scenarios
/// `{s_a}` and `{s_b}` at the far ends.
///
/// Each chain has `m` first-stage riders. Preparing for either end alone
/// shifts the other chain onto its cheap edges and leaves the spare driver
/// about `1.5 m` from the opposite end.
pub fn gen_surplus_counterexample(m: usize) -> Result<MetricInstance> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need m >= 2, got {m}")));
    }
    const EPS: f64 = 0.5;
    const GAP: f64 = 2.0;
    let mut a = vec![1.0];
    let mut left = Vec::with_capacity(m);
    for _ in 0..m {
        let r = a.last().unwrap() + (1.0 - EPS);
        left.push(r);
        a.push(r + 1.0);
    }
    // b[m] sits right of a[m]; walking right, riders and drivers alternate
    // with the short edge on the b[i-1] side.
    let mut b = vec![0.0; m + 1];
    let mut right = vec![0.0; m];
    b[m] = a[m] + GAP;
    for i in (1..=m).rev() {
        right[i - 1] = b[i] + 1.0;
        b[i - 1] = right[i - 1] + (1.0 - EPS);
    }
    let s_b = b[0] + 1.0;
    let r1: Vec<f64> = left.into_iter().chain(right).collect();
    let drivers: Vec<f64> = a.into_iter().chain(b).collect();
    on_line(&r1, &[0.0, s_b], vec!["s_a".into(), "s_b".into()], &drivers, ScenarioSet::Implicit { k: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{surplus, validate};

    #[test]
    fn line_layout() {
        let inst = gen_line_counterexample(3, 0.1).unwrap();
        assert_eq!((inst.n_r1(), inst.n_r2(), inst.n_d()), (3, 1, 4));
        assert!(validate(&inst).is_empty());
        let nearest = (0..4).map(|k| inst.d_r2(0, k)).fold(f64::INFINITY, f64::min);
        assert!((nearest - 1.0).abs() < 1e-12);
    }

    #[test]
    fn surplus_layout() {
        let inst = gen_surplus_counterexample(3).unwrap();
        assert_eq!((inst.n_r1(), inst.n_r2(), inst.n_d()), (6, 2, 8));
        assert_eq!(surplus(&inst).unwrap(), 1);
        assert!(validate(&inst).is_empty());
        // The short edges of the right chain.
        for i in 1..=3 {
            assert!((inst.d_r1(3 + i - 1, 4 + i - 1) - 0.5).abs() < 1e-12);
        }
    }
}
