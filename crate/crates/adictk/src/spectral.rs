//! Operator norm estimates for the averaging operator of a walk, computed
//! on truncated balls.
//!
//! The operator is restricted to a word-metric ball with zero boundary
//! conditions, giving a finite matrix `A` with `A[x][x·s] = ν(s)` whenever
//! both points lie in the ball. Power iteration on `AᵀA` from the
//! normalized all-ones vector yields its largest singular value; for a
//! symmetric step distribution `A` is symmetric and the estimate is the
//! spectral radius of the truncation. The whole pipeline is deterministic,
//! and the per-iteration estimates are kept so callers can report the
//! convergence trace with explicit residuals.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::error::Error;
use crate::walk::{GroupElem, WalkSpec};

/// Breadth-first enumeration of the radius-`radius` ball around the
/// identity in the word metric of `support ∪ support^{-1}`. The returned
/// order (identity first, layer by layer, generators in sorted order) is
/// deterministic. Exceeding `cap` points aborts with `BallTooLarge`.
pub fn ball(spec: &WalkSpec, radius: usize, cap: usize) -> Result<Vec<GroupElem>, Error> {
    let group = spec.group();
    let mut gens: Vec<GroupElem> = Vec::new();
    for s in spec.support() {
        let inv = group.inverse(s)?;
        for g in [s.clone(), inv] {
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
    }
    gens.sort();

    let identity = group.identity();
    if cap == 0 {
        return Err(Error::BallTooLarge { size: 1, cap });
    }
    let mut seen: BTreeMap<GroupElem, ()> = BTreeMap::from([(identity.clone(), ())]);
    let mut order = vec![identity.clone()];
    let mut frontier = vec![identity];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = group.multiply(x, g)?;
                if !seen.contains_key(&y) {
                    if order.len() + 1 > cap {
                        return Err(Error::BallTooLarge {
                            size: order.len() + 1,
                            cap,
                        });
                    }
                    seen.insert(y.clone(), ());
                    order.push(y.clone());
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break; // the ball saturated the whole group
        }
        frontier = next;
    }
    Ok(order)
}

/// Convergence record of one estimation run. `estimates` holds the
/// singular-value iterate after every power step; the last entry is the
/// answer and successive differences bound the progress still being made.
#[derive(Clone, Debug)]
pub struct SpectralTrace {
    pub radius: usize,
    pub ball_size: usize,
    pub estimates: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl SpectralTrace {
    pub fn estimate(&self) -> f64 {
        *self.estimates.last().expect("at least one iteration")
    }

    /// Gap between the final two iterates (0 for a single iterate).
    pub fn residual(&self) -> f64 {
        match self.estimates.as_slice() {
            [.., a, b] => (b - a).abs(),
            _ => 0.0,
        }
    }
}

/// Stops when successive estimates agree to one part in 10^15.
const RELATIVE_TOLERANCE: f64 = 1e-15;

/// Estimates the norm of the averaging operator truncated to the ball of
/// the given radius (zero boundary conditions, i.e. a Dirichlet
/// truncation).
pub fn spectral_radius_estimate(
    spec: &WalkSpec,
    radius: usize,
    max_iterations: usize,
    cap: usize,
) -> Result<SpectralTrace, Error> {
    if max_iterations == 0 {
        return Err(Error::ZeroSamples);
    }
    let points = ball(spec, radius, cap)?;
    let n = points.len();
    let index: BTreeMap<&GroupElem, usize> =
        points.iter().enumerate().map(|(i, p)| (p, i)).collect();

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, x) in points.iter().enumerate() {
        for (s, weight) in spec.support().iter().zip(spec.nu()) {
            let y = spec.group().multiply(x, s)?;
            if let Some(&j) = index.get(&y) {
                rows[i].push((j, weight.to_f64().expect("weight fits f64")));
            }
        }
    }
    let forward = |v: &[f64]| {
        let mut out = vec![0.0; n];
        for (i, row) in rows.iter().enumerate() {
            for &(j, w) in row {
                out[i] += w * v[j];
            }
        }
        out
    };
    let transpose = |v: &[f64]| {
        let mut out = vec![0.0; n];
        for (i, row) in rows.iter().enumerate() {
            for &(j, w) in row {
                out[j] += w * v[i];
            }
        }
        out
    };

    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut estimates: Vec<f64> = Vec::new();
    let mut converged = false;
    for _ in 0..max_iterations {
        let av = forward(&v);
        let bv = transpose(&av);
        // v is unit, so the Rayleigh quotient of AᵀA at v is ‖Av‖²
        let lambda: f64 = av.iter().map(|x| x * x).sum();
        estimates.push(lambda.sqrt());
        if let [.., previous, latest] = estimates.as_slice() {
            if (latest - previous).abs() <= RELATIVE_TOLERANCE * latest.max(1.0) {
                converged = true;
                break;
            }
        }
        let norm = bv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            converged = true; // truncation annihilates the positive cone
            break;
        }
        v = bv.into_iter().map(|x| x / norm).collect();
    }
    Ok(SpectralTrace {
        radius,
        ball_size: n,
        iterations: estimates.len(),
        converged,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::Group;
    use std::f64::consts::PI;

    fn simple(group: Group) -> WalkSpec {
        WalkSpec::symmetric_simple(group).unwrap()
    }

    #[test]
    fn ball_sizes_match_the_group_geometry() {
        let z = simple(Group::Integers { dims: 1 });
        for radius in 0..=6 {
            assert_eq!(ball(&z, radius, 1 << 20).unwrap().len(), 2 * radius + 1);
        }
        let f2 = simple(Group::Free { rank: 2 });
        for (radius, expected) in [(0, 1), (1, 5), (2, 17), (3, 53), (4, 161), (5, 485)] {
            assert_eq!(ball(&f2, radius, 1 << 20).unwrap().len(), expected);
        }
        // cyclic balls saturate
        let z7 = simple(Group::Cyclic { modulus: 7 });
        assert_eq!(ball(&z7, 3, 1 << 20).unwrap().len(), 7);
        assert_eq!(ball(&z7, 40, 1 << 20).unwrap().len(), 7);
    }

    #[test]
    fn ball_is_deterministic_and_rooted_at_the_identity() {
        let f2 = simple(Group::Free { rank: 2 });
        let a = ball(&f2, 3, 1 << 20).unwrap();
        let b = ball(&f2, 3, 1 << 20).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0], f2.group().identity());
    }

    #[test]
    fn oversized_balls_are_refused() {
        let f2 = simple(Group::Free { rank: 2 });
        match ball(&f2, 3, 50) {
            Err(Error::BallTooLarge { size, cap }) => {
                assert_eq!(cap, 50);
                assert_eq!(size, 51);
            }
            other => panic!("expected BallTooLarge, got {other:?}"),
        }
        assert!(spectral_radius_estimate(&f2, 3, 100, 50).is_err());
    }

    #[test]
    fn cyclic_walk_has_unit_norm() {
        let z7 = simple(Group::Cyclic { modulus: 7 });
        let trace = spectral_radius_estimate(&z7, 3, 1000, 1 << 20).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.ball_size, 7);
        assert!(
            (trace.estimate() - 1.0).abs() < 1e-12,
            "{}",
            trace.estimate()
        );
    }

    #[test]
    fn lattice_truncations_match_the_cosine_law() {
        // Dirichlet truncation of the symmetric walk on Z at radius R is a
        // tridiagonal matrix with eigenvalues cos(kπ / (2R + 2))
        let z = simple(Group::Integers { dims: 1 });
        for radius in [1usize, 2, 4, 8] {
            let trace = spectral_radius_estimate(&z, radius, 200_000, 1 << 20).unwrap();
            assert!(trace.converged);
            let exact = (PI / (2.0 * radius as f64 + 2.0)).cos();
            assert!(
                (trace.estimate() - exact).abs() < 1e-9,
                "radius {radius}: {} vs {exact}",
                trace.estimate()
            );
        }
    }

    #[test]
    fn free_group_radius_one_norm_is_one_half() {
        let f2 = simple(Group::Free { rank: 2 });
        let trace = spectral_radius_estimate(&f2, 1, 100_000, 1 << 20).unwrap();
        assert!(trace.converged);
        assert!(
            (trace.estimate() - 0.5).abs() < 1e-9,
            "{}",
            trace.estimate()
        );
    }

    #[test]
    fn estimates_climb_monotonically() {
        let z = simple(Group::Integers { dims: 1 });
        let trace = spectral_radius_estimate(&z, 6, 50_000, 1 << 20).unwrap();
        for pair in trace.estimates.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12);
        }
        assert_eq!(trace.iterations, trace.estimates.len());
        assert!(trace.residual() <= 1e-14);
    }

    #[test]
    fn runs_are_bitwise_reproducible() {
        let f2 = simple(Group::Free { rank: 2 });
        let a = spectral_radius_estimate(&f2, 3, 10_000, 1 << 20).unwrap();
        let b = spectral_radius_estimate(&f2, 3, 10_000, 1 << 20).unwrap();
        assert_eq!(a.estimates, b.estimates);
    }

    #[test]
    fn zero_iterations_are_rejected() {
        let z = simple(Group::Integers { dims: 1 });
        assert!(matches!(
            spectral_radius_estimate(&z, 2, 0, 1 << 20),
            Err(Error::ZeroSamples)
        ));
    }
}
