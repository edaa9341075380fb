//! Single-user utility under the Shapley mediator with optimal plain
//! content, its gradient, and the stationary point that minimizes it.
//!
//! With levels `σ^1 ≤ … ≤ σ^N`, the display probability of the `j`-th level
//! is `P_j = Σ_{m≤j} (σ^m − σ^{m−1}) / (N−m+1)` and the utility is
//! `U(σ) = Σ_j σ^j P_j + (1 − σ^N)`. `U` is quadratic, `∇U = Aσ − b`, so its
//! stationary point solves a symmetric linear system and `U* = 1 − σ*_N / 2`.
//!
//! Reindexing by `k = N − j + 1` turns `A` into the leading `N×N` block of a
//! single infinite matrix `R` with `R[k][k] = 2/k` and
//! `R[k][k'] = −1/((K−1)K)` for `K = max(k, k')`, and `b` into `e_1`. One
//! factorization of `R` therefore serves every `N` up to its size.

use std::io::Write;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::Ldlt;
use crate::scalar::Scalar;

/// Largest player count accepted by the dense solver.
pub const MAX_PLAYERS: usize = 5000;

/// Relative residual bound `‖Aσ − b‖ ≤ tol·‖b‖` for an accepted solution.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Slack for feasibility and minimality comparisons in floating point.
const FEASIBILITY_SLACK: f64 = 1e-12;

fn check_levels<S: Scalar>(sigma: &[S]) -> Result<()> {
    if sigma.is_empty() {
        return Err(Error::NonMonotone("empty satisfaction vector".into()));
    }
    if let Some(k) = sigma.iter().position(|v| *v < S::zero() || *v > S::one()) {
        return Err(Error::NonMonotone(format!(
            "entry {} = {} outside [0,1]",
            k + 1,
            sigma[k]
        )));
    }
    if let Some(k) = sigma.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::NonMonotone(format!(
            "entry {} = {} exceeds entry {} = {}",
            k + 1,
            sigma[k],
            k + 2,
            sigma[k + 1]
        )));
    }
    Ok(())
}

/// The utility polynomial, evaluated without validating its argument.
fn utility_polynomial<S: Scalar>(sigma: &[S]) -> S {
    let n = sigma.len() as i64;
    let mut prev = S::zero();
    let mut p = S::zero();
    let mut total = S::zero();
    for (m, &s) in sigma.iter().enumerate() {
        p = p + (s - prev) / S::from_int(n - m as i64);
        total = total + s * p;
        prev = s;
    }
    total + S::one() - prev
}

/// `U(σ)` for a non-decreasing vector in `[0,1]^N` with plain utility 1.
pub fn single_user_utility<S: Scalar>(sigma: &[S]) -> Result<S> {
    check_levels(sigma)?;
    Ok(utility_polynomial(sigma))
}

/// Closed-form `∇U(σ)` in `O(N)`:
/// `∂U/∂σ^k = P_k + c_k S_k − c_{k+1} S_{k+1} − [k = N]`, where
/// `c_k = 1/(N−k+1)` and `S_k = Σ_{j≥k} σ^j`.
pub fn utility_gradient<S: Scalar>(sigma: &[S]) -> Result<Vec<S>> {
    check_levels(sigma)?;
    Ok(gradient_polynomial(sigma))
}

fn gradient_polynomial<S: Scalar>(sigma: &[S]) -> Vec<S> {
    let n = sigma.len();
    let c = |k: usize| S::from_ratio(1, (n + 1 - k) as i64);
    let mut suffix = vec![S::zero(); n + 2];
    for k in (1..=n).rev() {
        suffix[k] = suffix[k + 1] + sigma[k - 1];
    }
    let mut prev = S::zero();
    let mut p = S::zero();
    (1..=n)
        .map(|k| {
            let s = sigma[k - 1];
            p = p + (s - prev) * c(k);
            prev = s;
            let tail = if k < n { c(k + 1) * suffix[k + 1] } else { S::zero() };
            let g = p + c(k) * suffix[k] - tail;
            if k == n {
                g - S::one()
            } else {
                g
            }
        })
        .collect()
}

/// Central finite differences of the utility polynomial with step `h`.
pub fn finite_difference_gradient(sigma: &[f64], h: f64) -> Vec<f64> {
    let mut x = sigma.to_vec();
    (0..sigma.len())
        .map(|k| {
            x[k] = sigma[k] + h;
            let up = utility_polynomial(&x);
            x[k] = sigma[k] - h;
            let down = utility_polynomial(&x);
            x[k] = sigma[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Largest `|closed form − finite difference| / max(|closed form|, 1)`.
pub fn gradient_check(sigma: &[f64]) -> Result<f64> {
    let exact = utility_gradient(sigma)?;
    let fd = finite_difference_gradient(sigma, 1e-5);
    Ok(exact
        .iter()
        .zip(&fd)
        .map(|(g, f)| (g - f).abs() / g.abs().max(1.0))
        .fold(0.0, f64::max))
}

/// The linear system `Aσ = b` expressing `∇U(σ) = 0` for `N` players,
/// indexed `1..=N` in ascending satisfaction order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StationarySystem {
    pub players: usize,
}

impl StationarySystem {
    pub fn new(players: usize) -> Result<Self> {
        if players == 0 || players > MAX_PLAYERS {
            return Err(Error::InvalidArgument(format!(
                "player count {players} not in 1..={MAX_PLAYERS}"
            )));
        }
        Ok(StationarySystem { players })
    }

    /// `A[j][m]`, 1-based.
    pub fn entry<S: Scalar>(&self, j: usize, m: usize) -> S {
        let n = self.players;
        if j == m {
            S::from_ratio(2, (n - j + 1) as i64)
        } else {
            let t = (n - j.min(m)) as i64;
            S::from_ratio(-1, t * (t + 1))
        }
    }

    /// `b[j]`, 1-based: one in the last row, zero elsewhere.
    pub fn rhs<S: Scalar>(&self, j: usize) -> S {
        if j == self.players {
            S::one()
        } else {
            S::zero()
        }
    }

    pub fn matrix<S: Scalar>(&self) -> Vec<Vec<S>> {
        (1..=self.players)
            .map(|j| (1..=self.players).map(|m| self.entry(j, m)).collect())
            .collect()
    }

    /// `‖Aσ − b‖₂ / ‖b‖₂`, evaluated densely.
    pub fn relative_residual(&self, sigma: &[f64]) -> f64 {
        let n = self.players;
        let sq: f64 = (1..=n)
            .map(|j| {
                let row: f64 = (1..=n).map(|m| self.entry::<f64>(j, m) * sigma[m - 1]).sum();
                let r = row - self.rhs::<f64>(j);
                r * r
            })
            .sum();
        sq.sqrt()
    }
}

/// `R[k][k']` of the reversed-index matrix, 1-based.
fn reversed_entry(k: usize, kp: usize) -> f64 {
    if k == kp {
        2.0 / k as f64
    } else {
        let big = k.max(kp) as f64;
        -1.0 / ((big - 1.0) * big)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Random monotone points compared against `U*`.
    pub minimality_samples: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            minimality_samples: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinimalityCheck {
    pub samples: usize,
    /// Smallest utility among the samples (`+∞` with zero samples).
    pub lowest_sampled: f64,
}

#[derive(Clone, Debug)]
pub struct StationaryPoint {
    pub players: usize,
    pub sigma: Vec<f64>,
    pub utility: f64,
    pub residual: f64,
    pub minimality: MinimalityCheck,
}

/// Factorization of the reversed-index matrix, reusable for every
/// `N ≤ capacity`.
#[derive(Clone, Debug)]
pub struct StationarySolver {
    factor: Ldlt,
}

impl StationarySolver {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 || capacity > MAX_PLAYERS {
            return Err(Error::InvalidArgument(format!(
                "player count {capacity} not in 1..={MAX_PLAYERS}"
            )));
        }
        Ok(StationarySolver {
            factor: Ldlt::factor(capacity, |i, k| reversed_entry(i + 1, k + 1))?,
        })
    }

    pub fn capacity(&self) -> usize {
        self.factor.dim()
    }

    pub fn solve(&self, players: usize, options: &SolveOptions) -> Result<StationaryPoint> {
        let system = StationarySystem::new(players)?;
        if players > self.capacity() {
            return Err(Error::InvalidArgument(format!(
                "N={players} exceeds solver capacity {}",
                self.capacity()
            )));
        }
        let mut e1 = vec![0.0; players];
        e1[0] = 1.0;
        let mut sigma = self.factor.solve_leading(&e1)?;
        sigma.reverse();

        let residual = system.relative_residual(&sigma);
        // Negated so that a NaN residual is rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(residual <= RESIDUAL_TOLERANCE) {
            return Err(Error::Solver(format!(
                "N={players}: relative residual {residual:e} above {RESIDUAL_TOLERANCE:e}"
            )));
        }
        check_feasible(players, &sigma)?;
        // Clear rounding-level excursions so the utility's domain check holds.
        let mut run = 0.0f64;
        for v in sigma.iter_mut() {
            run = run.max(v.clamp(0.0, 1.0));
            *v = run;
        }
        let utility = single_user_utility(&sigma)?;
        let minimality = sample_minimality(&sigma, utility, options)?;
        Ok(StationaryPoint {
            players,
            sigma,
            utility,
            residual,
            minimality,
        })
    }
}

fn check_feasible(players: usize, sigma: &[f64]) -> Result<()> {
    let infeasible = |reason: String| Err(Error::InfeasibleStationaryPoint { players, reason });
    if sigma[0] < -FEASIBILITY_SLACK {
        return infeasible(format!("σ_1 = {} is negative", sigma[0]));
    }
    if sigma[players - 1] > 1.0 + FEASIBILITY_SLACK {
        return infeasible(format!("σ_N = {} exceeds 1", sigma[players - 1]));
    }
    if let Some(k) = sigma.windows(2).position(|w| w[1] < w[0] - FEASIBILITY_SLACK) {
        return infeasible(format!("σ_{} = {} > σ_{} = {}", k + 1, sigma[k], k + 2, sigma[k + 1]));
    }
    Ok(())
}

/// Compares `U*` against random monotone points: half spread over the whole
/// box, half perturbations of the stationary point.
fn sample_minimality(star: &[f64], utility: f64, options: &SolveOptions) -> Result<MinimalityCheck> {
    let n = star.len();
    let mut rng = SmallRng::seed_from_u64(options.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let recip: Vec<f64> = (0..n).map(|m| 1.0 / (n - m) as f64).collect();
    let mut sigma = vec![0.0; n];
    let mut lowest = f64::INFINITY;
    for s in 0..options.minimality_samples {
        if s % 2 == 0 {
            // Normalized cumulative spacings, scaled into [0, top].
            let mut acc = 0.0;
            for v in sigma.iter_mut() {
                acc += rng.random::<f64>();
                *v = acc;
            }
            let scale = rng.random::<f64>() / (acc + rng.random::<f64>());
            for v in sigma.iter_mut() {
                *v *= scale;
            }
        } else {
            let radius = 10f64.powf(rng.random_range(-4.0..-0.5));
            let mut run = 0.0f64;
            for (v, &c) in sigma.iter_mut().zip(star) {
                let x = (c + radius * (2.0 * rng.random::<f64>() - 1.0)).clamp(0.0, 1.0);
                run = run.max(x);
                *v = run;
            }
        }
        let u = utility_with_reciprocals(&sigma, &recip);
        if u < utility - FEASIBILITY_SLACK {
            return Err(Error::NotMinimal {
                players: n,
                sampled: u,
                stationary: utility,
            });
        }
        lowest = lowest.min(u);
    }
    Ok(MinimalityCheck {
        samples: options.minimality_samples,
        lowest_sampled: lowest,
    })
}

/// Float evaluation of the utility polynomial with `recip[m] = 1/(N−m)`
/// precomputed (0-based `m`); samples are monotone by construction.
fn utility_with_reciprocals(sigma: &[f64], recip: &[f64]) -> f64 {
    let mut prev = 0.0;
    let mut p = 0.0;
    let mut total = 0.0;
    for (&s, &c) in sigma.iter().zip(recip) {
        p += (s - prev) * c;
        total += s * p;
        prev = s;
    }
    total + 1.0 - prev
}

pub fn solve_stationary(players: usize) -> Result<StationaryPoint> {
    solve_stationary_with(players, &SolveOptions::default())
}

pub fn solve_stationary_with(players: usize, options: &SolveOptions) -> Result<StationaryPoint> {
    StationarySolver::new(players)?.solve(players, options)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub players: usize,
    pub utility: f64,
    /// `1 / U*`.
    pub upoa_bound: f64,
    pub residual: f64,
}

/// `(N, U*)` for `N = 1..=n_max`, in increasing `N`.
pub fn min_utility_curve(n_max: usize) -> Result<Vec<CurvePoint>> {
    min_utility_curve_with(n_max, &SolveOptions::default())
}

pub fn min_utility_curve_with(n_max: usize, options: &SolveOptions) -> Result<Vec<CurvePoint>> {
    let solver = StationarySolver::new(n_max)?;
    (1..=n_max)
        .map(|n| {
            let p = solver.solve(n, options)?;
            Ok(CurvePoint {
                players: n,
                utility: p.utility,
                upoa_bound: 1.0 / p.utility,
                residual: p.residual,
            })
        })
        .collect()
}

pub const CURVE_CSV_HEADER: [&str; 4] = ["N", "U_star", "upoa_bound", "residual"];

pub fn write_curve_csv<W: Write>(points: &[CurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_CSV_HEADER)?;
    for p in points {
        w.write_record([
            p.players.to_string(),
            format!("{:.6}", p.utility),
            format!("{:.6}", p.upoa_bound),
            format!("{:.6e}", p.residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn utility_corner_values() {
        assert_eq!(single_user_utility(&[r(0, 1); 4]).unwrap(), r(1, 1));
        assert_eq!(single_user_utility(&[r(1, 1); 4]).unwrap(), r(1, 1));
        assert_eq!(single_user_utility(&[r(1, 2)]).unwrap(), r(3, 4));
        assert!(single_user_utility(&[r(1, 2), r(1, 4)]).is_err());
        assert!(single_user_utility(&[r(3, 2)]).is_err());
    }

    #[test]
    fn one_player_gradient() {
        // 2σ − 1
        assert_eq!(utility_gradient(&[r(1, 2)]).unwrap(), vec![r(0, 1)]);
        assert_eq!(utility_gradient(&[r(1, 5)]).unwrap(), vec![r(-3, 5)]);
    }

    #[test]
    fn gradient_is_affine_in_sigma() {
        // ∇U(σ) = Aσ − b with the system's A and b.
        let sigma = [r(1, 10), r(1, 4), r(1, 4), r(7, 10)];
        let sys = StationarySystem::new(4).unwrap();
        let g = utility_gradient(&sigma).unwrap();
        for j in 1..=4 {
            let row: Rational = (1..=4).map(|m| sys.entry::<Rational>(j, m) * sigma[m - 1]).sum();
            assert_eq!(g[j - 1], row - sys.rhs::<Rational>(j));
        }
    }

    #[test]
    fn system_is_symmetric_and_reversible() {
        let sys = StationarySystem::new(6).unwrap();
        let a = sys.matrix::<Rational>();
        for j in 0..6 {
            for m in 0..6 {
                assert_eq!(a[j][m], a[m][j]);
                assert_eq!(a[j][m].to_f64(), reversed_entry(6 - j, 6 - m));
            }
        }
        assert_eq!(a[5][5], r(2, 1));
        assert_eq!(a[0][0], r(1, 3));
    }

    #[test]
    fn one_player_stationary_point() {
        let p = solve_stationary(1).unwrap();
        assert_eq!(p.sigma, vec![0.5]);
        assert_eq!(p.utility, 0.75);
    }

    #[test]
    fn curve_agrees_with_direct_solves() {
        let opts = SolveOptions {
            minimality_samples: 50,
            seed: 1,
        };
        let curve = min_utility_curve_with(12, &opts).unwrap();
        for n in [1, 5, 12] {
            let direct = solve_stationary_with(n, &opts).unwrap();
            assert!((curve[n - 1].utility - direct.utility).abs() < 1e-14);
            assert!((direct.utility - (1.0 - direct.sigma[n - 1] / 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn float_fast_path_matches_generic() {
        let sigma = [0.05, 0.3, 0.3, 0.62, 0.99];
        let recip: Vec<f64> = (0..5).map(|m| 1.0 / (5 - m) as f64).collect();
        let a = utility_with_reciprocals(&sigma, &recip);
        let b = single_user_utility(&sigma).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(solve_stationary(0).is_err());
        assert!(StationarySystem::new(MAX_PLAYERS + 1).is_err());
    }
}
