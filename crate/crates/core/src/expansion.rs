//! Non-uniform expansion analysis of the planar map: Pliss hyperbolic
//! times, their frequency, central Lyapunov exponents, Birkhoff machinery,
//! and the phase-transition pressure scan.

use crate::error::{Error, Result};
use crate::maps::{self, MapParams, Point3};
use crate::measures::{self, MeasureApprox};
use crate::potentials::PotentialSpec;
use crate::symbolic::Word;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hyperbolic-time detection parameters.
#[derive(Debug, Clone, Copy)]
pub struct HypTimeParams {
    pub sigma_h: f64,
    pub eps_ball: f64,
}

impl HypTimeParams {
    pub fn new(sigma_h: f64, eps_ball: f64) -> Result<Self> {
        if !(sigma_h > 0.0 && sigma_h < 1.0) {
            return Err(Error::Range(format!("sigma_h = {sigma_h} not in (0,1)")));
        }
        if !(eps_ball > 0.0) {
            return Err(Error::Range(format!("eps_ball = {eps_ball} must be positive")));
        }
        Ok(HypTimeParams { sigma_h, eps_ball })
    }
}

/// Orbit data for hyperbolic-time detection: the points under `G` and the
/// per-step log of the weakest expansion of `DG`. Escapes truncate.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub points: Vec<Point3>,
    pub log_min_expansion: Vec<f64>,
}

impl OrbitRecord {
    /// Builds the record by iterating `G` from `p0` for up to `n` steps.
    pub fn from_planar_orbit(p0: &Point3, n: usize, params: &MapParams) -> Result<Self> {
        let mut points = vec![*p0];
        let mut logs = Vec::new();
        let mut cur = *p0;
        for _ in 0..n {
            let Ok(step_log) = maps::planar_g_log_min_expansion(&cur, params) else { break };
            let Ok(next) = maps::planar_g(&cur, params) else { break };
            logs.push(step_log);
            points.push(next);
            cur = next;
        }
        if logs.is_empty() {
            return Err(Error::Precondition("orbit leaves the domain immediately".into()));
        }
        Ok(OrbitRecord { points, log_min_expansion: logs })
    }

    /// Synthetic record from raw per-step logs (for the Pliss oracle tests).
    pub fn synthetic(logs: Vec<f64>) -> Self {
        OrbitRecord { points: Vec::new(), log_min_expansion: logs }
    }

    pub fn len(&self) -> usize {
        self.log_min_expansion.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_min_expansion.is_empty()
    }
}

/// Pliss criterion (derivative-cocycle surrogate for the ball definition):
/// `n` is flagged when for every `0 <= i < n` the window sum
/// `sum_{j=i}^{n-1} log_min_expansion[j]` is at least `(n-i) log(1/sigma_h)`.
pub fn hyperbolic_times(orbit: &OrbitRecord, params: &HypTimeParams) -> Vec<usize> {
    let c = (1.0 / params.sigma_h).ln();
    let mut out = Vec::new();
    let mut prefix = 0.0; // S_i - i c running value
    let mut max_prefix = 0.0f64; // max over i < n of (S_i - i c)
    for (n, step) in orbit.log_min_expansion.iter().enumerate() {
        max_prefix = max_prefix.max(prefix);
        prefix += step - c;
        // n+1 is hyperbolic iff S_{n+1} - (n+1)c >= max_{i<=n} (S_i - i c)
        if prefix >= max_prefix - 1e-12 {
            out.push(n + 1);
        }
    }
    out
}

/// Fraction of hyperbolic times among `1..=len`.
pub fn frequency_d(orbit: &OrbitRecord, params: &HypTimeParams) -> Result<f64> {
    if orbit.len() < 100 {
        return Err(Error::Precondition(format!("orbit length {} < 100", orbit.len())));
    }
    Ok(hyperbolic_times(orbit, params).len() as f64 / orbit.len() as f64)
}

/// `lambda^c(mu) = integral log|DF^c| dmu` via the central potential.
pub fn central_lyapunov(mu: &MeasureApprox, params: &MapParams) -> f64 {
    let phi = crate::potentials::central_potential(params);
    mu.integral(&phi)
}

/// Center coordinates of all periodic orbits with the given cyclic
/// itinerary. The `y` period map composes the time-1 flow on symbol 0 with
/// `y -> sigma (1 - y)` on symbol 1; fixed points are found by a
/// scan-and-bisect on `g(y) - y`, which is robust where the exponent is
/// close to neutral and window reconstructions converge too slowly.
pub fn periodic_center_points(cycle: &Word, params: &MapParams) -> Vec<f64> {
    let step = |y: f64, s: u8| -> f64 {
        if s == 0 {
            maps::flow_map(y, 1)
        } else {
            params.sigma() * (1.0 - y)
        }
    };
    let period_map = |y0: f64| -> f64 {
        let mut y = y0;
        for &s in cycle.bits() {
            y = step(y, s);
        }
        y
    };
    let g = |y: f64| period_map(y) - y;
    let n_scan = 8192;
    let mut roots: Vec<f64> = Vec::new();
    let push = |y: f64, roots: &mut Vec<f64>| {
        if !roots.iter().any(|r| (r - y).abs() < 1e-9) {
            roots.push(y);
        }
    };
    for i in 0..n_scan {
        let mut lo = i as f64 / n_scan as f64;
        let mut hi = (i + 1) as f64 / n_scan as f64;
        let (glo, ghi) = (g(lo), g(hi));
        if glo == 0.0 {
            push(lo, &mut roots);
            continue;
        }
        if glo * ghi > 0.0 {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        push(0.5 * (lo + hi), &mut roots);
    }
    if g(1.0) == 0.0 {
        push(1.0, &mut roots);
    }
    roots
}

/// Per-iterate central exponent of the periodic orbit through the center
/// coordinate `y_star` (one of [`periodic_center_points`]).
pub fn periodic_center_exponent(cycle: &Word, y_star: f64, params: &MapParams) -> f64 {
    let mut y = y_star;
    let mut sum = 0.0;
    for &s in cycle.bits() {
        if s == 0 {
            sum += maps::flow_derivative(y).ln();
            y = maps::flow_map(y, 1);
        } else {
            sum += params.sigma().ln();
            y = params.sigma() * (1.0 - y);
        }
    }
    sum / cycle.len() as f64
}

/// Per-iterate central exponents of all periodic orbits with the given
/// cyclic itinerary.
pub fn periodic_center_exponents(cycle: &Word, params: &MapParams) -> Vec<f64> {
    periodic_center_points(cycle, params)
        .into_iter()
        .map(|y| periodic_center_exponent(cycle, y, params))
        .collect()
}

/// The full periodic point with the given cyclic itinerary and center
/// coordinate: `x` is the limit of the forward (contracting) `x`-maps over
/// the repeated cycle, `z` the limit of the backward (contracting) `z`-maps.
pub fn periodic_point(cycle: &Word, y_star: f64, params: &MapParams) -> Point3 {
    let bits = cycle.bits();
    let mut x = 0.0f64;
    for _ in 0..200 {
        for &s in bits {
            x = if s == 0 { params.lambda0() * x } else { 0.75 - params.lambda0() * x };
        }
    }
    let mut z = 0.0f64;
    for _ in 0..200 {
        for &s in bits.iter().rev() {
            z = if s == 0 { z / params.beta0() } else { z / params.beta1() + 5.0 / 6.0 };
        }
    }
    Point3::new(x, y_star, z)
}

/// Dynamics selector for Birkhoff sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dynamics {
    F,
    FInv,
    G,
}

/// `S_n phi(p) = phi(p) + phi(f p) + ... + phi(f^{n-1} p)`.
pub fn birkhoff_sum(phi: &PotentialSpec, p: &Point3, n: usize, dynamics: Dynamics, params: &MapParams) -> Result<f64> {
    let mut cur = *p;
    let mut sum = 0.0;
    for k in 0..n {
        sum += phi.eval(&cur);
        if k + 1 < n {
            cur = match dynamics {
                Dynamics::F => maps::horseshoe_f(&cur, params),
                Dynamics::FInv => maps::horseshoe_f_inv_auto(&cur, params),
                Dynamics::G => maps::planar_g(&cur, params),
            }
            .map_err(|_| Error::Escape { index: k as i64 + 1 })?;
        }
    }
    Ok(sum)
}

/// Sampled lower bound for `R_{n,delta} phi(p) = sup over the dynamical
/// delta-ball of `S_n phi`. The center always participates.
pub fn sup_over_ball(
    phi: &PotentialSpec,
    p: &Point3,
    n: usize,
    delta: f64,
    samples: usize,
    dynamics: Dynamics,
    params: &MapParams,
    seed: u64,
) -> Result<f64> {
    let step = |q: &Point3| match dynamics {
        Dynamics::F => maps::horseshoe_f(q, params),
        Dynamics::FInv => maps::horseshoe_f_inv_auto(q, params),
        Dynamics::G => maps::planar_g(q, params),
    };
    // reference orbit
    let mut reference = Vec::with_capacity(n);
    let mut cur = *p;
    for k in 0..n {
        reference.push(cur);
        if k + 1 < n {
            cur = step(&cur).map_err(|_| Error::Escape { index: k as i64 + 1 })?;
        }
    }
    let mut best = birkhoff_sum(phi, p, n, dynamics, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'outer: for _ in 0..samples {
        let q0 = Point3::new(
            p.x + delta * (2.0 * rng.gen::<f64>() - 1.0),
            p.y + delta * (2.0 * rng.gen::<f64>() - 1.0),
            p.z + delta * (2.0 * rng.gen::<f64>() - 1.0),
        );
        let mut q = q0;
        let mut sum = 0.0;
        for (k, r) in reference.iter().enumerate() {
            if q.split_dist(r) > delta {
                continue 'outer;
            }
            sum += phi.eval(&q);
            if k + 1 < n {
                match step(&q) {
                    Ok(nq) => q = nq,
                    Err(_) => continue 'outer,
                }
            }
        }
        best = best.max(sum);
    }
    Ok(best)
}

/// One row of the pressure scan.
#[derive(Debug, Clone, Copy)]
pub struct PressureRow {
    pub t: f64,
    /// `t * lambda^c(delta_Q) = t` (the measure invisible to reconstruction).
    pub branch_q: f64,
    /// Markov block pressure of `t log|DF^c|`.
    pub branch_hyp: f64,
    pub p_hat: f64,
}

/// `P^(t) = max(t, markov pressure of t log|DF^c|)` over the grid.
pub fn pressure_curve(t_grid: &[f64], l: usize, params: &MapParams) -> Result<Vec<PressureRow>> {
    let phi = crate::potentials::central_potential(params);
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (_, branch_hyp) = measures::markov_equilibrium(&phi.scale(t), l, params)?;
        let branch_q = t;
        rows.push(PressureRow { t, branch_q, branch_hyp, p_hat: branch_q.max(branch_hyp) });
    }
    Ok(rows)
}

/// Finds the branch crossing on the grid: `t0_hat` by linear interpolation
/// of the branch difference, `slope_jump` as the difference of the one-sided
/// slopes of the dominating branches.
pub fn detect_phase_transition(curve: &[PressureRow]) -> Result<(f64, f64)> {
    for w in curve.windows(2) {
        let (a, b) = (w[0], w[1]);
        let da = a.branch_hyp - a.branch_q;
        let db = b.branch_hyp - b.branch_q;
        if da >= 0.0 && db < 0.0 {
            let s = da / (da - db);
            let t0 = a.t + s * (b.t - a.t);
            let hyp_slope = (b.branch_hyp - a.branch_hyp) / (b.t - a.t);
            let q_slope = (b.branch_q - a.branch_q) / (b.t - a.t);
            return Ok((t0, q_slope - hyp_slope));
        }
    }
    Err(Error::NotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials;
    use crate::symbolic::{self, Word};
    use approx::assert_abs_diff_eq;

    #[test]
    fn pliss_flags_uniform_expansion() {
        // all steps log 3 with sigma_h = 1/3: every time hyperbolic
        let orbit = OrbitRecord::synthetic(vec![3.0f64.ln(); 120]);
        let hp = HypTimeParams::new(1.0 / 3.0, 0.1).unwrap();
        assert_eq!(hyperbolic_times(&orbit, &hp).len(), 120);
        assert_abs_diff_eq!(frequency_d(&orbit, &hp).unwrap(), 1.0);
        // negative logs: none
        let orbit = OrbitRecord::synthetic(vec![-0.5; 120]);
        assert_eq!(hyperbolic_times(&orbit, &hp).len(), 0);
        assert_abs_diff_eq!(frequency_d(&orbit, &hp).unwrap(), 0.0);
    }

    #[test]
    fn pliss_lower_bound_on_synthetic_orbits() {
        // mean log expansion c > log(1/sigma_h) = h forces
        // d >= (c - h)/(A - h)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let hp = HypTimeParams::new(0.5, 0.1).unwrap();
        let h = 2.0f64.ln();
        for _ in 0..100 {
            let n = 400;
            let logs: Vec<f64> = (0..n).map(|_| h - 0.3 + 1.4 * rng.gen::<f64>()).collect();
            let mean = logs.iter().sum::<f64>() / n as f64;
            if mean <= h {
                continue;
            }
            let a = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let bound = (mean - h) / (a - h);
            let orbit = OrbitRecord::synthetic(logs);
            let d = frequency_d(&orbit, &hp).unwrap();
            assert!(d >= bound - 1e-9, "d = {d}, bound = {bound}");
        }
    }

    #[test]
    fn s2_orbits_fully_hyperbolic() {
        // in S2 both directions expand by at least 3 (alpha > 3, 1/sigma > 3)
        let params = MapParams::standard();
        let hp = HypTimeParams::new(1.0 / 3.0, 0.1).unwrap();
        let p = Point3::new(0.75 - 0.3 * 0.5, 0.1, 0.0);
        let log = maps::planar_g_log_min_expansion(&p, &params).unwrap();
        assert!(log >= 3.0f64.ln() - 1e-12);
        // a synthetic S2-confined record (true orbits leave S2, but each
        // step inside it contributes at least log 3)
        let orbit = OrbitRecord::synthetic(vec![log; 150]);
        assert_abs_diff_eq!(frequency_d(&orbit, &hp).unwrap(), 1.0);
    }

    #[test]
    fn fixed_point_orbit_expansion() {
        // G fixes (0, 1, 0); g0'(1) = e there, so all times are hyperbolic
        // once sigma_h > max(1/alpha, 1/e)
        let params = MapParams::standard();
        let p = Point3::new(0.0, 1.0, 0.0);
        let orbit = OrbitRecord::from_planar_orbit(&p, 150, &params).unwrap();
        assert_eq!(orbit.len(), 150);
        let expect = (1.0 / params.lambda0()).ln().min(1.0);
        for l in &orbit.log_min_expansion {
            assert_abs_diff_eq!(*l, expect, epsilon = 1e-9);
        }
        let hp = HypTimeParams::new(0.9, 0.1).unwrap();
        assert_abs_diff_eq!(frequency_d(&orbit, &hp).unwrap(), 1.0);
    }

    #[test]
    fn lingering_near_zero_has_no_hyperbolic_times() {
        // g0'(0) = 1/e < 1: while the Pliss sums stay negative, nothing is
        // flagged
        let logs = vec![-1.0 + 0.01; 120];
        let orbit = OrbitRecord::synthetic(logs);
        let hp = HypTimeParams::new(1.0 / 3.0, 0.1).unwrap();
        assert_eq!(hyperbolic_times(&orbit, &hp).len(), 0);
    }

    #[test]
    fn central_lyapunov_fixed_points() {
        let params = MapParams::standard();
        let dq = MeasureApprox::dirac(maps::Q);
        let dp = MeasureApprox::dirac(maps::P);
        assert_abs_diff_eq!(central_lyapunov(&dq, &params), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(central_lyapunov(&dp, &params), -1.0, epsilon = 1e-12);
        // finite-difference oracle at the fixed points
        let h = 1e-6;
        let fd_q = ((maps::flow_map(h, 1) - maps::flow_map(0.0, 1)) / h).ln();
        assert_abs_diff_eq!(fd_q, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn periodic_exponents_negative_with_symbol_one() {
        let params = MapParams::standard();
        for cycle in symbolic::enumerate_cycles(10) {
            if cycle.ones() == 0 {
                continue;
            }
            let exps = periodic_center_exponents(&cycle, &params);
            assert!(!exps.is_empty(), "cycle {cycle}: no periodic center orbit");
            for lam in exps {
                assert!(lam < 0.0, "cycle {cycle}: lambda^c = {lam}");
            }
        }
        // explicit period-2 value: (log sigma + log f'(y*))/2
        let mu = measures::periodic_measure(&Word::parse("10").unwrap(), &params).unwrap();
        let lam = central_lyapunov(&mu, &params);
        let g = |y: f64| maps::flow_map(params.sigma() * (1.0 - y), 1) - y;
        let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y_star = 0.5 * (lo + hi);
        // orbit: y* in R1, then sigma(1-y*) in R0
        let expect = (params.sigma().ln() + maps::flow_derivative(params.sigma() * (1.0 - y_star)).ln()) / 2.0;
        assert_abs_diff_eq!(lam, expect, epsilon = 1e-7);
        assert!(lam < 0.0);
    }

    #[test]
    fn birkhoff_sums() {
        let params = MapParams::standard();
        let phi = PotentialSpec::constant(0.7);
        // z = 0 is exactly invariant under the R0 branch, so the forward
        // orbit never leaves the domain
        let p = Point3::new(0.2, 0.3, 0.0);
        assert_abs_diff_eq!(birkhoff_sum(&phi, &p, 5, Dynamics::F, &params).unwrap(), 3.5, epsilon = 1e-12);
        // fixed point: n * phi(p)
        let psi = potentials::central_potential(&params);
        let s = birkhoff_sum(&psi, &maps::Q, 7, Dynamics::F, &params).unwrap();
        assert_abs_diff_eq!(s, 7.0 * psi.eval(&maps::Q), epsilon = 1e-12);
    }

    #[test]
    fn sup_over_ball_properties() {
        let params = MapParams::standard();
        // x = 0 is invariant under G1, so the orbit stays in S1
        let p = Point3::new(0.0, 0.4, 0.0);
        let c = PotentialSpec::constant(2.0);
        let v = sup_over_ball(&c, &p, 6, 0.01, 200, Dynamics::G, &params, 3).unwrap();
        assert_abs_diff_eq!(v, 12.0, epsilon = 1e-12);
        let phi = PotentialSpec::new("y", 1.0, 1.0, |q: &Point3| q.y).unwrap();
        let s = birkhoff_sum(&phi, &p, 6, Dynamics::G, &params).unwrap();
        let v1 = sup_over_ball(&phi, &p, 6, 0.005, 200, Dynamics::G, &params, 3).unwrap();
        let v2 = sup_over_ball(&phi, &p, 6, 0.01, 200, Dynamics::G, &params, 3).unwrap();
        assert!(v1 >= s);
        assert!(v2 + 1e-12 >= v1, "monotone in delta: {v2} < {v1}");
    }

    #[test]
    fn pressure_curve_endpoints() {
        let params = MapParams::standard();
        let rows = pressure_curve(&[0.0, 5.0], 6, &params).unwrap();
        assert_abs_diff_eq!(rows[0].branch_hyp, crate::h_top(), epsilon = 1e-9);
        assert!(rows[0].p_hat > rows[0].branch_q);
        // large t: the delta_Q branch dominates
        assert_abs_diff_eq!(rows[1].p_hat, 5.0, epsilon = 1e-9);
        assert!(rows[1].branch_hyp < 5.0);
    }

    #[test]
    fn detect_transition_two_line_oracle() {
        // branches t and log omega + t lambda with lambda < 0
        let lam = -0.8;
        let rows: Vec<PressureRow> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.05;
                let bq = t;
                let bh = crate::h_top() + t * lam;
                PressureRow { t, branch_q: bq, branch_hyp: bh, p_hat: bq.max(bh) }
            })
            .collect();
        let (t0, jump) = detect_phase_transition(&rows).unwrap();
        assert_abs_diff_eq!(t0, crate::h_top() / (1.0 - lam), epsilon = 1e-10);
        assert_abs_diff_eq!(jump, 1.0 - lam, epsilon = 1e-10);
        // no crossing
        let flat: Vec<PressureRow> = (0..10)
            .map(|i| {
                let t = i as f64 * 0.1;
                PressureRow { t, branch_q: t, branch_hyp: t - 1.0, p_hat: t }
            })
            .collect();
        assert!(matches!(detect_phase_transition(&flat), Err(Error::NotFound)));
    }

    #[test]
    fn p_hat_convex_and_dominates_t() {
        let params = MapParams::standard();
        let grid: Vec<f64> = (0..=12).map(|i| -0.5 + i as f64 * 0.25).collect();
        let rows = pressure_curve(&grid, 4, &params).unwrap();
        for r in &rows {
            assert!(r.p_hat >= r.t - 1e-12);
        }
        for w in rows.windows(3) {
            let second = w[2].p_hat - 2.0 * w[1].p_hat + w[0].p_hat;
            assert!(second >= -1e-9, "convexity violated at t = {}", w[1].t);
        }
    }
}
