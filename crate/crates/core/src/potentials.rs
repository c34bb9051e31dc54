//! Potential constructors and certificates: the admissible family that is
//! constant below a height `c0` and peaks at `Q`, projective examples built
//! from a transfer function, cohomology transforms, and the numeric checks
//! behind conditions (C1), (C2), (D1), (D2).

use crate::error::{Error, Result};
use crate::maps::{self, MapParams, Point3, Region};
use crate::measures::MeasureApprox;
use crate::symbolic;
use crate::thermo::VariationProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A real potential on the cube together with Hölder metadata
/// (exponent `xi`, constant `C`) used for tail pads and grid bounds.
#[derive(Clone)]
pub struct PotentialSpec {
    eval: Arc<dyn Fn(&Point3) -> f64 + Send + Sync>,
    holder_exponent: f64,
    holder_constant: f64,
    label: String,
}

impl std::fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("label", &self.label)
            .field("holder_exponent", &self.holder_exponent)
            .field("holder_constant", &self.holder_constant)
            .finish()
    }
}

fn random_slab_point(rng: &mut ChaCha8Rng) -> Point3 {
    let x: f64 = rng.gen();
    let y: f64 = rng.gen();
    let z: f64 = if rng.gen::<bool>() {
        rng.gen::<f64>() / 6.0
    } else {
        5.0 / 6.0 + rng.gen::<f64>() / 6.0
    };
    Point3::new(x, y, z)
}

impl PotentialSpec {
    /// Wraps an evaluator with its Hölder data. Spot-checks sampled two-point
    /// quotients against `C` (5% slack) on the two slabs.
    pub fn new<F>(label: &str, xi: f64, c: f64, f: F) -> Result<Self>
    where
        F: Fn(&Point3) -> f64 + Send + Sync + 'static,
    {
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(Error::Range(format!("holder exponent {xi} not in (0, 1]")));
        }
        if !(c >= 0.0) {
            return Err(Error::Range(format!("holder constant {c} negative")));
        }
        let spec = PotentialSpec {
            eval: Arc::new(f),
            holder_exponent: xi,
            holder_constant: c,
            label: label.to_string(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b9);
        for _ in 0..300 {
            let p = random_slab_point(&mut rng);
            let q = random_slab_point(&mut rng);
            let d = p.split_dist(&q);
            if d < 1e-6 {
                continue;
            }
            let quot = (spec.eval(&p) - spec.eval(&q)).abs() / d.powf(xi);
            if quot > c * 1.05 + 1e-12 {
                return Err(Error::Precondition(format!(
                    "sampled Holder quotient {quot:.6} exceeds C = {c} for {label}"
                )));
            }
        }
        Ok(spec)
    }

    pub fn constant(c: f64) -> Self {
        PotentialSpec {
            eval: Arc::new(move |_| c),
            holder_exponent: 1.0,
            holder_constant: 0.0,
            label: format!("const({c})"),
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn eval(&self, p: &Point3) -> f64 {
        (self.eval)(p)
    }

    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }

    pub fn holder_constant(&self) -> f64 {
        self.holder_constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `t * phi`, with the Hölder constant scaled accordingly.
    pub fn scale(&self, t: f64) -> Self {
        let inner = self.eval.clone();
        PotentialSpec {
            eval: Arc::new(move |p| t * inner(p)),
            holder_exponent: self.holder_exponent,
            holder_constant: self.holder_constant * t.abs(),
            label: format!("{} * {t}", self.label),
        }
    }

    /// `phi + c`.
    pub fn add_constant(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        PotentialSpec {
            eval: Arc::new(move |p| inner(p) + c),
            holder_exponent: self.holder_exponent,
            holder_constant: self.holder_constant,
            label: format!("{} + {c}", self.label),
        }
    }
}

/// `log |DF|` along the center direction as a potential: `log f'(y)` on the
/// lower slab, `log sigma` on the upper. Off-slab points are assigned by the
/// nearer plane so the evaluator is total; orbit code only feeds slab points.
pub fn central_potential(params: &MapParams) -> PotentialSpec {
    let sigma = params.sigma();
    PotentialSpec {
        eval: Arc::new(move |p: &Point3| {
            if p.z < 0.5 {
                maps::flow_derivative(p.y).ln()
            } else {
                sigma.ln()
            }
        }),
        holder_exponent: 1.0,
        // |d/dy log f'| <= 2(e-1) on [0,1]; the slab-to-slab jump over a
        // split distance >= 2/3 stays below this too
        holder_constant: 2.0 * (std::f64::consts::E - 1.0) + 1.0,
        label: "log|DF^c|".to_string(),
    }
}

/// The Prop-9.1-style family: constant below `c0`, Hölder ramp above.
#[derive(Debug, Clone)]
pub struct AdmissibleFamily {
    pub c0: f64,
    pub peak: f64,
    pub floor: f64,
    pub xi: f64,
    pub base: PotentialSpec,
}

impl AdmissibleFamily {
    pub fn new(c0: f64, peak: f64, floor: f64, xi: f64) -> Result<Self> {
        let base = example_potential(c0, peak, floor, xi)?;
        Ok(AdmissibleFamily { c0, peak, floor, xi, base })
    }

    /// `phi_t = t * base`.
    pub fn potential_at(&self, t: f64) -> PotentialSpec {
        self.base.scale(t)
    }

    /// `Var(phi_t) = t (phi(Q) - inf phi)`.
    pub fn variation_at(&self, t: f64) -> f64 {
        t * (self.peak - self.floor)
    }
}

/// `phi(p) = peak` for `z <= c0` and a Hölder ramp down to `floor` at
/// `z = 1`: `peak - (peak-floor) ((z-c0)/(1-c0))^xi`. Constant on the whole
/// set below `c0`, so `sup phi = phi(Q) = peak`.
pub fn example_potential(c0: f64, peak: f64, floor: f64, xi: f64) -> Result<PotentialSpec> {
    if !(c0 > 5.0 / 6.0 && c0 < 1.0) {
        return Err(Error::Range(format!("c0 = {c0} not in (5/6, 1)")));
    }
    if !(peak > floor) {
        return Err(Error::Range(format!("peak {peak} must exceed floor {floor}")));
    }
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::Range(format!("xi = {xi} not in (0, 1]")));
    }
    let holder = (peak - floor) / (1.0 - c0).powf(xi);
    let f = move |p: &Point3| {
        if p.z <= c0 {
            peak
        } else {
            peak - (peak - floor) * ((p.z - c0) / (1.0 - c0)).powf(xi)
        }
    };
    PotentialSpec::new(&format!("example(c0={c0})"), xi, holder, f)
}

/// Output of `t_interval`.
#[derive(Debug, Clone, Copy)]
pub struct TIntervalReport {
    pub t0: f64,
    pub t1_lower: f64,
    pub nonempty: bool,
}

/// `t0 = h_top / (2 (phi(Q) - inf phi))` in closed form (the variation of
/// `phi_t` is `t (phi(Q) - inf phi)`), and `t1_lower = h_top / (phi(Q) -
/// integral of phi against the maximal-entropy approximation)`.
pub fn t_interval(fam: &AdmissibleFamily, integral_mu_max: f64) -> Result<TIntervalReport> {
    let gap = fam.peak - fam.floor;
    if gap <= 0.0 {
        return Err(Error::Degenerate("phi(Q) = inf phi".into()));
    }
    let denom = fam.peak - integral_mu_max;
    if denom.abs() < 1e-14 {
        return Err(Error::Degenerate("phi(Q) equals the mu_max integral".into()));
    }
    let t0 = crate::h_top() / (2.0 * gap);
    let t1_lower = crate::h_top() / denom;
    Ok(TIntervalReport { t0, t1_lower, nonempty: t1_lower > t0 })
}

/// Three-valued certificate outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Report of the (C2) check `P_top(phi) > sup phi_n / n`.
#[derive(Debug, Clone)]
pub struct C2Report {
    /// Lower bound of `sup phi_n/n` from periodic orbits and fixed points.
    pub sup_lower: f64,
    /// Upper bound from a slab grid plus the Hölder modulus.
    pub sup_upper: f64,
    pub pressure_lower: f64,
    pub verdict: Verdict,
}

/// Brackets `sup_Lambda phi_n/n` (below: periodic itineraries to period 12
/// plus `Q`, `P`; above: slab grid plus modulus of continuity) and compares
/// with the pressure lower bound. Holds only in the conservative direction.
pub fn check_c2(phi: &PotentialSpec, n: usize, pressure_lower: f64, params: &MapParams) -> Result<C2Report> {
    if n < 1 {
        return Err(Error::Range("n must be >= 1".into()));
    }
    let mut sup_lower = phi.eval(&maps::Q).max(phi.eval(&maps::P));
    for cycle in symbolic::enumerate_cycles(12) {
        let Ok(win0) = symbolic::TwoSidedWindow::periodic(&cycle, 80) else { continue };
        let mut win = win0;
        let period = cycle.len();
        // orbit points by shifting the window; Birkhoff averages of length n
        // starting at every phase
        let mut vals = Vec::with_capacity(period);
        let mut ok = true;
        for _ in 0..period {
            match symbolic::point_from_itinerary(&win, params) {
                Ok((p, _)) => vals.push(phi.eval(&p)),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
            win = win.shifted()?;
        }
        if !ok {
            continue;
        }
        for start in 0..period {
            let avg: f64 = (0..n).map(|j| vals[(start + j) % period]).sum::<f64>() / n as f64;
            sup_lower = sup_lower.max(avg);
        }
    }
    // grid upper bound for sup phi (>= sup phi_n/n)
    let g = 20usize;
    let mut grid_max = f64::NEG_INFINITY;
    for ix in 0..=g {
        for iy in 0..=g {
            for iz in 0..=g {
                let x = ix as f64 / g as f64;
                let y = iy as f64 / g as f64;
                let zl = iz as f64 / (6.0 * g as f64);
                grid_max = grid_max.max(phi.eval(&Point3::new(x, y, zl)));
                grid_max = grid_max.max(phi.eval(&Point3::new(x, y, 5.0 / 6.0 + zl)));
            }
        }
    }
    let h = (1.0 + 1.0 + 1.0 / 6.0) / (2.0 * g as f64);
    let sup_upper = grid_max + phi.holder_constant() * h.powf(phi.holder_exponent());
    let verdict = if pressure_lower > sup_upper {
        Verdict::Holds
    } else if pressure_lower <= sup_lower {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    Ok(C2Report { sup_lower, sup_upper, pressure_lower, verdict })
}

/// (C1) certificate: builds the induced-potential table at `alpha`, estimates
/// `Var_k` for `k = 1..=10`, and fits `Var_k <= C a^k`.
pub fn check_c1(phi: &PotentialSpec, alpha: f64, k_alphabet: usize, params: &MapParams) -> Result<VariationProfile> {
    let k_values: Vec<usize> = (1..=10).collect();
    let mut var_lower = Vec::new();
    for &k in &k_values {
        let v = crate::thermo::variation_estimate(phi, alpha, k_alphabet, k, 60, k + 8, params, 7)?;
        var_lower.push(v);
    }
    Ok(VariationProfile::fit(k_values, var_lower))
}

/// Example 9.1: `phi = v - u o G` on the planar domain. Points are projected
/// by `pi` first; off-domain x is clamped into the S1 strip so the evaluator
/// is total.
pub fn projective_example(u: &PotentialSpec, v: &PotentialSpec, params: &MapParams) -> Result<PotentialSpec> {
    // precondition: v > u on a sample grid of the planar domain
    for p in planar_grid(16, params) {
        if v.eval(&p) <= u.eval(&p) {
            return Err(Error::Precondition(format!("v <= u at {p:?}")));
        }
    }
    let uu = u.clone();
    let vv = v.clone();
    let prm = *params;
    let c = u.holder_constant() * (1.0f64 / params.lambda0()).max(1.0 / params.sigma()) + v.holder_constant();
    let xi = u.holder_exponent().min(v.holder_exponent());
    Ok(PotentialSpec {
        eval: Arc::new(move |p: &Point3| {
            let q = normalize_planar(p, &prm);
            let gq = maps::planar_g(&q, &prm).unwrap_or(q);
            vv.eval(&q) - uu.eval(&gq)
        }),
        holder_exponent: xi,
        holder_constant: c,
        label: "v - u o G".to_string(),
    })
}

/// Projects to the planes and clamps x into the S1/S3 strip when the point
/// misses all three rectangles.
fn normalize_planar(p: &Point3, params: &MapParams) -> Point3 {
    let q = maps::projection_pi(p).unwrap_or(Point3::new(p.x, p.y, if p.z < 0.5 { 0.0 } else { 5.0 / 6.0 }));
    if maps::planar_region(&q, params) != Region::Outside {
        return q;
    }
    Point3::new(q.x.clamp(0.0, params.lambda0()), q.y.clamp(0.0, 1.0), q.z)
}

/// Deterministic sample of the three planar rectangles.
fn planar_grid(g: usize, params: &MapParams) -> Vec<Point3> {
    let mut pts = Vec::new();
    let l0 = params.lambda0();
    for i in 0..=g {
        for j in 0..=g {
            let s = i as f64 / g as f64;
            let t = j as f64 / g as f64;
            pts.push(Point3::new(s * l0, t, 0.0)); // S1
            pts.push(Point3::new(0.75 - l0 + s * l0, t * params.sigma(), 0.0)); // S2
            pts.push(Point3::new(s * l0, t, 5.0 / 6.0)); // S3
        }
    }
    pts
}

/// Report of the (D1) slack check `phi >= u - u o G`.
#[derive(Debug, Clone, Copy)]
pub struct D1Report {
    pub min_slack: f64,
    pub pass: bool,
}

/// Verifies `phi(p) >= u(p) - u(G(p))` over a planar grid; reports the
/// minimal slack.
pub fn check_d1(phi: &PotentialSpec, u: &PotentialSpec, grid: usize, params: &MapParams) -> D1Report {
    let mut min_slack = f64::INFINITY;
    for p in planar_grid(grid, params) {
        let Ok(gp) = maps::planar_g(&p, params) else { continue };
        let slack = phi.eval(&p) - (u.eval(&p) - u.eval(&gp));
        min_slack = min_slack.min(slack);
    }
    D1Report { min_slack, pass: min_slack >= -1e-12 }
}

/// Report of the (D2) surrogate over an explicit measure family.
#[derive(Debug, Clone, Copy)]
pub struct D2Report {
    pub sup_integral: f64,
    pub sup_entropy: f64,
    pub h_g: f64,
    pub pass: bool,
}

/// SURROGATE for (D2): `sup integral phi dnu < h(G) - sup h_nu(G)` evaluated
/// over the supplied stand-in family for the non-expanding measures (default
/// callers pass `delta_Q`, `delta_P` and convex combinations, all entropy 0).
/// A pass is a necessary condition, never a full certificate.
pub fn check_d2(phi: &PotentialSpec, family: &[MeasureApprox], h_g: f64) -> Result<D2Report> {
    if family.is_empty() {
        return Err(Error::Precondition("empty measure family".into()));
    }
    let mut sup_integral = f64::NEG_INFINITY;
    let mut sup_entropy = f64::NEG_INFINITY;
    for nu in family {
        sup_integral = sup_integral.max(nu.integral(phi));
        sup_entropy = sup_entropy.max(nu.entropy());
    }
    Ok(D2Report { sup_integral, sup_entropy, h_g, pass: sup_integral < h_g - sup_entropy })
}

/// Dynamics selector for `cohomology_shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDynamics {
    FInv,
    G,
}

/// Lemma 8.2 transform: `phi~(x) = (1-t) phi(x) + t phi(dyn(x))`, which is
/// cohomologous to `phi` with transfer function `-t phi`. Falls back to
/// `phi(x)` for the second term where the dynamics is undefined.
pub fn cohomology_shift(phi: &PotentialSpec, t: f64, dynamics: ShiftDynamics, params: &MapParams) -> PotentialSpec {
    let inner = phi.clone();
    let prm = *params;
    let lip = match dynamics {
        ShiftDynamics::FInv => (1.0 / params.lambda0()).max(std::f64::consts::E),
        ShiftDynamics::G => params.alpha_exp().max(1.0 / params.sigma()),
    };
    PotentialSpec {
        eval: Arc::new(move |p: &Point3| {
            let moved = match dynamics {
                ShiftDynamics::FInv => maps::horseshoe_f_inv_auto(p, &prm),
                ShiftDynamics::G => maps::planar_g(p, &prm),
            };
            let second = match moved {
                Ok(q) => inner.eval(&q),
                Err(_) => inner.eval(p),
            };
            (1.0 - t) * inner.eval(p) + t * second
        }),
        holder_exponent: phi.holder_exponent(),
        holder_constant: phi.holder_constant() * ((1.0 - t).abs() + t.abs() * lip.powf(phi.holder_exponent())),
        label: format!("cohomology_shift({}, t={t})", phi.label()),
    }
}

/// Lemma 8.3 weight: `phi(x) (1 + t d(x, cloud))` with the split-metric
/// distance to the point cloud. Equals `phi` on the cloud exactly. The
/// lemma's inequality `(1 + t d(Q, cloud)) phi(Q) < sup_cloud phi` is a
/// precondition for `t > 0`.
pub fn distance_weight(phi: &PotentialSpec, cloud: &[Point3], t: f64) -> Result<PotentialSpec> {
    if cloud.is_empty() {
        return Err(Error::Precondition("empty point cloud".into()));
    }
    let dist = {
        let cloud = cloud.to_vec();
        move |p: &Point3| cloud.iter().map(|c| p.split_dist(c)).fold(f64::INFINITY, f64::min)
    };
    if t > 0.0 {
        let sup_cloud = cloud.iter().map(|c| phi.eval(c)).fold(f64::NEG_INFINITY, f64::max);
        let lhs = (1.0 + t * dist(&maps::Q)) * phi.eval(&maps::Q);
        if lhs >= sup_cloud {
            return Err(Error::Precondition(format!(
                "weighted value at Q ({lhs}) not below the cloud supremum ({sup_cloud})"
            )));
        }
    }
    let inner = phi.clone();
    Ok(PotentialSpec {
        eval: Arc::new(move |p: &Point3| (1.0 + t * dist(p)) * inner.eval(p)),
        holder_exponent: phi.holder_exponent(),
        // d(., cloud) is 1-Lipschitz in the split metric; crude product bound
        holder_constant: phi.holder_constant() * (1.0 + t.abs() * 3.0) + t.abs() * 10.0,
        label: format!("distance_weight({}, t={t})", phi.label()),
    })
}

/// Report of the sup-at-Q hypothesis checks (Theorem D / Lemma 8.1 margins).
#[derive(Debug, Clone, Copy)]
pub struct SupAtQReport {
    pub sup_grid: f64,
    pub phi_q: f64,
    /// grid sup equals `phi(Q)` within tolerance
    pub sup_attained_at_q: bool,
    /// `phi(Q) < pressure_lower`
    pub theorem_d: bool,
    /// `phi(Q) - (pressure_lower - h_eta)` with `h_eta = log omega`
    pub lemma81_margin: f64,
}

pub fn sup_at_q_check(phi: &PotentialSpec, pressure_lower: f64, params: &MapParams) -> SupAtQReport {
    let mut sup_grid = f64::NEG_INFINITY;
    for p in planar_grid(40, params) {
        sup_grid = sup_grid.max(phi.eval(&p));
    }
    let phi_q = phi.eval(&maps::Q);
    SupAtQReport {
        sup_grid,
        phi_q,
        sup_attained_at_q: sup_grid <= phi_q + 1e-9,
        theorem_d: phi_q < pressure_lower,
        lemma81_margin: phi_q - (pressure_lower - crate::h_top()),
    }
}
