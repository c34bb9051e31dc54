//! Invariant-measure approximations: atomic measures on periodic orbits,
//! Gibbs-Markov block measures over 11-free words, entropy and pressure
//! evaluation, pushforward under the projection, and correlation decay.

use crate::error::{Error, Result};
use crate::maps::{self, MapParams, Point3};
use crate::potentials::PotentialSpec;
use crate::symbolic::{self, count_admissible, is_admissible, TwoSidedWindow, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gibbs-Markov measure over 11-free `L`-blocks: a stochastic transition
/// matrix, its stationary vector, and one evaluation point per block.
#[derive(Debug, Clone)]
pub struct MarkovBlockMeasure {
    l: usize,
    blocks: Vec<Vec<u8>>,
    trans: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    context: Vec<Point3>,
    entropy: f64,
}

impl MarkovBlockMeasure {
    pub fn block_len(&self) -> usize {
        self.l
    }
    pub fn blocks(&self) -> &[Vec<u8>] {
        &self.blocks
    }
    pub fn transition(&self) -> &[Vec<f64>] {
        &self.trans
    }
    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }
    pub fn context_points(&self) -> &[Point3] {
        &self.context
    }
}

/// An invariant-measure approximation: finitely many atoms, or a Markov
/// block measure.
#[derive(Debug, Clone)]
pub enum MeasureApprox {
    Atomic { atoms: Vec<(Point3, f64)> },
    Markov(MarkovBlockMeasure),
}

impl MeasureApprox {
    pub fn dirac(p: Point3) -> Self {
        MeasureApprox::Atomic { atoms: vec![(p, 1.0)] }
    }

    /// Entropy: 0 for atomic measures on periodic orbits; the closed form
    /// `-sum pi_b P_bb' log P_bb'` for Markov.
    pub fn entropy(&self) -> f64 {
        match self {
            MeasureApprox::Atomic { .. } => 0.0,
            MeasureApprox::Markov(m) => m.entropy,
        }
    }

    /// `integral phi dmu`: atom-weighted sum, or the stationary average over
    /// block contexts.
    pub fn integral(&self, phi: &PotentialSpec) -> f64 {
        match self {
            MeasureApprox::Atomic { atoms } => atoms.iter().map(|(p, w)| w * phi.eval(p)).sum(),
            MeasureApprox::Markov(m) => m
                .stationary
                .iter()
                .zip(&m.context)
                .map(|(pi, p)| pi * phi.eval(p))
                .sum(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            MeasureApprox::Atomic { atoms } => atoms.iter().map(|(_, w)| w).sum(),
            MeasureApprox::Markov(m) => m.stationary.iter().sum(),
        }
    }
}

/// The canonical non-expanding suspects: `delta_Q`, `delta_P`, and two convex
/// combinations. All atomic with entropy 0.
pub fn dirac_family(_params: &MapParams) -> Vec<MeasureApprox> {
    vec![
        MeasureApprox::dirac(maps::Q),
        MeasureApprox::dirac(maps::P),
        MeasureApprox::Atomic { atoms: vec![(maps::Q, 0.5), (maps::P, 0.5)] },
        MeasureApprox::Atomic { atoms: vec![(maps::Q, 0.25), (maps::P, 0.75)] },
    ]
}

/// Equidistribution on the reconstructed periodic orbit of a cyclically
/// admissible word. The all-zero cycle lands on `delta_P` (reconstruction
/// convention; `delta_Q` is adjoined separately where needed).
pub fn periodic_measure(cycle: &Word, params: &MapParams) -> Result<MeasureApprox> {
    let mut win = TwoSidedWindow::periodic(cycle, 80)?;
    let p = cycle.len();
    let w = 1.0 / p as f64;
    let mut atoms = Vec::with_capacity(p);
    for _ in 0..p {
        let (pt, _) = symbolic::point_from_itinerary(&win, params)?;
        atoms.push((pt, w));
        win = win.shifted()?;
    }
    Ok(MeasureApprox::Atomic { atoms })
}

/// Entropy estimate report.
#[derive(Debug, Clone, Copy)]
pub struct EntropyReport {
    /// `log((1+sqrt 5)/2)` from the 2x2 adjacency matrix eigenvalue.
    pub spectral: f64,
    /// `log` of the ratio of admissible word counts at lengths `n` and
    /// `n - 1`; the ratio estimator sheds the `O(log C / n)` bias of the
    /// plain `(1/n) log count` form.
    pub count_growth: f64,
    pub n_used: usize,
}

/// Spectral topological entropy plus the word-count growth estimate.
pub fn topological_entropy_estimate(n_max: usize) -> Result<EntropyReport> {
    if n_max < 10 {
        return Err(Error::Range(format!("n_max = {n_max} < 10")));
    }
    // adjacency [[1,1],[1,0]]: leading eigenvalue from the characteristic
    // polynomial x^2 - (tr)x + det
    let (a, b, c, d) = (1.0f64, 1.0, 1.0, 0.0);
    let tr = a + d;
    let det = a * d - b * c;
    let lam = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
    let count = count_admissible(n_max);
    let prev = count_admissible(n_max - 1);
    Ok(EntropyReport {
        spectral: lam.ln(),
        count_growth: (count as f64 / prev as f64).ln(),
        n_used: n_max,
    })
}

fn enumerate_blocks(l: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for mask in 0..(1u32 << l) {
        let bits: Vec<u8> = (0..l).map(|k| ((mask >> (l - 1 - k)) & 1) as u8).collect();
        if is_admissible(&bits) {
            out.push(bits);
        }
    }
    out
}

/// Deterministic evaluation point for a block: its backward periodic
/// extension (with a 0 spacer when the block is not cyclically admissible)
/// as the past, the block padded by 0s as the future.
fn block_context(block: &[u8], params: &MapParams) -> Result<Point3> {
    let l = block.len();
    let mut cycle = block.to_vec();
    if block[l - 1] == 1 && block[0] == 1 {
        cycle.push(0);
    }
    let mut past = Vec::new();
    while past.len() < 60 {
        past.extend_from_slice(&cycle);
    }
    let mut future = block.to_vec();
    future.resize(60, 0);
    let win = TwoSidedWindow::new(Word::from_bits(&past)?, Word::from_bits(&future)?)?;
    let (p, _) = symbolic::point_from_itinerary(&win, params)?;
    Ok(p)
}

fn power_iteration(w: &[Vec<f64>], transpose: bool) -> Result<(f64, Vec<f64>)> {
    let n = w.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut lam = 0.0;
    for _ in 0..100_000 {
        let mut nv = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                if transpose {
                    nv[j] += w[i][j] * v[i];
                } else {
                    nv[i] += w[i][j] * v[j];
                }
            }
        }
        let norm: f64 = nv.iter().sum();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate("nonpositive iterate norm".into()));
        }
        for x in nv.iter_mut() {
            *x /= norm;
        }
        let delta: f64 = nv.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = nv;
        if (norm - lam).abs() <= 1e-14 * norm.max(1.0) && delta < 1e-14 {
            return Ok((norm, v));
        }
        lam = norm;
    }
    Err(Error::Convergence { steps: 100_000 })
}

/// Gibbs-Markov equilibrium approximation at block length `L`: the weighted
/// adjacency matrix over 11-free `L`-blocks with weights
/// `e^{phi(context of the target block)}` yields pressure `log lambda_max`,
/// the block measure, and its closed-form entropy. `project` evaluates `phi`
/// at the pi-projection of the contexts (the planar model).
fn markov_equilibrium_inner(
    phi: &PotentialSpec,
    l: usize,
    params: &MapParams,
    project: bool,
) -> Result<(MeasureApprox, f64)> {
    if !(2..=12).contains(&l) {
        return Err(Error::Range(format!("block length {l} not in 2..=12")));
    }
    let blocks = enumerate_blocks(l);
    let n = blocks.len();
    let mut context = Vec::with_capacity(n);
    for b in &blocks {
        let p = block_context(b, params)?;
        context.push(if project { maps::projection_pi(&p)? } else { p });
    }
    let vals: Vec<f64> = context.iter().map(|p| phi.eval(p)).collect();
    let vmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w = vec![vec![0.0; n]; n];
    for (i, b) in blocks.iter().enumerate() {
        for (j, b2) in blocks.iter().enumerate() {
            if b[1..] == b2[..l - 1] {
                w[i][j] = (vals[j] - vmax).exp();
            }
        }
    }
    let (lam, r) = power_iteration(&w, false)?;
    let (_, lvec) = power_iteration(&w, true)?;
    let pressure = lam.ln() + vmax;
    // stochasticization P_bb' = W_bb' r_b' / (lambda r_b), pi = l .* r
    let mut trans = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            trans[i][j] = w[i][j] * r[j] / (lam * r[i]);
        }
    }
    let lr: f64 = lvec.iter().zip(&r).map(|(a, b)| a * b).sum();
    let stationary: Vec<f64> = lvec.iter().zip(&r).map(|(a, b)| a * b / lr).collect();
    let mut entropy = 0.0;
    for i in 0..n {
        for j in 0..n {
            if trans[i][j] > 0.0 {
                entropy -= stationary[i] * trans[i][j] * trans[i][j].ln();
            }
        }
    }
    let m = MarkovBlockMeasure { l, blocks, trans, stationary, context, entropy };
    Ok((MeasureApprox::Markov(m), pressure))
}

pub fn markov_equilibrium(phi: &PotentialSpec, l: usize, params: &MapParams) -> Result<(MeasureApprox, f64)> {
    markov_equilibrium_inner(phi, l, params, false)
}

/// Variational lower bound: `max_family (h_nu + integral phi dnu)`.
pub fn variational_pressure(phi: &PotentialSpec, family: &[MeasureApprox]) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(family
        .iter()
        .map(|m| m.entropy() + m.integral(phi))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Projects an atomic measure by `pi` (weights preserved).
pub fn pushforward_pi(mu: &MeasureApprox) -> Result<MeasureApprox> {
    match mu {
        MeasureApprox::Atomic { atoms } => {
            let mut out = Vec::with_capacity(atoms.len());
            for (p, w) in atoms {
                out.push((maps::projection_pi(p)?, *w));
            }
            Ok(MeasureApprox::Atomic { atoms: out })
        }
        MeasureApprox::Markov(_) => Err(Error::Kind("pushforward_pi needs an atomic measure".into())),
    }
}

/// Report comparing the `F^{-1}` and `G` symbolic pressures for `phi`.
#[derive(Debug, Clone, Copy)]
pub struct PressureEqualityReport {
    pub p_f_inv: f64,
    pub p_g: f64,
    pub diff: f64,
}

/// Computes the block pressure for the cube model and for the planar model
/// (same block structure, contexts projected by `pi`).
pub fn pressure_equality_check(phi: &PotentialSpec, l: usize, params: &MapParams) -> Result<PressureEqualityReport> {
    let (_, p_f_inv) = markov_equilibrium_inner(phi, l, params, false)?;
    let (_, p_g) = markov_equilibrium_inner(phi, l, params, true)?;
    Ok(PressureEqualityReport { p_f_inv, p_g, diff: (p_f_inv - p_g).abs() })
}

/// Result of the correlation-decay fit.
#[derive(Debug, Clone)]
pub struct CorrelationFit {
    pub k: f64,
    pub theta: f64,
    pub residual: f64,
    /// `(n, correlation, standard error)` for each lag.
    pub series: Vec<(usize, f64, f64)>,
    /// True when a constant observable short-circuits the fit (theta = 0).
    pub skipped: bool,
}

/// Monte-Carlo correlation sequence `cov(h1 o T^n, h2)` under a Markov block
/// measure, with a least-squares exponential fit on lags above the noise
/// floor.
pub fn correlation_decay(
    mu: &MeasureApprox,
    h1: &PotentialSpec,
    h2: &PotentialSpec,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<CorrelationFit> {
    let m = match mu {
        MeasureApprox::Markov(m) => m,
        _ => return Err(Error::Kind("correlation_decay needs a Markov measure".into())),
    };
    let v1: Vec<f64> = m.context.iter().map(|p| h1.eval(p)).collect();
    let v2: Vec<f64> = m.context.iter().map(|p| h2.eval(p)).collect();
    let spread = |v: &[f64]| {
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - v.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    if spread(&v1) < 1e-14 || spread(&v2) < 1e-14 {
        return Ok(CorrelationFit { k: 0.0, theta: 0.0, residual: 0.0, series: Vec::new(), skipped: true });
    }
    let mean1: f64 = m.stationary.iter().zip(&v1).map(|(p, v)| p * v).sum();
    let mean2: f64 = m.stationary.iter().zip(&v2).map(|(p, v)| p * v).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng, weights: &[f64]| -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u <= acc {
                return i;
            }
        }
        weights.len() - 1
    };
    // accumulate products h1(X_n) h2(X_0) over sampled stationary paths
    let mut sums = vec![0.0; n_max + 1];
    let mut sq = vec![0.0; n_max + 1];
    for _ in 0..samples {
        let mut state = draw(&mut rng, &m.stationary);
        let h2_0 = v2[state] - mean2;
        for (n, (s, q)) in sums.iter_mut().zip(sq.iter_mut()).enumerate() {
            let prod = (v1[state] - mean1) * h2_0;
            *s += prod;
            *q += prod * prod;
            if n < n_max {
                state = draw(&mut rng, &m.trans[state]);
            }
        }
    }
    let mut series = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let c = sums[n] / samples as f64;
        let var = (sq[n] / samples as f64 - c * c).max(0.0);
        let se = (var / samples as f64).sqrt();
        series.push((n, c, se));
    }
    // fit log |c_n| = log K + n log theta on lags above the noise floor
    let usable: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, c, se)| c.abs() > 2.0 * se && c.abs() > 0.0)
        .map(|(n, c, _)| (*n as f64, c.abs().ln()))
        .collect();
    if usable.len() < 5 {
        return Err(Error::InsufficientSignal { needed: 5 });
    }
    let (slope, intercept, residual) = least_squares(&usable);
    Ok(CorrelationFit {
        k: intercept.exp(),
        theta: slope.exp(),
        residual,
        series,
        skipped: false,
    })
}

/// Simple least squares for `y = intercept + slope x`; returns
/// `(slope, intercept, rms residual)`.
pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (0.0, sy / n.max(1.0), 0.0);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let rms = (pts
        .iter()
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::horseshoe_f;
    use approx::assert_abs_diff_eq;

    #[test]
    fn periodic_measure_examples() {
        let params = MapParams::standard();
        let m = periodic_measure(&Word::parse("0").unwrap(), &params).unwrap();
        match &m {
            MeasureApprox::Atomic { atoms } => {
                assert_eq!(atoms.len(), 1);
                let (p, w) = atoms[0];
                assert_abs_diff_eq!(w, 1.0);
                assert!(p.max_dist(&maps::P) < 1e-8);
            }
            _ => panic!("expected atomic"),
        }
        // period-2 atoms permuted by F
        let m = periodic_measure(&Word::parse("10").unwrap(), &params).unwrap();
        if let MeasureApprox::Atomic { atoms } = &m {
            assert_eq!(atoms.len(), 2);
            let f0 = horseshoe_f(&atoms[0].0, &params).unwrap();
            assert!(f0.max_dist(&atoms[1].0) < 1e-8);
            let f1 = horseshoe_f(&atoms[1].0, &params).unwrap();
            assert!(f1.max_dist(&atoms[0].0) < 1e-8);
        }
        assert!(periodic_measure(&Word::parse("1").unwrap(), &params).is_err());
    }

    #[test]
    fn entropy_estimates() {
        let r = topological_entropy_estimate(30).unwrap();
        assert_abs_diff_eq!(r.spectral, crate::OMEGA.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(r.spectral, 0.4812118250596035, epsilon = 1e-12);
        assert!((r.count_growth - r.spectral).abs() < 1e-3);
        assert_eq!(count_admissible(5), 13);
        assert!(topological_entropy_estimate(5).is_err());
    }

    #[test]
    fn markov_zero_potential_gives_golden_entropy() {
        let params = MapParams::standard();
        for l in [2usize, 4, 6, 8] {
            let (m, p) = markov_equilibrium(&PotentialSpec::zero(), l, &params).unwrap();
            assert_abs_diff_eq!(p, crate::h_top(), epsilon = 1e-10);
            assert_abs_diff_eq!(m.entropy(), crate::h_top(), epsilon = 1e-9);
            assert_abs_diff_eq!(m.total_mass(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn markov_constant_shift_and_identity() {
        let params = MapParams::standard();
        for c in [-1.0, 0.5] {
            let (_, p) = markov_equilibrium(&PotentialSpec::constant(c), 6, &params).unwrap();
            assert_abs_diff_eq!(p, crate::h_top() + c, epsilon = 1e-10);
        }
        // eigen identity h + integral = pressure
        let phi = crate::potentials::central_potential(&params).scale(0.1);
        let (m, p) = markov_equilibrium(&phi, 6, &params).unwrap();
        assert_abs_diff_eq!(m.entropy() + m.integral(&phi), p, epsilon = 1e-10);
        // negative central exponents pull the pressure below log omega
        assert!(p < crate::h_top());
    }

    #[test]
    fn variational_pressure_bounds() {
        let params = MapParams::standard();
        let phi = PotentialSpec::zero();
        let dq = MeasureApprox::dirac(maps::Q);
        assert_abs_diff_eq!(variational_pressure(&phi, &[dq.clone()]).unwrap(), 0.0);
        let (mk, pressure) = markov_equilibrium(&phi, 8, &params).unwrap();
        let v = variational_pressure(&phi, &[dq.clone(), mk.clone()]).unwrap();
        assert_abs_diff_eq!(v, crate::h_top(), epsilon = 1e-9);
        // adding measures never decreases the value
        let v2 = variational_pressure(&phi, &[dq, mk, MeasureApprox::dirac(maps::P)]).unwrap();
        assert!(v2 >= v);
        assert!(v <= pressure + 1e-9);
        assert!(variational_pressure(&phi, &[]).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let params = MapParams::standard();
        let dq = MeasureApprox::dirac(maps::Q);
        if let MeasureApprox::Atomic { atoms } = pushforward_pi(&dq).unwrap() {
            assert!(atoms[0].0.max_dist(&maps::Q) < 1e-15);
        }
        let m2 = periodic_measure(&Word::parse("10").unwrap(), &params).unwrap();
        let push = pushforward_pi(&m2).unwrap();
        // change of variables on atoms: integrals of z-independent phi agree
        let phi = PotentialSpec::new("y", 1.0, 1.0, |p: &Point3| p.y).unwrap();
        assert_abs_diff_eq!(m2.integral(&phi), push.integral(&phi), epsilon = 1e-14);
        assert_abs_diff_eq!(push.entropy(), 0.0);
        let (mk, _) = markov_equilibrium(&PotentialSpec::zero(), 4, &params).unwrap();
        assert!(pushforward_pi(&mk).is_err());
    }

    #[test]
    fn pressure_equality_examples() {
        let params = MapParams::standard();
        let r = pressure_equality_check(&PotentialSpec::zero(), 6, &params).unwrap();
        assert_abs_diff_eq!(r.p_f_inv, crate::h_top(), epsilon = 1e-10);
        assert!(r.diff < 1e-12);
        let r = pressure_equality_check(&PotentialSpec::constant(0.3), 6, &params).unwrap();
        assert_abs_diff_eq!(r.p_f_inv, crate::h_top() + 0.3, epsilon = 1e-10);
        assert!(r.diff < 1e-12);
        // z-independent Holder potential
        let phi = PotentialSpec::new("xy", 1.0, 2.0, |p: &Point3| 0.5 * p.x + 0.3 * p.y).unwrap();
        let r = pressure_equality_check(&phi, 6, &params).unwrap();
        assert!(r.diff < 1e-6, "diff = {}", r.diff);
    }

    #[test]
    fn correlation_constant_observable_short_circuits() {
        let params = MapParams::standard();
        let (mk, _) = markov_equilibrium(&PotentialSpec::zero(), 4, &params).unwrap();
        let fit = correlation_decay(&mk, &PotentialSpec::constant(2.0), &PotentialSpec::zero(), 10, 100, 1).unwrap();
        assert!(fit.skipped);
        assert_eq!(fit.theta, 0.0);
    }

    #[test]
    fn correlation_matches_chain_covariance_oracle() {
        let params = MapParams::standard();
        let (mk, _) = markov_equilibrium(&PotentialSpec::zero(), 4, &params).unwrap();
        let h1 = PotentialSpec::new("y", 1.0, 1.0, |p: &Point3| p.y).unwrap();
        let h2 = PotentialSpec::new("x", 1.0, 1.0, |p: &Point3| p.x).unwrap();
        let m = match &mk {
            MeasureApprox::Markov(m) => m,
            _ => unreachable!(),
        };
        // exact chain covariance: sum_b pi_b h2(b) (P^n h1)(b) - m1 m2
        let v1: Vec<f64> = m.context_points().iter().map(|p| h1.eval(p)).collect();
        let v2: Vec<f64> = m.context_points().iter().map(|p| h2.eval(p)).collect();
        let mean1: f64 = m.stationary().iter().zip(&v1).map(|(p, v)| p * v).sum();
        let mean2: f64 = m.stationary().iter().zip(&v2).map(|(p, v)| p * v).sum();
        let n_states = m.blocks().len();
        let mut pn_h1 = v1.clone();
        let mut oracle = Vec::new();
        for _n in 0..=6usize {
            let c: f64 = (0..n_states)
                .map(|b| m.stationary()[b] * v2[b] * pn_h1[b])
                .sum::<f64>()
                - mean1 * mean2;
            oracle.push(c);
            let mut next = vec![0.0; n_states];
            for b in 0..n_states {
                for b2 in 0..n_states {
                    next[b] += m.transition()[b][b2] * pn_h1[b2];
                }
            }
            pn_h1 = next;
        }
        match correlation_decay(&mk, &h1, &h2, 6, 40_000, 123) {
            Ok(fit) => {
                for (n, c, se) in &fit.series {
                    assert!(
                        (c - oracle[*n]).abs() <= 3.0 * se.max(1e-4),
                        "lag {n}: mc {c} vs oracle {}",
                        oracle[*n]
                    );
                }
            }
            Err(Error::InsufficientSignal { .. }) => {
                // legitimate when correlations decay below noise quickly;
                // still check the oracle decays
                assert!(oracle[3].abs() < oracle[0].abs() + 1e-9);
            }
            Err(e) => panic!("{e}"),
        }
    }
}
