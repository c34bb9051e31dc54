//! Thermodynamics on the induced countable-alphabet full shift: cylinder
//! variations and the locally Hölder fit, Gurevich pressure brackets,
//! Gibbs-measure approximation, summability and recurrence certificates,
//! and the combinatorial rate `c(alpha)`.

use crate::error::{Error, Result};
use crate::inducing::{InducedPotentialTable, PotEntry};
use crate::maps::MapParams;
use crate::measures::least_squares;
use crate::potentials::{PotentialSpec, Verdict};
use crate::symbolic::{self, CylinderId, TwoSidedWindow, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Estimated cylinder variations with a `Var_k <= C a^k` fit.
#[derive(Debug, Clone)]
pub struct VariationProfile {
    pub k_values: Vec<usize>,
    pub var_lower: Vec<f64>,
    /// `(C, a)` when a fit is possible.
    pub fit: Option<(f64, f64)>,
    pub residual: f64,
}

impl VariationProfile {
    /// Least-squares fit of `ln Var_k = ln C + k ln a` over the positive
    /// entries; all-zero variations yield the degenerate fit `(0, 0)`.
    pub fn fit(k_values: Vec<usize>, var_lower: Vec<f64>) -> Self {
        let pts: Vec<(f64, f64)> = k_values
            .iter()
            .zip(&var_lower)
            .filter(|(_, v)| **v > 1e-15)
            .map(|(k, v)| (*k as f64, v.ln()))
            .collect();
        if pts.is_empty() {
            return VariationProfile { k_values, var_lower, fit: Some((0.0, 0.0)), residual: 0.0 };
        }
        if pts.len() < 3 {
            return VariationProfile { k_values, var_lower, fit: None, residual: 0.0 };
        }
        let (slope, intercept, rms) = least_squares(&pts);
        VariationProfile {
            k_values,
            var_lower,
            fit: Some((intercept.exp(), slope.exp())),
            residual: rms,
        }
    }

    /// Locally Hölder certificate: a decaying fit exists.
    pub fn certified(&self) -> bool {
        matches!(self.fit, Some((_, a)) if a < 1.0)
    }
}

/// Random symbol sequence over the alphabet.
fn random_symbols(rng: &mut ChaCha8Rng, alphabet: &[CylinderId], n: usize) -> Vec<CylinderId> {
    (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect()
}

fn random_past_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let mut bits = Vec::with_capacity(n);
    let mut prev = false;
    for j in 0..n {
        let force = prev || j + 1 == n; // end in 0 so any 1 can follow
        let b = if force { 0 } else { u8::from(rng.gen::<f64>() < 0.35) };
        bits.push(b);
        prev = b == 1;
    }
    bits
}

/// Window for a symbolic realization: `past_syms` before the origin,
/// `future_syms` after, extra raw bits on both ends. The boundary 1 between
/// the past and future amalgamations is shared.
fn realization_window(
    own_past: &[u8],
    past_syms: &[CylinderId],
    future_syms: &[CylinderId],
) -> Result<TwoSidedWindow> {
    let mut past = own_past.to_vec();
    if !past_syms.is_empty() {
        let w = symbolic::amalgamate(past_syms)?;
        let bits = w.bits();
        // strip the trailing 1: it is the same coordinate as the future's
        // leading 1
        past.extend_from_slice(&bits[..bits.len() - 1]);
    }
    let future = symbolic::amalgamate(future_syms)?;
    TwoSidedWindow::new(Word::from_bits(&past)?, future)
}

/// Lower bound for `Var_k(Psi)`: maximizes `|Psi(w) - Psi(s)|` over sampled
/// pairs agreeing on the two-sided `k`-cylinder (same `k` symbols of past
/// and future), with tails differing on both sides. `Psi` is the induced
/// potential of the first future symbol, evaluated at reconstruction depth
/// `depth`.
#[allow(clippy::too_many_arguments)]
pub fn variation_estimate(
    phi: &PotentialSpec,
    alpha: f64,
    k_alphabet: usize,
    k: usize,
    samples: usize,
    depth: usize,
    params: &MapParams,
    seed: u64,
) -> Result<f64> {
    if k < 1 {
        return Err(Error::Range("k must be >= 1".into()));
    }
    let mut alphabet = Vec::new();
    for i in 2..=k_alphabet {
        alphabet.extend(symbolic::enumerate_level(i, alpha)?);
    }
    if alphabet.is_empty() {
        return Err(Error::Degenerate("empty alphabet".into()));
    }
    let min_cyl = alphabet[0].clone(); // lowest level, lexicographically first
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e3779b97f4a7c15));
    let tail = 4usize;
    let mut best = 0.0f64;
    for s in 0..samples {
        // the first sample pins the worst case: the shortest cylinder
        // repeated; later samples draw random shared cores
        let shared_future = if s == 0 {
            vec![min_cyl.clone(); k]
        } else {
            random_symbols(&mut rng, &alphabet, k)
        };
        let shared_past = if s == 0 {
            vec![min_cyl.clone(); k]
        } else {
            random_symbols(&mut rng, &alphabet, k)
        };
        let mut psi = [0.0f64; 2];
        let mut ok = true;
        for (m, slot) in psi.iter_mut().enumerate() {
            let own_past = random_past_bits(&mut rng, depth);
            let mut fut = shared_future.clone();
            fut.extend(random_symbols(&mut rng, &alphabet, tail));
            let win = realization_window(&own_past, &shared_past, &fut)?;
            let steps = shared_future[0].level();
            match birkhoff_over(&win, steps, phi, params) {
                Ok(v) => *slot = v,
                Err(_) => {
                    ok = false;
                    let _ = m;
                    break;
                }
            }
        }
        if ok {
            best = best.max((psi[0] - psi[1]).abs());
        }
    }
    Ok(best)
}

fn birkhoff_over(win: &TwoSidedWindow, steps: usize, phi: &PotentialSpec, params: &MapParams) -> Result<f64> {
    let mut w = win.clone();
    let mut sum = 0.0;
    for k in 0..steps {
        let (p, _) = symbolic::point_from_itinerary(&w, params)?;
        sum += phi.eval(&p);
        if k + 1 < steps {
            w = w.shifted()?;
        }
    }
    Ok(sum)
}

/// Strong-summability report: `sum k Var_k` with a geometric tail bound.
#[derive(Debug, Clone, Copy)]
pub struct SummabilityReport {
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub verdict: Verdict,
}

/// Partial sum over `k <= k_max` (measured values where available, fitted
/// beyond) plus the closed-form geometric tail `C sum_{k>k_max} k a^k`.
pub fn strong_summability_check(profile: &VariationProfile, k_max: usize) -> Result<SummabilityReport> {
    let Some((c, a)) = profile.fit else {
        return Ok(SummabilityReport { partial_sum: 0.0, tail_bound: f64::INFINITY, verdict: Verdict::Inconclusive });
    };
    let mut partial = 0.0;
    for k in 1..=k_max {
        let v = profile
            .k_values
            .iter()
            .position(|&kk| kk == k)
            .map(|idx| profile.var_lower[idx])
            .unwrap_or(c * a.powi(k as i32));
        partial += k as f64 * v;
    }
    if a >= 1.0 {
        return Ok(SummabilityReport { partial_sum: partial, tail_bound: f64::INFINITY, verdict: Verdict::Inconclusive });
    }
    // sum_{k > m} k a^k = a^{m+1} ((m+1)(1-a) + a) / (1-a)^2
    let m = k_max as f64;
    let tail = c * a.powf(m + 1.0) * ((m + 1.0) * (1.0 - a) + a) / ((1.0 - a) * (1.0 - a));
    Ok(SummabilityReport { partial_sum: partial, tail_bound: tail, verdict: Verdict::Holds })
}

/// Finite-truncation Gurevich pressure data.
#[derive(Debug, Clone)]
pub struct PressureBracket {
    pub lower: f64,
    pub upper: f64,
    pub truncation: usize,
    pub n_max: usize,
    pub base: CylinderId,
    /// Leading-eigenvalue extrapolations for the inf/sup/point weightings.
    pub eigen_lower: f64,
    pub eigen_upper: f64,
    pub eigen_point: f64,
}

fn log_sum_exp(vals: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = vals.collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `(1/n) log (W^n)_{bb}` and `(1/n) log max-rowsum(W^n)` for the full-shift
/// weight matrix `W_{ab} = e^{psi(a)}`, in log domain.
fn matrix_growth(psi: &[f64], base_idx: usize, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let n_states = psi.len();
    // log W in row-major: log W[a][b] = psi[a]
    let mut diag = Vec::with_capacity(n_max);
    let mut rowsum = Vec::with_capacity(n_max);
    // log of column vector of W^n e_base and W^n 1 per state
    let mut col: Vec<f64> = (0..n_states)
        .map(|a| if a == base_idx { 0.0 } else { f64::NEG_INFINITY })
        .collect();
    let mut ones: Vec<f64> = vec![0.0; n_states];
    for n in 1..=n_max {
        let next = |v: &[f64]| -> Vec<f64> {
            (0..n_states)
                .map(|a| psi[a] + log_sum_exp(v.iter().cloned()))
                .collect()
        };
        col = next(&col);
        ones = next(&ones);
        diag.push(col[base_idx] / n as f64);
        rowsum.push(ones.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / n as f64);
    }
    (diag, rowsum)
}

fn table_vectors(table: &InducedPotentialTable) -> (Vec<CylinderId>, Vec<PotEntry>) {
    let mut syms = Vec::new();
    let mut entries = Vec::new();
    for (c, e) in &table.entries {
        syms.push(c.clone());
        entries.push(*e);
    }
    (syms, entries)
}

/// Gurevich pressure bracket on the truncated full shift: periodic sums are
/// powers of the weight matrix `W_{ab} = e^{psi(a)}`. The bracket takes the
/// best finite-`n` diagonal growth (inf weights, superadditive) against the
/// best row-sum growth (sup weights, subadditive); the rank-one structure
/// of the full-shift matrix gives the eigenvalue `log sum_a e^{psi(a)}`
/// exactly for each weighting.
pub fn gurevich_pressure(table: &InducedPotentialTable, base: &CylinderId, n_max: usize) -> Result<PressureBracket> {
    let (syms, entries) = table_vectors(table);
    if syms.is_empty() {
        return Err(Error::Degenerate("empty truncated alphabet".into()));
    }
    let base_idx = syms
        .iter()
        .position(|c| c == base)
        .ok_or_else(|| Error::Precondition(format!("base {base} not in the alphabet")))?;
    let inf: Vec<f64> = entries.iter().map(|e| e.inf).collect();
    let sup: Vec<f64> = entries.iter().map(|e| e.sup).collect();
    let point: Vec<f64> = entries.iter().map(|e| e.point).collect();
    let (diag_inf, _) = matrix_growth(&inf, base_idx, n_max);
    let (_, rows_sup) = matrix_growth(&sup, base_idx, n_max);
    let lower = diag_inf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let upper = rows_sup.iter().cloned().fold(f64::INFINITY, f64::min);
    let truncation = syms.iter().map(|c| c.level()).max().unwrap_or(0);
    Ok(PressureBracket {
        lower,
        upper,
        truncation,
        n_max,
        base: base.clone(),
        eigen_lower: log_sum_exp(inf.iter().cloned()),
        eigen_upper: log_sum_exp(sup.iter().cloned()),
        eigen_point: log_sum_exp(point.iter().cloned()),
    })
}

/// Gibbs-measure approximation on the truncated full shift.
#[derive(Debug, Clone)]
pub struct GibbsApprox {
    pub pressure: PressureBracket,
    pub cylinder_measure: Vec<(CylinderId, f64)>,
    pub eigenvalue_log: f64,
    /// Modulus of the second eigenvalue relative to the first (0 for the
    /// rank-one full-shift matrix): the uniqueness proxy.
    pub eigen_gap_ratio: f64,
    pub gibbs_constant: f64,
}

/// Power iteration on the point-value weight matrix; cylinder masses are the
/// normalized products of the left and right eigenvectors, which for the
/// full shift equal `e^{psi(a)} / sum e^{psi}`.
pub fn gibbs_approx(table: &InducedPotentialTable) -> Result<GibbsApprox> {
    let (syms, entries) = table_vectors(table);
    if syms.is_empty() {
        return Err(Error::Degenerate("empty truncated alphabet".into()));
    }
    let n = syms.len();
    let psi: Vec<f64> = entries.iter().map(|e| e.point).collect();
    let shift = psi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|_| (psi[a] - shift).exp()).collect())
        .collect();
    let (lam, right) = power_iterate(&w, false)?;
    let (_, left) = power_iterate(&w, true)?;
    let log_lam = lam.ln() + shift;
    let lr: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    let masses: Vec<f64> = left.iter().zip(&right).map(|(a, b)| a * b / lr).collect();
    // second eigenvalue modulus by deflation
    let mut gap = 0.0;
    if n > 1 {
        let mut v: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        for _ in 0..500 {
            // project out the leading right eigenvector (left-orthogonality)
            let coef: f64 = v.iter().zip(&left).map(|(a, b)| a * b).sum::<f64>() / lr;
            for i in 0..n {
                v[i] -= coef * right[i];
            }
            let mut nv = vec![0.0; n];
            for (i, row) in w.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    nv[i] += x * v[j];
                }
            }
            let norm = nv.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
            if norm < 1e-300 {
                gap = 0.0;
                break;
            }
            gap = norm / lam;
            for x in nv.iter_mut() {
                *x /= norm;
            }
            v = nv;
        }
    }
    let mut gibbs_constant = 1.0f64;
    let mut measure = Vec::with_capacity(n);
    for i in 0..n {
        let predicted = (psi[i] - log_lam).exp();
        let ratio = masses[i] / predicted;
        gibbs_constant = gibbs_constant.max(ratio.max(1.0 / ratio));
        measure.push((syms[i].clone(), masses[i]));
    }
    let pressure = gurevich_pressure(table, &syms[0], 20)?;
    Ok(GibbsApprox {
        pressure,
        cylinder_measure: measure,
        eigenvalue_log: log_lam,
        eigen_gap_ratio: gap,
        gibbs_constant,
    })
}

fn power_iterate(w: &[Vec<f64>], transpose: bool) -> Result<(f64, Vec<f64>)> {
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
            return Err(Error::Degenerate("nonpositive iterate".into()));
        }
        for x in nv.iter_mut() {
            *x /= norm;
        }
        let delta: f64 = nv.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = nv;
        if delta < 1e-10 && (norm - lam).abs() < 1e-10 * norm.max(1.0) {
            return Ok((norm, v));
        }
        lam = norm;
    }
    Err(Error::Convergence { steps: 100_000 })
}

/// Report of the Eq.-(8) summability check.
#[derive(Debug, Clone, Copy)]
pub struct SummabilityEq8Report {
    pub partial_sum: f64,
    pub tail_ratio: f64,
    pub tail_bound: f64,
    pub verdict: Verdict,
}

/// `sum_i i sup_level e^{(psi - i P_shift) + i eps}` on the truncation; the
/// geometric tail is certified when `sup phi - P_shift + eps < 0`.
pub fn summability_eq8(table: &InducedPotentialTable, eps: f64, p_shift: f64, sup_phi: f64) -> Result<SummabilityEq8Report> {
    if !(eps > 0.0) {
        return Err(Error::Range("eps must be positive".into()));
    }
    let mut by_level: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
    for (c, e) in &table.entries {
        let i = c.level();
        let term = e.sup - i as f64 * p_shift + i as f64 * eps;
        let entry = by_level.entry(i).or_insert(f64::NEG_INFINITY);
        *entry = entry.max(term);
    }
    let partial: f64 = by_level.iter().map(|(i, t)| *i as f64 * t.exp()).sum();
    let tail_ratio = (sup_phi - p_shift + eps).exp();
    let k = by_level.keys().last().cloned().unwrap_or(1);
    let (tail_bound, verdict) = if tail_ratio < 1.0 {
        let m = k as f64;
        let q = tail_ratio;
        (q.powf(m + 1.0) * ((m + 1.0) * (1.0 - q) + q) / ((1.0 - q) * (1.0 - q)), Verdict::Holds)
    } else {
        (f64::INFINITY, Verdict::Inconclusive)
    };
    Ok(SummabilityEq8Report { partial_sum: partial, tail_ratio, tail_bound, verdict })
}

/// Report of the positive-recurrence deformation check.
#[derive(Debug, Clone)]
pub struct PositiveRecurrenceReport {
    pub bracket: PressureBracket,
    /// Same deformation on the alphabet truncated two levels lower; the
    /// difference of the point eigenvalues indicates divergence in `K`.
    pub growth_per_truncation: f64,
    pub finite: bool,
}

/// Shifts the table by `+delta * level` and reruns the pressure bracket.
pub fn positive_recurrence_check(table: &InducedPotentialTable, delta: f64, base: &CylinderId, n_max: usize) -> Result<PositiveRecurrenceReport> {
    if delta < 0.0 {
        return Err(Error::Range("delta must be nonnegative".into()));
    }
    let shifted = table.shifted_by_level(delta);
    let bracket = gurevich_pressure(&shifted, base, n_max)?;
    let k = bracket.truncation;
    let sub_entries: std::collections::BTreeMap<_, _> = shifted
        .entries
        .iter()
        .filter(|(c, _)| c.level() + 2 <= k)
        .map(|(c, e)| (c.clone(), *e))
        .collect();
    let growth = if sub_entries.is_empty() {
        0.0
    } else {
        let sub = InducedPotentialTable { alpha: table.alpha, entries: sub_entries, tail_pad: table.tail_pad };
        let point_full = log_sum_exp(shifted.entries.values().map(|e| e.point));
        let point_sub = log_sum_exp(sub.entries.values().map(|e| e.point));
        point_full - point_sub
    };
    Ok(PositiveRecurrenceReport { bracket: bracket.clone(), growth_per_truncation: growth, finite: bracket.upper.is_finite() })
}

/// `(1/n) log sum_{k <= alpha n} C(n, k)` at `n = n_max`, log-domain.
pub fn c_alpha(alpha: f64, n_max: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Range(format!("alpha = {alpha} not in (0,1)")));
    }
    if n_max < 100 {
        return Err(Error::Range(format!("n_max = {n_max} < 100")));
    }
    let n = n_max as f64;
    let kmax = (alpha * n).floor() as usize;
    let mut log_binom = 0.0f64; // log C(n, 0)
    let mut terms = vec![0.0f64];
    for k in 1..=kmax {
        log_binom += ((n - k as f64 + 1.0) / k as f64).ln();
        terms.push(log_binom);
    }
    Ok(log_sum_exp(terms.into_iter()) / n)
}

/// Exponential-tail fit `nu({rho >= m}) ~ C theta^m`.
#[derive(Debug, Clone)]
pub struct TailFit {
    pub c: f64,
    pub theta: f64,
    /// Per-level relative residuals of the fit.
    pub residuals: Vec<f64>,
}

pub fn exponential_tail_check(g: &GibbsApprox) -> Result<TailFit> {
    let mut by_level: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
    for (c, m) in &g.cylinder_measure {
        *by_level.entry(c.level()).or_insert(0.0) += m;
    }
    let levels: Vec<usize> = by_level.keys().cloned().collect();
    let kmax = *levels.last().ok_or(Error::EmptyData)?;
    if levels.len() < 2 {
        // single-level alphabet: the tail vanishes beyond it
        return Ok(TailFit { c: 0.0, theta: 0.0, residuals: vec![0.0] });
    }
    let mut pts = Vec::new();
    let mut tails = Vec::new();
    // below the lowest level the tail is the whole mass; start past it so
    // the flat head does not bias the fit
    for m in (levels[0] + 1)..=kmax {
        let tail: f64 = by_level.iter().filter(|(i, _)| **i >= m).map(|(_, v)| v).sum();
        tails.push((m, tail));
        if tail > 0.0 {
            pts.push((m as f64, tail.ln()));
        }
    }
    if pts.len() < 2 {
        // single-level alphabet: tail vanishes beyond it
        return Ok(TailFit { c: 0.0, theta: 0.0, residuals: vec![0.0] });
    }
    let (slope, intercept, _) = least_squares(&pts);
    let c = intercept.exp();
    let theta = slope.exp();
    let residuals = tails
        .iter()
        .filter(|(_, t)| *t > 0.0)
        .map(|(m, t)| (t - c * theta.powi(*m as i32)).abs() / t)
        .collect();
    Ok(TailFit { c, theta, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inducing::InducedPotentialTable;
    use crate::potentials::example_potential;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn cyl(s: &str) -> CylinderId {
        CylinderId::new(Word::parse(s).unwrap(), 0.4).unwrap()
    }

    fn flat_table(vals: &[(&str, f64)]) -> InducedPotentialTable {
        let entries: BTreeMap<CylinderId, PotEntry> = vals
            .iter()
            .map(|(s, v)| (cyl(s), PotEntry { inf: *v, sup: *v, point: *v }))
            .collect();
        InducedPotentialTable { alpha: 0.4, entries, tail_pad: 0.0 }
    }

    #[test]
    fn variation_constant_is_zero() {
        let params = MapParams::standard();
        for k in [1usize, 3, 5] {
            let v = variation_estimate(&PotentialSpec::constant(2.0), 0.4, 6, k, 20, k + 8, &params, 1).unwrap();
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn variation_decay_rate_matches_theta() {
        // z-dependent Holder potential: the variation decays with the
        // underlying-symbol agreement, which grows by (level - 1) = 2 per
        // symbol along the worst-case all-"101" core. The z error there
        // contracts by 1/beta0 and 1/beta1 on alternating symbols, so the
        // per-symbol rate sqrt(a) must match (beta0 beta1)^(-1/2) within
        // 30% on the log scale, and stay below the crude Theta bound
        let params = MapParams::standard();
        let phi = example_potential(0.84, 1.0, 0.0, 1.0).unwrap();
        let ks: Vec<usize> = (1..=8).collect();
        let vars: Vec<f64> = ks
            .iter()
            .map(|&k| variation_estimate(&phi, 0.4, 6, k, 40, k + 8, &params, 3).unwrap())
            .collect();
        let profile = VariationProfile::fit(ks, vars);
        let (_, a) = profile.fit.unwrap();
        assert!(profile.certified(), "a = {a}");
        let rate = 1.0 / (params.beta0() * params.beta1()).sqrt();
        let theta = params.lambda0().max(params.sigma()).max(1.0 / params.beta1());
        let per_symbol = a.sqrt();
        assert!(
            (per_symbol.ln() - rate.ln()).abs() <= 0.3 * rate.ln().abs(),
            "per-symbol rate {per_symbol} vs oracle {rate}"
        );
        assert!(per_symbol <= theta * 1.1, "rate {per_symbol} above Theta {theta}");
    }

    #[test]
    fn summability_closed_form() {
        let profile = VariationProfile {
            k_values: vec![],
            var_lower: vec![],
            fit: Some((1.0, 0.5)),
            residual: 0.0,
        };
        let r = strong_summability_check(&profile, 20).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.tail_bound < 1e-4, "tail = {}", r.tail_bound);
        // oracle: direct summation of the tail
        let direct: f64 = (21..2000).map(|k| k as f64 * 0.5f64.powi(k)).sum();
        assert_abs_diff_eq!(r.tail_bound, direct, epsilon = 1e-12);

        let bad = VariationProfile { k_values: vec![], var_lower: vec![], fit: Some((1.0, 1.1)), residual: 0.0 };
        assert_eq!(strong_summability_check(&bad, 10).unwrap().verdict, Verdict::Inconclusive);

        let zero = VariationProfile::fit(vec![1, 2, 3], vec![0.0, 0.0, 0.0]);
        let r = strong_summability_check(&zero, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_abs_diff_eq!(r.partial_sum, 0.0);
    }

    #[test]
    fn gurevich_zero_potential() {
        let params = MapParams::standard();
        let table = InducedPotentialTable::build(&PotentialSpec::zero(), 8, 0.4, 6, &params).unwrap();
        let n = table.entries.len();
        let b = cyl("101");
        let pb = gurevich_pressure(&table, &b, 20).unwrap();
        let expect = (n as f64).ln();
        assert_abs_diff_eq!(pb.eigen_lower, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(pb.eigen_upper, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(pb.eigen_point, expect, epsilon = 1e-12);
        assert!(pb.lower <= expect + 1e-12 && expect <= pb.upper + 1e-12);
        assert!(pb.upper - pb.lower < 0.2);
    }

    #[test]
    fn gurevich_single_symbol_and_base_independence() {
        let t1 = flat_table(&[("101", -0.7)]);
        let pb = gurevich_pressure(&t1, &cyl("101"), 15).unwrap();
        assert_abs_diff_eq!(pb.lower, -0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(pb.upper, -0.7, epsilon = 1e-12);

        let t = flat_table(&[("101", 0.2), ("1001", -0.4), ("1000101", -1.0)]);
        let brackets: Vec<PressureBracket> = ["101", "1001", "1000101"]
            .iter()
            .map(|s| gurevich_pressure(&t, &cyl(s), 25).unwrap())
            .collect();
        for a in &brackets {
            for b in &brackets {
                assert!(a.lower <= b.upper + 1e-12, "brackets must pairwise overlap");
            }
        }
        // monotone truncation in n_max
        let mut prev: Option<(f64, f64)> = None;
        for n_max in [5usize, 10, 20, 30] {
            let pb = gurevich_pressure(&t, &cyl("101"), n_max).unwrap();
            if let Some((lo, hi)) = prev {
                assert!(pb.lower >= lo - 1e-12);
                assert!(pb.upper <= hi + 1e-12);
            }
            prev = Some((pb.lower, pb.upper));
        }
    }

    #[test]
    fn gibbs_uniform_and_two_symbol() {
        let params = MapParams::standard();
        let table = InducedPotentialTable::build(&PotentialSpec::zero(), 8, 0.4, 6, &params).unwrap();
        let g = gibbs_approx(&table).unwrap();
        let n = table.entries.len() as f64;
        for (_, m) in &g.cylinder_measure {
            assert_abs_diff_eq!(*m, 1.0 / n, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(g.gibbs_constant, 1.0, epsilon = 1e-8);
        assert!(g.eigen_gap_ratio < 1e-8);

        let (v1, v2) = (0.4, -0.9);
        let t2 = flat_table(&[("101", v1), ("1001", v2)]);
        let g = gibbs_approx(&t2).unwrap();
        let z = v1.exp() + v2.exp();
        for (c, m) in &g.cylinder_measure {
            let expect = if c.level() == 3 { v1.exp() / z } else { v2.exp() / z };
            assert_abs_diff_eq!(*m, expect, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(g.eigenvalue_log, z.ln(), epsilon = 1e-9);
        // agrees with the gurevich point estimate
        assert_abs_diff_eq!(g.eigenvalue_log, g.pressure.eigen_point, epsilon = 1e-8);
    }

    #[test]
    fn gibbs_constant_stable_for_example_family() {
        let params = MapParams::standard();
        let fam = example_potential(0.84, 1.0, 0.0, 1.0).unwrap().scale(0.24);
        let mut constants = Vec::new();
        for k in [6usize, 8, 10] {
            let table = InducedPotentialTable::build(&fam, k, 0.4, 6, &params).unwrap();
            constants.push(gibbs_approx(&table).unwrap().gibbs_constant);
        }
        for c in &constants {
            assert!(*c <= 2.0 * constants[0] && *c >= constants[0] / 2.0, "{constants:?}");
        }
    }

    #[test]
    fn summability_eq8_examples() {
        let params = MapParams::standard();
        let table = InducedPotentialTable::build(&PotentialSpec::zero(), 8, 0.4, 6, &params).unwrap();
        let r = summability_eq8(&table, 0.1, 2.0f64.ln(), 0.0).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.tail_ratio < 1.0);
        assert!((r.tail_ratio - (0.1 - 2.0f64.ln()).exp()).abs() < 1e-12);
        let r = summability_eq8(&table, 0.1, 0.0, 0.0).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(summability_eq8(&table, -0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn positive_recurrence_examples() {
        let params = MapParams::standard();
        let table = InducedPotentialTable::build(&PotentialSpec::zero(), 8, 0.4, 6, &params).unwrap();
        let base = cyl("101");
        // delta = 0 reduces to gurevich_pressure
        let r0 = positive_recurrence_check(&table, 0.0, &base, 15).unwrap();
        let pb = gurevich_pressure(&table, &base, 15).unwrap();
        assert_abs_diff_eq!(r0.bracket.lower, pb.lower, epsilon = 1e-12);
        assert_abs_diff_eq!(r0.bracket.upper, pb.upper, epsilon = 1e-12);
        assert!(r0.finite);
        // larger delta inflates the truncation growth indicator
        let small = positive_recurrence_check(&table, 0.05, &base, 15).unwrap();
        let large = positive_recurrence_check(&table, 1.0, &base, 15).unwrap();
        assert!(large.growth_per_truncation > small.growth_per_truncation);
    }

    #[test]
    fn c_alpha_values() {
        // oracle: binary entropy H(alpha) via Stirling
        assert!((c_alpha(0.5, 2000).unwrap() - 2.0f64.ln()).abs() < 1e-2);
        let h = |p: f64| -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        assert!((c_alpha(0.25, 2000).unwrap() - h(0.25)).abs() < 1e-2);
        assert_abs_diff_eq!(h(0.25), 0.5623, epsilon = 1e-4);
        assert!(c_alpha(0.01, 2000).unwrap() < 0.06);
        assert!(c_alpha(0.5, 50).is_err());
        assert!(c_alpha(1.5, 2000).is_err());
    }

    #[test]
    fn tail_fit_examples() {
        let params = MapParams::standard();
        let table = InducedPotentialTable::build(&PotentialSpec::zero(), 10, 0.4, 6, &params).unwrap();
        let g = gibbs_approx(&table).unwrap();
        let fit = exponential_tail_check(&g).unwrap();
        assert!(fit.theta < 1.0, "theta = {}", fit.theta);
        // single-level alphabet
        let g1 = gibbs_approx(&flat_table(&[("101", 0.3)])).unwrap();
        let fit = exponential_tail_check(&g1).unwrap();
        assert_eq!(fit.theta, 0.0);
    }
}
