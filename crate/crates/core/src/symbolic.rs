//! The subshift with the word "11" forbidden, itineraries under `F`, the
//! alpha-return inducing combinatorics, enumeration of the inducing
//! cylinders, the amalgamation coding and point reconstruction from
//! itineraries.

use crate::error::{Error, Result};
use crate::maps::{
    self, horseshoe_f, horseshoe_f_inv_auto, horseshoe_region, MapParams, Point3, Region,
};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default cap for cylinder enumeration levels.
pub const DEFAULT_ENUM_CAP: usize = 24;

/// A finite word over `{0, 1}` containing no factor "11".
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Format("symbols must be 0 or 1".into()));
        }
        if !is_admissible_bits(bits) {
            return Err(Error::Admissibility(bits_to_string(bits)));
        }
        Ok(Word(bits.to_vec()))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Format(format!("invalid symbol {c:?}"))),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(&bits)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(&self.0))
    }
}

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

fn is_admissible_bits(bits: &[u8]) -> bool {
    bits.windows(2).all(|w| !(w[0] == 1 && w[1] == 1))
}

/// True iff "11" does not occur in `bits`.
pub fn is_admissible(bits: &[u8]) -> bool {
    is_admissible_bits(bits)
}

/// Number of 11-free words of length `n` (follows the Fibonacci recursion).
pub fn count_admissible(n: usize) -> u128 {
    // a(n) ending in 0, b(n) ending in 1
    let (mut a, mut b) = (1u128, 1u128);
    for _ in 1..n {
        let na = a + b;
        let nb = a;
        a = na;
        b = nb;
    }
    if n == 0 {
        1
    } else {
        a + b
    }
}

/// Exact strict comparison `count/n > alpha`, with `alpha` read as the exact
/// binary rational its `f64` representation denotes. Integer arithmetic
/// avoids float ties such as `2/5` versus `0.4`.
pub fn freq_exceeds(count: u64, n: u64, alpha: f64) -> bool {
    debug_assert!(n > 0);
    debug_assert!((0.0..1.0).contains(&alpha));
    let mut num = alpha;
    let mut den: u128 = 1;
    let mut steps = 0;
    while num.fract() != 0.0 && steps < 80 {
        num *= 2.0;
        den *= 2;
        steps += 1;
    }
    if num.fract() == 0.0 {
        (count as u128) * den > (num as u128) * (n as u128)
    } else {
        // denominator too deep for exact arithmetic; fall back to floats
        (count as f64) / (n as f64) > alpha
    }
}

/// `d_n^+`: fraction of 1s among the first `n` symbols.
pub fn freq_plus(w: &Word, n: usize) -> Result<f64> {
    if n == 0 || n > w.len() {
        return Err(Error::Range(format!("n = {n} out of 1..={}", w.len())));
    }
    let count = w.bits()[..n].iter().filter(|&&b| b == 1).count();
    Ok(count as f64 / n as f64)
}

/// Alpha-return time: smallest `k > 1` with `w[k-1] = 1` and `d_k^+ > alpha`
/// (strict, exact rational comparison). `None` if no such `k` within the word.
pub fn return_time(w: &Word, alpha: f64) -> Result<Option<usize>> {
    if w.is_empty() || w.bits()[0] != 1 {
        return Err(Error::Precondition("word must start with 1".into()));
    }
    let mut count = 1u64;
    for k in 2..=w.len() {
        if w.bits()[k - 1] == 1 {
            count += 1;
            if freq_exceeds(count, k as u64, alpha) {
                return Ok(Some(k));
            }
        }
    }
    Ok(None)
}

/// One symbol of the countable alphabet: a level-`k` inducing cylinder,
/// identified by its length-`k` word (starts and ends in 1, first return
/// exactly at `k`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CylinderId {
    word: Word,
}

impl CylinderId {
    pub fn new(word: Word, alpha: f64) -> Result<Self> {
        let k = word.len();
        if k < 2 {
            return Err(Error::Format("cylinder word must have length >= 2".into()));
        }
        let bits = word.bits();
        if bits[0] != 1 || bits[k - 1] != 1 {
            return Err(Error::Format(format!("cylinder word {word} must start and end with 1")));
        }
        if return_time(&word, alpha)? != Some(k) {
            return Err(Error::Format(format!("word {word} is not a level-{k} cylinder at alpha = {alpha}")));
        }
        Ok(CylinderId { word })
    }

    pub fn level(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &Word {
        &self.word
    }
}

impl fmt::Display for CylinderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word)
    }
}

/// All level-`i` cylinders at parameter `alpha`, sorted lexicographically.
pub fn enumerate_level(i: usize, alpha: f64) -> Result<Vec<CylinderId>> {
    enumerate_level_capped(i, alpha, DEFAULT_ENUM_CAP)
}

pub fn enumerate_level_capped(i: usize, alpha: f64, cap: usize) -> Result<Vec<CylinderId>> {
    if i < 2 {
        return Err(Error::Range(format!("level {i} must be >= 2")));
    }
    if i > cap {
        return Err(Error::Resource { level: i, cap });
    }
    let mut out = Vec::new();
    let mut prefix = vec![1u8];
    dfs_level(&mut prefix, 1, i, alpha, &mut out);
    Ok(out)
}

/// Depth-first search over 11-free prefixes with no early alpha-return.
/// Choosing 0 before 1 yields lexicographic output order.
fn dfs_level(prefix: &mut Vec<u8>, ones: u64, target: usize, alpha: f64, out: &mut Vec<CylinderId>) {
    let pos = prefix.len();
    if pos == target {
        return; // completion handled at symbol placement below
    }
    // symbol 0 is always admissible and never triggers a return
    if pos + 1 < target {
        prefix.push(0);
        dfs_level(prefix, ones, target, alpha, out);
        prefix.pop();
    }
    // symbol 1: forbidden after 1; placing it at prefix length k may return
    if prefix[pos - 1] != 1 {
        let k = (pos + 1) as u64;
        let returns = freq_exceeds(ones + 1, k, alpha);
        if pos + 1 == target {
            if returns {
                prefix.push(1);
                let word = Word(prefix.clone());
                out.push(CylinderId { word });
                prefix.pop();
            }
        } else if !returns {
            prefix.push(1);
            dfs_level(prefix, ones + 1, target, alpha, out);
            prefix.pop();
        }
    }
}

/// Joins cylinder words into one admissible word. Every cylinder both starts
/// and ends in 1, and in the shift the return symbol that closes one cylinder
/// is the same coordinate that opens the next, so consecutive words overlap
/// in that shared 1: the join keeps the first word whole and drops the
/// leading 1 of each later word. The junction is then "1" followed by "0"
/// (valid cylinders begin "10"), hence 11-free; an `Admissibility` error
/// signals a corrupted symbol.
pub fn amalgamate(symbols: &[CylinderId]) -> Result<Word> {
    let mut bits = Vec::new();
    for (j, s) in symbols.iter().enumerate() {
        let w = s.word().bits();
        if j == 0 {
            bits.extend_from_slice(w);
        } else {
            if w.first() != Some(&1) {
                return Err(Error::Admissibility(bits_to_string(w)));
            }
            bits.extend_from_slice(&w[1..]);
        }
    }
    if !is_admissible_bits(&bits) {
        return Err(Error::Admissibility(bits_to_string(&bits)));
    }
    Ok(Word(bits))
}

/// Greedy-minimal decode: cut at the first alpha-return, then restart at the
/// returning 1 itself (it is shared with the next cylinder), repeating on the
/// remainder. Returns the decoded symbols and the unconsumed suffix; a word
/// that ends exactly at a return is fully consumed.
pub fn decode_partial(w: &Word, alpha: f64) -> Result<(Vec<CylinderId>, Word)> {
    if w.is_empty() || w.bits()[0] != 1 {
        return Err(Error::Precondition("word must start with 1".into()));
    }
    let mut symbols = Vec::new();
    let mut rest = w.bits();
    loop {
        let rest_word = Word(rest.to_vec());
        match return_time(&rest_word, alpha)? {
            Some(k) => {
                symbols.push(CylinderId { word: Word(rest[..k].to_vec()) });
                if k == rest.len() {
                    return Ok((symbols, Word::empty()));
                }
                // the closing 1 at index k-1 doubles as the next word's start
                rest = &rest[k - 1..];
            }
            None => return Ok((symbols, Word(rest.to_vec()))),
        }
    }
}

/// Full decode; errors with the unconsumed suffix if the tail has no return.
pub fn decode_to_symbols(w: &Word, alpha: f64) -> Result<Vec<CylinderId>> {
    let (symbols, remainder) = decode_partial(w, alpha)?;
    if remainder.is_empty() {
        Ok(symbols)
    } else {
        Err(Error::Incomplete {
            consumed: w.len() - remainder.len(),
            remainder: remainder.to_string(),
        })
    }
}

/// A two-sided itinerary window: `past` holds symbols at indices `-D..-1`,
/// `future` at `0..D'-1`; the concatenation must be 11-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSidedWindow {
    past: Word,
    future: Word,
}

impl TwoSidedWindow {
    pub fn new(past: Word, future: Word) -> Result<Self> {
        let mut joined = past.bits().to_vec();
        joined.extend_from_slice(future.bits());
        if !is_admissible_bits(&joined) {
            return Err(Error::Admissibility(bits_to_string(&joined)));
        }
        Ok(TwoSidedWindow { past, future })
    }

    pub fn past(&self) -> &Word {
        &self.past
    }

    pub fn future(&self) -> &Word {
        &self.future
    }

    /// Window of a periodic sequence with the given cycle, `depth` symbols on
    /// each side, aligned so index 0 starts the cycle. The cycle must be
    /// cyclically admissible.
    pub fn periodic(cycle: &Word, depth: usize) -> Result<Self> {
        let p = cycle.len();
        if p == 0 {
            return Err(Error::Format("empty cycle".into()));
        }
        let bits = cycle.bits();
        if bits[p - 1] == 1 && bits[0] == 1 {
            return Err(Error::Admissibility(format!("cyclic 11 in {cycle}")));
        }
        let at = |i: i64| bits[(i.rem_euclid(p as i64)) as usize];
        let past: Vec<u8> = (-(depth as i64)..0).map(at).collect();
        let future: Vec<u8> = (0..depth as i64).map(at).collect();
        TwoSidedWindow::new(Word(past), Word(future))
    }

    /// Left shift by one: index 1 becomes index 0. Loses one future symbol.
    pub fn shifted(&self) -> Result<Self> {
        if self.future.is_empty() {
            return Err(Error::Range("cannot shift an empty future".into()));
        }
        let mut past = self.past.bits().to_vec();
        past.push(self.future.bits()[0]);
        let future = self.future.bits()[1..].to_vec();
        TwoSidedWindow::new(Word(past), Word(future))
    }
}

/// Itinerary of `p` under `F`: symbol at index `k` is 0 if `F^k(p)` lies in
/// `R0` and 1 if in `R1`, for `k` in `-n_back..n_fwd-1`. The backward branch
/// is the unique branch of `F^{-1}` whose image contains the point.
pub fn itinerary(p: &Point3, n_fwd: usize, n_back: usize, params: &MapParams) -> Result<TwoSidedWindow> {
    let symbol = |q: &Point3, idx: i64| -> Result<u8> {
        match horseshoe_region(q) {
            Region::R0 => Ok(0),
            Region::R1 => Ok(1),
            _ => Err(Error::Escape { index: idx }),
        }
    };
    let mut future = Vec::with_capacity(n_fwd);
    let mut cur = *p;
    for k in 0..n_fwd {
        future.push(symbol(&cur, k as i64)?);
        if k + 1 < n_fwd {
            cur = horseshoe_f(&cur, params).map_err(|_| Error::Escape { index: k as i64 + 1 })?;
        }
    }
    let mut past = vec![0u8; n_back];
    let mut cur = *p;
    for k in 1..=n_back {
        cur = horseshoe_f_inv_auto(&cur, params).map_err(|_| Error::Escape { index: -(k as i64) })?;
        past[n_back - k] = symbol(&cur, -(k as i64))?;
    }
    TwoSidedWindow::new(Word(past), Word(future))
}

/// Central branch maps: `f_0 = f` (time-one flow) and `f_1(y) = sigma (1-y)`.
fn central_step(s: u8, y: f64, params: &MapParams) -> (f64, f64) {
    if s == 0 {
        (maps::flow_map(y, 1), maps::flow_derivative(y))
    } else {
        (params.sigma() * (1.0 - y), params.sigma())
    }
}

/// Composes the central branch maps along `w` (first symbol applied first),
/// accumulating `log |derivative|` by the chain rule.
pub fn central_composition(w: &Word, y: f64, params: &MapParams) -> (f64, f64) {
    let mut val = y;
    let mut logd = 0.0;
    for &s in w.bits() {
        let (ny, d) = central_step(s, val, params);
        logd += d.abs().ln();
        val = ny;
    }
    (val, logd)
}

/// Reconstructs the point with the given itinerary window, together with a
/// max-coordinate error bound.
///
/// - `x`: forward iteration of the contracting x-branches from seed 1/2 at
///   depth `-D`; error `lambda0^D`.
/// - `z`: backward iteration of the expanding-branch inverses from the future
///   end, seed 0; error `beta1^{-D'} / 6`.
/// - `y`: the central composition over the past from seed 1/2. Both branch
///   maps are monotone, so pushing the interval `[0,1]` through the same
///   composition gives a rigorous enclosure; its width is the y-error when
///   the past contains a 1 (the sigma-branch contracts, cf. the product
///   bound over blocks), and 1 otherwise.
pub fn point_from_itinerary(win: &TwoSidedWindow, params: &MapParams) -> Result<(Point3, f64)> {
    let d_back = win.past().len();
    let d_fwd = win.future().len();
    if d_back < 1 {
        return Err(Error::Precondition("past window must be nonempty".into()));
    }
    if d_fwd < 1 {
        return Err(Error::Precondition("future window must be nonempty".into()));
    }

    // x: forward through the affine branches
    let mut x = 0.5;
    for &s in win.past().bits() {
        x = if s == 0 { params.lambda0() * x } else { 0.75 - params.lambda0() * x };
    }
    let x_err = params.lambda0().powi(d_back as i32);

    // z: backward through the branch inverses
    let mut z = 0.0;
    for &s in win.future().bits().iter().rev() {
        z = if s == 0 { z / params.beta0() } else { z / params.beta1() + 5.0 / 6.0 };
    }
    let z_err = params.beta1().powi(-(d_fwd as i32)) / 6.0;

    // y: central composition with an interval enclosure
    let mut y = 0.5;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for &s in win.past().bits() {
        let (ny, _) = central_step(s, y, params);
        y = ny;
        if s == 0 {
            lo = maps::flow_map(lo, 1);
            hi = maps::flow_map(hi, 1);
        } else {
            let (nlo, nhi) = (params.sigma() * (1.0 - hi), params.sigma() * (1.0 - lo));
            lo = nlo;
            hi = nhi;
        }
    }
    let y_err = if win.past().ones() > 0 { hi - lo } else { 1.0 };

    let err = x_err.max(z_err).max(y_err);
    Ok((Point3::new(x, y, z), err))
}

/// Decomposition of a word `1 b_{n_1} ... b_{n_r}` into blocks `b_n = 0^n 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Block lengths `n_1..n_r` in order of appearance.
    pub blocks: Vec<usize>,
}

impl BlockDecomposition {
    /// `a(w, i, n)`: number of blocks `b_n` in the decomposition.
    pub fn count(&self, n: usize) -> usize {
        self.blocks.iter().filter(|&&b| b == n).count()
    }

    /// Largest block length present.
    pub fn max_block(&self) -> usize {
        self.blocks.iter().copied().max().unwrap_or(0)
    }

    /// `1 + sum_k (k+1) a(w,i,k)`, which equals the segment length.
    pub fn length_identity_lhs(&self) -> usize {
        1 + self.blocks.iter().map(|&n| n + 1).sum::<usize>()
    }
}

/// Writes `w = 1 b_{n_1} ... b_{n_r}` with `b_n = 0^n 1` and tallies the
/// block counts. The word must start and end with 1 and be 11-free.
pub fn block_decompose(w: &Word) -> Result<BlockDecomposition> {
    let bits = w.bits();
    if bits.is_empty() || bits[0] != 1 {
        return Err(Error::Format("word must start with 1".into()));
    }
    if bits[bits.len() - 1] != 1 {
        return Err(Error::Format(format!("word {w} does not end in 1")));
    }
    if !is_admissible_bits(bits) {
        return Err(Error::Format(format!("word {w} contains 11")));
    }
    let mut blocks = Vec::new();
    let mut i = 1;
    while i < bits.len() {
        let start = i;
        while i < bits.len() && bits[i] == 0 {
            i += 1;
        }
        debug_assert!(i < bits.len() && bits[i] == 1, "admissible word ending in 1");
        blocks.push(i - start);
        i += 1;
    }
    Ok(BlockDecomposition { blocks })
}

/// All cyclically admissible words of length `2..=p_max`: no "11" factor,
/// including the wraparound pair. Each length is in lexicographic order;
/// rotations are listed separately. The length-1 cycle "0" is prepended.
pub fn enumerate_cycles(p_max: usize) -> Vec<Word> {
    let mut out = vec![Word(vec![0])];
    for n in 2..=p_max {
        for mask in 0..(1u32 << n) {
            let bits: Vec<u8> = (0..n).map(|k| ((mask >> (n - 1 - k)) & 1) as u8).collect();
            if is_admissible_bits(&bits) && !(bits[n - 1] == 1 && bits[0] == 1) {
                out.push(Word(bits));
            }
        }
    }
    out
}

/// Inducing-scheme parameters: `alpha` and a slack `tau < alpha`, with the
/// derived block cutoff `N = floor(1/(alpha - tau))`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(try_from = "RawInducingParams")]
pub struct InducingParams {
    alpha: f64,
    tau: f64,
}

#[derive(Deserialize)]
struct RawInducingParams {
    alpha: f64,
    tau: f64,
}

impl TryFrom<RawInducingParams> for InducingParams {
    type Error = Error;
    fn try_from(r: RawInducingParams) -> Result<Self> {
        InducingParams::new(r.alpha, r.tau)
    }
}

impl InducingParams {
    pub fn new(alpha: f64, tau: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0 / 3.0) {
            return Err(Error::Range(format!("alpha = {alpha} not in (0, 2/3)")));
        }
        if !(tau > 0.0 && tau < alpha) {
            return Err(Error::Range(format!("tau = {tau} not in (0, alpha)")));
        }
        Ok(Self { alpha, tau })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn block_cutoff(&self) -> usize {
        (1.0 / (self.alpha - self.tau)).floor() as usize
    }
}

/// Result of the `m(c0)` cutoff computation for the admissible family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MOfC0 {
    /// `max{k >= 0 : beta0^k beta1 (c0 - 5/6) <= 1/6}`; `-1` if `k = 0`
    /// already fails.
    pub m: i64,
    /// Set when `m = -1` (points above `c0` would need an immediate 1->1
    /// transition, impossible in the subshift) or when the scan hit the cap.
    pub warning: Option<String>,
}

/// Maximal number of consecutive 0s forced after a 1 for points with
/// `z > c0`. Scan is capped at the enumeration limit.
pub fn m_of_c0(c0: f64, params: &MapParams) -> Result<MOfC0> {
    if !(c0 > 5.0 / 6.0 && c0 < 1.0) {
        return Err(Error::Range(format!("c0 = {c0} not in (5/6, 1)")));
    }
    let base = params.beta1() * (c0 - 5.0 / 6.0);
    if base > 1.0 / 6.0 {
        return Ok(MOfC0 {
            m: -1,
            warning: Some("factor exceeds 1/6 at k = 0; immediate return to R1".into()),
        });
    }
    let mut m = 0i64;
    let mut factor = base;
    while m < DEFAULT_ENUM_CAP as i64 {
        let next = factor * params.beta0();
        if next > 1.0 / 6.0 {
            return Ok(MOfC0 { m, warning: None });
        }
        factor = next;
        m += 1;
    }
    Ok(MOfC0 { m, warning: Some(format!("capped at the enumeration limit {DEFAULT_ENUM_CAP}")) })
}
