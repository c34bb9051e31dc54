//! The horseshoe map `F` on the cube, the central flow map `f`, the
//! projection `pi` onto the two center-stable planes and the planar map `G`.
//!
//! `F` acts on two slabs of the unit cube,
//! `R0 = I x I x [0, 1/6]` and `R1 = I x I x [5/6, 1]`:
//! on `R0` it is `(x, y, z) -> (lambda0 x, f(y), beta0 z)` and on `R1` it is
//! `(x, y, z) -> (3/4 - lambda0 x, sigma (1 - y), beta1 (z - 5/6))`.
//! `G` is the projection of `F^{-1}` onto three planar rectangles.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const COORD_TOL: f64 = 1e-12;

/// The four constants of the horseshoe family, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(try_from = "RawMapParams")]
pub struct MapParams {
    lambda0: f64,
    beta0: f64,
    sigma: f64,
    beta1: f64,
}

#[derive(Deserialize)]
struct RawMapParams {
    lambda0: f64,
    beta0: f64,
    sigma: f64,
    beta1: f64,
}

impl TryFrom<RawMapParams> for MapParams {
    type Error = Error;
    fn try_from(r: RawMapParams) -> Result<Self> {
        MapParams::new(r.lambda0, r.beta0, r.sigma, r.beta1)
    }
}

impl MapParams {
    pub fn new(lambda0: f64, beta0: f64, sigma: f64, beta1: f64) -> Result<Self> {
        if !(lambda0 > 0.0 && lambda0 < 1.0 / 3.0) {
            return Err(Error::Range(format!("lambda0 = {lambda0} not in (0, 1/3)")));
        }
        if !(beta0 > 6.0) {
            return Err(Error::Range(format!("beta0 = {beta0} not > 6")));
        }
        if !(sigma > 0.0 && sigma < 1.0 / 3.0) {
            return Err(Error::Range(format!("sigma = {sigma} not in (0, 1/3)")));
        }
        if !(beta1 > 3.0 && beta1 < 4.0) {
            return Err(Error::Range(format!("beta1 = {beta1} not in (3, 4)")));
        }
        Ok(Self { lambda0, beta0, sigma, beta1 })
    }

    /// Standard parameter set used throughout the experiments.
    pub fn standard() -> Self {
        Self::new(0.3, 7.0, 0.25, 3.5).unwrap()
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }
    pub fn beta0(&self) -> f64 {
        self.beta0
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn beta1(&self) -> f64 {
        self.beta1
    }
    /// Horizontal expansion rate of `G`, `alpha = 1/lambda0`.
    pub fn alpha_exp(&self) -> f64 {
        1.0 / self.lambda0
    }
}

/// A point of the cube `[0,1]^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Checks membership of the cube up to `COORD_TOL`.
    pub fn in_cube(&self) -> bool {
        let ok = |v: f64| (-COORD_TOL..=1.0 + COORD_TOL).contains(&v);
        ok(self.x) && ok(self.y) && ok(self.z)
    }

    /// Split norm `|dx| + |dy| + |dz|` (stable + central + unstable distances).
    pub fn split_dist(&self, other: &Point3) -> f64 {
        (self.x - other.x).abs() + (self.y - other.y).abs() + (self.z - other.z).abs()
    }

    /// Max of coordinate distances, used for region and ball tests.
    pub fn max_dist(&self, other: &Point3) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// Fixed saddle `Q = (0,0,0)`.
pub const Q: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };
/// Fixed saddle `P = (0,1,0)`.
pub const P: Point3 = Point3 { x: 0.0, y: 1.0, z: 0.0 };

/// Region tags for the horseshoe slabs and the planar rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    R0,
    R1,
    S1,
    S2,
    S3,
    Outside,
}

/// Horseshoe-domain membership: `R0` for `z` in `[0, 1/6]`, `R1` for `z` in
/// `[5/6, 1]`. Shared boundaries cannot occur (the slabs are disjoint);
/// ties at slab edges resolve by the closed intervals.
pub fn horseshoe_region(p: &Point3) -> Region {
    if !p.in_cube() {
        return Region::Outside;
    }
    if p.z <= 1.0 / 6.0 + COORD_TOL {
        Region::R0
    } else if p.z >= 5.0 / 6.0 - COORD_TOL {
        Region::R1
    } else {
        Region::Outside
    }
}

/// Planar-domain membership against the three rectangles
/// `S1 = [0, lambda0] x [0,1] x {0}`, `S2 = [3/4 - lambda0, 3/4] x [0, sigma] x {0}`,
/// `S3 = [0, lambda0] x [0,1] x {5/6}`. Points on a shared boundary go to the
/// lower-index rectangle.
pub fn planar_region(p: &Point3, params: &MapParams) -> Region {
    let l0 = params.lambda0;
    let on_p0 = p.z.abs() <= COORD_TOL;
    let on_p1 = (p.z - 5.0 / 6.0).abs() <= COORD_TOL;
    let in_unit = |v: f64| (-COORD_TOL..=1.0 + COORD_TOL).contains(&v);
    if !in_unit(p.x) || !in_unit(p.y) {
        return Region::Outside;
    }
    if on_p0 {
        if p.x <= l0 + COORD_TOL {
            return Region::S1;
        }
        if p.x >= 0.75 - l0 - COORD_TOL && p.x <= 0.75 + COORD_TOL && p.y <= params.sigma + COORD_TOL {
            return Region::S2;
        }
        return Region::Outside;
    }
    if on_p1 && p.x <= l0 + COORD_TOL {
        return Region::S3;
    }
    Region::Outside
}

/// Time-`n` map of the flow `y' = (1-y)y`:
/// `f^n(y) = y / (y + (1-y) e^{-n})`, extended by `f^n(0) = 0`.
///
/// The quotient form is an algebraic rewrite of `1/(1 - (1 - 1/y) e^{-n})`
/// that is total at `y = 0`.
pub fn flow_map(y: f64, n: i64) -> f64 {
    let e = (-(n as f64)).exp();
    y / (y + (1.0 - y) * e)
}

/// Closed-form derivative of the time-one flow map:
/// `f'(y) = e^{-1} / (y + (1-y) e^{-1})^2`.
pub fn flow_derivative(y: f64) -> f64 {
    let e = (-1.0f64).exp();
    let d = y + (1.0 - y) * e;
    e / (d * d)
}

/// One step of the horseshoe `F`, branch chosen by the slab containing `p`.
/// The image may leave the cube; the caller checks escape.
pub fn horseshoe_f(p: &Point3, params: &MapParams) -> Result<Point3> {
    match horseshoe_region(p) {
        Region::R0 => Ok(Point3::new(params.lambda0 * p.x, flow_map(p.y, 1), params.beta0 * p.z)),
        Region::R1 => Ok(Point3::new(
            0.75 - params.lambda0 * p.x,
            params.sigma * (1.0 - p.y),
            params.beta1 * (p.z - 5.0 / 6.0),
        )),
        _ => Err(Error::Domain(format!("{p:?} not in R0 u R1"))),
    }
}

/// Exact inverse of the requested branch of `F`. The result must land in the
/// corresponding slab, otherwise `p` was not in that branch image.
pub fn horseshoe_f_inv(p: &Point3, branch: u8, params: &MapParams) -> Result<Point3> {
    let q = match branch {
        0 => Point3::new(p.x / params.lambda0, flow_map(p.y, -1), p.z / params.beta0),
        1 => Point3::new(
            (0.75 - p.x) / params.lambda0,
            1.0 - p.y / params.sigma,
            p.z / params.beta1 + 5.0 / 6.0,
        ),
        _ => return Err(Error::Range(format!("branch {branch} not in {{0,1}}"))),
    };
    let want = if branch == 0 { Region::R0 } else { Region::R1 };
    if horseshoe_region(&q) != want {
        return Err(Error::Domain(format!("{p:?} not in the image of branch {branch}")));
    }
    Ok(q)
}

/// Inverse of `F` with the branch selected from the coordinates of `p`:
/// the two branch images have disjoint x-ranges (`[0, lambda0]` versus
/// `[3/4 - lambda0, 3/4]`).
pub fn horseshoe_f_inv_auto(p: &Point3, params: &MapParams) -> Result<Point3> {
    if p.x <= params.lambda0 + COORD_TOL {
        horseshoe_f_inv(p, 0, params)
    } else if p.x >= 0.75 - params.lambda0 - COORD_TOL {
        horseshoe_f_inv(p, 1, params)
    } else {
        Err(Error::Domain(format!("{p:?} not in the image of either branch")))
    }
}

/// `log |DF|` along the one-dimensional center direction: `log f'(y)` on
/// `R0` and `log sigma` on `R1`.
pub fn central_log_derivative(p: &Point3, params: &MapParams) -> Result<f64> {
    match horseshoe_region(p) {
        Region::R0 => Ok(flow_derivative(p.y).ln()),
        Region::R1 => Ok(params.sigma.ln()),
        _ => Err(Error::Domain(format!("{p:?} not in R0 u R1"))),
    }
}

/// Projection onto the planes `P0`, `P1`: collapses `z` to `0` on `R0` and to
/// `5/6` on `R1`.
pub fn projection_pi(p: &Point3) -> Result<Point3> {
    match horseshoe_region(p) {
        Region::R0 => Ok(Point3::new(p.x, p.y, 0.0)),
        Region::R1 => Ok(Point3::new(p.x, p.y, 5.0 / 6.0)),
        _ => Err(Error::Domain(format!("{p:?} not in R0 u R1"))),
    }
}

/// The planar map `G`, restriction per rectangle:
/// `G1 = (alpha x, f^{-1}(y), 0)`, `G2 = (alpha (3/4 - x), 1 - y/sigma, 5/6)`,
/// `G3 = (alpha x, f^{-1}(y), 0)`.
pub fn planar_g(p: &Point3, params: &MapParams) -> Result<Point3> {
    let a = params.alpha_exp();
    match planar_region(p, params) {
        Region::S1 | Region::S3 => Ok(Point3::new(a * p.x, flow_map(p.y, -1), 0.0)),
        Region::S2 => Ok(Point3::new(a * (0.75 - p.x), 1.0 - p.y / params.sigma, 5.0 / 6.0)),
        _ => Err(Error::Domain(format!("{p:?} not in S1 u S2 u S3"))),
    }
}

/// Per-step log of the weakest expansion of `DG` at `p`. `DG` is diagonal:
/// `+-alpha` horizontally and `g0' = 1/f'(f^{-1}(y))` (or `-1/sigma` on `S2`)
/// vertically.
pub fn planar_g_log_min_expansion(p: &Point3, params: &MapParams) -> Result<f64> {
    let la = params.alpha_exp().ln();
    match planar_region(p, params) {
        Region::S1 | Region::S3 => {
            let g0p = 1.0 / flow_derivative(flow_map(p.y, -1));
            Ok(la.min(g0p.ln()))
        }
        Region::S2 => Ok(la.min(-(params.sigma.ln()))),
        _ => Err(Error::Domain(format!("{p:?} not in S1 u S2 u S3"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn params_reject_out_of_range() {
        assert!(MapParams::new(0.4, 7.0, 0.25, 3.5).is_err());
        assert!(MapParams::new(0.3, 5.0, 0.25, 3.5).is_err());
        assert!(MapParams::new(0.3, 7.0, 0.5, 3.5).is_err());
        assert!(MapParams::new(0.3, 7.0, 0.25, 4.5).is_err());
        assert!(MapParams::new(0.3, 7.0, 0.25, 3.5).is_ok());
    }

    #[test]
    fn flow_fixed_points() {
        assert_eq!(flow_map(0.0, 1), 0.0);
        assert_eq!(flow_map(1.0, 5), 1.0);
        assert_abs_diff_eq!(flow_map(0.5, 1), 1.0 / (1.0 + (-1.0f64).exp()), epsilon = 1e-15);
    }

    #[test]
    fn flow_group_property() {
        for n in -5i64..=5 {
            for m in -5i64..=5 {
                for &y in &[0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
                    let a = flow_map(y, n + m);
                    let b = flow_map(flow_map(y, n), m);
                    assert!((a - b).abs() < 1e-10, "group property failed at y={y}, n={n}, m={m}");
                }
            }
        }
    }

    /// Central finite-difference oracle for f'.
    fn fd_flow_derivative(y: f64) -> f64 {
        let h = 1e-7;
        let (lo, hi) = if y < h {
            (y, y + h)
        } else if y > 1.0 - h {
            (y - h, y)
        } else {
            (y - h, y + h)
        };
        (flow_map(hi, 1) - flow_map(lo, 1)) / (hi - lo)
    }

    #[test]
    fn flow_derivative_matches_finite_differences() {
        for &y in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!((flow_derivative(y) - fd_flow_derivative(y)).abs() < 1e-6);
        }
        assert_abs_diff_eq!(flow_derivative(0.0), std::f64::consts::E, epsilon = 1e-12);
        assert_abs_diff_eq!(flow_derivative(1.0), (-1.0f64).exp(), epsilon = 1e-12);
        let e = (-1.0f64).exp();
        assert_abs_diff_eq!(flow_derivative(0.5), e / ((0.5 + 0.5 * e) * (0.5 + 0.5 * e)), epsilon = 1e-12);
    }

    #[test]
    fn flow_monotone_increasing() {
        let mut prev = flow_map(0.0, 1);
        for i in 1..=100 {
            let y = i as f64 / 100.0;
            let v = flow_map(y, 1);
            assert!(v > prev);
            prev = v;
        }
        // exactly two fixed points
        for &y in &[0.1, 0.5, 0.9] {
            assert!((flow_map(y, 1) - y).abs() > 1e-3);
        }
    }

    #[test]
    fn fixed_saddles() {
        let params = MapParams::standard();
        let fq = horseshoe_f(&Q, &params).unwrap();
        assert_eq!(fq, Q);
        let fp = horseshoe_f(&P, &params).unwrap();
        assert_abs_diff_eq!(fp.y, 1.0, epsilon = 1e-15);
        assert_eq!(fp.x, 0.0);
        assert_eq!(fp.z, 0.0);
    }

    #[test]
    fn r1_branch_worked_example() {
        let params = MapParams::standard();
        let p = Point3::new(0.1, 0.5, 0.9);
        let img = horseshoe_f(&p, &params).unwrap();
        assert_abs_diff_eq!(img.x, 0.72, epsilon = 1e-12);
        assert_abs_diff_eq!(img.y, 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(img.z, 3.5 * (0.9 - 5.0 / 6.0), epsilon = 1e-12);

        let back = horseshoe_f_inv(&img, 1, &params).unwrap();
        assert_abs_diff_eq!(back.x, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(back.y, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(back.z, 0.9, epsilon = 1e-12);
    }

    #[test]
    fn inverse_roundtrip_random() {
        let params = MapParams::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let in_r1 = rng.gen_bool(0.5);
            let z = if in_r1 { rng.gen_range(5.0 / 6.0..1.0) } else { rng.gen_range(0.0..1.0 / 6.0) };
            let p = Point3::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), z);
            let img = horseshoe_f(&p, &params).unwrap();
            let branch = if in_r1 { 1 } else { 0 };
            let back = horseshoe_f_inv(&img, branch, &params).unwrap();
            assert!(p.max_dist(&back) < 1e-12);
        }
    }

    #[test]
    fn central_log_derivative_branches() {
        let params = MapParams::standard();
        assert_abs_diff_eq!(central_log_derivative(&Q, &params).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(central_log_derivative(&P, &params).unwrap(), -1.0, epsilon = 1e-12);
        let p = Point3::new(0.2, 0.7, 0.9);
        assert_abs_diff_eq!(central_log_derivative(&p, &params).unwrap(), 0.25f64.ln(), epsilon = 1e-12);
        assert!(central_log_derivative(&Point3::new(0.0, 0.0, 0.5), &params).is_err());
    }

    #[test]
    fn central_log_derivative_matches_orbit_finite_differences() {
        let params = MapParams::standard();
        let h = 1e-7;
        for &y in &[0.1, 0.4, 0.8] {
            let p = Point3::new(0.2, y, 0.05);
            let a = horseshoe_f(&Point3::new(0.2, y - h, 0.05), &params).unwrap().y;
            let b = horseshoe_f(&Point3::new(0.2, y + h, 0.05), &params).unwrap().y;
            let fd = ((b - a) / (2.0 * h)).ln();
            assert!((central_log_derivative(&p, &params).unwrap() - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn projection_collapses_z() {
        let p0 = projection_pi(&Point3::new(0.2, 0.3, 0.1)).unwrap();
        assert_eq!(p0, Point3::new(0.2, 0.3, 0.0));
        let p1 = projection_pi(&Point3::new(0.2, 0.3, 0.9)).unwrap();
        assert_eq!(p1, Point3::new(0.2, 0.3, 5.0 / 6.0));
        assert!(projection_pi(&Point3::new(0.2, 0.3, 0.5)).is_err());
    }

    #[test]
    fn planar_g_branches() {
        let params = MapParams::standard();
        let gq = planar_g(&Q, &params).unwrap();
        assert_eq!(gq, Q);
        let gp = planar_g(&Point3::new(0.0, 1.0, 0.0), &params).unwrap();
        assert_eq!(gp, Point3::new(0.0, 1.0, 0.0));
        let g2 = planar_g(&Point3::new(0.7, 0.2, 0.0), &params).unwrap();
        assert_abs_diff_eq!(g2.x, (0.75 - 0.7) / 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(g2.y, 1.0 - 0.2 / 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(g2.z, 5.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn region_tags() {
        let params = MapParams::standard();
        assert_eq!(horseshoe_region(&Q), Region::R0);
        assert_eq!(planar_region(&Q, &params), Region::S1);
        assert_eq!(horseshoe_region(&Point3::new(0.0, 0.0, 0.5)), Region::Outside);
        assert_eq!(planar_region(&Point3::new(0.7, 0.1, 0.0), &params), Region::S2);
    }

    /// Random points on which both `pi . F^{-1}` and `G . pi` are defined.
    fn semiconjugacy_sample(rng: &mut ChaCha8Rng, params: &MapParams) -> Point3 {
        // draw a slab preimage and push it forward so F^{-1} is exact
        loop {
            let z = match rng.gen_range(0u8..3) {
                // R0 preimage landing in R0
                0 => rng.gen_range(0.0..1.0 / (6.0 * params.beta0())),
                // R0 preimage landing in R1
                1 => rng.gen_range(5.0 / (6.0 * params.beta0())..1.0 / params.beta0()),
                // R1 preimage landing in R0
                _ => rng.gen_range(5.0 / 6.0..5.0 / 6.0 + 1.0 / (6.0 * params.beta1())),
            };
            let q = Point3::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), z);
            let p = horseshoe_f(&q, params).unwrap();
            if horseshoe_region(&p) != Region::Outside {
                let proj = projection_pi(&p).unwrap();
                if planar_region(&proj, params) != Region::Outside {
                    return p;
                }
            }
        }
    }

    #[test]
    fn semiconjugacy_identity() {
        let params = MapParams::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let p = semiconjugacy_sample(&mut rng, &params);
            let lhs = projection_pi(&horseshoe_f_inv_auto(&p, &params).unwrap()).unwrap();
            let rhs = planar_g(&projection_pi(&p).unwrap(), &params).unwrap();
            assert!(lhs.split_dist(&rhs) < 1e-12, "pi.F^-1 != G.pi at {p:?}");
        }
    }

    #[test]
    fn f_r1_never_returns_to_r1() {
        // max z-image of R1 is beta1/6 < 5/6 for beta1 < 4
        for &b1 in &[3.01, 3.5, 3.99] {
            let params = MapParams::new(0.3, 7.0, 0.25, b1).unwrap();
            for i in 0..=100 {
                let z = 5.0 / 6.0 + (i as f64 / 100.0) / 6.0;
                let img = horseshoe_f(&Point3::new(0.5, 0.5, z), &params).unwrap();
                assert!(img.z < 5.0 / 6.0);
            }
        }
    }
}
