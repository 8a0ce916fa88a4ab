//! Closed-form equilibria of the single-strain model, Jacobian/eigenvalue
//! stability classification, the parameter-region map, the continuum family
//! of the compatible two-strain system, the persistence-threshold scan, and
//! saddle separatrix tracing.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{
    rhs_multistrain_raw, rhs_single, CostMode, MultiStrainParams, SingleStrainParams, State2,
    State4,
};
use crate::numerics::{eigenvalues_2x2, eigenvalues_4x4, solve_linear_4x4};

/// Eigenvalue real parts within this tolerance of zero make an equilibrium
/// nonhyperbolic.
pub const HYPERBOLICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    StableNodeOrFocus,
    Saddle,
    Unstable,
    Nonhyperbolic,
    OutsideDomain,
}

/// An equilibrium point with its linearization.
///
/// The origin is reported without a Jacobian: the crossing frequency
/// `i/(i+u)` has no limit there, so the model is not differentiable at it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub point: Vec<f64>,
    pub jacobian: Option<Vec<Vec<f64>>>,
    /// Complex eigenvalues, sorted by (real, imaginary) part.
    pub eigenvalues: Vec<Complex64>,
    pub classification: Classification,
}

/// Classify a point from its coordinates and eigenvalues.
pub fn classify(point: &[f64], eigenvalues: &[Complex64]) -> Classification {
    if point.iter().any(|&c| c < 0.0) {
        return Classification::OutsideDomain;
    }
    if eigenvalues.is_empty() || eigenvalues.iter().any(|e| e.re.abs() <= HYPERBOLICITY_TOL) {
        return Classification::Nonhyperbolic;
    }
    let negatives = eigenvalues
        .iter()
        .filter(|e| e.re < -HYPERBOLICITY_TOL)
        .count();
    if negatives == eigenvalues.len() {
        Classification::StableNodeOrFocus
    } else if negatives == 0 {
        Classification::Unstable
    } else {
        Classification::Saddle
    }
}

/// Jacobian of the single-strain field, entrywise in closed form.
/// Requires `i + u > 0`.
pub fn jacobian_single(s: State2, params: &SingleStrainParams) -> Result<[[f64; 2]; 2]> {
    params.validate()?;
    if s.total().is_nan() || s.total() <= 0.0 {
        return Err(Error::Domain("jacobian_single requires i + u > 0".into()));
    }
    Ok(jacobian_single_unchecked(s, params))
}

fn report_for(point: [f64; 2], params: &SingleStrainParams) -> EquilibriumReport {
    let s = State2 {
        i: point[0],
        u: point[1],
    };
    if s.total() > 0.0 {
        // jacobian is a closed-form expression, valid also at u < 0
        let jac = jacobian_single_unchecked(s, params);
        let eigs = eigenvalues_2x2(&jac);
        EquilibriumReport {
            point: point.to_vec(),
            jacobian: Some(jac.iter().map(|r| r.to_vec()).collect()),
            eigenvalues: eigs.to_vec(),
            classification: classify(&point, &eigs),
        }
    } else {
        EquilibriumReport {
            point: point.to_vec(),
            jacobian: None,
            eigenvalues: Vec::new(),
            classification: Classification::Nonhyperbolic,
        }
    }
}

fn jacobian_single_unchecked(s: State2, params: &SingleStrainParams) -> [[f64; 2]; 2] {
    let p = s.total();
    let (i, u, q) = (s.i, s.u, params.q);
    let d_freq = q * (i / (p * p) - 1.0 / p);
    let e22 = 1.0 + q * i * (u / (p * p) - 1.0 / p) - (2.0 * u + i);
    match params.cost_mode {
        CostMode::Mortality => [
            [params.tau - params.eta * (2.0 * i + u), -params.eta * i],
            [1.0 - params.tau + u * d_freq - u, e22],
        ],
        CostMode::Fecundity => [
            [params.mu * params.tau - (2.0 * i + u), -i],
            [params.mu * (1.0 - params.tau) + u * d_freq - u, e22],
        ],
    }
}

/// Interior equilibrium roots `i` of the mortality-mode model (with
/// `u = tau xi - i`). Empty when the discriminant is negative or the
/// quadratic degenerates without a root.
fn interior_roots(xi: f64, tau: f64, q: f64) -> Vec<f64> {
    if q == 0.0 {
        // linear case: one interior root when tau > 0 and xi < 1
        if tau > 0.0 && xi < 1.0 {
            return vec![xi * (1.0 - xi * tau) / (1.0 - xi)];
        }
        return Vec::new();
    }
    let b = tau * (xi - 1.0) - q;
    let disc = b * b - 4.0 * q * (1.0 - xi * tau);
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let i1 = tau * xi * (q - tau * (xi - 1.0) - s) / (2.0 * q);
    let i2 = tau * xi * (q - tau * (xi - 1.0) + s) / (2.0 * q);
    if disc == 0.0 {
        vec![i1]
    } else {
        vec![i1, i2]
    }
}

/// Larger interior root and its uninfected density, when admissible
/// (`u2 >= 0`); used by the sweep output.
pub(crate) fn admissible_larger_root(xi: f64, tau: f64, q: f64) -> Option<(f64, f64)> {
    let roots = interior_roots(xi, tau, q);
    let i2 = *roots.last()?;
    let u2 = tau * xi - i2;
    if u2 >= 0.0 {
        Some((i2, u2))
    } else {
        None
    }
}

/// All equilibria of the mortality-mode single-strain model: the disease-free
/// point `(0, 1)`, the origin, and the closed-form interior roots with
/// `u = tau xi - i`. Points with `u < 0` are included and labeled
/// `outside_domain`.
pub fn single_equilibria(params: &SingleStrainParams) -> Result<Vec<EquilibriumReport>> {
    params.validate()?;
    if params.cost_mode != CostMode::Mortality {
        return Err(Error::Domain(
            "single_equilibria: closed forms exist only for the mortality cost mode".into(),
        ));
    }
    let xi = params.xi();
    let mut reports = vec![
        report_for([0.0, 1.0], params),
        report_for([0.0, 0.0], params),
    ];
    for i in interior_roots(xi, params.tau, params.q) {
        let u = params.tau * xi - i;
        reports.push(report_for([i, u], params));
    }
    Ok(reports)
}

/// Interior equilibria of the fecundity-cost variant, located numerically by
/// damped Newton from a deterministic seed grid over `(0, mu tau)^2`. The
/// disease-free point and the origin are always included.
pub fn single_equilibria_fecundity(params: &SingleStrainParams) -> Result<Vec<EquilibriumReport>> {
    params.validate()?;
    if params.cost_mode != CostMode::Fecundity {
        return Err(Error::Domain(
            "single_equilibria_fecundity: wrong cost mode".into(),
        ));
    }
    let mut reports = vec![
        report_for([0.0, 1.0], params),
        report_for([0.0, 0.0], params),
    ];
    let cap = params.mu * params.tau;
    // under complete transmission the fully infected population at capacity
    // is stationary; interior Newton seeds do not reach boundary points
    if params.tau == 1.0 && cap > 0.0 {
        reports.push(report_for([cap, 0.0], params));
    }
    if cap > 0.0 {
        let mut found: Vec<[f64; 2]> = Vec::new();
        for a in 1..=5 {
            for b in 1..=5 {
                let seed = [cap * a as f64 / 6.0, cap * b as f64 / 6.0];
                if let Some(pt) = newton_2d(seed, params) {
                    if pt[0] > 1e-9
                        && pt[1] > -1e-9
                        && !found
                            .iter()
                            .any(|f| (f[0] - pt[0]).abs() + (f[1] - pt[1]).abs() < 1e-7)
                    {
                        found.push(pt);
                    }
                }
            }
        }
        found.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        for pt in found {
            reports.push(report_for([pt[0], pt[1].max(0.0)], params));
        }
    }
    Ok(reports)
}

fn newton_2d(seed: [f64; 2], params: &SingleStrainParams) -> Option<[f64; 2]> {
    let mut y = seed;
    let f = |y: [f64; 2]| -> Option<[f64; 2]> {
        if y[0] + y[1] <= 1e-12 {
            return None;
        }
        rhs_single(
            State2 {
                i: y[0].max(0.0),
                u: y[1].max(0.0),
            },
            params,
        )
        .ok()
    };
    let mut fy = f(y)?;
    for _ in 0..200 {
        let norm = fy[0].abs().max(fy[1].abs());
        if norm < 1e-12 {
            return Some(y);
        }
        let j = jacobian_single_unchecked(State2 { i: y[0], u: y[1] }, params);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = (-fy[0] * j[1][1] + fy[1] * j[0][1]) / det;
        let dy = (-fy[1] * j[0][0] + fy[0] * j[1][0]) / det;
        let mut t = 1.0;
        loop {
            let cand = [y[0] + t * dx, y[1] + t * dy];
            if cand[0] > 0.0 && cand[0] + cand[1] > 1e-12 {
                if let Some(fc) = f(cand) {
                    if fc[0].abs().max(fc[1].abs()) < norm {
                        y = cand;
                        fy = fc;
                        break;
                    }
                }
            }
            t *= 0.5;
            if t < 1e-8 {
                return None;
            }
        }
    }
    None
}

/// Strata of the `(xi, tau, q)` parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionLabel {
    /// Only the disease-free equilibrium exists.
    A,
    /// Interior roots exist but the larger one has `u < 0`.
    #[serde(rename = "B_only")]
    BOnly,
    /// Interior roots exist and the larger one is admissible (`u >= 0`).
    C,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::A => "A",
            RegionLabel::BOnly => "B_only",
            RegionLabel::C => "C",
        }
    }
}

pub(crate) fn region_classify_raw(xi: f64, tau: f64, q: f64) -> RegionLabel {
    if q == 0.0 {
        // degenerate slice: the equilibrium equation is linear, so the
        // discriminant rule says nothing; classify by the actual interior
        // root. It exists for tau > 0, xi < 1 and has u = xi (tau - 1)/(1 - xi),
        // admissible only under complete transmission.
        if tau > 0.0 && xi < 1.0 {
            return if tau >= 1.0 {
                RegionLabel::C
            } else {
                RegionLabel::BOnly
            };
        }
        return RegionLabel::A;
    }
    let b = tau * (xi - 1.0) - q;
    let disc = b * b - 4.0 * q * (1.0 - xi * tau);
    if disc < 0.0 {
        RegionLabel::A
    } else if q + tau * (xi - 1.0) >= 0.0 {
        RegionLabel::C
    } else {
        RegionLabel::BOnly
    }
}

/// Classify a parameter triple into region A, B_only, or C by the interior
/// discriminant and the admissibility condition for the larger root.
pub fn region_classify(xi: f64, tau: f64, q: f64) -> Result<RegionLabel> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::Domain(format!(
            "region_classify: xi must be in (0,1], got {xi}"
        )));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!(
            "region_classify: tau must be in [0,1], got {tau}"
        )));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "region_classify: q must be in [0,1], got {q}"
        )));
    }
    Ok(region_classify_raw(xi, tau, q))
}

/// One point of the continuum equilibrium family of the compatible
/// two-strain system at a prescribed uninfected density `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuumPoint {
    pub i_a: f64,
    pub i_b: f64,
    /// False when either strain density comes out negative (the formula
    /// point is then not biological).
    pub nonnegative: bool,
}

/// Evaluate the closed-form continuum family of the simplified compatible
/// system. Requires `u` in `(0, tau xi)` and distinct incompatibility levels
/// `q0_a != q0_b` (the family is singular when they coincide).
pub fn continuum_equilibria(u: f64, params: &MultiStrainParams) -> Result<ContinuumPoint> {
    params.validate()?;
    if !params.is_simplified_compatible() {
        return Err(Error::Domain(
            "continuum_equilibria requires a simplified-compatible preset".into(),
        ));
    }
    if params.q0_a == params.q0_b {
        return Err(Error::Singular(
            "continuum_equilibria: q0_a == q0_b makes the family singular".into(),
        ));
    }
    let (tau, eta) = (params.tau_a, params.eta_a);
    let xi = 1.0 / eta;
    if !(u > 0.0 && u < tau * xi) {
        return Err(Error::Domain(format!(
            "continuum_equilibria: u must be in (0, {}), got {u}",
            tau * xi
        )));
    }
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let denom = eta * eta * (params.q0_a - params.q0_b) * u;
    let i_a = (-t3 - eta * params.q0_b * tau * u
        + eta * eta * params.q0_b * u * u
        + t2 * (1.0 + (eta - 1.0) * u))
        / denom;
    let i_b = (t3 + eta * params.q0_a * tau * u
        - eta * eta * params.q0_a * u * u
        - t2 * (1.0 + (eta - 1.0) * u))
        / denom;
    Ok(ContinuumPoint {
        i_a,
        i_b,
        nonnegative: i_a >= 0.0 && i_b >= 0.0,
    })
}

/// Smallest transmission efficacy for which region C is non-empty over
/// `(xi, q) in (0,1]^2`, found by a grid scan at `resolution` points per axis
/// followed by bisection refinement in `tau` against the same grid.
pub fn tau_persistence_threshold(resolution: usize) -> Result<f64> {
    if resolution < 100 {
        return Err(Error::Domain(format!(
            "tau_persistence_threshold: resolution must be >= 100, got {resolution}"
        )));
    }
    let n = resolution;
    let feasible = |tau: f64| -> bool {
        for j in 1..=n {
            let xi = j as f64 / n as f64;
            for l in 0..=n {
                let q = l as f64 / n as f64;
                if region_classify_raw(xi, tau, q) == RegionLabel::C {
                    return true;
                }
            }
        }
        false
    };
    let mut first_feasible = None;
    for k in 0..=n {
        let tau = k as f64 / n as f64;
        if feasible(tau) {
            first_feasible = Some(k);
            break;
        }
    }
    let k = first_feasible.expect("region C is non-empty at tau = 1");
    if k == 0 {
        return Ok(0.0);
    }
    let mut lo = (k - 1) as f64 / n as f64;
    let mut hi = k as f64 / n as f64;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Arclength step used when tracing separatrices.
const SEPARATRIX_STEP: f64 = 1e-3;
const SEPARATRIX_SEED: f64 = 1e-6;

/// Approximate the stable manifold of a saddle by integrating the
/// time-reversed field (normalized to unit speed) from small offsets along
/// the stable eigenvector. The polyline runs through the saddle and is
/// clipped to the non-negative quadrant; points are spaced `1e-3` apart in
/// arc length.
pub fn saddle_separatrix(
    params: &SingleStrainParams,
    report: &EquilibriumReport,
    arc_length: f64,
) -> Result<Vec<[f64; 2]>> {
    params.validate()?;
    if report.classification != Classification::Saddle {
        return Err(Error::Domain(
            "saddle_separatrix requires a saddle equilibrium".into(),
        ));
    }
    if report.point.len() != 2 {
        return Err(Error::Domain(
            "saddle_separatrix expects a planar equilibrium".into(),
        ));
    }
    if !(arc_length.is_finite() && arc_length > 0.0) {
        return Err(Error::Domain(
            "saddle_separatrix: arc_length must be positive".into(),
        ));
    }
    let saddle = [report.point[0], report.point[1]];
    let jac = jacobian_single_unchecked(
        State2 {
            i: saddle[0],
            u: saddle[1],
        },
        params,
    );
    let eigs = eigenvalues_2x2(&jac);
    let lambda = eigs
        .iter()
        .filter(|e| e.im == 0.0 && e.re < 0.0)
        .map(|e| e.re)
        .fold(f64::NAN, f64::min);
    if !lambda.is_finite() {
        return Err(Error::Domain("saddle has no real stable eigenvalue".into()));
    }
    // eigenvector of the 2x2: rows of (J - lambda I) are parallel; take the
    // better-conditioned null direction
    let r1 = [jac[0][0] - lambda, jac[0][1]];
    let r2 = [jac[1][0], jac[1][1] - lambda];
    let v = if r1[0].abs() + r1[1].abs() >= r2[0].abs() + r2[1].abs() {
        [r1[1], -r1[0]]
    } else {
        [r2[1], -r2[0]]
    };
    let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if norm == 0.0 {
        return Err(Error::Domain("degenerate stable eigenvector".into()));
    }
    let v = [v[0] / norm, v[1] / norm];

    let field = params.vector_field();
    // unit-speed reversed field; None once the flow magnitude vanishes
    let g = |y: [f64; 2]| -> Option<[f64; 2]> {
        let mut dy = [0.0; 2];
        field(&y, &mut dy);
        let n = (dy[0] * dy[0] + dy[1] * dy[1]).sqrt();
        if n < 1e-13 {
            None
        } else {
            Some([-dy[0] / n, -dy[1] / n])
        }
    };

    let trace = |dir: f64| -> Vec<[f64; 2]> {
        let mut pts = Vec::new();
        let mut y = [
            saddle[0] + dir * SEPARATRIX_SEED * v[0],
            saddle[1] + dir * SEPARATRIX_SEED * v[1],
        ];
        if y[0] < 0.0 || y[1] < 0.0 {
            return pts;
        }
        pts.push(y);
        let steps = (arc_length / SEPARATRIX_STEP).ceil() as usize;
        for _ in 0..steps {
            let Some(k1) = g(y) else { break };
            let Some(k2) = g([
                y[0] + 0.5 * SEPARATRIX_STEP * k1[0],
                y[1] + 0.5 * SEPARATRIX_STEP * k1[1],
            ]) else {
                break;
            };
            let Some(k3) = g([
                y[0] + 0.5 * SEPARATRIX_STEP * k2[0],
                y[1] + 0.5 * SEPARATRIX_STEP * k2[1],
            ]) else {
                break;
            };
            let Some(k4) = g([
                y[0] + SEPARATRIX_STEP * k3[0],
                y[1] + SEPARATRIX_STEP * k3[1],
            ]) else {
                break;
            };
            let next = [
                y[0] + SEPARATRIX_STEP / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                y[1] + SEPARATRIX_STEP / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ];
            if next[0] < 0.0 || next[1] < 0.0 {
                // clip the last segment to the quadrant boundary
                let mut t = 1.0f64;
                if next[0] < 0.0 {
                    t = t.min(y[0] / (y[0] - next[0]));
                }
                if next[1] < 0.0 {
                    t = t.min(y[1] / (y[1] - next[1]));
                }
                pts.push([y[0] + t * (next[0] - y[0]), y[1] + t * (next[1] - y[1])]);
                break;
            }
            pts.push(next);
            y = next;
        }
        pts
    };

    let minus = trace(-1.0);
    let plus = trace(1.0);
    let mut polyline = Vec::with_capacity(minus.len() + plus.len() + 1);
    polyline.extend(minus.into_iter().rev());
    polyline.push(saddle);
    polyline.extend(plus);
    Ok(polyline)
}

/// Analytic Jacobian of the two-strain field. Requires total population > 0.
pub fn jacobian_multistrain(s: State4, params: &MultiStrainParams) -> Result<[[f64; 4]; 4]> {
    params.validate()?;
    let p = s.total();
    if p.is_nan() || p <= 0.0 {
        return Err(Error::Domain(
            "jacobian_multistrain requires total population > 0".into(),
        ));
    }
    Ok(jacobian_multistrain_unchecked(&s.as_array(), params))
}

fn jacobian_multistrain_unchecked(y: &[f64; 4], pr: &MultiStrainParams) -> [[f64; 4]; 4] {
    let [i_ab, i_a, i_b, u] = *y;
    let p = i_ab + i_a + i_b + u;
    let p2 = p * p;
    // d(i_x / p)/dy_j = (delta_xj p - i_x) / p^2
    let dfrac = |ix: f64, j: usize, x: usize| -> f64 { (if j == x { p } else { 0.0 } - ix) / p2 };
    let g_a = 1.0 - pr.qa_b * i_b / p - pr.qa_ab * i_ab / p;
    let g_b = 1.0 - pr.qb_a * i_a / p - pr.qb_ab * i_ab / p;
    let g_0 = 1.0 - pr.q0_a * i_a / p - pr.q0_b * i_b / p - pr.q0_ab * i_ab / p;
    let dg_a = |j: usize| -pr.qa_b * dfrac(i_b, j, 2) - pr.qa_ab * dfrac(i_ab, j, 0);
    let dg_b = |j: usize| -pr.qb_a * dfrac(i_a, j, 1) - pr.qb_ab * dfrac(i_ab, j, 0);
    let dg_0 = |j: usize| {
        -pr.q0_a * dfrac(i_a, j, 1) - pr.q0_b * dfrac(i_b, j, 2) - pr.q0_ab * dfrac(i_ab, j, 0)
    };
    let eta_ab = pr.eta_ab();
    let mut jac = [[0.0; 4]; 4];
    #[allow(clippy::needless_range_loop)] // column index drives the deltas
    for j in 0..4 {
        let delta = |x: usize| if j == x { 1.0 } else { 0.0 };
        jac[0][j] = pr.tau_a * pr.tau_b * delta(0) - eta_ab * (i_ab + p * delta(0));
        jac[1][j] = pr.tau_a * (1.0 - pr.tau_b) * delta(0)
            + pr.tau_a * (g_a * delta(1) + i_a * dg_a(j))
            - pr.eta_a * (i_a + p * delta(1));
        jac[2][j] = (1.0 - pr.tau_a) * pr.tau_b * delta(0)
            + pr.tau_b * (g_b * delta(2) + i_b * dg_b(j))
            - pr.eta_b * (i_b + p * delta(2));
        jac[3][j] = (1.0 - pr.tau_a) * (1.0 - pr.tau_b) * delta(0)
            + (1.0 - pr.tau_a) * (g_a * delta(1) + i_a * dg_a(j))
            + (1.0 - pr.tau_b) * (g_b * delta(2) + i_b * dg_b(j))
            + (g_0 * delta(3) + u * dg_0(j))
            - (u + p * delta(3));
    }
    jac
}

/// Locate a two-strain equilibrium by damped Newton iteration from a seed
/// state (tolerance 1e-12 on the field sup-norm, at most 200 iterations),
/// then classify it by the eigenvalues of the analytic Jacobian.
pub fn multistrain_equilibrium(
    params: &MultiStrainParams,
    seed: State4,
) -> Result<EquilibriumReport> {
    params.validate()?;
    let mut y = seed.as_array();
    if y.iter().sum::<f64>() <= 0.0 {
        return Err(Error::Domain(
            "multistrain_equilibrium: seed must have positive total".into(),
        ));
    }
    let norm = |f: &[f64; 4]| f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut fy = rhs_multistrain_raw(&y, params);
    for _ in 0..200 {
        if norm(&fy) < 1e-12 {
            for v in y.iter_mut() {
                if *v < 0.0 && *v >= -1e-12 {
                    *v = 0.0;
                }
            }
            let jac = jacobian_multistrain_unchecked(&y, params);
            let eigs = eigenvalues_4x4(&jac);
            return Ok(EquilibriumReport {
                point: y.to_vec(),
                jacobian: Some(jac.iter().map(|r| r.to_vec()).collect()),
                eigenvalues: eigs.to_vec(),
                classification: classify(&y, &eigs),
            });
        }
        let jac = jacobian_multistrain_unchecked(&y, params);
        let rhs_neg = [-fy[0], -fy[1], -fy[2], -fy[3]];
        let delta = solve_linear_4x4(&jac, &rhs_neg).ok_or_else(|| {
            Error::Convergence("multistrain_equilibrium: singular Jacobian".into())
        })?;
        let mut t = 1.0;
        let mut advanced = false;
        while t >= 1e-8 {
            let cand = [
                y[0] + t * delta[0],
                y[1] + t * delta[1],
                y[2] + t * delta[2],
                y[3] + t * delta[3],
            ];
            let total: f64 = cand.iter().sum();
            if total > 1e-12 && cand.iter().all(|&v| v > -0.5) {
                let fc = rhs_multistrain_raw(&cand, params);
                if norm(&fc) < norm(&fy) {
                    y = cand;
                    fy = fc;
                    advanced = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !advanced {
            return Err(Error::Convergence(
                "multistrain_equilibrium: damped Newton stalled before reaching tolerance".into(),
            ));
        }
    }
    Err(Error::Convergence(
        "multistrain_equilibrium: no convergence within 200 iterations".into(),
    ))
}
