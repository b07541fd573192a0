use nalgebra::{DMatrix, DVector};

use super::group::{omega_raw, HPoint};
use crate::error::{invalid, CarnotError, Result};
use crate::numeric::GAUSS5;

/// A map of `R^{2n}` given by evaluation.
pub trait PlanarMap: Sync {
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>>;
}

impl<F> PlanarMap for F
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>> + Sync,
{
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self(x)
    }
}

/// A map of `H(n)` given by evaluation.
pub trait HeisenbergMap: Sync {
    fn apply_h(&self, p: &HPoint) -> Result<HPoint>;
}

impl<F> HeisenbergMap for F
where
    F: Fn(&HPoint) -> Result<HPoint> + Sync,
{
    fn apply_h(&self, p: &HPoint) -> Result<HPoint> {
        self(p)
    }
}

/// Path from the base point along which `F` is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathStrategy {
    /// One segment per coordinate, in coordinate order.
    #[default]
    CoordinateAxes,
    Straight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftConfig {
    pub path: PathStrategy,
    /// Five-point Gauss-Legendre panels per unit of path length.
    pub panels_per_unit: f64,
    /// Step of the central differences giving `Dφ v`.
    pub fd_step: f64,
    /// Side of the square test loops.
    pub loop_side: f64,
    /// Test loops are centred at the base point and at this many points of
    /// the cube of half-width `loop_radius` around it.
    pub loop_count: usize,
    pub loop_radius: f64,
    pub loop_tol: f64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self {
            path: PathStrategy::CoordinateAxes,
            panels_per_unit: 16.0,
            fd_step: 1e-5,
            loop_side: 0.5,
            loop_count: 4,
            loop_radius: 1.0,
            loop_tol: 1e-6,
        }
    }
}

/// `f̃(x, x̄) = (φ(x), x̄ + F(x))` with `F(base) = a` and `dF = φ*λ − λ`.
pub struct LiftedMap<M> {
    phi: M,
    a: f64,
    base: DVector<f64>,
    cfg: LiftConfig,
    loop_residual: f64,
}

/// `(φ*λ − λ)_y(v) = ½ω(φ(y), Dφ(y)v) − ½ω(y, v)` with `Dφ v` by central
/// differences.
pub(crate) fn primitive_integrand(phi: &dyn PlanarMap, y: &DVector<f64>, v: &DVector<f64>, h: f64) -> Result<f64> {
    let fy = phi.apply(y)?;
    let plus = phi.apply(&(y + v * h))?;
    let minus = phi.apply(&(y - v * h))?;
    let dv = (plus - minus) / (2.0 * h);
    let val = 0.5 * omega_raw(fy.as_slice(), dv.as_slice()) - 0.5 * omega_raw(y.as_slice(), v.as_slice());
    if !val.is_finite() {
        return Err(CarnotError::InvalidInput(format!("map evaluation is not finite near {y}")));
    }
    Ok(val)
}

/// `∫ (φ*λ − λ)` along the segment `from → to`.
pub(crate) fn segment_integral(phi: &dyn PlanarMap, from: &DVector<f64>, to: &DVector<f64>, cfg: &LiftConfig) -> Result<f64> {
    let delta = to - from;
    let len = delta.norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    let dir = &delta / len;
    let panels = (len * cfg.panels_per_unit).ceil().max(1.0) as usize;
    let w = len / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        for &(s, weight) in &GAUSS5 {
            let y = from + &dir * (w * (k as f64 + s));
            total += weight * w * primitive_integrand(phi, &y, &dir, cfg.fd_step)?;
        }
    }
    Ok(total)
}

fn path_vertices(from: &DVector<f64>, to: &DVector<f64>, path: PathStrategy) -> Vec<DVector<f64>> {
    match path {
        PathStrategy::Straight => vec![from.clone(), to.clone()],
        PathStrategy::CoordinateAxes => {
            let mut out = vec![from.clone()];
            let mut cur = from.clone();
            for i in 0..from.len() {
                if cur[i] != to[i] {
                    cur[i] = to[i];
                    out.push(cur.clone());
                }
            }
            out
        }
    }
}

pub(crate) fn path_integral(phi: &dyn PlanarMap, from: &DVector<f64>, to: &DVector<f64>, cfg: &LiftConfig) -> Result<f64> {
    let verts = path_vertices(from, to, cfg.path);
    verts.windows(2).map(|w| segment_integral(phi, &w[0], &w[1], cfg)).sum()
}

/// Deterministic low-discrepancy points of `[-1, 1]^d`.
fn halton(k: usize, d: usize) -> Vec<f64> {
    const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    (0..d)
        .map(|j| {
            let b = PRIMES[j % PRIMES.len()];
            let (mut f, mut r, mut i) = (1.0, 0.0, k + 1);
            while i > 0 {
                f /= b as f64;
                r += f * (i % b) as f64;
                i /= b;
            }
            2.0 * r - 1.0
        })
        .collect()
}

/// Largest `|∮ (φ*λ − λ)|` over square loops in every coordinate plane.
fn loop_certificate(phi: &dyn PlanarMap, base: &DVector<f64>, cfg: &LiftConfig) -> Result<f64> {
    let d = base.len();
    let mut centres = vec![base.clone()];
    for k in 0..cfg.loop_count {
        let off = halton(k, d);
        centres.push(base + DVector::from_vec(off) * cfg.loop_radius);
    }
    let half = 0.5 * cfg.loop_side;
    let mut worst: f64 = 0.0;
    for c in &centres {
        for i in 0..d {
            for j in i + 1..d {
                let corner = |si: f64, sj: f64| {
                    let mut p = c.clone();
                    p[i] += si * half;
                    p[j] += sj * half;
                    p
                };
                let loop_pts = [corner(-1.0, -1.0), corner(1.0, -1.0), corner(1.0, 1.0), corner(-1.0, 1.0)];
                let mut total = 0.0;
                for e in 0..4 {
                    total += segment_integral(phi, &loop_pts[e], &loop_pts[(e + 1) % 4], cfg)?;
                }
                worst = worst.max(total.abs());
            }
        }
    }
    Ok(worst)
}

/// Lifts a symplectomorphism of `R^{2n}` to a volume preserving map of `H(n)`.
///
/// The loop certificate doubles as the symplecticity test: `φ*λ − λ` is closed
/// exactly when `φ*ω = ω`.
pub fn lift_symplectomorphism<M: PlanarMap>(phi: M, a: f64, base: DVector<f64>, cfg: LiftConfig) -> Result<LiftedMap<M>> {
    if base.len() % 2 != 0 || base.is_empty() {
        return invalid(format!("base point must have even positive length, got {}", base.len()));
    }
    if !(cfg.fd_step > 0.0 && cfg.panels_per_unit > 0.0 && cfg.loop_side > 0.0) {
        return invalid("lift configuration needs positive steps");
    }
    let image = phi.apply(&base)?;
    if image.len() != base.len() {
        return invalid(format!("map changes dimension {} -> {}", base.len(), image.len()));
    }
    let loop_residual = loop_certificate(&phi, &base, &cfg)?;
    if loop_residual > cfg.loop_tol {
        return Err(CarnotError::NotSymplectic { residual: loop_residual });
    }
    Ok(LiftedMap { phi, a, base, cfg, loop_residual })
}

impl<M: PlanarMap> LiftedMap<M> {
    pub fn phi(&self) -> &M {
        &self.phi
    }

    pub fn offset(&self) -> f64 {
        self.a
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    pub fn loop_residual(&self) -> f64 {
        self.loop_residual
    }

    pub fn config(&self) -> &LiftConfig {
        &self.cfg
    }

    /// Generating function `F(x)`.
    pub fn generating(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.base.len() {
            return invalid(format!("expected a point of R^{}", self.base.len()));
        }
        Ok(self.a + path_integral(&self.phi, &self.base, x, &self.cfg)?)
    }

    pub fn apply(&self, p: &HPoint) -> Result<HPoint> {
        let f = self.generating(&p.x)?;
        Ok(HPoint { x: self.phi.apply(&p.x)?, xbar: p.xbar + f })
    }

    /// `Dφ(x)` by fourth-order central differences.
    pub fn planar_jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        planar_jacobian(&self.phi, x, self.cfg.fd_step)
    }

    /// Classical Jacobian of `f̃` at `p`: `[[Dφ, 0], [dF, 1]]`, with `dF` read
    /// from `φ*λ − λ`.
    pub fn jacobian(&self, p: &HPoint) -> Result<DMatrix<f64>> {
        let d = p.x.len();
        let dphi = self.planar_jacobian(&p.x)?;
        let fx = self.phi.apply(&p.x)?;
        let mut m = DMatrix::zeros(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(&dphi);
        for j in 0..d {
            let col: Vec<f64> = dphi.column(j).iter().cloned().collect();
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            m[(d, j)] = 0.5 * omega_raw(fx.as_slice(), &col) - 0.5 * omega_raw(p.x.as_slice(), &e);
        }
        m[(d, d)] = 1.0;
        Ok(m)
    }

    /// `‖Dφᵀ J Dφ − J‖_max` at `x`.
    pub fn symplectic_defect(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(symplectic_defect_of(&self.planar_jacobian(x)?))
    }

    /// Closed-form Pansu derivative at `p`: `diag(Dφ(x), 1)`.
    pub fn pansu_derivative(&self, p: &HPoint) -> Result<DMatrix<f64>> {
        let d = p.x.len();
        let mut m = DMatrix::zeros(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(&self.planar_jacobian(&p.x)?);
        m[(d, d)] = 1.0;
        Ok(m)
    }
}

impl<M: PlanarMap> HeisenbergMap for LiftedMap<M> {
    fn apply_h(&self, p: &HPoint) -> Result<HPoint> {
        self.apply(p)
    }
}

pub fn planar_jacobian(phi: &dyn PlanarMap, x: &DVector<f64>, h: f64) -> Result<DMatrix<f64>> {
    let d = x.len();
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let at = |s: f64| {
            let mut y = x.clone();
            y[j] += s * h;
            phi.apply(&y)
        };
        let col = (8.0 * (at(1.0)? - at(-1.0)?) - (at(2.0)? - at(-2.0)?)) / (12.0 * h);
        if col.len() != d {
            return invalid("map changes dimension");
        }
        m.set_column(j, &col);
    }
    Ok(m)
}

pub(crate) fn symplectic_j(d: usize) -> DMatrix<f64> {
    let n = d / 2;
    DMatrix::from_fn(d, d, |r, c| {
        if c == r + n && r < n {
            1.0
        } else if r == c + n && c < n {
            -1.0
        } else {
            0.0
        }
    })
}

pub fn symplectic_defect_of(m: &DMatrix<f64>) -> f64 {
    let j = symplectic_j(m.nrows());
    (m.transpose() * &j * m - j).amax()
}

/// Block matrix of the Pansu derivative of a smooth map `f̃ = (f, f̄)` of
/// `H(n)`, from classical partials by central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormDerivative {
    /// `[[∂f/∂x + ½ ∂f/∂x̄ ω(x, ·), 0], [0, ∂f̄/∂x̄ − ½ω(f, ∂f/∂x̄)]]`.
    pub matrix: DMatrix<f64>,
    /// Largest first-order vertical term
    /// `|∂f̄/∂x y + ½ω(x,y) ∂f̄/∂x̄ − ½ω(f, ∂f/∂x y + ½ω(x,y) ∂f/∂x̄)|`
    /// over basis directions `y`. It vanishes exactly when the finite
    /// differences converge, so the matrix is meaningful only when it is small.
    pub contact_residual: f64,
}

pub fn pansu_derivative_closed_form(f: &dyn HeisenbergMap, p: &HPoint, h: f64) -> Result<ClosedFormDerivative> {
    let d = p.x.len();
    let fp = f.apply_h(p)?;
    let shifted = |dx: &DVector<f64>, dz: f64| f.apply_h(&HPoint { x: &p.x + dx, xbar: p.xbar + dz });
    let zero = DVector::zeros(d);
    let up = shifted(&zero, h)?;
    let down = shifted(&zero, -h)?;
    let df_dz = (&up.x - &down.x) / (2.0 * h);
    let dfbar_dz = (up.xbar - down.xbar) / (2.0 * h);
    let mut m = DMatrix::zeros(d + 1, d + 1);
    let mut contact: f64 = 0.0;
    for j in 0..d {
        let mut e = DVector::zeros(d);
        e[j] = 1.0;
        let plus = shifted(&(&e * h), 0.0)?;
        let minus = shifted(&(&e * -h), 0.0)?;
        let df_dx = (&plus.x - &minus.x) / (2.0 * h);
        let dfbar_dx = (plus.xbar - minus.xbar) / (2.0 * h);
        let w = omega_raw(p.x.as_slice(), e.as_slice());
        let col = &df_dx + &df_dz * (0.5 * w);
        m.view_mut((0, j), (d, 1)).copy_from(&col);
        let first_order = dfbar_dx + 0.5 * w * dfbar_dz - 0.5 * omega_raw(fp.x.as_slice(), col.as_slice());
        contact = contact.max(first_order.abs());
    }
    m[(d, d)] = dfbar_dz - 0.5 * omega_raw(fp.x.as_slice(), df_dz.as_slice());
    Ok(ClosedFormDerivative { matrix: m, contact_residual: contact })
}
