//! Correlation kernel of the point process on (level, position) pairs, its
//! particle-hole counterpart, and determinantal correlation functions.

mod circle;
pub mod contour;
mod ellipse;
mod exact;
mod series;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::CharacterParams;
use crate::chebyshev_jacobi::{HalfInt, ThetaRule};
use crate::ddouble::DoubleDouble;
use crate::dynamics::{iota, iota_inv, LevelIndex};
use crate::error::{Error, Result};

pub use circle::{VCycle, ZLoop};
pub use series::series_oracle;

/// Position s on level (n, a).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KernelPoint {
    pub level: LevelIndex,
    pub s: u64,
}

impl KernelPoint {
    pub fn new(n: usize, a: HalfInt, s: u64) -> Result<Self> {
        Ok(Self { level: LevelIndex::new(n, a)?, s })
    }

    /// From particle coordinates (y, m).
    pub fn from_particle(y: u64, m: usize) -> Result<Self> {
        let (s, level) = iota_inv(y, m)?;
        Ok(Self { level, s })
    }

    pub fn particle(self) -> (u64, usize) {
        iota(self.s, self.level)
    }
}

impl fmt::Display for KernelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.level.n, self.level.a, self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContourKind {
    /// u on the ellipse (w + 1/w)/2, |w| = radius, x on the theta rule;
    /// evaluated in double-double.
    JoukowskiEllipse,
    /// x and u both in circle coordinates on optimised loops; f64 in log form.
    /// `radius` is not used.
    CircleCoordinates,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub radius: f64,
    pub u_nodes: usize,
    pub x_nodes: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self::ellipse(1.5)
    }
}

impl ContourSpec {
    pub fn ellipse(radius: f64) -> Self {
        Self { kind: ContourKind::JoukowskiEllipse, radius, u_nodes: 512, x_nodes: 256 }
    }

    pub fn circle(nodes: usize) -> Self {
        Self { kind: ContourKind::CircleCoordinates, radius: 1.5, u_nodes: nodes, x_nodes: nodes }
    }

    /// Node counts (u, x) actually used. On the ellipse both integrands see
    /// the Cauchy factor 1/(x - u) at distance ln R from their real parameter
    /// line, so thinner ellipses get proportionally more nodes.
    pub fn effective_nodes(&self) -> (usize, usize) {
        match self.kind {
            ContourKind::JoukowskiEllipse if self.radius < 1.5 => {
                let f = 1.5f64.ln() / self.radius.ln();
                ((self.u_nodes as f64 * f).ceil() as usize, (self.x_nodes as f64 * f).ceil() as usize)
            }
            _ => (self.u_nodes, self.x_nodes),
        }
    }

    pub fn doubled(self) -> Self {
        Self { u_nodes: 2 * self.u_nodes, x_nodes: 2 * self.x_nodes, ..self }
    }

    pub fn validate(&self, omega: &CharacterParams) -> Result<()> {
        if self.u_nodes < 8 || self.x_nodes < 8 {
            return Err(Error::InvalidParameter("contour node counts must be >= 8".into()));
        }
        omega.check_kernel_admissible()?;
        if self.kind == ContourKind::JoukowskiEllipse {
            ellipse::check_ellipse(omega, self.radius)?;
        }
        Ok(())
    }
}

/// Real value of a kernel entry. `imag` is what was discarded; `error` is a
/// error estimate: on the circle route the larger of a rounding bound and
/// the change from the half-resolution rule, on the ellipse route the larger
/// of |imag| and the change from dropping every other u node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub value: f64,
    pub imag: f64,
    pub error: f64,
}

/// The double integral and the single integral of an entry, each times
/// W(s1)/pi. `single` is 0 when p1 is strictly below p2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParts {
    pub double: f64,
    pub double_imag: f64,
    pub single: f64,
    pub error: f64,
}

fn check_imag(value: f64, imag: f64) -> Result<()> {
    let bound = 1e-9 * (1.0 + value.abs());
    if imag.abs() > bound || !value.is_finite() {
        return Err(Error::ImaginaryResidue { residue: imag.abs(), bound });
    }
    Ok(())
}

/// Evaluates kernel entries for one character and contour choice. Loops of
/// the circle route depend on one point each and are cached per point.
pub struct KernelEvaluator {
    omega: CharacterParams,
    spec: ContourSpec,
    log_e: circle::LogE,
    rule: Option<ThetaRule<DoubleDouble>>,
    zloops: Mutex<HashMap<(KernelPoint, bool), Arc<ZLoop>>>,
    vcycles: Mutex<HashMap<(KernelPoint, bool), Arc<VCycle>>>,
    pair_loops: Mutex<HashMap<(KernelPoint, KernelPoint, bool), Arc<ZLoop>>>,
}

/// Circle-route pairs whose best circles lose more than this many nats to
/// cancellation get Fourier-shaped loops.
const REFINE_GAP: f64 = 3.0;

impl KernelEvaluator {
    pub fn new(omega: &CharacterParams, spec: ContourSpec) -> Result<Self> {
        spec.validate(omega)?;
        let rule = (spec.kind == ContourKind::JoukowskiEllipse).then(|| ThetaRule::new(spec.effective_nodes().1));
        Ok(Self {
            omega: omega.clone(),
            spec,
            log_e: circle::LogE::new(omega),
            rule,
            zloops: Mutex::new(HashMap::new()),
            vcycles: Mutex::new(HashMap::new()),
            pair_loops: Mutex::new(HashMap::new()),
        })
    }

    pub fn omega(&self) -> &CharacterParams {
        &self.omega
    }

    pub fn spec(&self) -> ContourSpec {
        self.spec
    }

    pub fn z_loop(&self, p: KernelPoint, refined: bool) -> Result<Arc<ZLoop>> {
        if let Some(l) = self.zloops.lock().unwrap().get(&(p, refined)) {
            return Ok(l.clone());
        }
        let l = Arc::new(circle::z_loop(&self.log_e, p, self.spec.x_nodes, refined)?);
        self.zloops.lock().unwrap().insert((p, refined), l.clone());
        Ok(l)
    }

    pub fn v_cycle(&self, p: KernelPoint, refined: bool) -> Result<Arc<VCycle>> {
        if let Some(l) = self.vcycles.lock().unwrap().get(&(p, refined)) {
            return Ok(l.clone());
        }
        let l = Arc::new(circle::v_cycle(&self.log_e, p, self.spec.u_nodes, refined)?);
        self.vcycles.lock().unwrap().insert((p, refined), l.clone());
        Ok(l)
    }

    /// Contours the circle route uses for an entry. The x-loop is fitted to
    /// the pair only when the subtracted terms outgrow the double integral on
    /// the point's own loop.
    pub fn circle_contours(&self, p1: KernelPoint, p2: KernelPoint) -> Result<(Arc<ZLoop>, Arc<VCycle>)> {
        let (mut z, mut v) = (self.z_loop(p1, false)?, self.v_cycle(p2, false)?);
        let mut refined = false;
        if z.worst + v.worst > REFINE_GAP {
            refined = true;
            (z, v) = (self.z_loop(p1, true)?, self.v_cycle(p2, true)?);
        }
        if circle::sub_peak(p1, p2, &z.shape) <= z.worst + v.worst + 2.0 {
            return Ok((z, v));
        }
        let key = (p1, p2, refined);
        if let Some(l) = self.pair_loops.lock().unwrap().get(&key) {
            return Ok((l.clone(), v));
        }
        let l = Arc::new(circle::z_loop_pair(&self.log_e, p1, p2, v.worst, self.spec.x_nodes, refined)?);
        self.pair_loops.lock().unwrap().insert(key, l.clone());
        Ok((l, v))
    }

    /// Log-magnitude of the largest double-integral term on the circle route;
    /// the entry loses about this many nats to cancellation.
    pub fn circle_gap(&self, p1: KernelPoint, p2: KernelPoint) -> Result<f64> {
        let (z, v) = self.circle_contours(p1, p2)?;
        Ok(z.worst + v.worst)
    }

    pub fn parts(&self, p1: KernelPoint, p2: KernelPoint) -> Result<KernelParts> {
        let upper = p1.level >= p2.level;
        match self.spec.kind {
            ContourKind::CircleCoordinates => {
                let (z, v) = self.circle_contours(p1, p2)?;
                let c = circle::evaluate(&self.log_e, p1, p2, &z, &v, self.spec.x_nodes, self.spec.u_nodes)?;
                Ok(KernelParts {
                    double: c.double.re,
                    double_imag: c.double.im,
                    single: if upper { c.single } else { 0.0 },
                    error: c.error,
                })
            }
            ContourKind::JoukowskiEllipse => {
                let rule = self.rule.as_ref().expect("ellipse rule");
                let e = ellipse::evaluate::<DoubleDouble>(&self.omega, p1, p2, self.spec.radius, rule, self.spec.effective_nodes().0);
                Ok(KernelParts {
                    double: e.double.re.hi(),
                    double_imag: e.double.im.hi(),
                    single: if upper { e.single.hi() } else { 0.0 },
                    error: e.double.im.hi().abs().max(e.u_gap),
                })
            }
        }
    }

    pub fn eval(&self, p1: KernelPoint, p2: KernelPoint) -> Result<KernelEval> {
        let p = self.parts(p1, p2)?;
        let value = p.double + p.single;
        check_imag(value, p.double_imag)?;
        Ok(KernelEval { value, imag: p.double_imag, error: p.error })
    }

    /// Particle-hole kernel, from its own case split: the single integral
    /// enters with a minus sign when p2 is strictly below p1.
    pub fn eval_hole(&self, p1: KernelPoint, p2: KernelPoint) -> Result<KernelEval> {
        let p = self.parts(p1, p2)?;
        let value = if p2.level < p1.level { -p.single - p.double } else { -p.double };
        check_imag(value, p.double_imag)?;
        Ok(KernelEval { value, imag: -p.double_imag, error: p.error })
    }

    /// Kernel matrix [K(x_i, x_j)], entries computed in parallel.
    pub fn matrix(&self, points: &[KernelPoint], hole: bool) -> Result<DMatrix<f64>> {
        if self.spec.kind == ContourKind::CircleCoordinates {
            points.par_iter().try_for_each(|&p| self.z_loop(p, false).and(self.v_cycle(p, false)).map(|_| ()))?;
        }
        let k = points.len();
        let entries: Vec<f64> = (0..k * k)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / k, idx % k);
                let e = if hole { self.eval_hole(points[i], points[j]) } else { self.eval(points[i], points[j]) };
                e.map(|e| e.value)
            })
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_row_slice(k, k, &entries))
    }

    pub fn correlation(&self, points: &[KernelPoint], hole: bool) -> Result<f64> {
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::DuplicatePoint);
            }
        }
        if points.is_empty() {
            return Ok(1.0);
        }
        Ok(self.matrix(points, hole)?.determinant())
    }
}

pub fn eval_k(omega: &CharacterParams, p1: KernelPoint, p2: KernelPoint, c: ContourSpec) -> Result<f64> {
    Ok(KernelEvaluator::new(omega, c)?.eval(p1, p2)?.value)
}

pub fn eval_k_hole(omega: &CharacterParams, p1: KernelPoint, p2: KernelPoint, c: ContourSpec) -> Result<f64> {
    Ok(KernelEvaluator::new(omega, c)?.eval_hole(p1, p2)?.value)
}

pub fn correlation(omega: &CharacterParams, points: &[KernelPoint], c: ContourSpec, hole: bool) -> Result<f64> {
    KernelEvaluator::new(omega, c)?.correlation(points, hole)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_i;

    fn pt(n: usize, a: HalfInt, s: u64) -> KernelPoint {
        KernelPoint::new(n, a, s).unwrap()
    }

    #[test]
    fn particle_coordinates_round_trip() {
        let p = pt(3, HalfInt::PlusHalf, 4);
        assert_eq!(p.particle(), (9, 6));
        assert_eq!(KernelPoint::from_particle(9, 6).unwrap(), p);
        assert!(KernelPoint::from_particle(8, 6).is_err());
    }

    #[test]
    fn bessel_diagonal_on_both_routes() {
        let g = 1.3;
        let om = CharacterParams::plancherel(g).unwrap();
        for spec in [ContourSpec::ellipse(1.5), ContourSpec::circle(256)] {
            let ev = KernelEvaluator::new(&om, spec).unwrap();
            for s in 0..5 {
                let p = pt(1, HalfInt::MinusHalf, s);
                let w = if s > 0 { 2.0 } else { 1.0 };
                let want = (-g).exp() * w * bessel_i(s, g);
                let got = ev.eval(p, p).unwrap().value;
                assert!((got - want).abs() < 1e-10, "{spec:?} s={s}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn trivial_character_gives_packed_indicator() {
        let om = CharacterParams::trivial();
        for spec in [ContourSpec::ellipse(1.5), ContourSpec::circle(128)] {
            let ev = KernelEvaluator::new(&om, spec).unwrap();
            for a in HalfInt::BOTH {
                for n in 1..4 {
                    for s in 0..6u64 {
                        let p = pt(n, a, s);
                        let want = if (s as usize) < n { 1.0 } else { 0.0 };
                        assert!((ev.eval(p, p).unwrap().value - want).abs() < 1e-10);
                        assert!((ev.eval_hole(p, p).unwrap().value - (1.0 - want)).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn duplicates_are_rejected() {
        let om = CharacterParams::plancherel(1.0).unwrap();
        let p = pt(1, HalfInt::MinusHalf, 0);
        assert_eq!(correlation(&om, &[p, p], ContourSpec::default(), false), Err(Error::DuplicatePoint));
    }

    #[test]
    fn bad_specs() {
        let om = CharacterParams::new(vec![], vec![0.95], 1.0).unwrap();
        assert!(KernelEvaluator::new(&om, ContourSpec::ellipse(1.5)).is_err());
        let om = CharacterParams::new(vec![], vec![1.0], 1.0).unwrap();
        assert!(KernelEvaluator::new(&om, ContourSpec::circle(64)).is_err());
        let om = CharacterParams::plancherel(1.0).unwrap();
        assert!(KernelEvaluator::new(&om, ContourSpec { u_nodes: 2, ..ContourSpec::default() }).is_err());
    }
}
