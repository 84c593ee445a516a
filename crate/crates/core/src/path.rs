//! Piecewise paths made of straight lines and circular arcs.
//!
//! Each segment has its own parameter `u ∈ [0, 1]`.  Points are returned as
//! an anchor plus an offset: lines anchor at whichever end is nearer, so a
//! difference `z − P` against a puncture sitting exactly at that end keeps
//! full relative precision.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, Param, QuadratureOptions};
use crate::shuffle::FormLabel;
use crate::surface::{FormBasis, SurfaceConfig, DEFAULT_POLE_GUARD};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathSegment {
    Line {
        start: Complex64,
        end: Complex64,
    },
    /// `center + radius·e^{iθ}`, θ running linearly from `angle_start` to
    /// `angle_end`.
    Arc {
        center: Complex64,
        radius: f64,
        angle_start: f64,
        angle_end: f64,
    },
}

impl PathSegment {
    pub fn line(start: Complex64, end: Complex64) -> Result<Self> {
        if start == end || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidConfig(format!("degenerate line {start} -> {end}")));
        }
        Ok(PathSegment::Line { start, end })
    }

    pub fn arc(center: Complex64, radius: f64, angle_start: f64, angle_end: f64) -> Result<Self> {
        if !(radius > 0.0) || angle_start == angle_end || !angle_start.is_finite() || !angle_end.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "degenerate arc radius {radius}, angles {angle_start}..{angle_end}"
            )));
        }
        Ok(PathSegment::Arc {
            center,
            radius,
            angle_start,
            angle_end,
        })
    }

    pub fn start(&self) -> Complex64 {
        match *self {
            PathSegment::Line { start, .. } => start,
            PathSegment::Arc {
                center,
                radius,
                angle_start,
                ..
            } => center + Complex64::from_polar(radius, angle_start),
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            PathSegment::Line { end, .. } => end,
            PathSegment::Arc {
                center,
                radius,
                angle_end,
                ..
            } => center + Complex64::from_polar(radius, angle_end),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathSegment::Line { start, end } => (end - start).norm(),
            PathSegment::Arc {
                radius,
                angle_start,
                angle_end,
                ..
            } => radius * (angle_end - angle_start).abs(),
        }
    }

    /// `(anchor, offset)` with `anchor + offset = γ(u)`.
    pub fn point(&self, p: Param) -> (Complex64, Complex64) {
        match *self {
            PathSegment::Line { start, end } => {
                if p.u <= 0.5 {
                    (start, (end - start) * p.u)
                } else {
                    (end, (start - end) * p.v)
                }
            }
            PathSegment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
            } => {
                let theta = angle_start + p.u * (angle_end - angle_start);
                (center + Complex64::from_polar(radius, theta), Complex64::new(0.0, 0.0))
            }
        }
    }

    pub fn at(&self, u: f64) -> Complex64 {
        let (a, o) = self.point(Param { u, v: 1.0 - u });
        a + o
    }

    /// `dγ/du`.
    pub fn derivative(&self, u: f64) -> Complex64 {
        match *self {
            PathSegment::Line { start, end } => end - start,
            PathSegment::Arc {
                radius,
                angle_start,
                angle_end,
                ..
            } => {
                let theta = angle_start + u * (angle_end - angle_start);
                I * Complex64::from_polar(radius, theta) * (angle_end - angle_start)
            }
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            PathSegment::Line { start, end } => PathSegment::Line { start: end, end: start },
            PathSegment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
            } => PathSegment::Arc {
                center,
                radius,
                angle_start: angle_end,
                angle_end: angle_start,
            },
        }
    }

    /// Minimum distance from `p` to the segment.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            PathSegment::Line { start, end } => {
                let d = end - start;
                let t = ((p - start) * d.conj()).re / d.norm_sqr();
                let t = t.clamp(0.0, 1.0);
                (start + d * t - p).norm()
            }
            PathSegment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
            } => {
                let rel = p - center;
                let (lo, hi) = if angle_start < angle_end {
                    (angle_start, angle_end)
                } else {
                    (angle_end, angle_start)
                };
                let mut best = (self.start() - p).norm().min((self.end() - p).norm());
                if rel.norm() > 0.0 {
                    let phi = rel.arg();
                    // any angle in [lo, hi] congruent to phi
                    let k = ((lo - phi) / (2.0 * PI)).ceil();
                    if phi + 2.0 * PI * k <= hi {
                        best = best.min((rel.norm() - radius).abs());
                    }
                } else {
                    best = radius;
                }
                best
            }
        }
    }

    /// Continuous change of `arg(z − p)` along the segment.
    pub fn arg_change(&self, p: Complex64) -> Result<f64> {
        match *self {
            PathSegment::Line { start, end } => Ok(((end - p) / (start - p)).arg()),
            PathSegment::Arc {
                center,
                angle_start,
                angle_end,
                ..
            } if center == p => Ok(angle_end - angle_start),
            PathSegment::Arc { .. } => {
                let opts = QuadratureOptions::default();
                let (v, _) = integrate_adaptive(|q| Ok(self.derivative(q.u) / (self.at(q.u) - p)), &opts)?;
                Ok(v.im)
            }
        }
    }
}

/// A regularized endpoint: the path starts or ends exactly at the puncture,
/// and `direction` is the unit reference tangent fixing the branch of the
/// logarithm there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizedEnd {
    pub puncture: usize,
    pub direction: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    segments: Vec<PathSegment>,
    reg_start: Option<RegularizedEnd>,
    reg_end: Option<RegularizedEnd>,
}

fn join_tolerance(z: Complex64) -> f64 {
    1e-12 * (1.0 + z.norm())
}

fn unit(z: Complex64) -> Complex64 {
    z / z.norm()
}

impl Path {
    pub fn new(segments: Vec<PathSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidConfig("path has no segments".into()));
        }
        for pair in segments.windows(2) {
            let (e, s) = (pair[0].end(), pair[1].start());
            if (e - s).norm() > join_tolerance(e) {
                return Err(Error::EndpointMismatch(e, s));
            }
        }
        Ok(Path {
            segments,
            reg_start: None,
            reg_end: None,
        })
    }

    pub fn line(a: Complex64, b: Complex64) -> Result<Self> {
        Path::new(vec![PathSegment::line(a, b)?])
    }

    /// Declares the start to be puncture `puncture` of `surface`.  The first
    /// segment must be a line leaving it exactly.  `direction` defaults to
    /// that line's tangent.
    pub fn with_reg_start(
        mut self,
        surface: &SurfaceConfig,
        puncture: usize,
        direction: Option<Complex64>,
    ) -> Result<Self> {
        let p = surface.puncture(puncture)?;
        let PathSegment::Line { start, end } = self.segments[0] else {
            return Err(Error::InvalidConfig("a regularized start needs a leading line segment".into()));
        };
        if start != p {
            return Err(Error::InvalidConfig(format!(
                "regularized start {start} is not puncture {puncture} at {p}"
            )));
        }
        let direction = unit(direction.unwrap_or(end - start));
        if !direction.is_finite() {
            return Err(Error::InvalidConfig("invalid start direction".into()));
        }
        self.reg_start = Some(RegularizedEnd { puncture, direction });
        Ok(self)
    }

    /// Declares the end to be a puncture; the last segment must be a line
    /// arriving exactly.  `direction` defaults to the reversed arrival
    /// tangent, i.e. pointing from the puncture back along the path.
    pub fn with_reg_end(mut self, surface: &SurfaceConfig, puncture: usize, direction: Option<Complex64>) -> Result<Self> {
        let p = surface.puncture(puncture)?;
        let PathSegment::Line { start, end } = *self.segments.last().expect("nonempty") else {
            return Err(Error::InvalidConfig("a regularized end needs a trailing line segment".into()));
        };
        if end != p {
            return Err(Error::InvalidConfig(format!(
                "regularized end {end} is not puncture {puncture} at {p}"
            )));
        }
        let direction = unit(direction.unwrap_or(start - end));
        if !direction.is_finite() {
            return Err(Error::InvalidConfig("invalid end direction".into()));
        }
        self.reg_end = Some(RegularizedEnd { puncture, direction });
        Ok(self)
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn reg_start(&self) -> Option<RegularizedEnd> {
        self.reg_start
    }

    pub fn reg_end(&self) -> Option<RegularizedEnd> {
        self.reg_end
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments.last().expect("nonempty").end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(PathSegment::length).sum()
    }

    /// Unit tangent of the first segment at its start.
    pub fn start_tangent(&self) -> Complex64 {
        unit(self.segments[0].derivative(0.0))
    }

    /// Unit tangent of the last segment at its end.
    pub fn end_tangent(&self) -> Complex64 {
        unit(self.segments.last().expect("nonempty").derivative(1.0))
    }

    /// `β ∘ α`: this path followed by `beta`.
    pub fn compose(&self, beta: &Path) -> Result<Path> {
        let (e, s) = (self.end(), beta.start());
        if (e - s).norm() > join_tolerance(e) {
            return Err(Error::EndpointMismatch(e, s));
        }
        if self.reg_end.is_some() || beta.reg_start.is_some() {
            return Err(Error::InvalidConfig("cannot compose through a regularized endpoint".into()));
        }
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&beta.segments);
        Ok(Path {
            segments,
            reg_start: self.reg_start,
            reg_end: beta.reg_end,
        })
    }

    pub fn reverse(&self) -> Path {
        Path {
            segments: self.segments.iter().rev().map(PathSegment::reversed).collect(),
            reg_start: self.reg_end,
            reg_end: self.reg_start,
        }
    }

    /// Copy of a path ending at a regularized puncture, stopped at distance
    /// `eps` before it along the final line.  The end flag is dropped.
    pub fn truncate_end(&self, eps: f64) -> Result<Path> {
        let Some(PathSegment::Line { start, end }) = self.segments.last().copied() else {
            return Err(Error::InvalidConfig("truncation needs a trailing line".into()));
        };
        let len = (end - start).norm();
        if !(eps > 0.0 && eps < len) {
            return Err(Error::InvalidConfig(format!("truncation radius {eps} outside (0, {len})")));
        }
        let mut segments = self.segments.clone();
        let new_end = end + (start - end) * (eps / len);
        *segments.last_mut().expect("nonempty") = PathSegment::Line { start, end: new_end };
        Ok(Path {
            segments,
            reg_start: self.reg_start,
            reg_end: None,
        })
    }

    /// Continuous change of `arg(z − p)` over the segments in `range`.
    pub fn arg_change(&self, p: Complex64, range: std::ops::Range<usize>) -> Result<f64> {
        let mut total = 0.0;
        for s in &self.segments[range] {
            total += s.arg_change(p)?;
        }
        Ok(total)
    }

    /// `(1/2πi) ∮ dz/(z − p)` for a closed path.
    pub fn winding_number(&self, p: Complex64) -> Result<f64> {
        Ok(self.arg_change(p, 0..self.segments.len())? / (2.0 * PI))
    }

    /// Checks the path keeps at least `delta` from every puncture (and, on
    /// the torus, every lattice translate), except at regularized ends.
    pub fn check_clearance(&self, surface: &SurfaceConfig, delta: f64) -> Result<()> {
        let shifts: Vec<Complex64> = match surface {
            SurfaceConfig::Sphere { .. } => vec![Complex64::new(0.0, 0.0)],
            SurfaceConfig::Torus { theta, .. } => {
                let reach = self
                    .segments
                    .iter()
                    .map(|s| s.start().norm().max(s.end().norm()) + s.length())
                    .fold(0.0, f64::max);
                let tau = theta.tau();
                let m_max = (reach / tau.im).ceil() as i64 + 2;
                let k_max = (reach + m_max as f64 * tau.re.abs()).ceil() as i64 + 2;
                let mut v = Vec::new();
                for m in -m_max..=m_max {
                    for k in -k_max..=k_max {
                        v.push(tau * m as f64 + k as f64);
                    }
                }
                v
            }
        };
        let last = self.segments.len() - 1;
        for (index, &p) in surface.punctures().iter().enumerate() {
            for &shift in &shifts {
                let q = p + shift;
                let origin = shift == Complex64::new(0.0, 0.0);
                for (s, seg) in self.segments.iter().enumerate() {
                    let at_start = s == 0 && origin && self.reg_start.is_some_and(|r| r.puncture == index);
                    let at_end = s == last && origin && self.reg_end.is_some_and(|r| r.puncture == index);
                    if at_start || at_end {
                        // the line leaves the puncture radially; only its far
                        // end could come back, and it cannot for a line
                        continue;
                    }
                    let d = seg.distance_to(q);
                    if d < delta {
                        return Err(Error::PathNearPuncture {
                            puncture: index,
                            position: q,
                            distance: d,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Segment index and local parameter for the global arclength parameter
    /// `t ∈ [0, 1]`, with `du/dt`.
    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let total = self.length();
        let target = t.clamp(0.0, 1.0) * total;
        let mut acc = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            let l = s.length();
            if target <= acc + l || i == self.segments.len() - 1 {
                let u = ((target - acc) / l).clamp(0.0, 1.0);
                return (i, u, total / l);
            }
            acc += l;
        }
        unreachable!("nonempty path")
    }

    /// `γ(t)` under the arclength-proportional global parametrization.
    pub fn at(&self, t: f64) -> Complex64 {
        let (i, u, _) = self.locate(t);
        self.segments[i].at(u)
    }
}

/// Loop around a puncture: radial line from `basepoint` to the circle of
/// `radius`, `|winding|` turns (counter-clockwise when positive), and the
/// radial line back.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub puncture: usize,
    pub basepoint: Complex64,
    pub radius: f64,
    pub winding: i32,
}

pub fn loop_around(spec: &LoopSpec, surface: &SurfaceConfig) -> Result<Path> {
    let p = surface.puncture(spec.puncture)?;
    let mut nearest = f64::INFINITY;
    for (k, &q) in surface.punctures().iter().enumerate() {
        if k != spec.puncture {
            nearest = nearest.min(surface.distance(p, q));
        }
    }
    if let Some(theta) = surface.theta() {
        // nearest nonzero lattice point
        let tau = theta.tau();
        for (m, k) in [(0.0, 1.0), (1.0, 0.0), (1.0, 1.0), (1.0, -1.0)] {
            nearest = nearest.min((tau * m + k).norm());
        }
    }
    if !(spec.radius > 0.0) || spec.radius >= nearest {
        return Err(Error::InvalidConfig(format!(
            "loop radius {} must lie in (0, {nearest})",
            spec.radius
        )));
    }
    let rel = spec.basepoint - p;
    if (rel.norm() - spec.radius).abs() < 1e-12 * (1.0 + spec.radius) {
        return Err(Error::InvalidConfig("loop basepoint lies on the loop circle".into()));
    }
    let phi = rel.arg();
    let on_circle = p + Complex64::from_polar(spec.radius, phi);
    let out = PathSegment::line(spec.basepoint, on_circle)?;
    let back = out.reversed();
    let mut segments = vec![out];
    if spec.winding != 0 {
        let sweep = 2.0 * PI * spec.winding as f64;
        segments.push(PathSegment::arc(p, spec.radius, phi, phi + sweep)?);
        // snap the return line onto the arc's computed end
        let arc_end = segments[1].end();
        segments.push(PathSegment::line(arc_end, spec.basepoint)?);
    } else {
        segments.push(back);
    }
    Path::new(segments)
}

/// `g_k(t) = 𝔣_k(γ(t)) γ'(t)` with `t` the global arclength parameter.
pub fn pullback_sample(path: &Path, basis: &FormBasis, k: FormLabel, t: f64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidConfig(format!("parameter {t} outside [0, 1]")));
    }
    let (i, u, dudt) = path.locate(t);
    let seg = &path.segments[i];
    let z = seg.at(u);
    Ok(basis.eval(k, z)? * seg.derivative(u) * dudt)
}

/// Default guard distance used when validating paths.
pub const DEFAULT_CLEARANCE: f64 = DEFAULT_POLE_GUARD;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Pairing;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sphere01() -> SurfaceConfig {
        SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn compose_and_mismatch() {
        let a = Path::line(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let b = Path::line(c(1.0, 0.0), c(1.0, 1.0)).unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.segments().len(), 2);
        assert_eq!(ab.start(), c(0.0, 0.0));
        assert_eq!(ab.end(), c(1.0, 1.0));
        assert!(matches!(b.compose(&b), Err(Error::EndpointMismatch(_, _))));
        assert!(matches!(
            Path::new(vec![
                PathSegment::line(c(0.0, 0.0), c(1.0, 0.0)).unwrap(),
                PathSegment::line(c(2.0, 0.0), c(3.0, 0.0)).unwrap()
            ]),
            Err(Error::EndpointMismatch(_, _))
        ));
    }

    #[test]
    fn reverse_is_involution() {
        let arc = PathSegment::arc(c(0.0, 0.0), 0.5, 0.0, PI).unwrap();
        let q = Path::new(vec![PathSegment::line(c(0.5, -0.5), arc.start()).unwrap(), arc]).unwrap();
        let r = q.reverse();
        assert_eq!(r.start(), q.end());
        assert_eq!(r.reverse(), q);
        let l = Path::line(c(0.0, 1.0), c(2.0, 0.0)).unwrap().reverse();
        assert_eq!(l.segments()[0], PathSegment::Line { start: c(2.0, 0.0), end: c(0.0, 1.0) });
    }

    #[test]
    fn loop_winding_numbers() {
        let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.5)]).unwrap();
        for w in [1, 0, -2, 3] {
            let spec = LoopSpec {
                puncture: 0,
                basepoint: c(0.5, 0.0),
                radius: 0.25,
                winding: w,
            };
            let l = loop_around(&spec, &s).unwrap();
            assert!((l.end() - l.start()).norm() < 1e-14);
            let n0 = l.winding_number(c(0.0, 0.0)).unwrap();
            assert!((n0 - w as f64).abs() < 1e-12, "{n0}");
            for &q in &s.punctures()[1..] {
                assert!(l.winding_number(q).unwrap().abs() < 1e-12);
            }
            l.check_clearance(&s, 1e-6).unwrap();
        }
        let too_big = LoopSpec {
            puncture: 0,
            basepoint: c(0.5, 0.0),
            radius: 1.2,
            winding: 1,
        };
        assert!(loop_around(&too_big, &s).is_err());
    }

    #[test]
    fn pullback_examples() {
        let t = SurfaceConfig::torus(vec![c(0.3, 0.3), c(-0.2, 0.1)], c(0.0, 1.0)).unwrap();
        let b = FormBasis::standard(t, Pairing::Star).unwrap();
        let p = Path::line(c(0.0, 0.0), c(1.0, 1.0)).unwrap();
        for tt in [0.0, 0.3, 1.0] {
            let g = pullback_sample(&p, &b, FormLabel(0), tt).unwrap();
            assert!((g - c(1.0, 1.0)).norm() < 1e-15);
        }
        let s = sphere01();
        let b = FormBasis::standard(s, Pairing::Star).unwrap();
        let circle = Path::new(vec![PathSegment::arc(c(0.0, 0.0), 1.0, 0.0, 2.0 * PI).unwrap()]).unwrap();
        for tt in [0.1, 0.5, 0.77] {
            // length 2π traversed in unit parameter: g = i · 2π
            let g = pullback_sample(&circle, &b, FormLabel(0), tt).unwrap();
            assert!((g - c(0.0, 2.0 * PI)).norm() < 1e-13, "{g}");
        }
    }

    #[test]
    fn pullback_matches_finite_difference_of_antiderivative() {
        let s = SurfaceConfig::sphere(vec![c(0.2, -0.3), c(1.0, 0.4)]).unwrap();
        let b = FormBasis::standard(s.clone(), Pairing::Star).unwrap();
        let p = Path::line(c(-1.0, 1.0), c(2.0, 1.5)).unwrap();
        for k in 0..2 {
            let pole = s.punctures()[k];
            let anti = |t: f64| (p.at(t) - pole).ln();
            for t in [0.2, 0.5, 0.9] {
                let h = 1e-5;
                let fd = (anti(t + h) - anti(t - h)) / (2.0 * h);
                let g = pullback_sample(&p, &b, FormLabel(k), t).unwrap();
                assert!((g - fd).norm() < 1e-8 * (1.0 + g.norm()), "{g} {fd}");
            }
        }
    }

    #[test]
    fn clearance_and_regularized_ends() {
        let s = sphere01();
        let through = Path::line(c(-1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(matches!(through.check_clearance(&s, 1e-6), Err(Error::PathNearPuncture { puncture: 0, .. })));
        let reg = Path::line(c(0.0, 0.0), c(1.0, 0.0))
            .unwrap()
            .with_reg_start(&s, 0, None)
            .unwrap()
            .with_reg_end(&s, 1, None)
            .unwrap();
        reg.check_clearance(&s, 1e-6).unwrap();
        assert_eq!(reg.reg_end().unwrap().direction, c(-1.0, 0.0));
        assert!(Path::line(c(0.1, 0.0), c(1.0, 0.0)).unwrap().with_reg_start(&s, 0, None).is_err());
        let t = reg.truncate_end(0.25).unwrap();
        assert_eq!(t.end(), c(0.75, 0.0));
        assert!(t.reg_end().is_none());
    }

    #[test]
    fn torus_clearance_sees_translates() {
        let t = SurfaceConfig::torus(vec![c(0.0, 0.0), c(0.3, 0.4)], c(0.0, 1.0)).unwrap();
        let p = Path::line(c(0.5, 1.0), c(1.5, 1.0)).unwrap();
        // passes through 1 + i, a translate of puncture 0
        assert!(matches!(p.check_clearance(&t, 1e-6), Err(Error::PathNearPuncture { puncture: 0, .. })));
    }

    #[test]
    fn length_is_stable_under_subdivision() {
        let whole = Path::line(c(0.0, 0.0), c(3.0, 4.0)).unwrap();
        let split = Path::line(c(0.0, 0.0), c(1.2, 1.6))
            .unwrap()
            .compose(&Path::line(c(1.2, 1.6), c(3.0, 4.0)).unwrap())
            .unwrap();
        assert!((whole.length() - split.length()).abs() < 1e-14);
        let arc = PathSegment::arc(c(0.0, 0.0), 2.0, 0.0, PI).unwrap();
        let halves = [
            PathSegment::arc(c(0.0, 0.0), 2.0, 0.0, PI / 2.0).unwrap(),
            PathSegment::arc(c(0.0, 0.0), 2.0, PI / 2.0, PI).unwrap(),
        ];
        assert!((arc.length() - halves.iter().map(|h| h.length()).sum::<f64>()).abs() < 1e-14);
    }

    #[test]
    fn arc_distance() {
        let a = PathSegment::arc(c(0.0, 0.0), 1.0, 0.0, PI / 2.0).unwrap();
        assert!((a.distance_to(c(2.0, 2.0)) - (8f64.sqrt() - 1.0)).abs() < 1e-14);
        assert!((a.distance_to(c(-2.0, 0.0)) - 5f64.sqrt()).abs() < 1e-14);
        assert_eq!(a.distance_to(c(0.0, 0.0)), 1.0);
    }
}
