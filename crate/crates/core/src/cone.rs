//! Scale-invariant open cones with vertex at the origin.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{atan2, cos, gamma, norm, powf, sin, sqrt, PI};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::stable::{levy_constant, Point};

/// The cone families supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConeSpec {
    /// `(0, ∞) ⊂ ℝ`.
    HalfLine,
    /// `{x : x_d > 0}`.
    HalfSpace { dim: usize },
    /// Planar wedge of interior angle `angle`, symmetric about the positive
    /// `x₂`-axis.
    PlanarWedge { angle: f64 },
    /// `{x : angle(x, e_d) < half_aperture}`.
    CircularCone { dim: usize, half_aperture: f64 },
}

impl ConeSpec {
    pub fn half_space(dim: usize) -> Result<Self> {
        let c = ConeSpec::HalfSpace { dim };
        c.validate()?;
        Ok(c)
    }

    pub fn wedge(angle: f64) -> Result<Self> {
        let c = ConeSpec::PlanarWedge { angle };
        c.validate()?;
        Ok(c)
    }

    pub fn circular(dim: usize, half_aperture: f64) -> Result<Self> {
        let c = ConeSpec::CircularCone { dim, half_aperture };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ConeSpec::HalfLine => Ok(()),
            ConeSpec::HalfSpace { dim } if dim >= 1 => Ok(()),
            ConeSpec::HalfSpace { .. } => Err(Error::invalid("dim", "half-space needs d >= 1")),
            ConeSpec::PlanarWedge { angle } => {
                if angle > 0.0 && angle < 2.0 * PI {
                    Ok(())
                } else {
                    Err(Error::invalid("wedge_angle", "wedge angle must lie in (0, 2π); the cone would be empty or the punctured plane"))
                }
            }
            ConeSpec::CircularCone { dim, half_aperture } => {
                if dim < 2 {
                    return Err(Error::invalid("dim", "circular cone needs d >= 2"));
                }
                if half_aperture > 0.0 && half_aperture < PI {
                    Ok(())
                } else {
                    Err(Error::invalid("half_aperture", "half-aperture must lie in (0, π)"))
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ConeSpec::HalfLine => 1,
            ConeSpec::HalfSpace { dim } => dim,
            ConeSpec::PlanarWedge { .. } => 2,
            ConeSpec::CircularCone { dim, .. } => dim,
        }
    }

    /// Short label used in tables.
    pub fn label(&self) -> alloc::string::String {
        match *self {
            ConeSpec::HalfLine => "half-line".into(),
            ConeSpec::HalfSpace { dim } => format!("half-space-d{dim}"),
            ConeSpec::PlanarWedge { angle } => format!("wedge-{angle:.6}"),
            ConeSpec::CircularCone { dim, half_aperture } => format!("circular-d{dim}-{half_aperture:.6}"),
        }
    }

    /// Membership without dimension checks; `x.len()` must equal `dim()`.
    #[inline]
    pub fn contains_slice(&self, x: &[f64]) -> bool {
        match *self {
            ConeSpec::HalfLine => x[0] > 0.0,
            ConeSpec::HalfSpace { .. } => x[x.len() - 1] > 0.0,
            ConeSpec::PlanarWedge { angle } => {
                if x[0] == 0.0 && x[1] == 0.0 {
                    return false;
                }
                // Angle measured from the positive x₂-axis.
                atan2(x[0], x[1]).abs() < 0.5 * angle
            }
            ConeSpec::CircularCone { half_aperture, .. } => {
                let r = norm(x);
                r > 0.0 && x[x.len() - 1] > r * cos(half_aperture)
            }
        }
    }

    /// Membership in the open cone. Boundary points are outside.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.contains_slice(x.coords()))
    }

    pub(crate) fn check_dim(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Homogeneity degree of the Martin kernel when it is known in closed form.
    pub fn closed_form_beta(&self, alpha: f64) -> Option<f64> {
        match self {
            ConeSpec::HalfLine | ConeSpec::HalfSpace { .. } => Some(0.5 * alpha),
            _ => None,
        }
    }
}

/// Where a homogeneity exponent came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSource {
    ClosedForm,
    Estimated,
}

/// Degree `β ∈ (0, α)` of the Martin kernel of a cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityExponent {
    pub beta: f64,
    pub source: BetaSource,
    pub stderr: f64,
}

impl HomogeneityExponent {
    pub fn closed_form(cone: &ConeSpec, alpha: f64) -> Result<Self> {
        let beta = cone
            .closed_form_beta(alpha)
            .ok_or_else(|| Error::Unsupported(format!("no closed-form β for {}", cone.label())))?;
        Ok(HomogeneityExponent {
            beta,
            source: BetaSource::ClosedForm,
            stderr: 0.0,
        })
    }

    pub fn estimated(beta: f64, stderr: f64, alpha: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < alpha) {
            return Err(Error::InsufficientData(format!(
                "estimated β = {beta:.4} falls outside (0, α = {alpha}); increase n_paths or the time grid"
            )));
        }
        Ok(HomogeneityExponent {
            beta,
            source: BetaSource::Estimated,
            stderr,
        })
    }
}

/// Martin kernel with pole at infinity, normalized so that `M(𝟙) = 1`.
pub fn martin_kernel(cone: &ConeSpec, alpha: f64, x: &Point) -> Result<f64> {
    cone.check_dim(x)?;
    let c = x.coords();
    match cone {
        ConeSpec::HalfLine | ConeSpec::HalfSpace { .. } => Ok(powf(c[c.len() - 1].max(0.0), 0.5 * alpha)),
        _ => Err(Error::Unsupported(format!(
            "no closed-form Martin kernel for {}; estimate β instead",
            cone.label()
        ))),
    }
}

/// Kelvin transform `|x|^{α-d} f(x/|x|²)` of a function on ℝ^d.
pub fn kelvin_transform<F>(f: F, alpha: f64, x: &Point) -> Result<f64>
where
    F: Fn(&Point) -> Result<f64>,
{
    let r2: f64 = x.coords().iter().map(|c| c * c).sum();
    if r2 == 0.0 {
        return Err(Error::domain("the Kelvin transform is undefined at the origin"));
    }
    let d = x.dim() as f64;
    Ok(powf(sqrt(r2), alpha - d) * f(&x.scaled(1.0 / r2))?)
}

/// Martin kernel with pole at the vertex: the Kelvin transform of
/// [`martin_kernel`].
pub fn kelvin_kernel(cone: &ConeSpec, alpha: f64, x: &Point) -> Result<f64> {
    cone.check_dim(x)?;
    if cone.closed_form_beta(alpha).is_none() {
        return Err(Error::Unsupported(format!(
            "no closed-form Kelvin kernel for {}",
            cone.label()
        )));
    }
    kelvin_transform(|y| martin_kernel(cone, alpha, y), alpha, x)
}

/// Killing intensity `κ(z) = ∫_{Γᶜ} ν(z - y) dy`.
///
/// Closed form on the half-line and half-space. For wedges and circular
/// cones the integral is taken in polar coordinates centred at `z`: the
/// radial part over each ray segment outside the cone is exact, the
/// angular part is adaptive quadrature.
pub fn killing_intensity(cone: &ConeSpec, alpha: f64, z: &Point, quad: &QuadratureSpec) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", "alpha must be in (0,2)"));
    }
    if !cone.contains(z)? {
        return Err(Error::domain("killing intensity needs z inside the cone"));
    }
    let c = z.coords();
    match cone {
        ConeSpec::HalfLine | ConeSpec::HalfSpace { .. } => {
            // The coordinate marginal of the isotropic Lévy measure is the
            // one-dimensional one, so only the distance to the face matters.
            Ok(levy_constant(1, alpha) / alpha * powf(c[c.len() - 1], -alpha))
        }
        _ => killing_intensity_quadrature(cone, alpha, c, quad),
    }
}

/// Polar-coordinate quadrature for κ; valid for every cone family.
pub fn killing_intensity_quadrature(cone: &ConeSpec, alpha: f64, z: &[f64], quad: &QuadratureSpec) -> Result<f64> {
    let d = cone.dim();
    let a = levy_constant(d, alpha);
    let radial = |dir: &[f64], cone: &ConeSpec, z: &[f64]| -> f64 {
        outside_segments(cone, z, dir)
            .iter()
            .map(|&(r1, r2)| {
                let hi = if r2.is_finite() { powf(r2, -alpha) } else { 0.0 };
                (powf(r1, -alpha) - hi) / alpha
            })
            .sum()
    };
    match d {
        1 => Ok(a * (radial(&[1.0], cone, z) + radial(&[-1.0], cone, z))),
        2 => {
            let mut breaks: Vec<f64> = Vec::new();
            if let ConeSpec::PlanarWedge { angle } = *cone {
                for phi in [0.5 * PI - 0.5 * angle, 0.5 * PI + 0.5 * angle] {
                    breaks.push(wrap_angle(phi));
                    breaks.push(wrap_angle(phi + PI));
                }
            }
            breaks.push(0.0);
            breaks.push(2.0 * PI);
            breaks.sort_by(|a, b| a.total_cmp(b));
            let mut total = 0.0;
            for w in breaks.windows(2) {
                total += integrate(
                    |phi| radial(&[cos(phi), sin(phi)], cone, z),
                    w[0],
                    w[1],
                    quad,
                )?
                .value;
            }
            Ok(a * total)
        }
        _ => {
            // Reduce to three coordinates using the symmetry about e_d:
            // z ↦ (ρ, 0, z_d), direction (sin a cos b, sin a sin b, cos a)
            // with surface measure sin^{d-2}a sin^{d-3}b da db |S^{d-3}|.
            let reduced = match *cone {
                ConeSpec::HalfSpace { .. } => ConeSpec::HalfSpace { dim: 3 },
                ConeSpec::CircularCone { half_aperture, .. } => ConeSpec::CircularCone { dim: 3, half_aperture },
                _ => unreachable!("only half-spaces and circular cones exist in d >= 3"),
            };
            let zd = z[d - 1];
            let rho = norm(&z[..d - 1]);
            let zr = [rho, 0.0, zd];
            let df = d as f64;
            let sphere = 2.0 * powf(PI, 0.5 * (df - 2.0)) / gamma(0.5 * (df - 2.0));
            let inner_quad = quad.loosened(0.1);
            let mut failure = None;
            let outer = integrate(
                |ang| {
                    let (sa, ca) = (sin(ang), cos(ang));
                    let r = integrate(
                        |b| {
                            let dir = [sa * cos(b), sa * sin(b), ca];
                            radial(&dir, &reduced, &zr) * powf(sin(b), df - 3.0)
                        },
                        0.0,
                        PI,
                        &inner_quad,
                    );
                    match r {
                        Ok(v) => v.value * powf(sa, df - 2.0),
                        Err(e) => {
                            failure = Some(e);
                            0.0
                        }
                    }
                },
                0.0,
                PI,
                quad,
            )?;
            if let Some(e) = failure {
                return Err(e.in_layer("killing intensity, inner angle"));
            }
            Ok(a * sphere * outer.value)
        }
    }
}

/// Parameter intervals `[r1, r2)` on the ray `z + r·dir`, `r > 0`, lying
/// outside the cone.
fn outside_segments(cone: &ConeSpec, z: &[f64], dir: &[f64]) -> Vec<(f64, f64)> {
    let mut roots: Vec<f64> = Vec::with_capacity(4);
    let mut push = |r: f64| {
        if r > 0.0 && r.is_finite() {
            roots.push(r);
        }
    };
    match *cone {
        ConeSpec::HalfLine | ConeSpec::HalfSpace { .. } => {
            let k = z.len() - 1;
            if dir[k] != 0.0 {
                push(-z[k] / dir[k]);
            }
        }
        ConeSpec::PlanarWedge { angle } => {
            let h = 0.5 * angle;
            // Boundary rays point along (±sin h, cos h); normals (cos h, ∓sin h).
            for n in [[cos(h), -sin(h)], [cos(h), sin(h)]] {
                let den = n[0] * dir[0] + n[1] * dir[1];
                if den != 0.0 {
                    push(-(n[0] * z[0] + n[1] * z[1]) / den);
                }
            }
        }
        ConeSpec::CircularCone { half_aperture, .. } => {
            let k = z.len() - 1;
            let c2 = cos(half_aperture) * cos(half_aperture);
            let uu: f64 = dir.iter().map(|v| v * v).sum();
            let zu: f64 = z.iter().zip(dir).map(|(a, b)| a * b).sum();
            let zz: f64 = z.iter().map(|v| v * v).sum();
            let qa = dir[k] * dir[k] - c2 * uu;
            let qb = 2.0 * (z[k] * dir[k] - c2 * zu);
            let qc = z[k] * z[k] - c2 * zz;
            if qa.abs() < 1e-300 {
                if qb != 0.0 {
                    push(-qc / qb);
                }
            } else {
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    let s = sqrt(disc);
                    let q = -0.5 * (qb + if qb >= 0.0 { s } else { -s });
                    if q != 0.0 {
                        push(q / qa);
                        push(qc / q);
                    }
                }
            }
            // The vertex itself is outside; a ray can pass through it.
            if let Some(r) = ray_hits_origin(z, dir) {
                push(r);
            }
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    let mut segments: Vec<(f64, f64)> = Vec::new();
    let mut lo = 0.0;
    let mut point = alloc::vec![0.0; z.len()];
    for i in 0..=roots.len() {
        let hi = if i < roots.len() { roots[i] } else { f64::INFINITY };
        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo + 1.0 };
        for (j, p) in point.iter_mut().enumerate() {
            *p = z[j] + mid * dir[j];
        }
        if !cone.contains_slice(&point) && hi > lo {
            match segments.last_mut() {
                Some(last) if last.1 == lo => last.1 = hi,
                _ => segments.push((lo, hi)),
            }
        }
        lo = hi;
    }
    segments
}

fn wrap_angle(phi: f64) -> f64 {
    let two_pi = 2.0 * PI;
    phi - two_pi * crate::math::floor(phi / two_pi)
}

fn ray_hits_origin(z: &[f64], dir: &[f64]) -> Option<f64> {
    let uu: f64 = dir.iter().map(|v| v * v).sum();
    let r = -z.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>() / uu;
    let miss: f64 = z.iter().zip(dir).map(|(a, b)| (a + r * b) * (a + r * b)).sum();
    (miss == 0.0).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn membership() {
        let h = ConeSpec::HalfLine;
        assert!(h.contains(&Point::scalar(1.0)).unwrap());
        assert!(!h.contains(&Point::scalar(0.0)).unwrap());
        assert!(!h.contains(&Point::scalar(-1.0)).unwrap());
        let c = ConeSpec::circular(3, PI / 4.0).unwrap();
        assert!(c.contains(&Point::unit_axis(3)).unwrap());
        assert!(!c.contains(&Point::new(vec![1.0, 0.0, 0.0]).unwrap()).unwrap());
        assert!(!c.contains(&Point::origin(3)).unwrap());
        assert!(h.contains(&Point::origin(2)).is_err());
        let w = ConeSpec::wedge(PI / 2.0).unwrap();
        assert!(w.contains(&Point::unit_axis(2)).unwrap());
        assert!(!w.contains(&Point::new(vec![1.0, 0.5]).unwrap()).unwrap());
        assert!(!w.contains(&Point::new(vec![1.0, 1.0]).unwrap()).unwrap());
        let wide = ConeSpec::wedge(1.5 * PI).unwrap();
        assert!(wide.contains(&Point::new(vec![1.0, -0.5]).unwrap()).unwrap());
        assert!(!wide.contains(&Point::new(vec![0.0, -1.0]).unwrap()).unwrap());
    }

    #[test]
    fn invalid_cones() {
        assert!(ConeSpec::wedge(0.0).is_err());
        assert!(ConeSpec::wedge(2.0 * PI).is_err());
        assert!(ConeSpec::circular(1, 0.5).is_err());
        assert!(ConeSpec::circular(3, PI).is_err());
        assert!(ConeSpec::half_space(0).is_err());
    }

    #[test]
    fn martin_and_kelvin_values() {
        let h = ConeSpec::HalfLine;
        assert!((martin_kernel(&h, 1.0, &Point::scalar(4.0)).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(martin_kernel(&h, 1.0, &Point::scalar(-1.0)).unwrap(), 0.0);
        let hs = ConeSpec::half_space(3).unwrap();
        let x = Point::new(vec![5.0, 5.0, 1.0]).unwrap();
        assert!((martin_kernel(&hs, 1.5, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((kelvin_kernel(&h, 1.0, &Point::scalar(4.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((kelvin_kernel(&h, 1.0, &Point::scalar(1.0)).unwrap() - 1.0).abs() < 1e-15);
        let v = kelvin_kernel(&h, 1.5, &Point::scalar(9.0)).unwrap();
        assert!((v - powf(9.0, -0.25)).abs() < 1e-14);
        assert!(kelvin_kernel(&h, 1.0, &Point::scalar(0.0)).is_err());
        let w = ConeSpec::wedge(1.0).unwrap();
        assert!(matches!(martin_kernel(&w, 1.0, &Point::unit_axis(2)), Err(Error::Unsupported(_))));
        assert!(matches!(kelvin_kernel(&w, 1.0, &Point::unit_axis(2)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn kelvin_is_an_involution() {
        let hs = ConeSpec::half_space(2).unwrap();
        for &(a, b) in &[(0.3, 0.7), (-2.0, 0.1), (4.0, 3.0), (0.0, 0.5)] {
            let x = Point::new(vec![a, b]).unwrap();
            let twice = kelvin_transform(|y| kelvin_transform(|w| martin_kernel(&hs, 1.2, w), 1.2, y), 1.2, &x).unwrap();
            let once = martin_kernel(&hs, 1.2, &x).unwrap();
            assert!((twice - once).abs() <= 1e-12 * once.max(1e-300));
        }
    }

    #[test]
    fn killing_intensity_half_line() {
        let h = ConeSpec::HalfLine;
        let k1 = killing_intensity(&h, 1.0, &Point::scalar(1.0), &q()).unwrap();
        assert!((k1 - 1.0 / PI).abs() < 1e-14);
        let k2 = killing_intensity(&h, 1.0, &Point::scalar(2.0), &q()).unwrap();
        assert!((k2 - 0.5 / PI).abs() < 1e-14);
        assert!(killing_intensity(&h, 1.0, &Point::scalar(-1.0), &q()).is_err());
        // Generic route agrees with the closed form.
        let k = killing_intensity_quadrature(&h, 1.3, &[0.7], &q()).unwrap();
        let c = killing_intensity(&h, 1.3, &Point::scalar(0.7), &q()).unwrap();
        assert!((k - c).abs() < 1e-12 * c);
    }

    #[test]
    fn killing_intensity_half_space_by_quadrature() {
        for &(d, alpha) in &[(2usize, 1.0), (3, 1.5), (4, 0.8)] {
            let hs = ConeSpec::half_space(d).unwrap();
            let mut z = vec![0.0; d];
            z[0] = 0.4;
            z[d - 1] = 1.3;
            let closed = killing_intensity(&hs, alpha, &Point::new(z.clone()).unwrap(), &q()).unwrap();
            let quadv = killing_intensity_quadrature(&hs, alpha, &z, &q()).unwrap();
            assert!((closed - quadv).abs() < 1e-6 * closed, "d={d}: {closed} vs {quadv}");
        }
        // The wedge of angle π is the upper half-plane.
        let w = ConeSpec::wedge(PI).unwrap();
        let z = Point::new(vec![0.3, 0.8]).unwrap();
        let kw = killing_intensity(&w, 1.2, &z, &q()).unwrap();
        let kh = killing_intensity(&ConeSpec::half_space(2).unwrap(), 1.2, &z, &q()).unwrap();
        assert!((kw - kh).abs() < 1e-7 * kh);
    }

    #[test]
    fn killing_intensity_scaling() {
        let cones = [
            ConeSpec::wedge(PI / 3.0).unwrap(),
            ConeSpec::wedge(1.5 * PI).unwrap(),
            ConeSpec::circular(3, 0.6).unwrap(),
            ConeSpec::circular(3, 2.0).unwrap(),
        ];
        for cone in cones {
            let d = cone.dim();
            let mut z = vec![0.0; d];
            z[0] = 0.1;
            z[d - 1] = 1.0;
            let z = Point::new(z).unwrap();
            let base = killing_intensity(&cone, 1.3, &z, &q()).unwrap();
            for &r in &[0.1, 10.0] {
                let scaled = killing_intensity(&cone, 1.3, &z.scaled(r), &q()).unwrap();
                assert!((scaled * powf(r, 1.3) / base - 1.0).abs() < 1e-6, "{cone:?} r={r}");
            }
        }
    }

    #[test]
    fn wedge_killing_decreases_with_angle() {
        let one = Point::unit_axis(2);
        let mut prev = f64::INFINITY;
        for k in 1..8 {
            let w = ConeSpec::wedge(k as f64 * PI / 4.0).unwrap();
            let v = killing_intensity(&w, 1.0, &one, &q()).unwrap();
            assert!(v < prev, "angle {k}π/4: {v} >= {prev}");
            prev = v;
        }
    }

    #[test]
    fn two_dimensional_circular_cone_is_a_wedge() {
        let c = ConeSpec::circular(2, 0.7).unwrap();
        let w = ConeSpec::wedge(1.4).unwrap();
        let z = Point::new(vec![0.2, 1.0]).unwrap();
        let a = killing_intensity(&c, 1.0, &z, &q()).unwrap();
        let b = killing_intensity(&w, 1.0, &z, &q()).unwrap();
        assert!((a - b).abs() < 1e-7 * b);
    }
}
