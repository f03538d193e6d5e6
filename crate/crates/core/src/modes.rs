//! Photon frequency profiles `F(ω)` on `ω > 0`.
//!
//! Gaussian lobes use the convention
//! `F(ω) = (2πσ²)^(-1/4) exp(-(ω-ω0)²/(4σ²)) e^{iφ}`, so `|F|²` is a
//! probability density with standard deviation `σ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureOptions};

/// Half-width of a lobe's integration window, in units of its width.
/// The amplitude at the window edge is `exp(-13²/4) ≈ 4.5e-19` of the peak.
const SUPPORT_WIDTHS: f64 = 13.0;

/// Below this ratio the `ω ≤ 0` tail of a Gaussian exceeds ~1e-7.
const TRUNCATION_WARN_RATIO: f64 = 5.0;

/// Grid spacing (in lobe widths) used when a Gram–Schmidt result has to
/// be tabulated.
const TABULATION_STEP: f64 = 0.01;

/// One Gaussian lobe `weight · g(ω; center, width)`, with `g` unit-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Lobe {
    pub weight: Complex64,
    pub center: f64,
    pub width: f64,
}

impl From<[f64; 4]> for Lobe {
    fn from(v: [f64; 4]) -> Self {
        Lobe {
            weight: Complex64::new(v[0], v[1]),
            center: v[2],
            width: v[3],
        }
    }
}

impl From<Lobe> for [f64; 4] {
    fn from(l: Lobe) -> Self {
        [l.weight.re, l.weight.im, l.center, l.width]
    }
}

impl Lobe {
    pub fn new(weight: Complex64, center: f64, width: f64) -> Result<Self> {
        check_peak(center, width)?;
        Ok(Lobe {
            weight,
            center,
            width,
        })
    }

    fn value(&self, omega: f64) -> Complex64 {
        self.weight * gaussian_envelope(omega, self.center, self.width)
    }
}

fn gaussian_envelope(omega: f64, center: f64, width: f64) -> f64 {
    let d = omega - center;
    (2.0 * PI * width * width).powf(-0.25) * (-d * d / (4.0 * width * width)).exp()
}

fn check_peak(center: f64, width: f64) -> Result<()> {
    if !(center.is_finite() && center > 0.0) {
        return Err(Error::domain(format!(
            "peak frequency must be > 0, got {center}"
        )));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::domain(format!("width must be > 0, got {width}")));
    }
    if center < TRUNCATION_WARN_RATIO * width {
        log::warn!(
            "peak {center} is within {TRUNCATION_WARN_RATIO} widths of ω = 0; \
             truncation of the ω ≤ 0 tail exceeds 1e-7"
        );
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Gaussian {
        omega0: f64,
        sigma: f64,
        phase: f64,
    },
    Comb {
        peaks: Vec<Lobe>,
    },
    /// Linear interpolation on a strictly increasing grid, zero outside it.
    Tabulated {
        omega: Vec<f64>,
        values: Vec<Complex64>,
    },
}

/// A complex frequency profile together with a flag recording whether it
/// is known to have unit norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct ModeProfile {
    shape: Shape,
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ProfileRepr {
    Gaussian {
        omega0: f64,
        sigma: f64,
        #[serde(default)]
        phase: f64,
    },
    Comb {
        peaks: Vec<Lobe>,
    },
    Tabulated {
        omega: Vec<f64>,
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

impl TryFrom<ProfileRepr> for ModeProfile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        match r {
            ProfileRepr::Gaussian {
                omega0,
                sigma,
                phase,
            } => ModeProfile::gaussian(omega0, sigma, phase),
            ProfileRepr::Comb { peaks } => ModeProfile::comb(peaks),
            ProfileRepr::Tabulated { omega, re, im } => {
                if re.len() != im.len() {
                    return Err(Error::domain("tabulated re/im lengths differ"));
                }
                let values = re
                    .into_iter()
                    .zip(im)
                    .map(|(a, b)| Complex64::new(a, b))
                    .collect();
                ModeProfile::tabulated(omega, values)
            }
        }
    }
}

impl From<ModeProfile> for ProfileRepr {
    fn from(p: ModeProfile) -> Self {
        match p.shape {
            Shape::Gaussian {
                omega0,
                sigma,
                phase,
            } => ProfileRepr::Gaussian {
                omega0,
                sigma,
                phase,
            },
            Shape::Comb { peaks } => ProfileRepr::Comb { peaks },
            Shape::Tabulated { omega, values } => ProfileRepr::Tabulated {
                omega,
                re: values.iter().map(|v| v.re).collect(),
                im: values.iter().map(|v| v.im).collect(),
            },
        }
    }
}

impl ModeProfile {
    /// Unit-norm Gaussian (exactly normalized on the real line).
    pub fn gaussian(omega0: f64, sigma: f64, phase: f64) -> Result<Self> {
        check_peak(omega0, sigma)?;
        if !phase.is_finite() {
            return Err(Error::domain("phase must be finite"));
        }
        Ok(ModeProfile {
            shape: Shape::Gaussian {
                omega0,
                sigma,
                phase,
            },
            normalized: true,
        })
    }

    /// Superposition of lobes taken as given (no normalization). See
    /// [`make_comb`] for the normalized constructor.
    pub fn comb(peaks: Vec<Lobe>) -> Result<Self> {
        if peaks.is_empty() {
            return Err(Error::domain("comb needs at least one peak"));
        }
        for l in &peaks {
            check_peak(l.center, l.width)?;
            if !(l.weight.re.is_finite() && l.weight.im.is_finite()) {
                return Err(Error::domain("comb weight must be finite"));
            }
        }
        Ok(ModeProfile {
            shape: Shape::Comb { peaks },
            normalized: false,
        })
    }

    pub fn tabulated(omega: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if omega.len() != values.len() {
            return Err(Error::domain("tabulated grid and values differ in length"));
        }
        if omega.len() < 2 {
            return Err(Error::domain("tabulated grid needs at least two points"));
        }
        if omega.iter().any(|w| !w.is_finite())
            || values
                .iter()
                .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::domain("tabulated data must be finite"));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("tabulated grid must be strictly increasing"));
        }
        Ok(ModeProfile {
            shape: Shape::Tabulated { omega, values },
            normalized: false,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// True when the profile is known to satisfy `⟨F,F⟩ = 1`.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `F(ω)`; zero for `ω ≤ 0` and outside a tabulated grid.
    pub fn evaluate(&self, omega: f64) -> Complex64 {
        if !(omega > 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        match &self.shape {
            Shape::Gaussian {
                omega0,
                sigma,
                phase,
            } => Complex64::from_polar(gaussian_envelope(omega, *omega0, *sigma), *phase),
            Shape::Comb { peaks } => peaks
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, l| acc + l.value(omega)),
            Shape::Tabulated {
                omega: grid,
                values,
            } => interpolate(grid, values, omega),
        }
    }

    /// The profile as a list of Gaussian lobes, when it has one.
    fn lobes(&self) -> Option<Vec<Lobe>> {
        match &self.shape {
            Shape::Gaussian {
                omega0,
                sigma,
                phase,
            } => Some(vec![Lobe {
                weight: Complex64::from_polar(1.0, *phase),
                center: *omega0,
                width: *sigma,
            }]),
            Shape::Comb { peaks } => Some(peaks.clone()),
            Shape::Tabulated { .. } => None,
        }
    }

    /// Disjoint intervals (clipped to `ω ≥ 0`) outside which the profile is
    /// negligible, in increasing order.
    fn support(&self) -> Vec<(f64, f64)> {
        let mut raw: Vec<(f64, f64)> = match &self.shape {
            Shape::Tabulated { omega, .. } => vec![(omega[0], omega[omega.len() - 1])],
            _ => self
                .lobes()
                .unwrap_or_default()
                .iter()
                .map(|l| {
                    (
                        l.center - SUPPORT_WIDTHS * l.width,
                        l.center + SUPPORT_WIDTHS * l.width,
                    )
                })
                .collect(),
        };
        raw.retain(|&(_, b)| b > 0.0);
        for iv in raw.iter_mut() {
            iv.0 = iv.0.max(0.0);
        }
        merge_intervals(raw)
    }

    /// Interior points where the integrand changes character (lobe
    /// centres, interpolation nodes).
    fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Gaussian { omega0, .. } => vec![*omega0],
            Shape::Comb { peaks } => peaks.iter().map(|l| l.center).collect(),
            Shape::Tabulated { omega, .. } => omega.clone(),
        }
    }

    /// Multiplies the profile by a complex constant.
    pub fn scaled(&self, factor: Complex64) -> ModeProfile {
        let shape = match &self.shape {
            Shape::Tabulated { omega, values } => Shape::Tabulated {
                omega: omega.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
            _ => Shape::Comb {
                peaks: self
                    .lobes()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|l| Lobe {
                        weight: l.weight * factor,
                        ..l
                    })
                    .collect(),
            },
        };
        ModeProfile {
            shape,
            normalized: false,
        }
    }

    /// Returns `F / ‖F‖` and marks it normalized.
    pub fn normalize(&self) -> Result<ModeProfile> {
        let n = norm(self)?;
        if !(n > 0.0) {
            return Err(Error::Degenerate("profile has zero norm".into()));
        }
        let mut out = if (n - 1.0).abs() < 1e-12 && self.normalized {
            self.clone()
        } else {
            self.scaled(Complex64::new(1.0 / n, 0.0))
        };
        out.normalized = true;
        Ok(out)
    }
}

fn interpolate(grid: &[f64], values: &[Complex64], omega: f64) -> Complex64 {
    let last = grid.len() - 1;
    if omega < grid[0] || omega > grid[last] {
        return Complex64::new(0.0, 0.0);
    }
    let i = grid.partition_point(|&w| w <= omega);
    if i == 0 {
        return values[0];
    }
    if i > last {
        return values[last];
    }
    let t = (omega - grid[i - 1]) / (grid[i] - grid[i - 1]);
    values[i - 1] * (1.0 - t) + values[i] * t
}

fn merge_intervals(mut ivs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    ivs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(ivs.len());
    for (a, b) in ivs {
        match out.last_mut() {
            Some(prev) if a <= prev.1 => prev.1 = prev.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn intersect(xs: &[(f64, f64)], ys: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a, b) in xs {
        for &(c, d) in ys {
            let lo = a.max(c);
            let hi = b.min(d);
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    merge_intervals(out)
}

/// `⟨F,G⟩ = ∫₀^∞ F*(ω) G(ω) dω` with the default tolerances.
pub fn inner_product(f: &ModeProfile, g: &ModeProfile) -> Result<Complex64> {
    inner_product_with(f, g, &QuadratureOptions::default())
}

pub fn inner_product_with(
    f: &ModeProfile,
    g: &ModeProfile,
    opts: &QuadratureOptions,
) -> Result<Complex64> {
    let windows = intersect(&f.support(), &g.support());
    let (Some(first), Some(last)) = (windows.first(), windows.last()) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let (lo, hi) = (first.0, last.1);

    let mut breaks: Vec<f64> = windows.iter().flat_map(|&(a, b)| [a, b]).collect();
    breaks.extend(
        f.breakpoints()
            .into_iter()
            .chain(g.breakpoints())
            .filter(|&w| w > lo && w < hi),
    );
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let integral = quadrature::integrate(|w| f.evaluate(w).conj() * g.evaluate(w), &breaks, opts)?;
    log::debug!(
        "overlap {:.6e}{:+.6e}i after {} evaluations (err {:.2e})",
        integral.value.re,
        integral.value.im,
        integral.evaluations,
        integral.error_estimate
    );
    Ok(integral.value)
}

pub fn norm(f: &ModeProfile) -> Result<f64> {
    Ok(inner_product(f, f)?.re.max(0.0).sqrt())
}

/// `F'(ω) = χ F(χ²ω)`. Gaussian lobes map to lobes with peak and width
/// divided by `χ²`; tabulated grids are rescaled. No renormalization.
pub fn redshift_transform(f: &ModeProfile, chi: f64) -> Result<ModeProfile> {
    if !(chi.is_finite() && chi > 0.0) {
        return Err(Error::domain(format!("χ must be > 0, got {chi}")));
    }
    let s = chi * chi;
    let shape = match &f.shape {
        Shape::Gaussian {
            omega0,
            sigma,
            phase,
        } => Shape::Gaussian {
            omega0: omega0 / s,
            sigma: sigma / s,
            phase: *phase,
        },
        Shape::Comb { peaks } => Shape::Comb {
            peaks: peaks
                .iter()
                .map(|l| Lobe {
                    weight: l.weight,
                    center: l.center / s,
                    width: l.width / s,
                })
                .collect(),
        },
        Shape::Tabulated { omega, values } => Shape::Tabulated {
            omega: omega.iter().map(|w| w / s).collect(),
            values: values.iter().map(|v| v * chi).collect(),
        },
    };
    Ok(ModeProfile {
        shape,
        normalized: f.normalized,
    })
}

/// Normalized superposition of Gaussian lobes given as
/// `(weight, center, width)`.
pub fn make_comb(peaks: &[(Complex64, f64, f64)]) -> Result<ModeProfile> {
    if peaks.is_empty() {
        return Err(Error::domain("comb needs at least one peak"));
    }
    let lobes = peaks
        .iter()
        .map(|&(w, c, s)| Lobe::new(w, c, s))
        .collect::<Result<Vec<_>>>()?;
    ModeProfile::comb(lobes)?.normalize()
}

fn merge_lobes(lobes: Vec<Lobe>) -> Vec<Lobe> {
    let mut out: Vec<Lobe> = Vec::with_capacity(lobes.len());
    for l in lobes {
        match out
            .iter_mut()
            .find(|o| o.center == l.center && o.width == l.width)
        {
            Some(o) => o.weight += l.weight,
            None => out.push(l),
        }
    }
    out.retain(|l| l.weight != Complex64::new(0.0, 0.0));
    out
}

/// Gram–Schmidt anchored on the first argument: returns
/// `(F1/‖F1‖, (F2 − ⟨F1,F2⟩F1)/‖·‖)`.
///
/// Lobe-based inputs stay lobe-based. When either input is tabulated the
/// second output is tabulated on a common grid, and the projection is
/// taken along the sampled copy of `F1` so that the two outputs remain
/// orthogonal under the exact inner product despite the interpolation.
pub fn orthonormalize_pair(
    f1: &ModeProfile,
    f2: &ModeProfile,
) -> Result<(ModeProfile, ModeProfile)> {
    let e1 = f1.normalize()?;
    let n2 = norm(f2)?;
    if !(n2 > 0.0) {
        return Err(Error::Degenerate("second profile has zero norm".into()));
    }
    let c = inner_product(&e1, f2)?;
    if c.norm() / n2 > 1.0 - 1e-12 {
        return Err(Error::Degenerate(format!(
            "profiles are parallel (normalized overlap {:.15})",
            c.norm() / n2
        )));
    }
    if c.norm() < 1e-15 && f2.normalized && (n2 - 1.0).abs() < 1e-14 {
        return Ok((e1, f2.clone()));
    }

    let residual = match (e1.lobes(), f2.lobes()) {
        (Some(l1), Some(l2)) => {
            let mut lobes = l2;
            lobes.extend(l1.into_iter().map(|l| Lobe {
                weight: -c * l.weight,
                ..l
            }));
            let lobes = merge_lobes(lobes);
            if lobes.is_empty() {
                return Err(Error::Degenerate("profiles cancel exactly".into()));
            }
            ModeProfile {
                shape: Shape::Comb { peaks: lobes },
                normalized: false,
            }
        }
        _ => tabulated_residual(&e1, f2)?,
    };

    let rn = norm(&residual)?;
    if rn < 1e-7 * n2 {
        return Err(Error::Degenerate(format!(
            "residual after projection is {rn:.3e}"
        )));
    }
    let mut e2 = residual.scaled(Complex64::new(1.0 / rn, 0.0));

    // one re-orthogonalization pass for lobe-based results
    if e2.lobes().is_some() {
        let c2 = inner_product(&e1, &e2)?;
        if c2.norm() > 1e-15 {
            let mut lobes = e2.lobes().unwrap_or_default();
            lobes.extend(e1.lobes().unwrap_or_default().into_iter().map(|l| Lobe {
                weight: -c2 * l.weight,
                ..l
            }));
            e2 = ModeProfile {
                shape: Shape::Comb {
                    peaks: merge_lobes(lobes),
                },
                normalized: false,
            };
            let n = norm(&e2)?;
            e2 = e2.scaled(Complex64::new(1.0 / n, 0.0));
        }
    }
    e2.normalized = true;
    Ok((e1, e2))
}

fn sampling_grid(profiles: &[&ModeProfile]) -> Vec<f64> {
    let mut grid = Vec::new();
    for p in profiles {
        match &p.shape {
            Shape::Tabulated { omega, .. } => grid.extend(omega.iter().copied()),
            _ => {
                for l in p.lobes().unwrap_or_default() {
                    let lo = (l.center - SUPPORT_WIDTHS * l.width).max(0.0);
                    let hi = l.center + SUPPORT_WIDTHS * l.width;
                    let step = TABULATION_STEP * l.width;
                    let n = ((hi - lo) / step).ceil() as usize;
                    grid.extend((0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64));
                }
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn tabulated_residual(e1: &ModeProfile, f2: &ModeProfile) -> Result<ModeProfile> {
    let grid = sampling_grid(&[e1, f2]);
    let sample = |p: &ModeProfile| -> Result<ModeProfile> {
        ModeProfile::tabulated(grid.clone(), grid.iter().map(|&w| p.evaluate(w)).collect())
    };
    let s1 = sample(e1)?;
    let s2 = sample(f2)?;
    let denom = inner_product(e1, &s1)?;
    if denom.norm() < 1e-12 {
        return Err(Error::Degenerate("sampled anchor profile vanishes".into()));
    }
    let kappa = inner_product(e1, &s2)? / denom;
    let (Shape::Tabulated { values: v1, .. }, Shape::Tabulated { values: v2, .. }) =
        (&s1.shape, &s2.shape)
    else {
        unreachable!("sample() returns tabulated profiles")
    };
    let values = v2.iter().zip(v1).map(|(b, a)| b - kappa * a).collect();
    ModeProfile::tabulated(grid, values)
}
