//! χ sweeps and the search for Hong-Ou-Mandel configurations.
//!
//! The HOM condition `U11 U22 + U12 U21 = 0` is located on the signed
//! value of the (real, zero-phase) coincidence amplitude: grid sign
//! changes give brackets, which are refined by bisection.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    coincidence_amplitude, evolve_two_photon, hom_record, negativity, negativity_lower_bound,
    trace_out_third, DEFAULT_CUTOFF,
};
use crate::modes::{make_comb, orthonormalize_pair, ModeProfile};
use crate::tritter::{build_tritter, tritter_from_modes, MixerMatrix, TritterAngles};

pub const DEFAULT_HOM_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_POPULATION_FLOOR: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

pub const SWEEP_CSV_HEADER: &str =
    "chi,theta,phi,psi,hom_coeff,rho2020,rho0202,rho1111,negativity,neg_bound,status";
pub const HOM_CSV_HEADER: &str = "parameter,value,chi,theta,phi,psi,hom_coeff,rho2020,rho0202,\
                                  rho1111,negativity,neg_bound,iterations,status";

/// Pair of modes whose redshift defines the mixer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeFamily {
    /// Gaussians at `omega0` and `omega0 + separation`, orthonormalized.
    GaussianPair {
        omega0: f64,
        separation: f64,
        sigma: f64,
    },
    /// Two alternating-sign combs of `count` lobes spaced by `spacing`; the
    /// second comb is the first shifted by `offset`. Orthonormalized.
    CombPair {
        omega0: f64,
        spacing: f64,
        width: f64,
        count: usize,
        offset: f64,
    },
    /// Explicit profiles, orthonormalized in the given order.
    Profiles {
        first: ModeProfile,
        second: ModeProfile,
    },
    /// Mixer angles injected directly: `base + (χ − 1) · rate`.
    Angles { base: [f64; 3], rate: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyParameter {
    Omega0,
    Separation,
    Sigma,
    Spacing,
    Width,
    Offset,
}

impl FamilyParameter {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyParameter::Omega0 => "omega0",
            FamilyParameter::Separation => "separation",
            FamilyParameter::Sigma => "sigma",
            FamilyParameter::Spacing => "spacing",
            FamilyParameter::Width => "width",
            FamilyParameter::Offset => "offset",
        }
    }
}

impl ModeFamily {
    /// Copy of the family with one free parameter replaced.
    pub fn with_parameter(&self, param: FamilyParameter, value: f64) -> Result<ModeFamily> {
        use FamilyParameter as P;
        let mut out = self.clone();
        let slot = match (&mut out, param) {
            (ModeFamily::GaussianPair { omega0, .. }, P::Omega0) => omega0,
            (ModeFamily::GaussianPair { separation, .. }, P::Separation) => separation,
            (ModeFamily::GaussianPair { sigma, .. }, P::Sigma) => sigma,
            (ModeFamily::CombPair { omega0, .. }, P::Omega0) => omega0,
            (ModeFamily::CombPair { spacing, .. }, P::Spacing) => spacing,
            (ModeFamily::CombPair { width, .. }, P::Width) => width,
            (ModeFamily::CombPair { offset, .. }, P::Offset) => offset,
            _ => {
                return Err(Error::domain(format!(
                    "family has no free parameter '{}'",
                    param.name()
                )))
            }
        };
        *slot = value;
        Ok(out)
    }

    pub fn prepare(&self) -> Result<PreparedFamily> {
        match self {
            ModeFamily::GaussianPair {
                omega0,
                separation,
                sigma,
            } => {
                let a = ModeProfile::gaussian(*omega0, *sigma, 0.0)?;
                let b = ModeProfile::gaussian(omega0 + separation, *sigma, 0.0)?;
                let (a, b) = orthonormalize_pair(&a, &b)?;
                Ok(PreparedFamily::Modes(a, b))
            }
            ModeFamily::CombPair {
                omega0,
                spacing,
                width,
                count,
                offset,
            } => {
                if *count == 0 {
                    return Err(Error::domain("comb needs at least one peak"));
                }
                let comb = |start: f64| {
                    let peaks: Vec<(Complex64, f64, f64)> = (0..*count)
                        .map(|k| {
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            (
                                Complex64::new(sign, 0.0),
                                start + k as f64 * spacing,
                                *width,
                            )
                        })
                        .collect();
                    make_comb(&peaks)
                };
                let (a, b) = orthonormalize_pair(&comb(*omega0)?, &comb(omega0 + offset)?)?;
                Ok(PreparedFamily::Modes(a, b))
            }
            ModeFamily::Profiles { first, second } => {
                let (a, b) = orthonormalize_pair(first, second)?;
                Ok(PreparedFamily::Modes(a, b))
            }
            ModeFamily::Angles { base, rate } => Ok(PreparedFamily::Angles {
                base: *base,
                rate: *rate,
            }),
        }
    }
}

/// A family with its orthonormal pair already constructed.
#[derive(Debug, Clone, PartialEq)]
pub enum PreparedFamily {
    Modes(ModeProfile, ModeProfile),
    Angles { base: [f64; 3], rate: [f64; 3] },
}

impl PreparedFamily {
    pub fn mixer(&self, chi: f64) -> Result<(TritterAngles, MixerMatrix)> {
        match self {
            PreparedFamily::Modes(a, b) => {
                let t = tritter_from_modes(a, b, chi)?;
                Ok((t.angles, t.matrix))
            }
            PreparedFamily::Angles { base, rate } => {
                if !(chi.is_finite() && chi > 0.0) {
                    return Err(Error::domain(format!("χ must be > 0, got {chi}")));
                }
                let at = |i: usize| {
                    let v = base[i] + (chi - 1.0) * rate[i];
                    // snap rounding noise at the ends of the range
                    if (-1e-12..0.0).contains(&v) {
                        0.0
                    } else if v > FRAC_PI_2 && v < FRAC_PI_2 + 1e-12 {
                        FRAC_PI_2
                    } else {
                        v
                    }
                };
                let angles = TritterAngles::new(at(0), at(1), at(2))?;
                Ok((angles, build_tritter(&angles)))
            }
        }
    }
}

/// Full protocol evaluated at one χ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvaluation {
    pub chi: f64,
    pub angles: TritterAngles,
    pub matrix: MixerMatrix,
    /// Real part of `U11 U22 + U12 U21`.
    pub signed_amplitude: f64,
    pub hom_coefficient: f64,
    pub rho2020: f64,
    pub rho0202: f64,
    pub rho1111: f64,
    pub negativity: f64,
    pub negativity_bound: f64,
}

pub fn evaluate_point(family: &PreparedFamily, chi: f64) -> Result<PointEvaluation> {
    let (angles, matrix) = family.mixer(chi)?;
    evaluate_mixer(chi, angles, matrix)
}

pub fn evaluate_mixer(
    chi: f64,
    angles: TritterAngles,
    matrix: MixerMatrix,
) -> Result<PointEvaluation> {
    let state = evolve_two_photon(&matrix)?;
    let rho = trace_out_third(&state, DEFAULT_CUTOFF)?;
    let record = hom_record(&matrix, DEFAULT_HOM_TOLERANCE);
    Ok(PointEvaluation {
        chi,
        angles,
        matrix,
        signed_amplitude: coincidence_amplitude(&matrix).re,
        hom_coefficient: record.coefficient,
        rho2020: rho.get(2, 0, 2, 0).re,
        rho0202: rho.get(0, 2, 0, 2).re,
        rho1111: rho.get(1, 1, 1, 1).re,
        negativity: negativity(&rho)?,
        negativity_bound: negativity_lower_bound(&rho),
    })
}

/// Scan along one family parameter at fixed χ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterScan {
    pub parameter: FamilyParameter,
    pub range: [f64; 2],
    pub points: usize,
    pub chi: f64,
}

fn default_hom_tolerance() -> f64 {
    DEFAULT_HOM_TOLERANCE
}
fn default_population_floor() -> f64 {
    DEFAULT_POPULATION_FLOOR
}
fn default_max_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: ModeFamily,
    /// `[χ_lo, χ_hi]`
    pub chi: [f64; 2],
    pub points: usize,
    /// When present, `find_hom` scans this parameter instead of χ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ParameterScan>,
    #[serde(default = "default_hom_tolerance")]
    pub hom_tolerance: f64,
    #[serde(default = "default_population_floor")]
    pub population_floor: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

impl SweepSpec {
    pub fn new(family: ModeFamily, chi: [f64; 2], points: usize) -> Self {
        SweepSpec {
            family,
            chi,
            points,
            scan: None,
            hom_tolerance: DEFAULT_HOM_TOLERANCE,
            population_floor: DEFAULT_POPULATION_FLOOR,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.chi;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
            return Err(Error::domain(format!("χ range [{lo}, {hi}] is invalid")));
        }
        if self.points < 2 {
            return Err(Error::domain("grid needs at least two points"));
        }
        if !(self.population_floor > 0.0) {
            return Err(Error::domain("population floor must be > 0"));
        }
        if !(self.hom_tolerance > 0.0) {
            return Err(Error::domain("HOM tolerance must be > 0"));
        }
        if let Some(scan) = &self.scan {
            let [a, b] = scan.range;
            if !(a.is_finite() && b.is_finite() && b >= a) || scan.points < 2 {
                return Err(Error::domain("invalid parameter scan range"));
            }
            if !(scan.chi.is_finite() && scan.chi > 0.0) {
                return Err(Error::domain("scan χ must be > 0"));
            }
        }
        Ok(())
    }

    pub fn chi_grid(&self) -> Vec<f64> {
        grid(self.chi[0], self.chi[1], self.points)
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let t = i as f64 / last;
            lo * (1.0 - t) + hi * t
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub chi: f64,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub psi: Option<f64>,
    pub hom_coeff: Option<f64>,
    pub rho2020: Option<f64>,
    pub rho0202: Option<f64>,
    pub rho1111: Option<f64>,
    pub negativity: Option<f64>,
    pub neg_bound: Option<f64>,
    pub status: String,
}

impl SweepRow {
    fn from_result(chi: f64, r: Result<PointEvaluation>) -> Self {
        match r {
            Ok(p) => SweepRow {
                chi,
                theta: Some(p.angles.theta),
                phi: Some(p.angles.phi),
                psi: Some(p.angles.psi),
                hom_coeff: Some(p.hom_coefficient),
                rho2020: Some(p.rho2020),
                rho0202: Some(p.rho0202),
                rho1111: Some(p.rho1111),
                negativity: Some(p.negativity),
                neg_bound: Some(p.negativity_bound),
                status: "ok".into(),
            },
            Err(e) => SweepRow {
                chi,
                theta: None,
                phi: None,
                psi: None,
                hom_coeff: None,
                rho2020: None,
                rho0202: None,
                rho1111: None,
                negativity: None,
                neg_bound: None,
                status: format!("error: {e}"),
            },
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn sweep_chi(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    sweep_chi_with(spec, true)
}

/// Rows are computed independently and returned in χ order whether or not
/// they are evaluated in parallel.
pub fn sweep_chi_with(spec: &SweepSpec, parallel: bool) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let family = spec.family.prepare()?;
    let chis = spec.chi_grid();
    let row = |&chi: &f64| SweepRow::from_result(chi, evaluate_point(&family, chi));
    let rows = if parallel {
        chis.par_iter().map(row).collect()
    } else {
        chis.iter().map(row).collect()
    };
    Ok(rows)
}

fn fmt_num(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        let _ = write!(out, "{v:.15e}");
    }
}

fn csv_status(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        let mut line = format!("{:.15e}", r.chi);
        for v in [
            r.theta,
            r.phi,
            r.psi,
            r.hom_coeff,
            r.rho2020,
            r.rho0202,
            r.rho1111,
            r.negativity,
            r.neg_bound,
        ] {
            line.push(',');
            fmt_num(&mut line, v);
        }
        line.push(',');
        line.push_str(&csv_status(&r.status));
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// A refined root of the coincidence amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomRoot {
    /// Name of the scanned quantity (`chi` or a family parameter).
    pub parameter: String,
    pub value: f64,
    pub chi: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub hom_coeff: f64,
    pub rho2020: f64,
    pub rho0202: f64,
    pub rho1111: f64,
    pub negativity: f64,
    pub neg_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Signed coincidence amplitude and full evaluation at one scan coordinate.
type Evaluator<'a> = dyn Fn(f64) -> Result<PointEvaluation> + Sync + 'a;

pub fn find_hom(spec: &SweepSpec) -> Result<Vec<HomRoot>> {
    spec.validate()?;
    match &spec.scan {
        None => {
            let family = spec.family.prepare()?;
            let eval = |chi: f64| evaluate_point(&family, chi);
            search_roots(spec, "chi", &spec.chi_grid(), &eval)
        }
        Some(scan) => {
            let eval = |x: f64| {
                let fam = spec.family.with_parameter(scan.parameter, x)?.prepare()?;
                evaluate_point(&fam, scan.chi)
            };
            let xs = grid(scan.range[0], scan.range[1], scan.points);
            search_roots(spec, scan.parameter.name(), &xs, &eval)
        }
    }
}

fn search_roots(
    spec: &SweepSpec,
    name: &str,
    xs: &[f64],
    eval: &Evaluator<'_>,
) -> Result<Vec<HomRoot>> {
    let values: Vec<Option<PointEvaluation>> = xs.par_iter().map(|&x| eval(x).ok()).collect();

    let mut roots = Vec::new();
    for i in 0..xs.len() {
        let Some(p) = values[i] else { continue };
        if p.signed_amplitude == 0.0 {
            roots.push((xs[i], p, 0, true));
            continue;
        }
        let Some(Some(q)) = values.get(i + 1) else {
            continue;
        };
        if q.signed_amplitude == 0.0 || p.signed_amplitude.signum() == q.signed_amplitude.signum() {
            continue;
        }
        roots.push(bisect(xs[i], p, xs[i + 1], *q, spec, eval)?);
    }
    log::info!("{} sign changes of the coincidence amplitude", roots.len());

    Ok(roots
        .into_iter()
        .filter(|(_, p, _, _)| {
            p.rho2020 > spec.population_floor && p.rho0202 > spec.population_floor
        })
        .map(|(x, p, iterations, converged)| HomRoot {
            parameter: name.to_string(),
            value: x,
            chi: p.chi,
            theta: p.angles.theta,
            phi: p.angles.phi,
            psi: p.angles.psi,
            hom_coeff: p.hom_coefficient,
            rho2020: p.rho2020,
            rho0202: p.rho0202,
            rho1111: p.rho1111,
            negativity: p.negativity,
            neg_bound: p.negativity_bound,
            iterations,
            converged,
        })
        .collect())
}

fn bisect(
    mut lo: f64,
    mut f_lo: PointEvaluation,
    mut hi: f64,
    f_hi: PointEvaluation,
    spec: &SweepSpec,
    eval: &Evaluator<'_>,
) -> Result<(f64, PointEvaluation, usize, bool)> {
    let mut best = if f_lo.signed_amplitude.abs() <= f_hi.signed_amplitude.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    for it in 1..=spec.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok((best.0, best.1, it, false));
        }
        let f_mid = eval(mid)?;
        if f_mid.signed_amplitude.abs() < best.1.signed_amplitude.abs() {
            best = (mid, f_mid);
        }
        if f_mid.signed_amplitude.abs() < spec.hom_tolerance {
            return Ok((mid, f_mid, it, true));
        }
        if f_mid.signed_amplitude.signum() == f_lo.signed_amplitude.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((best.0, best.1, spec.max_iterations, false))
}

pub fn write_roots_csv<W: Write>(roots: &[HomRoot], mut w: W) -> io::Result<()> {
    writeln!(w, "{HOM_CSV_HEADER}")?;
    for r in roots {
        writeln!(
            w,
            "{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{},{}",
            r.parameter,
            r.value,
            r.chi,
            r.theta,
            r.phi,
            r.psi,
            r.hom_coeff,
            r.rho2020,
            r.rho0202,
            r.rho1111,
            r.negativity,
            r.neg_bound,
            r.iterations,
            if r.converged { "ok" } else { "unconverged" }
        )?;
    }
    Ok(())
}
