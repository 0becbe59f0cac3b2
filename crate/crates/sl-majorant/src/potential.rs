//! Nonpositive potentials on \[0,1\]: construction, pointwise evaluation,
//! exact γ-norm quadrature, and normalization onto the constraint surface
//! ∫₀¹ |q|^γ dx = 1.
//!
//! All representations keep q ⩽ 0 everywhere. Evaluation is right-continuous
//! at interior breakpoints; the convention is immaterial to every integral
//! but fixes `evaluate` deterministically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent γ of the constraint functional ∫₀¹ |q|^γ dx.
///
/// Any positive γ is accepted at construction; operations built on the
/// phase-defect estimate chain additionally require γ < 1/2 and check that
/// at their call sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GammaExponent(f64);

impl GammaExponent {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Domain(format!(
                "gamma must be a positive finite number, got {gamma}"
            )));
        }
        Ok(GammaExponent(gamma))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Check the open interval (0, 1/2) required by the estimate chain.
    pub fn require_chain_range(self) -> Result<()> {
        if self.0 >= 0.5 {
            return Err(Error::Domain(format!(
                "gamma must lie in (0, 1/2) for the estimate chain, got {}",
                self.0
            )));
        }
        Ok(())
    }
}

/// A nonpositive potential on \[0,1\].
///
/// The JSON form uses a `type` tag: `constant`, `piecewise`, `well`,
/// `edge_wells`, or `grid`, with the fields shown on each variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    /// q ≡ value with value ⩽ 0.
    Constant { value: f64 },
    /// Cell values on consecutive intervals; `breakpoints` starts at 0,
    /// ends at 1 and is strictly increasing; `values` has one entry per cell.
    #[serde(rename = "piecewise")]
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// q = −depth on \[center − width/2, center + width/2\] ∩ \[0,1\], else 0.
    Well { center: f64, width: f64, depth: f64 },
    /// q = −depth on \[0, width\] ∪ \[1 − width, 1\], else 0; width ∈ (0, 1/2).
    EdgeWells { width: f64, depth: f64 },
    /// Linear interpolation of `ordinates` ⩽ 0 over strictly increasing
    /// `abscissae` spanning exactly \[0,1\].
    #[serde(rename = "grid")]
    GridSampled {
        abscissae: Vec<f64>,
        ordinates: Vec<f64>,
    },
}

/// Family constructors. Each validates its arguments and returns a potential
/// satisfying all structural invariants.
pub fn constant(value: f64) -> Result<Potential> {
    let q = Potential::Constant { value };
    q.validate()?;
    Ok(q)
}

pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Potential> {
    let q = Potential::PiecewiseConstant {
        breakpoints,
        values,
    };
    q.validate()?;
    Ok(q)
}

pub fn single_well(center: f64, width: f64, depth: f64) -> Result<Potential> {
    let q = Potential::Well {
        center,
        width,
        depth,
    };
    q.validate()?;
    Ok(q)
}

pub fn edge_wells(width: f64, depth: f64) -> Result<Potential> {
    let q = Potential::EdgeWells { width, depth };
    q.validate()?;
    Ok(q)
}

pub fn from_grid(abscissae: Vec<f64>, ordinates: Vec<f64>) -> Result<Potential> {
    let q = Potential::GridSampled {
        abscissae,
        ordinates,
    };
    q.validate()?;
    Ok(q)
}

fn check_finite_nonpositive(vals: &[f64], what: &str) -> Result<()> {
    for &v in vals {
        if !v.is_finite() {
            return Err(Error::InvalidPotential(format!("{what} contains {v}")));
        }
        if v > 0.0 {
            return Err(Error::InvalidPotential(format!(
                "{what} must be ⩽ 0, got {v}"
            )));
        }
    }
    Ok(())
}

fn check_partition(xs: &[f64], what: &str) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::InvalidPotential(format!(
            "{what} needs at least two entries"
        )));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidPotential(format!(
            "{what} contains a non-finite entry"
        )));
    }
    if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
        return Err(Error::InvalidPotential(format!(
            "{what} must start at 0 and end at 1"
        )));
    }
    for w in xs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidPotential(format!(
                "{what} must be strictly increasing"
            )));
        }
    }
    Ok(())
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::Constant { value } => check_finite_nonpositive(&[*value], "constant value"),
            Potential::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                check_partition(breakpoints, "breakpoints")?;
                if values.len() + 1 != breakpoints.len() {
                    return Err(Error::InvalidPotential(format!(
                        "{} cells require {} breakpoints, got {}",
                        values.len(),
                        values.len() + 1,
                        breakpoints.len()
                    )));
                }
                check_finite_nonpositive(values, "cell values")
            }
            Potential::Well {
                center,
                width,
                depth,
            } => {
                if !(*center > 0.0 && *center < 1.0) {
                    return Err(Error::InvalidPotential(format!(
                        "well center must lie in (0,1), got {center}"
                    )));
                }
                if !width.is_finite() || *width <= 0.0 {
                    return Err(Error::InvalidPotential(format!(
                        "well width must be positive, got {width}"
                    )));
                }
                if !depth.is_finite() || *depth < 0.0 {
                    return Err(Error::InvalidPotential(format!(
                        "well depth must be ⩾ 0, got {depth}"
                    )));
                }
                Ok(())
            }
            Potential::EdgeWells { width, depth } => {
                if !(*width > 0.0 && *width < 0.5) {
                    return Err(Error::InvalidPotential(format!(
                        "edge-well width must lie in (0, 1/2), got {width}"
                    )));
                }
                if !depth.is_finite() || *depth < 0.0 {
                    return Err(Error::InvalidPotential(format!(
                        "edge-well depth must be ⩾ 0, got {depth}"
                    )));
                }
                Ok(())
            }
            Potential::GridSampled {
                abscissae,
                ordinates,
            } => {
                check_partition(abscissae, "abscissae")?;
                if ordinates.len() != abscissae.len() {
                    return Err(Error::InvalidPotential(format!(
                        "{} abscissae require {} ordinates, got {}",
                        abscissae.len(),
                        abscissae.len(),
                        ordinates.len()
                    )));
                }
                check_finite_nonpositive(ordinates, "ordinates")
            }
        }
    }

    /// Support interval of a single well clipped to \[0,1\]; empty if the
    /// clipped interval degenerates.
    fn well_support(center: f64, width: f64) -> (f64, f64) {
        let a = (center - width / 2.0).max(0.0);
        let b = (center + width / 2.0).min(1.0);
        (a, b.max(a))
    }

    /// Pointwise value at x ∈ \[0,1\]; right-continuous at interior
    /// breakpoints, left-continuous at x = 1.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("abscissa {x} outside [0,1]")));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the domain check; callers guarantee x ∈ \[0,1\].
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            Potential::Constant { value } => *value,
            Potential::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let i = cell_index(breakpoints, x);
                values[i]
            }
            Potential::Well {
                center,
                width,
                depth,
            } => {
                let (a, b) = Self::well_support(*center, *width);
                if x >= a && x <= b && b > a {
                    -depth
                } else {
                    0.0
                }
            }
            Potential::EdgeWells { width, depth } => {
                if x <= *width || x >= 1.0 - *width {
                    -depth
                } else {
                    0.0
                }
            }
            Potential::GridSampled {
                abscissae,
                ordinates,
            } => {
                let i = cell_index(abscissae, x);
                let (x0, x1) = (abscissae[i], abscissae[i + 1]);
                let t = (x - x0) / (x1 - x0);
                ordinates[i] * (1.0 - t) + ordinates[i + 1] * t
            }
        }
    }

    /// Sorted piece boundaries, always including 0 and 1. Between two
    /// consecutive entries the potential is smooth (constant or linear).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Potential::Constant { .. } => vec![0.0, 1.0],
            Potential::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            Potential::Well { center, width, .. } => {
                let (a, b) = Self::well_support(*center, *width);
                let mut pts = vec![0.0, 1.0];
                if b > a {
                    pts.push(a);
                    pts.push(b);
                }
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                pts
            }
            Potential::EdgeWells { width, .. } => vec![0.0, *width, 1.0 - *width, 1.0],
            Potential::GridSampled { abscissae, .. } => abscissae.clone(),
        }
    }

    /// True when the potential is constant on each of its pieces.
    pub fn is_piecewise_constant(&self) -> bool {
        !matches!(self, Potential::GridSampled { .. })
    }

    /// sup |q| over \[0,1\].
    pub fn max_abs(&self) -> f64 {
        match self {
            Potential::Constant { value } => value.abs(),
            Potential::PiecewiseConstant { values, .. } => {
                values.iter().fold(0.0, |m, v| m.max(v.abs()))
            }
            Potential::Well {
                center,
                width,
                depth,
            } => {
                let (a, b) = Self::well_support(*center, *width);
                if b > a {
                    *depth
                } else {
                    0.0
                }
            }
            Potential::EdgeWells { depth, .. } => *depth,
            Potential::GridSampled { ordinates, .. } => {
                ordinates.iter().fold(0.0, |m, v| m.max(v.abs()))
            }
        }
    }

    /// Exact ∫ₐᵇ q dx for 0 ⩽ a ⩽ b ⩽ 1 (closed form in every representation).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) && a <= b);
        match self {
            Potential::Constant { value } => value * (b - a),
            Potential::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let mut total = 0.0;
                for (i, v) in values.iter().enumerate() {
                    let lo = breakpoints[i].max(a);
                    let hi = breakpoints[i + 1].min(b);
                    if hi > lo {
                        total += v * (hi - lo);
                    }
                }
                total
            }
            Potential::Well {
                center,
                width,
                depth,
            } => {
                let (wa, wb) = Self::well_support(*center, *width);
                let lo = wa.max(a);
                let hi = wb.min(b);
                if hi > lo {
                    -depth * (hi - lo)
                } else {
                    0.0
                }
            }
            Potential::EdgeWells { width, depth } => {
                let mut len = 0.0;
                for (wa, wb) in [(0.0, *width), (1.0 - *width, 1.0)] {
                    let lo = wa.max(a);
                    let hi = wb.min(b);
                    if hi > lo {
                        len += hi - lo;
                    }
                }
                -depth * len
            }
            Potential::GridSampled { abscissae, .. } => {
                // Trapezoid rule is exact for a piecewise-linear integrand.
                let mut total = 0.0;
                for i in 0..abscissae.len() - 1 {
                    let lo = abscissae[i].max(a);
                    let hi = abscissae[i + 1].min(b);
                    if hi > lo {
                        let f_lo = self.eval_unchecked(lo);
                        let f_hi = self.eval_unchecked(hi.min(1.0));
                        total += 0.5 * (f_lo + f_hi) * (hi - lo);
                    }
                }
                total
            }
        }
    }

    /// ∫₀¹ |q| dx.
    pub fn l1_norm(&self) -> f64 {
        -self.integral(0.0, 1.0)
    }

    /// ∫₀¹ |q(x)|^γ dx, in closed form.
    ///
    /// Piecewise-constant forms sum value^γ × length. Grid-sampled
    /// potentials use the exact antiderivative of |linear|^γ on each segment,
    /// with a midpoint fallback where the segment is essentially flat.
    pub fn gamma_norm(&self, g: GammaExponent) -> f64 {
        let gamma = g.value();
        match self {
            Potential::Constant { value } => value.abs().powf(gamma),
            Potential::PiecewiseConstant {
                breakpoints,
                values,
            } => values
                .iter()
                .enumerate()
                .map(|(i, v)| v.abs().powf(gamma) * (breakpoints[i + 1] - breakpoints[i]))
                .sum(),
            Potential::Well {
                center,
                width,
                depth,
            } => {
                let (a, b) = Self::well_support(*center, *width);
                depth.powf(gamma) * (b - a)
            }
            Potential::EdgeWells { width, depth } => 2.0 * width * depth.powf(gamma),
            Potential::GridSampled {
                abscissae,
                ordinates,
            } => {
                let mut total = 0.0;
                for i in 0..ordinates.len() - 1 {
                    let len = abscissae[i + 1] - abscissae[i];
                    total += segment_abs_pow_integral(
                        ordinates[i].abs(),
                        ordinates[i + 1].abs(),
                        len,
                        gamma,
                    );
                }
                total
            }
        }
    }

    /// The same potential scaled by s ⩾ 0 (depths and values multiplied).
    pub fn scale(&self, s: f64) -> Potential {
        debug_assert!(s >= 0.0 && s.is_finite());
        match self {
            Potential::Constant { value } => Potential::Constant { value: value * s },
            Potential::PiecewiseConstant {
                breakpoints,
                values,
            } => Potential::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|v| v * s).collect(),
            },
            Potential::Well {
                center,
                width,
                depth,
            } => Potential::Well {
                center: *center,
                width: *width,
                depth: depth * s,
            },
            Potential::EdgeWells { width, depth } => Potential::EdgeWells {
                width: *width,
                depth: depth * s,
            },
            Potential::GridSampled {
                abscissae,
                ordinates,
            } => Potential::GridSampled {
                abscissae: abscissae.clone(),
                ordinates: ordinates.iter().map(|v| v * s).collect(),
            },
        }
    }

    /// Rescale onto the constraint surface: returns s·q with
    /// s = gamma_norm(q)^{−1/γ}, whose γ-norm is 1 up to roundoff.
    /// The representation tag is preserved.
    pub fn normalize_to_admissible(&self, g: GammaExponent) -> Result<Potential> {
        let norm = self.gamma_norm(g);
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::CannotNormalize);
        }
        let s = norm.powf(-1.0 / g.value());
        Ok(self.scale(s))
    }
}

/// Index of the cell containing x (right-continuous; x = 1 maps to the last
/// cell). `xs` is a strictly increasing partition of \[0,1\].
fn cell_index(xs: &[f64], x: f64) -> usize {
    let n_cells = xs.len() - 1;
    // partition_point returns the first index with xs[i] > x.
    let i = xs.partition_point(|&b| b <= x);
    if i == 0 {
        0
    } else {
        (i - 1).min(n_cells - 1)
    }
}

/// ∫₀^len m(t)^γ dt where m interpolates linearly from m0 ⩾ 0 to m1 ⩾ 0.
fn segment_abs_pow_integral(m0: f64, m1: f64, len: f64, gamma: f64) -> f64 {
    let spread = (m1 - m0).abs();
    let scale = m0.max(m1);
    if scale == 0.0 {
        return 0.0;
    }
    if spread <= 1e-9 * scale {
        // Nearly flat: midpoint value; relative error O((spread/scale)²).
        return len * (0.5 * (m0 + m1)).powf(gamma);
    }
    // d/dm [m^{γ+1}/(γ+1)] = m^γ, and m moves linearly with slope (m1−m0)/len.
    len * (m1.powf(gamma + 1.0) - m0.powf(gamma + 1.0)) / ((gamma + 1.0) * (m1 - m0))
}
