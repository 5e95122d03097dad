//! Parametric membership functions for the fuzzification layer.

use super::AnfisError;

/// Smallest width/shape value a gradient step may leave behind.
const MIN_SHAPE: f64 = 1e-3;

/// A one-dimensional membership function.
///
/// Construction validates the shape parameters, so evaluation never fails and
/// always lands in `[0, 1]` for finite inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipFunction {
    /// `exp(-(x - center)^2 / (2 width^2))`
    Gaussian { center: f64, width: f64 },
    /// `1 / (1 + |(x - center) / width|^(2 slope))`
    Bell { width: f64, slope: f64, center: f64 },
    /// Piecewise linear with feet at `left`/`right` and apex at `peak`.
    Triangular { left: f64, peak: f64, right: f64 },
}

impl MembershipFunction {
    pub fn gaussian(center: f64, width: f64) -> Result<Self, AnfisError> {
        if !center.is_finite() || !(width.is_finite() && width > 0.0) {
            return Err(AnfisError::InvalidMembership(format!(
                "gaussian needs finite center and width > 0, got c={center}, sigma={width}"
            )));
        }
        Ok(Self::Gaussian { center, width })
    }

    pub fn bell(width: f64, slope: f64, center: f64) -> Result<Self, AnfisError> {
        let ok = width.is_finite() && width > 0.0 && slope.is_finite() && slope > 0.0;
        if !ok || !center.is_finite() {
            return Err(AnfisError::InvalidMembership(format!(
                "bell needs a > 0, b > 0 and finite c, got a={width}, b={slope}, c={center}"
            )));
        }
        Ok(Self::Bell {
            width,
            slope,
            center,
        })
    }

    pub fn triangular(left: f64, peak: f64, right: f64) -> Result<Self, AnfisError> {
        let finite = left.is_finite() && peak.is_finite() && right.is_finite();
        if !finite || left > peak || peak > right {
            return Err(AnfisError::InvalidMembership(format!(
                "triangular needs l <= m <= r, got ({left}, {peak}, {right})"
            )));
        }
        Ok(Self::Triangular { left, peak, right })
    }

    /// Rebuilds a function of the given kind from its flat parameter list.
    pub fn from_kind(kind: &str, params: &[f64]) -> Result<Self, AnfisError> {
        match (kind, params) {
            ("gaussian", &[c, s]) => Self::gaussian(c, s),
            ("bell", &[a, b, c]) => Self::bell(a, b, c),
            ("triangular", &[l, m, r]) => Self::triangular(l, m, r),
            _ => Err(AnfisError::InvalidMembership(format!(
                "unknown kind {kind:?} with {} parameters",
                params.len()
            ))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::Bell { .. } => "bell",
            Self::Triangular { .. } => "triangular",
        }
    }

    /// Parameter names in the order used by [`params`](Self::params).
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Self::Gaussian { .. } => &["center", "width"],
            Self::Bell { .. } => &["width", "slope", "center"],
            Self::Triangular { .. } => &["left", "peak", "right"],
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Gaussian { center, width } => vec![center, width],
            Self::Bell {
                width,
                slope,
                center,
            } => vec![width, slope, center],
            Self::Triangular { left, peak, right } => vec![left, peak, right],
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Self::Gaussian { .. } => 2,
            _ => 3,
        }
    }

    /// Membership degree of `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { center, width } => {
                let z = (x - center) / width;
                (-0.5 * z * z).exp()
            }
            Self::Bell {
                width,
                slope,
                center,
            } => {
                let z = ((x - center) / width).abs();
                1.0 / (1.0 + z.powf(2.0 * slope))
            }
            Self::Triangular { left, peak, right } => {
                if x < left || x > right {
                    0.0
                } else if x <= peak {
                    if peak > left {
                        (x - left) / (peak - left)
                    } else {
                        1.0
                    }
                } else if right > peak {
                    (right - x) / (right - peak)
                } else {
                    1.0
                }
            }
        }
    }

    /// Partial derivatives of the membership degree with respect to each
    /// parameter, in [`params`](Self::params) order.
    ///
    /// Triangular functions use one-sided derivatives at their kinks.
    pub fn gradient(&self, x: f64) -> Vec<f64> {
        match *self {
            Self::Gaussian { center, width } => {
                let mu = self.eval(x);
                let d = x - center;
                let w2 = width * width;
                vec![mu * d / w2, mu * d * d / (w2 * width)]
            }
            Self::Bell {
                width,
                slope,
                center,
            } => {
                let d = x - center;
                let z = (d / width).abs();
                if z == 0.0 {
                    return vec![0.0, 0.0, 0.0];
                }
                let mu = self.eval(x);
                let u = z.powf(2.0 * slope);
                // dmu/du = -mu^2
                let dmu_du = -mu * mu;
                let du_da = -2.0 * slope * u / width;
                let du_db = 2.0 * u * z.ln();
                let du_dc = -2.0 * slope * u / d;
                vec![dmu_du * du_da, dmu_du * du_db, dmu_du * du_dc]
            }
            Self::Triangular { left, peak, right } => {
                if x < left || x > right {
                    vec![0.0, 0.0, 0.0]
                } else if x <= peak {
                    if peak > left {
                        let span = peak - left;
                        vec![(x - peak) / (span * span), -(x - left) / (span * span), 0.0]
                    } else {
                        vec![0.0, 0.0, 0.0]
                    }
                } else if right > peak {
                    let span = right - peak;
                    vec![0.0, (right - x) / (span * span), (x - peak) / (span * span)]
                } else {
                    vec![0.0, 0.0, 0.0]
                }
            }
        }
    }

    /// Adds `delta` to the parameters and projects the result back onto the
    /// valid region (positive widths, ordered triangle vertices).
    pub(crate) fn shifted(&self, delta: &[f64]) -> Self {
        match *self {
            Self::Gaussian { center, width } => Self::Gaussian {
                center: center + delta[0],
                width: (width + delta[1]).max(MIN_SHAPE),
            },
            Self::Bell {
                width,
                slope,
                center,
            } => Self::Bell {
                width: (width + delta[0]).max(MIN_SHAPE),
                slope: (slope + delta[1]).max(MIN_SHAPE),
                center: center + delta[2],
            },
            Self::Triangular { left, peak, right } => {
                let mut v = [left + delta[0], peak + delta[1], right + delta[2]];
                v.sort_by(f64::total_cmp);
                Self::Triangular {
                    left: v[0],
                    peak: v[1],
                    right: v[2],
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_peaks_at_center() {
        let mf = MembershipFunction::gaussian(0.5, 0.1).unwrap();
        assert_eq!(mf.eval(0.5), 1.0);
    }

    #[test]
    fn gaussian_one_sigma_matches_closed_form() {
        let mf = MembershipFunction::gaussian(0.0, 0.2).unwrap();
        let expected = (-(0.2f64 - 0.0).powi(2) / (2.0 * 0.2f64.powi(2))).exp();
        assert!((mf.eval(0.2) - expected).abs() < 1e-15);
        assert!((mf.eval(0.2) - 0.6065).abs() < 1e-4);
    }

    #[test]
    fn triangular_interpolates_linearly() {
        let mf = MembershipFunction::triangular(0.0, 0.5, 1.0).unwrap();
        assert_eq!(mf.eval(0.25), 0.5);
        assert_eq!(mf.eval(0.75), 0.5);
        assert_eq!(mf.eval(-0.1), 0.0);
        assert_eq!(mf.eval(1.1), 0.0);
    }

    #[test]
    fn shoulder_triangles_saturate() {
        let left = MembershipFunction::triangular(0.0, 0.0, 0.5).unwrap();
        assert_eq!(left.eval(0.0), 1.0);
        assert_eq!(left.eval(0.25), 0.5);
        let right = MembershipFunction::triangular(0.5, 1.0, 1.0).unwrap();
        assert_eq!(right.eval(1.0), 1.0);
    }

    #[test]
    fn bell_is_half_at_width() {
        let mf = MembershipFunction::bell(0.2, 2.0, 0.5).unwrap();
        assert!((mf.eval(0.7) - 0.5).abs() < 1e-15);
        assert_eq!(mf.eval(0.5), 1.0);
    }

    #[test]
    fn invalid_params_rejected_at_construction() {
        assert!(MembershipFunction::gaussian(0.0, 0.0).is_err());
        assert!(MembershipFunction::gaussian(0.0, -1.0).is_err());
        assert!(MembershipFunction::gaussian(f64::NAN, 1.0).is_err());
        assert!(MembershipFunction::bell(0.0, 1.0, 0.0).is_err());
        assert!(MembershipFunction::bell(1.0, 0.0, 0.0).is_err());
        assert!(MembershipFunction::triangular(0.6, 0.5, 1.0).is_err());
        assert!(MembershipFunction::from_kind("sigmoid", &[1.0]).is_err());
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let fns = [
            MembershipFunction::gaussian(0.3, 0.17).unwrap(),
            MembershipFunction::bell(0.25, 1.7, 0.4).unwrap(),
            MembershipFunction::triangular(0.1, 0.45, 0.9).unwrap(),
        ];
        let eps = 1e-6;
        for mf in fns {
            for &x in &[0.05, 0.2, 0.37, 0.6, 0.85] {
                let g = mf.gradient(x);
                for p in 0..mf.param_count() {
                    let mut d = vec![0.0; mf.param_count()];
                    d[p] = eps;
                    let up = mf.shifted(&d).eval(x);
                    d[p] = -eps;
                    let down = mf.shifted(&d).eval(x);
                    let fd = (up - down) / (2.0 * eps);
                    assert!(
                        (fd - g[p]).abs() <= 1e-6 * fd.abs().max(1.0),
                        "{} param {p} at x={x}: fd={fd} analytic={}",
                        mf.kind(),
                        g[p]
                    );
                }
            }
        }
    }
}
