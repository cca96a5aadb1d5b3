use nalgebra::Matrix2;

use super::Vec3;
use crate::error::{argument, Error, Result};

/// First and second fundamental form data at one parameter sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormSample {
    pub u: f64,
    pub v: f64,
    /// First fundamental form `[[E, F], [F, G]]`.
    pub metric: Matrix2<f64>,
    /// `x_u × x_v / |x_u × x_v|`.
    pub normal: Vec3,
    pub a_norm_sq: f64,
    /// Sum of the principal curvatures with respect to `normal`.
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
}

/// Central-difference fundamental forms of `immersion` at each parameter point.
///
/// The immersion must be defined on a `step`-neighbourhood of every sample.
/// Errors on a metric with determinant `≤ 1e−12`, reporting the sample.
pub fn fundamental_forms<F>(immersion: F, params: &[(f64, f64)], step: f64) -> Result<Vec<FormSample>>
where
    F: Fn(f64, f64) -> Vec3,
{
    if !(step > 0.0) {
        return Err(argument("finite-difference step must be positive"));
    }
    let h = step;
    params
        .iter()
        .map(|&(u, v)| {
            let x = immersion(u, v);
            let xup = immersion(u + h, v);
            let xum = immersion(u - h, v);
            let xvp = immersion(u, v + h);
            let xvm = immersion(u, v - h);
            let xu = (xup - xum) / (2.0 * h);
            let xv = (xvp - xvm) / (2.0 * h);
            let xuu = (xup - 2.0 * x + xum) / (h * h);
            let xvv = (xvp - 2.0 * x + xvm) / (h * h);
            let xuv = (immersion(u + h, v + h) - immersion(u + h, v - h) - immersion(u - h, v + h)
                + immersion(u - h, v - h))
                / (4.0 * h * h);

            let (e, f, g) = (xu.dot(&xu), xu.dot(&xv), xv.dot(&xv));
            let det = e * g - f * f;
            if det <= 1e-12 {
                return Err(Error::DegenerateMetric { u, v, det });
            }
            let n = xu.cross(&xv).normalize();
            let (l, m, nn) = (xuu.dot(&n), xuv.dot(&n), xvv.dot(&n));
            let mean = (e * nn - 2.0 * f * m + g * l) / det;
            let gauss = (l * nn - m * m) / det;
            Ok(FormSample {
                u,
                v,
                metric: Matrix2::new(e, f, f, g),
                normal: n,
                a_norm_sq: mean * mean - 2.0 * gauss,
                mean_curvature: mean,
                gauss_curvature: gauss,
            })
        })
        .collect()
}
