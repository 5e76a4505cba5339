//! Nelder–Mead with dimension-adaptive coefficients.

use super::{OptimizerOptions, TerminationStatus, Tracker};
use crate::error::Result;

pub(crate) fn nelder_mead(t: &mut Tracker, x0: &[f64], opts: &OptimizerOptions) -> Result<TerminationStatus> {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, sigma) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for k in 0..n {
        let mut p = x0.to_vec();
        p[k] += opts.rho_begin;
        pts.push(p);
    }
    let mut vals = Vec::with_capacity(n + 1);
    for p in &pts {
        if t.exhausted() {
            return Ok(TerminationStatus::MaxIters);
        }
        vals.push(t.eval(p)?);
    }
    let along = |a: &[f64], b: &[f64], c: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + c * (y - x)).collect() };
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let size = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if size <= opts.rho_end {
            return Ok(TerminationStatus::RadiusConverged);
        }
        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for k in 0..n {
                centroid[k] += p[k] / nf;
            }
        }
        macro_rules! eval {
            ($x:expr) => {{
                if t.exhausted() {
                    return Ok(TerminationStatus::MaxIters);
                }
                t.eval($x)?
            }};
        }
        let xr = along(&centroid, &pts[n], -alpha);
        let fr = eval!(&xr);
        if fr < vals[0] {
            let xe = along(&centroid, &pts[n], -alpha * beta);
            let fe = eval!(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < vals[n] {
            let xc = along(&centroid, &pts[n], -alpha * gamma);
            let fc = eval!(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = along(&centroid, &pts[n], gamma);
            let fc = eval!(&xc);
            (xc, fc, fc < vals[n])
        };
        if accept {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            pts[i] = along(&pts[0], &pts[i], sigma);
            vals[i] = eval!(&pts[i]);
        }
    }
}
