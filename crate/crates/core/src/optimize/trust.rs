//! Quadratic-interpolation trust-region method with 2n+1 points and
//! minimum-Frobenius-norm model updates.

use super::dense::{dot, norm, trust_region_step, Lu, Square};
use super::{OptimizerOptions, TerminationStatus, Tracker};
use crate::error::Result;

/// Interpolation set and quadratic model, both expressed relative to the best point.
struct Model {
    n: usize,
    xopt: Vec<f64>,
    fopt: f64,
    kopt: usize,
    /// Offsets y_j = x_j − xopt.
    y: Vec<Vec<f64>>,
    f: Vec<f64>,
    c: f64,
    g: Vec<f64>,
    h: Square,
}

enum Stop {
    Budget,
}

impl Model {
    fn npt(&self) -> usize {
        self.y.len()
    }

    fn value(&self, s: &[f64]) -> f64 {
        self.c + dot(&self.g, s) + self.h.half_quad(s)
    }

    /// Largest offset length, used to scale the interpolation system.
    fn spread(&self) -> f64 {
        self.farthest().1.max(f64::MIN_POSITIVE)
    }

    /// KKT matrix of the minimum-Frobenius-norm interpolation problem in
    /// coordinates divided by `spread`, so its entries stay O(1).
    fn kkt(&self) -> Option<(Lu, f64)> {
        let (m, n) = (self.npt(), self.n);
        let sc = self.spread();
        let yh: Vec<Vec<f64>> = self.y.iter().map(|y| y.iter().map(|v| v / sc).collect()).collect();
        let dim = m + n + 1;
        let mut w = Square::zeros(dim);
        for i in 0..m {
            for j in 0..m {
                let d = dot(&yh[i], &yh[j]);
                w.set(i, j, 0.5 * d * d);
            }
            w.set(i, m, 1.0);
            w.set(m, i, 1.0);
            for k in 0..n {
                w.set(i, m + 1 + k, yh[i][k]);
                w.set(m + 1 + k, i, yh[i][k]);
            }
        }
        Lu::factor(&w, 1e-14).map(|lu| (lu, sc))
    }

    /// Solves the scaled system and maps the answer back to (λ-Hessian, c, g) in real units.
    fn interpolate(&self, lu: &Lu, sc: f64, rhs: &[f64]) -> (f64, Vec<f64>, Square) {
        let (m, n) = (self.npt(), self.n);
        let z = lu.solve(rhs);
        let mut h = Square::zeros(n);
        let s4 = sc.powi(4);
        for j in 0..m {
            h.rank_one(z[j] / s4, &self.y[j]);
        }
        (z[m], z[m + 1..].iter().map(|v| v / sc).collect(), h)
    }

    /// Values of all Lagrange functions at offset s.
    fn lagrange_values(&self, lu: &Lu, sc: f64, s: &[f64]) -> Vec<f64> {
        let (m, n) = (self.npt(), self.n);
        let sh: Vec<f64> = s.iter().map(|v| v / sc).collect();
        let mut rhs = vec![0.0; m + n + 1];
        for j in 0..m {
            let d = dot(&self.y[j], &sh) / sc;
            rhs[j] = 0.5 * d * d;
        }
        rhs[m] = 1.0;
        rhs[m + 1..].copy_from_slice(&sh);
        lu.solve(&rhs)[..m].to_vec()
    }

    /// Constant, gradient and Hessian of Lagrange function t.
    fn lagrange(&self, lu: &Lu, sc: f64, t: usize) -> (f64, Vec<f64>, Square) {
        let mut rhs = vec![0.0; self.npt() + self.n + 1];
        rhs[t] = 1.0;
        self.interpolate(lu, sc, &rhs)
    }

    /// Refits the model to the current function values with the least Hessian change.
    fn refit(&mut self) -> bool {
        let Some((lu, sc)) = self.kkt() else { return false };
        let m = self.npt();
        let mut rhs = vec![0.0; m + self.n + 1];
        for j in 0..m {
            rhs[j] = self.f[j] - self.value(&self.y[j]);
        }
        let (dc, dg, dh) = self.interpolate(&lu, sc, &rhs);
        self.c += dc;
        for k in 0..self.n {
            self.g[k] += dg[k];
        }
        for (a, b) in self.h.a.iter_mut().zip(&dh.a) {
            *a += b;
        }
        true
    }

    /// Moves the expansion point to offset d.
    fn shift(&mut self, d: &[f64]) {
        let hd = self.h.mul_vec(d);
        self.c = self.value(d);
        for k in 0..self.n {
            self.g[k] += hd[k];
            self.xopt[k] += d[k];
        }
        for y in self.y.iter_mut() {
            for k in 0..self.n {
                y[k] -= d[k];
            }
        }
    }

    /// Replaces point t with offset s (relative to the current xopt) and value fs.
    fn replace(&mut self, t: usize, s: Vec<f64>, fs: f64) -> bool {
        self.y[t] = s;
        self.f[t] = fs;
        if fs < self.fopt {
            let d = self.y[t].clone();
            self.fopt = fs;
            self.kopt = t;
            self.shift(&d);
        }
        self.refit()
    }

    fn farthest(&self) -> (usize, f64) {
        self.y
            .iter()
            .enumerate()
            .map(|(i, y)| (i, norm(y)))
            .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b })
    }
}

fn eval_at(t: &mut Tracker, xopt: &[f64], s: &[f64]) -> std::result::Result<Result<f64>, Stop> {
    if t.exhausted() {
        return Err(Stop::Budget);
    }
    let x: Vec<f64> = xopt.iter().zip(s).map(|(a, b)| a + b).collect();
    Ok(t.eval(&x))
}

macro_rules! evaluate {
    ($t:expr, $xopt:expr, $s:expr) => {
        match eval_at($t, $xopt, $s) {
            Err(Stop::Budget) => return Ok(TerminationStatus::MaxIters),
            Ok(r) => r?,
        }
    };
}

/// Builds the 2n+1 stencil around `center` and fits the model to it.
fn initial_model(t: &mut Tracker, center: &[f64], f0: Option<f64>, rho: f64) -> std::result::Result<Result<Model>, Stop> {
    let n = center.len();
    let zero = vec![0.0; n];
    let f0 = match f0 {
        Some(v) => v,
        None => match eval_at(t, center, &zero)? {
            Ok(v) => v,
            Err(e) => return Ok(Err(e)),
        },
    };
    let mut y = vec![zero.clone()];
    let mut f = vec![f0];
    for sign in [1.0, -1.0] {
        for k in 0..n {
            let mut s = zero.clone();
            s[k] = sign * rho;
            match eval_at(t, center, &s)? {
                Ok(v) => f.push(v),
                Err(e) => return Ok(Err(e)),
            }
            y.push(s);
        }
    }
    let mut g = vec![0.0; n];
    let mut h = Square::zeros(n);
    for k in 0..n {
        let (fp, fm) = (f[1 + k], f[1 + n + k]);
        g[k] = (fp - fm) / (2.0 * rho);
        h.set(k, k, (fp + fm - 2.0 * f0) / (rho * rho));
    }
    let mut m = Model {
        n,
        xopt: center.to_vec(),
        fopt: f0,
        kopt: 0,
        y,
        f,
        c: f0,
        g,
        h,
    };
    let (kbest, &fbest) = m.f.iter().enumerate().fold((0, &f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    if kbest != 0 {
        let d = m.y[kbest].clone();
        m.fopt = fbest;
        m.kopt = kbest;
        m.shift(&d);
    }
    Ok(Ok(m))
}

pub(crate) fn model_trust_region(t: &mut Tracker, x0: &[f64], opts: &OptimizerOptions) -> Result<TerminationStatus> {
    let rho_end = opts.rho_end;
    let mut rho = opts.rho_begin;
    let mut delta = rho;
    let mut m = match initial_model(t, x0, None, rho) {
        Err(Stop::Budget) => return Ok(TerminationStatus::MaxIters),
        Ok(r) => r?,
    };
    let n = m.n;
    loop {
        let s = trust_region_step(&m.g, &m.h, delta);
        let snorm = norm(&s);
        let mut reduce = false;
        let mut poor = false;
        if snorm < 0.5 * rho {
            delta = (0.1 * delta).max(rho);
            if delta <= 1.5 * rho {
                delta = rho;
            }
            let (_, dist) = m.farthest();
            if dist <= 2.0 * delta {
                reduce = true;
            } else {
                poor = true;
            }
        } else {
            let fnew = evaluate!(t, &m.xopt, &s);
            let predicted = m.c - m.value(&s);
            let actual = m.fopt - fnew;
            let ratio = if predicted > 0.0 { actual / predicted } else { -1.0 };
            delta = if ratio <= 0.1 {
                0.5 * snorm
            } else if ratio <= 0.7 {
                (0.5 * delta).max(snorm)
            } else {
                (0.5 * delta).max(2.0 * snorm)
            };
            if delta <= 1.5 * rho {
                delta = rho;
            }
            let knew = {
                let lu = m.kkt();
                let lag = lu.as_ref().map(|(lu, sc)| m.lagrange_values(lu, *sc, &s));
                (0..m.npt())
                    .filter(|&j| fnew < m.fopt || j != m.kopt)
                    .map(|j| {
                        let dist = dot(&m.y[j], &m.y[j]);
                        let w = (dist / (delta * delta)).max(1.0);
                        let l = lag.as_ref().map(|v| v[j].abs()).unwrap_or(1.0);
                        (j, l * w * w)
                    })
                    .fold((usize::MAX, -1.0), |b, c| if c.1 > b.1 { c } else { b })
                    .0
            };
            if !m.replace(knew, s, fnew) {
                m = match initial_model(t, &m.xopt.clone(), Some(m.fopt), rho) {
                    Err(Stop::Budget) => return Ok(TerminationStatus::MaxIters),
                    Ok(r) => r?,
                };
                continue;
            }
            if ratio < 0.1 {
                let (_, dist) = m.farthest();
                if dist > 2.0 * delta {
                    poor = true;
                } else if ratio <= 0.0 && delta.max(snorm) <= rho {
                    reduce = true;
                }
            }
        }
        if poor {
            let (kfar, dist) = m.farthest();
            let radius = (0.1 * dist).min(0.5 * delta).max(rho);
            let Some((lu, sc)) = m.kkt() else {
                m = match initial_model(t, &m.xopt.clone(), Some(m.fopt), rho) {
                    Err(Stop::Budget) => return Ok(TerminationStatus::MaxIters),
                    Ok(r) => r?,
                };
                continue;
            };
            let (lc, lg, lh) = m.lagrange(&lu, sc, kfar);
            let up = trust_region_step(&lg, &lh, radius);
            let neg_g: Vec<f64> = lg.iter().map(|v| -v).collect();
            let mut neg_h = lh.clone();
            neg_h.a.iter_mut().for_each(|v| *v = -*v);
            let down = trust_region_step(&neg_g, &neg_h, radius);
            let lval = |s: &[f64]| (lc + dot(&lg, s) + lh.half_quad(s)).abs();
            let s = if lval(&up) >= lval(&down) { up } else { down };
            let fnew = evaluate!(t, &m.xopt, &s);
            if !m.replace(kfar, s, fnew) {
                m = match initial_model(t, &m.xopt.clone(), Some(m.fopt), rho) {
                    Err(Stop::Budget) => return Ok(TerminationStatus::MaxIters),
                    Ok(r) => r?,
                };
            }
            continue;
        }
        if reduce {
            if rho <= rho_end {
                return Ok(TerminationStatus::RadiusConverged);
            }
            let old = rho;
            let r = rho / rho_end;
            rho = if r > 250.0 {
                0.1 * rho
            } else if r > 16.0 {
                (rho * rho_end).sqrt()
            } else {
                rho_end
            };
            delta = (0.5 * old).max(rho);
        }
        if t.exhausted() {
            return Ok(TerminationStatus::MaxIters);
        }
        debug_assert_eq!(m.g.len(), n);
    }
}
