//! Small dense real kernels for the derivative-free solvers.

/// Row-major square real matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Square {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Square {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.at(i, j) * x[j]).sum()).collect()
    }

    /// ½xᵀAx.
    pub fn half_quad(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.mul_vec(x))
    }

    /// A += c·vvᵀ.
    pub fn rank_one(&mut self, c: f64, v: &[f64]) {
        for i in 0..self.n {
            for j in 0..self.n {
                self.add(i, j, c * v[i] * v[j]);
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenpairs of a symmetric matrix by cyclic Jacobi; values ascending, vectors as columns.
pub(crate) fn sym_eig(m: &Square) -> (Vec<f64>, Square) {
    let n = m.n;
    let mut a = m.clone();
    let mut v = Square::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    let scale = a.a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a.at(i, j) * a.at(i, j);
            }
        }
        if off.sqrt() <= 1e-15 * scale || scale == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.at(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a.at(k, p), a.at(k, q));
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (a.at(p, k), a.at(q, k));
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let (vkp, vkq) = (v.at(k, p), v.at(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.at(i, i).total_cmp(&a.at(j, j)));
    let vals = order.iter().map(|&i| a.at(i, i)).collect();
    let mut vecs = Square::zeros(n);
    for (c, &k) in order.iter().enumerate() {
        for r in 0..n {
            vecs.set(r, c, v.at(r, k));
        }
    }
    (vals, vecs)
}

/// LU factorization with partial pivoting.
pub(crate) struct Lu {
    lu: Square,
    perm: Vec<usize>,
}

impl Lu {
    /// None when a pivot falls below `tol` times the largest entry.
    pub fn factor(m: &Square, tol: f64) -> Option<Self> {
        let n = m.n;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let big = lu.a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if big == 0.0 || !big.is_finite() {
            return None;
        }
        for k in 0..n {
            let (piv, pval) = (k..n)
                .map(|i| (i, lu.at(i, k).abs()))
                .fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if pval <= tol * big {
                return None;
            }
            if piv != k {
                perm.swap(piv, k);
                for j in 0..n {
                    let t = lu.at(k, j);
                    lu.set(k, j, lu.at(piv, j));
                    lu.set(piv, j, t);
                }
            }
            let d = lu.at(k, k);
            for i in k + 1..n {
                let f = lu.at(i, k) / d;
                lu.set(i, k, f);
                for j in k + 1..n {
                    lu.add(i, j, -f * lu.at(k, j));
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu.at(i, j) * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu.at(i, j) * x[j];
            }
            x[i] /= self.lu.at(i, i);
        }
        x
    }
}

/// Global minimizer of gᵀs + ½sᵀHs subject to ‖s‖ ≤ delta.
pub(crate) fn trust_region_step(g: &[f64], h: &Square, delta: f64) -> Vec<f64> {
    let n = g.len();
    let (lam, q) = sym_eig(h);
    let gt: Vec<f64> = (0..n).map(|i| (0..n).map(|r| q.at(r, i) * g[r]).sum()).collect();
    let scale = lam.iter().fold(0.0f64, |a, l| a.max(l.abs())).max(1e-300);
    let lmin = lam[0];
    let step = |sigma: f64, skip: &dyn Fn(usize) -> bool| -> Vec<f64> {
        let mut s = vec![0.0; n];
        for i in 0..n {
            if skip(i) {
                continue;
            }
            let c = -gt[i] / (lam[i] + sigma);
            for r in 0..n {
                s[r] += c * q.at(r, i);
            }
        }
        s
    };
    let none = |_: usize| false;
    if lmin > 1e-12 * scale {
        let s = step(0.0, &none);
        if norm(&s) <= delta {
            return s;
        }
    }
    let lo = (-lmin).max(0.0);
    let gnorm = norm(g);
    // Hard case: no gradient weight on the bottom eigenspace.
    let flat = |i: usize| lam[i] + lo <= 1e-12 * scale;
    let gflat: f64 = (0..n).filter(|&i| flat(i)).map(|i| gt[i] * gt[i]).sum::<f64>().sqrt();
    if gflat <= 1e-14 * gnorm.max(1e-300) && (0..n).any(flat) {
        let s = step(lo, &flat);
        let ns = norm(&s);
        if ns <= delta {
            let tau = (delta * delta - ns * ns).max(0.0).sqrt();
            let mut s = s;
            let sign = if (0..n).map(|r| q.at(r, 0) * g[r]).sum::<f64>() > 0.0 { -1.0 } else { 1.0 };
            for r in 0..n {
                s[r] += sign * tau * q.at(r, 0);
            }
            return s;
        }
    }
    let norm_at = |sigma: f64| -> f64 { (0..n).map(|i| (gt[i] / (lam[i] + sigma)).powi(2)).sum::<f64>().sqrt() };
    let mut a = lo;
    let mut b = lo + gnorm / delta + scale + 1e-300;
    while norm_at(b) > delta {
        b = 2.0 * b + 1e-300;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if norm_at(m) > delta {
            a = m;
        } else {
            b = m;
        }
    }
    let mut s = step(b, &none);
    let ns = norm(&s);
    if ns > delta {
        for v in s.iter_mut() {
            *v *= delta / ns;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(g: &[f64], h: &Square, s: &[f64]) -> f64 {
        dot(g, s) + h.half_quad(s)
    }

    #[test]
    fn eig_of_small_symmetric() {
        let mut m = Square::zeros(2);
        m.a = vec![2.0, 1.0, 1.0, 2.0];
        let (l, v) = sym_eig(&m);
        assert!((l[0] - 1.0).abs() < 1e-14 && (l[1] - 3.0).abs() < 1e-14);
        let x = [v.at(0, 0), v.at(1, 0)];
        let y = m.mul_vec(&x);
        assert!((y[0] - x[0]).abs() < 1e-14);
    }

    #[test]
    fn lu_solves() {
        let mut m = Square::zeros(3);
        m.a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let lu = Lu::factor(&m, 1e-14).unwrap();
        let x = lu.solve(&[3.0, 2.0, 4.0]);
        let r = m.mul_vec(&x);
        for (a, b) in r.iter().zip([3.0, 2.0, 4.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn interior_newton_step() {
        let mut h = Square::zeros(2);
        h.a = vec![2.0, 0.0, 0.0, 4.0];
        let s = trust_region_step(&[-2.0, -4.0], &h, 10.0);
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_beats_samples() {
        let mut h = Square::zeros(3);
        h.a = vec![1.0, 0.5, 0.0, 0.5, -2.0, 0.3, 0.0, 0.3, 0.5];
        let g = [0.3, -0.1, 0.2];
        let delta = 0.7;
        let s = trust_region_step(&g, &h, delta);
        assert!(norm(&s) <= delta * (1.0 + 1e-12));
        let best = model(&g, &h, &s);
        for k in 0..2000 {
            let t = k as f64 * 0.0137;
            let d = [t.cos() * (3.0 * t).sin(), t.sin() * (3.0 * t).sin(), (3.0 * t).cos()];
            let d: Vec<f64> = d.iter().map(|x| x * delta).collect();
            assert!(best <= model(&g, &h, &d) + 1e-12);
        }
    }

    #[test]
    fn hard_case_uses_bottom_direction() {
        let mut h = Square::zeros(2);
        h.a = vec![-1.0, 0.0, 0.0, 1.0];
        let s = trust_region_step(&[0.0, 0.5], &h, 1.0);
        assert!((norm(&s) - 1.0).abs() < 1e-12);
        assert!(s[0].abs() > 0.8);
    }
}
