//! Volume minimization over the Gorenstein slice I. Floating point is used
//! only here; downstream consumers take either the exactly certified rational
//! direction or one of the nearby primitive candidates.

use crate::cones::{dual, Cone, GorensteinData};
use crate::error::{Error, Result};
use crate::ratmath::*;
use crate::slices::{msy_gradient, msy_triangulate, VolumeFunction};
use num::{Signed, ToPrimitive, Zero};
#[cfg(test)]
use num::One;

#[derive(Clone, Debug)]
pub struct ReebResult {
    /// minimizer on the slice I
    pub xi_c: Vec<f64>,
    pub f_value: f64,
    /// Euclidean norm of the gradient projected onto the slice
    pub grad_norm: f64,
    pub hessian_pd: bool,
    pub iterations: usize,
    pub converged: bool,
    /// primitive integer direction with an exact zero-gradient certificate
    pub rational_xi: Option<IntVec>,
}

struct FloatVol {
    dim: usize,
    simplices: Vec<(f64, Vec<Vec<f64>>)>,
}

impl FloatVol {
    fn new(vf: &VolumeFunction) -> Self {
        let fact: f64 = (1..=vf.dim).map(|i| i as f64).product();
        let simplices = vf
            .simplices
            .iter()
            .map(|s| {
                let det = s.det_abs.to_f64().unwrap() / fact;
                let rays = s
                    .dual_rays
                    .iter()
                    .map(|&i| vf.rays[i].iter().map(|x| x.to_f64().unwrap()).collect())
                    .collect();
                (det, rays)
            })
            .collect();
        FloatVol {
            dim: vf.dim,
            simplices,
        }
    }

    fn interior(&self, x: &[f64]) -> bool {
        self.simplices.iter().all(|(_, rays)| {
            rays.iter()
                .all(|u| u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() > 0.0)
        })
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.simplices
            .iter()
            .map(|(det, rays)| {
                let mut v = *det;
                for u in rays {
                    v /= u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                }
                v
            })
            .sum()
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut g = vec![0.0; d];
        for (det, rays) in &self.simplices {
            let ps: Vec<f64> = rays
                .iter()
                .map(|u| u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            let mut term = *det;
            for p in &ps {
                term /= p;
            }
            for j in 0..d {
                let s: f64 = rays.iter().zip(&ps).map(|(u, p)| u[j] / p).sum();
                g[j] -= term * s;
            }
        }
        g
    }

    fn hess(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = self.dim;
        let mut h = vec![vec![0.0; d]; d];
        for (det, rays) in &self.simplices {
            let ps: Vec<f64> = rays
                .iter()
                .map(|u| u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            let mut term = *det;
            for p in &ps {
                term /= p;
            }
            let sums: Vec<f64> = (0..d)
                .map(|j| rays.iter().zip(&ps).map(|(u, p)| u[j] / p).sum())
                .collect();
            for j in 0..d {
                for k in 0..d {
                    let second: f64 = rays
                        .iter()
                        .zip(&ps)
                        .map(|(u, p)| u[j] * u[k] / (p * p))
                        .sum();
                    h[j][k] += term * (sums[j] * sums[k] + second);
                }
            }
        }
        h
    }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let (p, &mx) = a[k..]
            .iter()
            .map(|r| r[k].abs())
            .collect::<Vec<_>>()
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())?;
        if mx < 1e-14 {
            return None;
        }
        a.swap(k, k + p);
        b.swap(k, k + p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn cholesky_pd(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 0.0 {
                    return false;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    true
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gradient orthogonally projected onto the hyperplane lambda^perp.
fn project_grad(g: &[f64], lambda: &[f64]) -> Vec<f64> {
    let gl: f64 = g.iter().zip(lambda).map(|(a, b)| a * b).sum();
    let ll: f64 = lambda.iter().map(|x| x * x).sum();
    g.iter()
        .zip(lambda)
        .map(|(a, b)| a - gl / ll * b)
        .collect()
}

const MAX_ITER: usize = 200;

/// Newton iteration with backtracking restricted to the affine slice
/// I = {x : (x, lambda) = -(n+1) l}, with the interior of the cone as domain.
pub fn minimize_volume(cone: &Cone, gd: &GorensteinData, tol: f64) -> Result<ReebResult> {
    assert!(tol > 0.0);
    let d = cone.dim;
    let vf = msy_triangulate(&dual(cone));
    let fv = FloatVol::new(&vf);
    let lambda: Vec<f64> = gd.lambda.iter().map(|x| x.to_f64().unwrap()).collect();

    // initial point: sum of the rays, rescaled exactly onto I
    let mut x0 = vec![0.0; d];
    for r in &cone.rays {
        for j in 0..d {
            x0[j] += r[j].to_f64().unwrap();
        }
    }
    let scale = (d as f64) / (cone.rays.len() as f64);
    for v in x0.iter_mut() {
        *v *= scale;
    }
    if !fv.interior(&x0) {
        // unreachable for valid data: the ray sum pairs positively with every
        // facet normal of the dual description
        return Err(Error::InfeasibleSlice);
    }

    // tangent basis of lambda^perp from the saturated kernel lattice
    let col = IntMat::from_rows(&gd.lambda.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>());
    let zbasis: Vec<Vec<f64>> = left_kernel_basis(&col)
        .iter()
        .map(|row| row.iter().map(|x| x.to_f64().unwrap()).collect())
        .collect();
    let m = zbasis.len();

    let reduced = |h: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let mut hr = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in 0..m {
                let mut s = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        s += zbasis[a][i] * h[i][j] * zbasis[b][j];
                    }
                }
                hr[a][b] = s;
            }
        }
        hr
    };

    let mut x = x0;
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..MAX_ITER {
        iterations = it;
        let g = fv.grad(&x);
        let pg = project_grad(&g, &lambda);
        if norm(&pg) < tol {
            converged = true;
            break;
        }
        let hr = reduced(&fv.hess(&x));
        let gr: Vec<f64> = (0..m)
            .map(|a| zbasis[a].iter().zip(&g).map(|(z, gi)| z * gi).sum())
            .collect();
        let step_t = solve_dense(hr, gr.iter().map(|v| -v).collect());
        let mut dir = vec![0.0; d];
        match step_t {
            Some(t) => {
                for a in 0..m {
                    for j in 0..d {
                        dir[j] += t[a] * zbasis[a][j];
                    }
                }
                // fall back to steepest descent when not a descent direction
                if dir.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() >= 0.0 {
                    dir = pg.iter().map(|v| -v).collect();
                }
            }
            None => dir = pg.iter().map(|v| -v).collect(),
        }
        let f0 = fv.value(&x);
        let slope: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + alpha * b).collect();
            if fv.interior(&cand) && fv.value(&cand) <= f0 + 1e-4 * alpha * slope {
                x = cand;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let g = fv.grad(&x);
    let pg = project_grad(&g, &lambda);
    let grad_norm = norm(&pg);
    if grad_norm < tol {
        converged = true;
    }
    let hessian_pd = cholesky_pd(&reduced(&fv.hess(&x)));
    Ok(ReebResult {
        f_value: fv.value(&x),
        xi_c: x,
        grad_norm,
        hessian_pd,
        iterations,
        converged,
        rational_xi: None,
    })
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued fractions.
fn approx_rational(x: f64, max_den: u64) -> (i64, u64) {
    let neg = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1u64, 1i64, 0u64);
    for _ in 0..64 {
        let a = x.floor();
        if a > i64::MAX as f64 {
            break;
        }
        let ai = a as i64;
        let p2 = ai.saturating_mul(p1).saturating_add(p0);
        let q2 = (ai as u64).saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-12 {
            break;
        }
        x = 1.0 / frac;
    }
    if neg {
        (-p1, q1)
    } else {
        (p1, q1)
    }
}

/// Exact certificate: does the projected gradient of the volume vanish at the
/// rational point of I parallel to `xi`? Parallelism of the exact gradient to
/// lambda is equivalent and scale-invariant.
fn certifies(cone: &Cone, gd: &GorensteinData, vf: &VolumeFunction, xi: &[Int]) -> bool {
    if !cone.interior_contains(xi) {
        return false;
    }
    // rescale onto I: t = (n+1) l / (-(lambda, xi))
    let pair = dot(&gd.lambda, xi);
    let t = Rat::new(Int::from(cone.dim as i64) * &gd.l, -pair);
    let point: RatVec = xi.iter().map(|x| rat_int(x) * &t).collect();
    let Ok(g) = msy_gradient(vf, &point) else {
        return false;
    };
    // g parallel to lambda: all 2x2 minors vanish
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            if &g[i] * rat_int(&gd.lambda[j]) != &g[j] * rat_int(&gd.lambda[i]) {
                return false;
            }
        }
    }
    true
}

/// Reconstruct a primitive integer direction from the float minimizer and
/// accept it only with an exact zero-projected-gradient certificate.
pub fn rationalize(
    result: &ReebResult,
    cone: &Cone,
    gd: &GorensteinData,
    max_den: u64,
) -> Option<IntVec> {
    if !result.converged {
        return None;
    }
    let vf = msy_triangulate(&dual(cone));
    let rats: RatVec = result
        .xi_c
        .iter()
        .map(|&x| {
            let (p, q) = approx_rational(x, max_den);
            Rat::new(Int::from(p), Int::from(q))
        })
        .collect();
    let cand = primitive_from_rat(&rats);
    if cand.iter().all(|x| x.is_zero()) {
        return None;
    }
    if certifies(cone, gd, &vf, &cand) {
        Some(cand)
    } else {
        None
    }
}

/// Primitive interior integer directions sorted by angular distance to the
/// minimizer: scaling sweep of rounded multiples plus small lattice
/// neighbors of the best candidates.
pub fn nearby_primitive_directions(
    result: &ReebResult,
    cone: &Cone,
    budget: usize,
) -> Vec<IntVec> {
    let d = cone.dim;
    let xi = &result.xi_c;
    let maxc = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if maxc == 0.0 {
        return Vec::new();
    }
    let mut seen: Vec<IntVec> = Vec::new();
    let push = |v: IntVec, seen: &mut Vec<IntVec>| {
        if v.iter().all(|x| x.is_zero()) {
            return;
        }
        let v = primitive(&v);
        if cone.interior_contains(&v) && !seen.contains(&v) {
            seen.push(v);
        }
    };
    for mlt in 1..=64u32 {
        let v: IntVec = xi
            .iter()
            .map(|&x| Int::from((x * mlt as f64 / maxc).round() as i64))
            .collect();
        push(v, &mut seen);
    }
    // lattice neighbors of the first few round candidates
    let base: Vec<IntVec> = seen.iter().take(3).cloned().collect();
    for b in base {
        let mut deltas = vec![vec![0i64; d]];
        for _ in 0..d {
            let mut next = Vec::new();
            for t in deltas {
                for step in [-1i64, 0, 1] {
                    let mut u = t.clone();
                    u.push(step);
                    u.remove(0);
                    next.push(u);
                }
            }
            deltas = next;
        }
        for t in deltas {
            let v: IntVec = b
                .iter()
                .zip(&t)
                .map(|(x, &s)| x + Int::from(s))
                .collect();
            push(v, &mut seen);
        }
    }
    // sort by the angle to xi_c, ties broken lexicographically
    let score = |v: &IntVec| -> f64 {
        let vf: Vec<f64> = v.iter().map(|x| x.to_f64().unwrap()).collect();
        let dotp: f64 = vf.iter().zip(xi).map(|(a, b)| a * b).sum();
        dotp / (norm(&vf) * norm(xi))
    };
    let mut scored: Vec<(IntVec, f64)> = seen.into_iter().map(|v| {
        let s = score(&v);
        (v, s)
    }).collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    scored.into_iter().take(budget).map(|(v, _)| v).collect()
}
