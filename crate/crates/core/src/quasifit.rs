//! Exact fitting of polynomials with periodic rational coefficients to count
//! samples. Each residue class is interpolated independently by an exact
//! rational solve, and every sample beyond the interpolation window acts as a
//! holdout check: any mismatch rejects the (degree, period) hypothesis.

use crate::error::{Error, Result};
use crate::ratmath::*;
use num::{One, Zero};

/// A degree-`degree` polynomial in k whose coefficients depend on k mod
/// `period`. `coeffs[r][i]` is the coefficient of k^i on residue r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolynomial {
    pub degree: usize,
    pub period: u64,
    pub coeffs: Vec<Vec<Rat>>,
}

pub fn coefficient(qp: &QuasiPolynomial, power: usize, residue: u64) -> &Rat {
    assert!(power <= qp.degree, "power out of range");
    assert!(residue < qp.period, "residue out of range");
    &qp.coeffs[residue as usize][power]
}

pub fn eval(qp: &QuasiPolynomial, k: u64) -> Rat {
    let r = (k % qp.period) as usize;
    let kq = rat_int(&Int::from(k));
    let mut acc = Rat::zero();
    for c in qp.coeffs[r].iter().rev() {
        acc = acc * &kq + c;
    }
    acc
}

/// Interpolate per residue class and validate against every remaining sample.
pub fn fit(samples: &[(u64, Int)], degree: usize, period: u64) -> Result<QuasiPolynomial> {
    assert!(period >= 1);
    let needed = degree + 1;
    let mut by_residue: Vec<Vec<(u64, &Int)>> = vec![Vec::new(); period as usize];
    for (k, c) in samples {
        by_residue[(k % period) as usize].push((*k, c));
    }
    let mut coeffs = Vec::with_capacity(period as usize);
    for (r, class) in by_residue.iter_mut().enumerate() {
        class.sort_by_key(|(k, _)| *k);
        if class.len() < needed {
            return Err(Error::InsufficientSamples {
                residue: r as u64,
                period,
                got: class.len(),
                needed,
            });
        }
        // Vandermonde solve on the first degree+1 samples of the class
        let rows: Vec<IntVec> = class[..needed]
            .iter()
            .map(|(k, _)| {
                let kq = Int::from(*k);
                let mut row = Vec::with_capacity(needed);
                let mut p = Int::one();
                for _ in 0..needed {
                    row.push(p.clone());
                    p *= &kq;
                }
                row
            })
            .collect();
        let a = IntMat::from_rows(&rows);
        let b: RatVec = class[..needed].iter().map(|(_, c)| rat_int(c)).collect();
        let sol = solve_rational(&a, &b).expect("distinct nodes give an invertible system");
        debug_assert!(sol.unique);
        coeffs.push(sol.x);
    }
    let qp = QuasiPolynomial {
        degree,
        period,
        coeffs,
    };
    // holdout validation over everything, including the interpolation nodes
    for (k, c) in samples {
        if eval(&qp, *k) != rat_int(c) {
            return Err(Error::InconsistentSamples {
                degree,
                period,
                at: *k,
            });
        }
    }
    Ok(qp)
}

/// Try multiples of the base period until the samples fit. The base period is
/// derived from the chart data and is expected to work on the first try; the
/// multiples are a guard.
pub fn fit_with_period_search(
    samples: &[(u64, Int)],
    degree: usize,
    base_period: u64,
    max_multiple: u64,
) -> Result<QuasiPolynomial> {
    let mut last_insufficient = None;
    for m in 1..=max_multiple {
        match fit(samples, degree, base_period * m) {
            Ok(qp) => return Ok(qp),
            Err(Error::InconsistentSamples { .. }) => continue,
            Err(e @ Error::InsufficientSamples { .. }) => {
                last_insufficient = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_insufficient.unwrap_or(Error::FitInconsistent(base_period * max_multiple)))
}
