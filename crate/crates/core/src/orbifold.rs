//! Per-ray chart data for the strata sitting over the rays of the cone, and
//! the exact root-of-unity correction sums they contribute to the k^(n-1)
//! coefficient. The sums are evaluated without floating point through a
//! sawtooth reduction; a complex-summation oracle lives in the tests.

use crate::cones::{dual, faces, Cone};
use crate::error::{Error, Result};
use crate::ratmath::*;
use crate::slices::facet_relative_volume;
use num::{Integer, One, Signed, ToPrimitive, Zero};

/// Expansion of the cutting vector in the lattice basis completing a facet's
/// rays: xi = sum c_rho' v_rho' + d mu with d > 0. The stabilizer order g of
/// the stratum over `rho` is the gcd of the weights on the other facet rays
/// together with d.
#[derive(Clone, Debug)]
pub struct OrbifoldRayData {
    pub rho: usize,
    pub tau: Vec<usize>,
    pub mu: IntVec,
    pub c_coeffs: Vec<(usize, Int)>,
    pub d: Int,
    pub g: u64,
    pub c_rho: Int,
}

/// Chart data for ray `rho` in the facet `tau` (given as ray indices).
pub fn chart_data(c: &Cone, xi: &[Int], rho: usize, tau: &[usize]) -> Result<OrbifoldRayData> {
    assert!(tau.contains(&rho), "tau must contain rho");
    let d = c.dim;
    if tau.len() != d - 1 {
        return Err(Error::NotSmoothFacet(tau.to_vec()));
    }
    let ray_rows: Vec<IntVec> = tau.iter().map(|&i| c.rays[i].clone()).collect();
    // cofactor vector w: det(v_1..v_{d-1}, mu) = (w, mu); it is primitive
    // exactly when the facet rays extend to a lattice basis
    let mut w: IntVec = Vec::with_capacity(d);
    for j in 0..d {
        let minor_rows: Vec<IntVec> = ray_rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(t, _)| *t != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let minor = IntMat::from_rows(&minor_rows).det();
        w.push(if (d - 1 - j) % 2 == 0 { minor } else { -minor });
    }
    let Some(mut mu) = bezout_one(&w) else {
        return Err(Error::NotSmoothFacet(tau.to_vec()));
    };
    // expand xi in the basis {v_rho', mu}
    let mut cols: Vec<IntVec> = ray_rows.clone();
    cols.push(mu.clone());
    let basis_t = IntMat::from_rows(&cols).transpose();
    let sol = solve_rational(&basis_t, &rvec(xi)).expect("basis is invertible");
    let mut coeffs: IntVec = sol
        .x
        .iter()
        .map(|x| {
            debug_assert!(x.denom().is_one(), "unimodular basis gives integer coordinates");
            x.numer().clone()
        })
        .collect();
    let mut dcoef = coeffs.pop().expect("mu coefficient present");
    if dcoef.is_negative() {
        dcoef = -dcoef;
        for m in mu.iter_mut() {
            *m = -m.clone();
        }
    }
    if dcoef.is_zero() {
        return Err(Error::NotInterior);
    }
    let mut g = dcoef.clone();
    let mut c_rho = Int::zero();
    let mut c_coeffs = Vec::new();
    for (&ray_idx, coef) in tau.iter().zip(&coeffs) {
        if ray_idx == rho {
            c_rho = coef.clone();
        } else {
            g = g.gcd(coef);
        }
        c_coeffs.push((ray_idx, coef.clone()));
    }
    let g = g.to_u64().ok_or(Error::Overflow)?;
    Ok(OrbifoldRayData {
        rho,
        tau: tau.to_vec(),
        mu,
        c_coeffs,
        d: dcoef,
        g,
        c_rho,
    })
}

/// S_rho(k) for k = 0..g-1 (mod g). Periodic with period g.
#[derive(Clone, Debug)]
pub struct CorrectionSum {
    pub rho: usize,
    pub g: u64,
    pub values: Vec<Rat>,
}

/// Value of sum_{j=1}^{g-1} w^{ja} / (1 - w^j) for a primitive g-th root of
/// unity w: equals (g-1)/2 - ((-a) mod g).
pub fn sawtooth(g: u64, a: i64) -> Rat {
    let m = (-a).rem_euclid(g as i64);
    rat(g as i64 - 1, 2) - rat(m, 1)
}

fn modinv(c: u64, g: u64) -> Option<u64> {
    let eg = Int::from(c).extended_gcd(&Int::from(g));
    if !eg.gcd.is_one() {
        return None;
    }
    Some(eg.x.mod_floor(&Int::from(g)).to_u64().unwrap())
}

/// Exact evaluation of the correction sum
///   S(k) = sum_{eta != 1} (1 - eta^{k+1}) / ((1 - eta^{-c})(1 - eta))
/// over the g-th roots of unity, via the sawtooth reduction
///   S(k) = sum_{a=0}^{r-1} [ (g-1)/2 - ((c^{-1} a) mod g) ],  r = (k+1) mod g.
pub fn correction_sum(data: &OrbifoldRayData) -> Result<CorrectionSum> {
    let g = data.g;
    if g == 1 {
        return Ok(CorrectionSum {
            rho: data.rho,
            g,
            values: vec![Rat::zero()],
        });
    }
    let c = data.c_rho.mod_floor(&Int::from(g)).to_u64().unwrap();
    let Some(cinv) = modinv(c, g) else {
        return Err(Error::NonCoprimeWeight {
            c: data.c_rho.to_string(),
            g,
        });
    };
    let mut values = Vec::with_capacity(g as usize);
    for k in 0..g {
        let r = (k + 1) % g;
        let mut s = Rat::zero();
        for a in 0..r {
            s += rat(g as i64 - 1, 2) - rat(((cinv * a) % g) as i64, 1);
        }
        values.push(s);
    }
    Ok(CorrectionSum {
        rho: data.rho,
        g,
        values,
    })
}

/// Chart data for `rho` from every facet containing it; the stabilizer data
/// (g, c_rho mod g) must agree across charts, and a violation is reported
/// rather than resolved. Returns the data of the first facet.
pub fn ray_chart_data(c: &Cone, xi: &[Int], rho: usize) -> Result<OrbifoldRayData> {
    let facets = faces(c, c.dim - 1);
    let mut found: Option<OrbifoldRayData> = None;
    for f in &facets {
        if !f.rays.contains(&rho) {
            continue;
        }
        let data = chart_data(c, xi, rho, &f.rays)?;
        match &found {
            None => found = Some(data),
            Some(prev) => {
                let gi = Int::from(prev.g);
                let same_g = prev.g == data.g;
                let same_c = prev.c_rho.mod_floor(&gi) == data.c_rho.mod_floor(&gi);
                if !(same_g && same_c) {
                    return Err(Error::ChartMismatch {
                        ray: rho,
                        details: format!(
                            "facet {:?} gives (g = {}, c = {}), facet {:?} gives (g = {}, c = {})",
                            prev.tau, prev.g, prev.c_rho, data.tau, data.g, data.c_rho
                        ),
                    });
                }
            }
        }
    }
    found.ok_or(Error::NotSmoothFacet(vec![rho]))
}

/// One row per ray of the cone: chart data, correction values, and the
/// relative facet volume w entering the total correction term.
#[derive(Clone, Debug)]
pub struct RayCorrection {
    pub data: OrbifoldRayData,
    pub sum: CorrectionSum,
    pub w: Rat,
}

pub fn orbifold_table(c: &Cone, xi: &[Int]) -> Result<Vec<RayCorrection>> {
    let cd = dual(c);
    let xi_rat = rvec(xi);
    let mut out = Vec::with_capacity(c.rays.len());
    for rho in 0..c.rays.len() {
        let data = ray_chart_data(c, xi, rho)?;
        let sum = correction_sum(&data)?;
        let w = facet_relative_volume(&cd, &xi_rat, rho)?;
        out.push(RayCorrection { data, sum, w });
    }
    Ok(out)
}

/// The total stratum correction sum_rho n * S_rho(k) * w_rho at level k.
pub fn total_orbifold_term(c: &Cone, xi: &[Int], k: u64) -> Result<Rat> {
    let table = orbifold_table(c, xi)?;
    Ok(total_from_table(&table, c.dim - 1, k))
}

pub fn total_from_table(table: &[RayCorrection], n: usize, k: u64) -> Rat {
    let nq = rat(n as i64, 1);
    table
        .iter()
        .map(|rc| &nq * &rc.sum.values[(k % rc.sum.g) as usize] * &rc.w)
        .sum()
}

/// lcm over the facets of the chart orders d = (u_tau, xi); every stratum
/// stabilizer divides one of these, so the counting function is periodic with
/// this period.
pub fn orbifold_period(c: &Cone, xi: &[Int]) -> Result<u64> {
    if !c.interior_contains(xi) {
        return Err(Error::NotInterior);
    }
    let mut p = Int::one();
    for u in &c.facet_normals {
        p = p.lcm(&dot(u, xi));
    }
    p.to_u64().ok_or(Error::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::make_cone;

    fn example_cone() -> Cone {
        make_cone(&[ivec(&[1, 0]), ivec(&[-1, 3])]).unwrap()
    }

    /// Brute-force complex summation oracle for the sawtooth identity.
    fn sawtooth_oracle(g: u64, a: i64) -> f64 {
        use std::f64::consts::TAU;
        let mut re = 0.0;
        for j in 1..g {
            let th = TAU * j as f64 / g as f64;
            let num = (
                (th * a as f64).cos(),
                (th * a as f64).sin(),
            );
            let den = (1.0 - th.cos(), -th.sin());
            let d2 = den.0 * den.0 + den.1 * den.1;
            re += (num.0 * den.0 + num.1 * den.1) / d2;
        }
        re
    }

    #[test]
    fn sawtooth_identity_brute_force() {
        // validate the reduction for all g <= 50, 0 <= a < g
        for g in 1..=50u64 {
            for a in 0..g as i64 {
                let exact = sawtooth(g, a);
                let approx = sawtooth_oracle(g, a);
                let exact_f = exact.numer().to_f64().unwrap() / exact.denom().to_f64().unwrap();
                assert!(
                    (exact_f - approx).abs() < 1e-7,
                    "sawtooth mismatch at g={g}, a={a}: {exact_f} vs {approx}"
                );
            }
        }
    }

    /// Complex summation oracle for the full correction sum.
    fn correction_oracle(g: u64, c: i64, k: u64) -> f64 {
        use std::f64::consts::TAU;
        let mut re = 0.0;
        for j in 1..g {
            let th = TAU * j as f64 / g as f64;
            let e = |m: f64| (m.cos(), m.sin());
            let one_minus = |z: (f64, f64)| (1.0 - z.0, -z.1);
            let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
            let num = one_minus(e(th * (k as f64 + 1.0)));
            let den = mul(one_minus(e(-th * c as f64)), one_minus(e(th)));
            let d2 = den.0 * den.0 + den.1 * den.1;
            re += (num.0 * den.0 + num.1 * den.1) / d2;
        }
        re
    }

    fn data_for(g: u64, c_rho: i64) -> OrbifoldRayData {
        OrbifoldRayData {
            rho: 0,
            tau: vec![0],
            mu: ivec(&[0, 1]),
            c_coeffs: vec![(0, int(c_rho))],
            d: Int::from(g),
            g,
            c_rho: int(c_rho),
        }
    }

    #[test]
    fn correction_sum_examples() {
        // g = 4, c = -1: values (3/2, 0, -1/2, 0)
        let s = correction_sum(&data_for(4, -1)).unwrap();
        assert_eq!(s.values, vec![rat(3, 2), rat(0, 1), rat(-1, 2), rat(0, 1)]);
        // g = 1: empty sum
        let s = correction_sum(&data_for(1, 1)).unwrap();
        assert_eq!(s.values, vec![rat(0, 1)]);
        // g = 2, c = 1: (1/2, 0)
        let s = correction_sum(&data_for(2, 1)).unwrap();
        assert_eq!(s.values, vec![rat(1, 2), rat(0, 1)]);
    }

    #[test]
    fn correction_sum_matches_complex_oracle() {
        for (g, c) in [(2u64, 1i64), (3, 1), (3, 2), (4, 1), (4, 3), (5, 2), (7, 3), (8, 5)] {
            let s = correction_sum(&data_for(g, c)).unwrap();
            for k in 0..2 * g {
                let exact = &s.values[(k % g) as usize];
                let exact_f = exact.numer().to_f64().unwrap() / exact.denom().to_f64().unwrap();
                let approx = correction_oracle(g, c, k);
                assert!(
                    (exact_f - approx).abs() < 1e-7,
                    "g={g} c={c} k={k}: {exact_f} vs {approx}"
                );
            }
        }
    }

    #[test]
    fn noncoprime_weight_rejected() {
        assert!(matches!(
            correction_sum(&data_for(4, 2)),
            Err(Error::NonCoprimeWeight { .. })
        ));
    }

    #[test]
    fn example_cone_chart_data() {
        let c = example_cone();
        let xi = ivec(&[1, 1]);
        let rho_skew = c.rays.iter().position(|r| r == &ivec(&[-1, 3])).unwrap();
        let rho_e1 = c.rays.iter().position(|r| r == &ivec(&[1, 0])).unwrap();
        let d_skew = ray_chart_data(&c, &xi, rho_skew).unwrap();
        assert_eq!(d_skew.d, int(4));
        assert_eq!(d_skew.g, 4);
        assert_eq!(d_skew.c_rho.mod_floor(&int(4)), int(3)); // c = -1 mod 4
        let d_e1 = ray_chart_data(&c, &xi, rho_e1).unwrap();
        assert_eq!(d_e1.d, int(1));
        assert_eq!(d_e1.g, 1);
        // xi = (0,1): both charts trivial
        let xi01 = ivec(&[0, 1]);
        assert_eq!(ray_chart_data(&c, &xi01, rho_skew).unwrap().g, 1);
        assert_eq!(ray_chart_data(&c, &xi01, rho_e1).unwrap().g, 1);
    }

    #[test]
    fn orthant_charts_trivial() {
        let o3 = make_cone(&[ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1])]).unwrap();
        let xi = ivec(&[1, 1, 1]);
        for rho in 0..3 {
            let d = ray_chart_data(&o3, &xi, rho).unwrap();
            assert_eq!(d.d, int(1));
            assert_eq!(d.g, 1);
        }
        for k in 0..5 {
            assert_eq!(total_orbifold_term(&o3, &xi, k).unwrap(), rat(0, 1));
        }
    }

    #[test]
    fn example_total_term() {
        let c = example_cone();
        let xi = ivec(&[1, 1]);
        // n = 1: term(k) = S(k) * w = (3/2, 0, -1/2, 0) * 1/4
        let expect = [rat(3, 8), rat(0, 1), rat(-1, 8), rat(0, 1)];
        for k in 0..8u64 {
            assert_eq!(
                total_orbifold_term(&c, &xi, k).unwrap(),
                expect[(k % 4) as usize]
            );
        }
        // xi = (0,1): all charts trivial
        for k in 0..4u64 {
            assert_eq!(total_orbifold_term(&c, &ivec(&[0, 1]), k).unwrap(), rat(0, 1));
        }
    }

    #[test]
    fn stabilizer_matches_intrinsic_index() {
        // g equals the index of Z v_rho + Z xi inside the lattice points of
        // their span, computed via Smith normal form
        let cases: Vec<(Cone, IntVec)> = vec![
            (example_cone(), ivec(&[1, 1])),
            (example_cone(), ivec(&[0, 1])),
            (
                make_cone(&[
                    ivec(&[0, 0, 1]),
                    ivec(&[1, 0, 1]),
                    ivec(&[0, 1, 1]),
                    ivec(&[1, 1, 1]),
                ])
                .unwrap(),
                ivec(&[1, 1, 3]),
            ),
        ];
        for (c, xi) in cases {
            for rho in 0..c.rays.len() {
                let data = ray_chart_data(&c, &xi, rho).unwrap();
                let m = IntMat::from_rows(&[c.rays[rho].clone(), xi.clone()]);
                let (s, _, _) = snf(&m);
                let index = (s.at(0, 0) * s.at(1, 1)).to_u64().unwrap();
                assert_eq!(data.g, index, "ray {rho}");
            }
        }
    }

    #[test]
    fn period_from_facet_pairings() {
        let c = example_cone();
        assert_eq!(orbifold_period(&c, &ivec(&[1, 1])).unwrap(), 4);
        assert_eq!(orbifold_period(&c, &ivec(&[0, 1])).unwrap(), 1);
        assert_eq!(orbifold_period(&c, &ivec(&[1, 2])).unwrap(), 10);
    }
}
