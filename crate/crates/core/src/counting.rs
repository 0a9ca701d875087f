//! Exact lattice point enumeration. Two independent strategies are kept: a
//! bounding-box filter (the obviously correct baseline) and recursive
//! coordinate slabs driven by Fourier-Motzkin projections (the fast path).
//! Both return arbitrary-precision counts.

use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::ratmath::*;
use num::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

/// Inequalities a·x + b*k >= 0 over the first `nvar` coordinates plus the
/// dilation parameter k.
#[derive(Clone, Debug)]
struct Sys {
    nvar: usize,
    rows: Vec<(Vec<i64>, i64)>,
}

fn to_i64_vec(v: &[Int]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or(Error::Overflow))
        .collect()
}

fn gcd64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn normalize_row(a: &mut Vec<i64>, b: &mut i64) {
    let mut g = a.iter().fold(0i64, |g, &x| gcd64(g, x));
    g = gcd64(g, *b);
    if g > 1 {
        for x in a.iter_mut() {
            *x /= g;
        }
        *b /= g;
    }
}

/// Eliminate the last variable, producing the exact projection onto the
/// remaining coordinates.
fn fm_eliminate(sys: &Sys) -> Sys {
    let var = sys.nvar - 1;
    let mut keep: Vec<(Vec<i64>, i64)> = Vec::new();
    let mut lower: Vec<&(Vec<i64>, i64)> = Vec::new(); // coef > 0
    let mut upper: Vec<&(Vec<i64>, i64)> = Vec::new(); // coef < 0
    for row in &sys.rows {
        match row.0[var].signum() {
            0 => {
                let mut a = row.0[..var].to_vec();
                let mut b = row.1;
                normalize_row(&mut a, &mut b);
                keep.push((a, b));
            }
            1 => lower.push(row),
            _ => upper.push(row),
        }
    }
    for lo in &lower {
        for up in &upper {
            let cl = lo.0[var] as i128;
            let cu = (-up.0[var]) as i128;
            let mut a: Vec<i64> = (0..var)
                .map(|j| {
                    let v = cu * lo.0[j] as i128 + cl * up.0[j] as i128;
                    i64::try_from(v).expect("projection coefficients stay in range")
                })
                .collect();
            let mut b = i64::try_from(cu * lo.1 as i128 + cl * up.1 as i128)
                .expect("projection coefficients stay in range");
            if a.iter().all(|&x| x == 0) && b >= 0 {
                continue;
            }
            normalize_row(&mut a, &mut b);
            keep.push((a, b));
        }
    }
    keep.sort_unstable();
    keep.dedup();
    Sys {
        nvar: var,
        rows: keep,
    }
}

/// Chain of projections: chain[t] constrains (x_0..x_{t-1}, k).
fn projection_chain(full: Sys) -> Vec<Sys> {
    let d = full.nvar;
    let mut chain = vec![full];
    for _ in 0..d {
        let next = fm_eliminate(chain.last().unwrap());
        chain.push(next);
    }
    chain.reverse();
    chain
}

/// Exact bounds for x_t given a valid prefix, from the projection with
/// variables x_0..x_t. Returns None for an empty integer range.
fn var_range(sys: &Sys, prefix: &[i64], k: i64) -> Option<(i64, i64)> {
    let t = sys.nvar - 1;
    debug_assert_eq!(prefix.len(), t);
    let mut lo = i64::MIN;
    let mut hi = i64::MAX;
    for (a, b) in &sys.rows {
        let c = a[t];
        if c == 0 {
            continue;
        }
        let mut s: i128 = *b as i128 * k as i128;
        for j in 0..t {
            s += a[j] as i128 * prefix[j] as i128;
        }
        // c * x_t >= -s
        if c > 0 {
            let bound = ceil_div_i128(-s, c as i128);
            lo = lo.max(i64::try_from(bound).ok()?);
        } else {
            let bound = floor_div_i128(s, (-c) as i128);
            hi = hi.min(i64::try_from(bound).ok()?);
        }
    }
    debug_assert!(
        lo > i64::MIN && hi < i64::MAX,
        "bounded slice has finite ranges"
    );
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

fn floor_div_i128(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    let q = a / b;
    if a % b < 0 {
        q - 1
    } else {
        q
    }
}

fn ceil_div_i128(a: i128, b: i128) -> i128 {
    -floor_div_i128(-a, b)
}

fn count_rec(chain: &[Sys], prefix: &mut Vec<i64>, k: i64) -> Int {
    let t = prefix.len();
    let d = chain.len() - 1;
    let Some((lo, hi)) = var_range(&chain[t + 1], prefix, k) else {
        return Int::zero();
    };
    if t + 1 == d {
        return Int::from(hi - lo + 1);
    }
    let mut total = Int::zero();
    for x in lo..=hi {
        prefix.push(x);
        total += count_rec(chain, prefix, k);
        prefix.pop();
    }
    total
}

fn count_parallel(chain: &[Sys], k: i64) -> Int {
    let d = chain.len() - 1;
    if d == 0 {
        return Int::from(1);
    }
    let Some((lo, hi)) = var_range(&chain[1], &[], k) else {
        return Int::zero();
    };
    if d == 1 {
        return Int::from(hi - lo + 1);
    }
    (lo..=hi)
        .into_par_iter()
        .map(|x0| {
            let mut prefix = vec![x0];
            count_rec(chain, &mut prefix, k)
        })
        .reduce(Int::zero, |a, b| a + b)
}

fn cone_system(cdual: &Cone, xi: &[Int]) -> Result<Sys> {
    let d = cdual.dim;
    let mut rows = Vec::new();
    for v in &cdual.facet_normals {
        rows.push((to_i64_vec(v)?, 0i64));
    }
    let xi64 = to_i64_vec(xi)?;
    rows.push((xi64.iter().map(|&x| -x).collect(), 1));
    Ok(Sys { nvar: d, rows })
}

fn check_interior(cdual: &Cone, xi: &[Int]) -> Result<()> {
    for u in &cdual.rays {
        if !dot(u, xi).is_positive() {
            return Err(Error::Unbounded);
        }
    }
    Ok(())
}

/// Number of lattice points x in the dual cone with (x, xi) <= k.
pub fn count_cone(cdual: &Cone, xi: &[Int], k: u64) -> Result<Int> {
    check_interior(cdual, xi)?;
    let chain = projection_chain(cone_system(cdual, xi)?);
    let k = i64::try_from(k).map_err(|_| Error::Overflow)?;
    Ok(count_parallel(&chain, k))
}

/// Baseline: enumerate the bounding box of the slice at level k and filter by
/// the defining inequalities.
pub fn count_cone_box(cdual: &Cone, xi: &[Int], k: u64) -> Result<Int> {
    check_interior(cdual, xi)?;
    let sys = cone_system(cdual, xi)?;
    let k = i64::try_from(k).map_err(|_| Error::Overflow)?;
    // box bounds from the vertices 0 and k * u / (u, xi)
    let d = cdual.dim;
    let mut lo = vec![Rat::zero(); d];
    let mut hi = vec![Rat::zero(); d];
    for u in &cdual.rays {
        let s = rat_int(&dot(u, xi));
        for j in 0..d {
            let c = rat_int(&u[j]) * rat(k, 1) / &s;
            if c < lo[j] {
                lo[j] = c.clone();
            }
            if c > hi[j] {
                hi[j] = c;
            }
        }
    }
    let lo: Vec<i64> = lo
        .iter()
        .map(|r| r.ceil().to_integer().to_i64().ok_or(Error::Overflow))
        .collect::<Result<_>>()?;
    let hi: Vec<i64> = hi
        .iter()
        .map(|r| r.floor().to_integer().to_i64().ok_or(Error::Overflow))
        .collect::<Result<_>>()?;
    Ok(box_filter_count(&sys, &lo, &hi, k))
}

fn box_filter_count(sys: &Sys, lo: &[i64], hi: &[i64], k: i64) -> Int {
    fn rec(sys: &Sys, lo: &[i64], hi: &[i64], k: i64, point: &mut Vec<i64>) -> Int {
        let t = point.len();
        if t == sys.nvar {
            let ok = sys.rows.iter().all(|(a, b)| {
                let mut s: i128 = *b as i128 * k as i128;
                for j in 0..sys.nvar {
                    s += a[j] as i128 * point[j] as i128;
                }
                s >= 0
            });
            return if ok { Int::from(1) } else { Int::zero() };
        }
        let mut total = Int::zero();
        for x in lo[t]..=hi[t] {
            point.push(x);
            total += rec(sys, lo, hi, k, point);
            point.pop();
        }
        total
    }
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return Int::zero();
    }
    (lo[0]..=hi[0])
        .into_par_iter()
        .map(|x0| {
            let mut point = vec![x0];
            rec(sys, lo, hi, k, &mut point)
        })
        .reduce(Int::zero, |a, b| a + b)
}

/// Both enumeration strategies on the same input.
pub fn count_strategies_agree(cdual: &Cone, xi: &[Int], k: u64) -> Result<bool> {
    Ok(count_cone(cdual, xi, k)? == count_cone_box(cdual, xi, k)?)
}

fn polytope_system(vertices: &[IntVec]) -> Result<(Sys, Cone)> {
    assert!(!vertices.is_empty());
    let n = vertices[0].len();
    let lifted: Vec<IntVec> = vertices
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.push(Int::from(1));
            w
        })
        .collect();
    let cone = crate::cones::make_cone(&lifted).map_err(|_| Error::DegeneratePolytope)?;
    let mut rows = Vec::new();
    for nb in &cone.facet_normals {
        let a = to_i64_vec(&nb[..n])?;
        let b = nb[n].to_i64().ok_or(Error::Overflow)?;
        rows.push((a, b));
    }
    Ok((Sys { nvar: n, rows }, cone))
}

/// Exact number of lattice points in the k-th dilate of an integral polytope.
pub fn count_polytope(vertices: &[IntVec], k: u64) -> Result<Int> {
    let (sys, _) = polytope_system(vertices)?;
    let chain = projection_chain(sys);
    let k = i64::try_from(k).map_err(|_| Error::Overflow)?;
    Ok(count_parallel(&chain, k))
}

/// Baseline box-filter count for polytope dilates.
pub fn count_polytope_box(vertices: &[IntVec], k: u64) -> Result<Int> {
    let (sys, _) = polytope_system(vertices)?;
    let k = i64::try_from(k).map_err(|_| Error::Overflow)?;
    let n = sys.nvar;
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for v in vertices {
        for j in 0..n {
            let c = v[j].to_i64().ok_or(Error::Overflow)? * k;
            lo[j] = lo[j].min(c);
            hi[j] = hi[j].max(c);
        }
    }
    Ok(box_filter_count(&sys, &lo, &hi, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{dual, make_cone};
    use num::One;

    fn example_dual() -> Cone {
        dual(&make_cone(&[ivec(&[1, 0]), ivec(&[-1, 3])]).unwrap())
    }

    fn orthant(n: usize) -> Cone {
        let gens: Vec<IntVec> = (0..n)
            .map(|i| {
                let mut v = vec![Int::zero(); n];
                v[i] = Int::one();
                v
            })
            .collect();
        make_cone(&gens).unwrap()
    }

    fn binomial(n: u64, k: u64) -> Int {
        let mut r = Int::one();
        for i in 0..k {
            r = r * Int::from(n - i) / Int::from(i + 1);
        }
        r
    }

    #[test]
    fn example_cone_counts() {
        let cd = example_dual();
        let xi = ivec(&[1, 1]);
        for (k, expect) in [(0u64, 1i64), (1, 2), (2, 4), (4, 11)] {
            assert_eq!(count_cone(&cd, &xi, k).unwrap(), int(expect));
        }
        // xi = (0,1): (3/2)k^2 + (5/2)k + 1
        let xi = ivec(&[0, 1]);
        for k in 0u64..=20 {
            let expect = (3 * k * k + 5 * k + 2) / 2;
            assert_eq!(count_cone(&cd, &xi, k).unwrap(), Int::from(expect));
        }
    }

    #[test]
    fn orthant_counts_are_binomials() {
        for n in 2usize..=4 {
            let cd = dual(&orthant(n));
            let xi: IntVec = vec![Int::one(); n];
            for k in [0u64, 1, 5, 25] {
                assert_eq!(
                    count_cone(&cd, &xi, k).unwrap(),
                    binomial(k + n as u64, n as u64)
                );
            }
        }
    }

    #[test]
    fn unbounded_detected() {
        let cd = example_dual();
        assert!(matches!(
            count_cone(&cd, &ivec(&[1, 0]), 3),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn polytope_counts() {
        // reflexive triangle with vertices (1,0),(0,1),(-1,-1):
        // brute-force oracle gives p(k) = (3k^2 + 3k + 2)/2
        let tri = vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])];
        for k in 0u64..=12 {
            let expect = (3 * k * k + 3 * k + 2) / 2;
            assert_eq!(count_polytope(&tri, k).unwrap(), Int::from(expect));
        }
        // its dual triangle (sections of O(3k) on the projective plane):
        // p(k) = (9k^2 + 9k + 2)/2, so p(1) = 10
        let tri_dual = vec![ivec(&[1, 1]), ivec(&[-2, 1]), ivec(&[1, -2])];
        for k in 0u64..=12 {
            let expect = (9 * k * k + 9 * k + 2) / 2;
            assert_eq!(count_polytope(&tri_dual, k).unwrap(), Int::from(expect));
        }
        assert_eq!(count_polytope(&tri_dual, 1).unwrap(), int(10));
        // unit segment and unit square
        let seg = vec![ivec(&[0]), ivec(&[1])];
        for k in 0u64..=10 {
            assert_eq!(count_polytope(&seg, k).unwrap(), Int::from(k + 1));
        }
        let sq = vec![ivec(&[0, 0]), ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1])];
        for k in 0u64..=10 {
            assert_eq!(
                count_polytope(&sq, k).unwrap(),
                Int::from((k + 1) * (k + 1))
            );
        }
        // degenerate: all vertices on a line
        let degen = vec![ivec(&[0, 0]), ivec(&[1, 1]), ivec(&[2, 2])];
        assert!(matches!(
            count_polytope(&degen, 1),
            Err(Error::DegeneratePolytope)
        ));
    }

    #[test]
    fn strategies_agree_spot_checks() {
        let cd = example_dual();
        for k in [0u64, 1, 7, 37] {
            assert!(count_strategies_agree(&cd, &ivec(&[1, 1]), k).unwrap());
        }
        // closed form at k = 37 (k ≡ 1 mod 4): (6k^2+16k+10)/16
        let k = 37u64;
        let expect = (6 * k * k + 16 * k + 10) / 16;
        assert_eq!(
            count_cone(&cd, &ivec(&[1, 1]), k).unwrap(),
            Int::from(expect)
        );
        let o4 = dual(&orthant(4));
        let xi: IntVec = vec![Int::one(); 4];
        assert!(count_strategies_agree(&o4, &xi, 25).unwrap());
        assert_eq!(count_cone(&o4, &xi, 25).unwrap(), binomial(29, 4));
    }

    #[test]
    fn monotone_and_origin() {
        let cd = example_dual();
        let xi = ivec(&[2, 3]);
        let mut prev = Int::zero();
        for k in 0u64..=15 {
            let c = count_cone(&cd, &xi, k).unwrap();
            assert!(c >= prev);
            prev = c;
        }
        assert_eq!(count_cone(&cd, &xi, 0).unwrap(), Int::one());
    }

    #[test]
    fn dilation_consistency() {
        // scaling the hyperplane level and the cutting vector together is a no-op
        let cd = example_dual();
        let xi = ivec(&[1, 1]);
        let xi3: IntVec = xi.iter().map(|x| x * Int::from(3)).collect();
        for k in 0u64..=12 {
            assert_eq!(
                count_cone(&cd, &xi, k).unwrap(),
                count_cone(&cd, &xi3, 3 * k).unwrap()
            );
        }
    }
}
