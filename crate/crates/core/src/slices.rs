//! Slice polytopes of a dual cone below a moving hyperplane, exact volumes
//! through a placing triangulation, facet relative volumes, and the analytic
//! derivatives of the volume functional.

use crate::cones::{all_faces, make_cone, Cone};
use crate::error::{Error, Result};
use crate::ratmath::*;
use num::{One, Signed, Zero};

/// The polytope {x in Cdual : (x, xi) <= 1}: the origin plus one vertex per
/// extreme dual ray, with the facet structure keyed by the rays of the primal
/// cone (= facet normals of Cdual).
#[derive(Clone, Debug)]
pub struct SlicePolytope {
    pub xi: RatVec,
    /// vertices[0] is the origin; vertices[1+i] = u_i / (u_i, xi).
    pub vertices: Vec<RatVec>,
    /// for each facet normal of Cdual (a ray of the primal cone), the indices
    /// of the vertices lying on the corresponding facet of the slice
    pub facet_map: Vec<(usize, Vec<usize>)>,
    /// the vertices on the cutting hyperplane (x, xi) = 1
    pub cut_facet: Vec<usize>,
}

pub fn slice(cdual: &Cone, xi: &[Rat]) -> Result<SlicePolytope> {
    let mut vertices = vec![vec![Rat::zero(); cdual.dim]];
    for u in &cdual.rays {
        let s = dot_ri(xi, u);
        if !s.is_positive() {
            return Err(Error::Unbounded);
        }
        vertices.push(u.iter().map(|x| rat_int(x) / &s).collect());
    }
    let mut facet_map = Vec::new();
    for (rho, v) in cdual.facet_normals.iter().enumerate() {
        let mut on: Vec<usize> = vec![0];
        for (i, u) in cdual.rays.iter().enumerate() {
            if dot(u, v).is_zero() {
                on.push(i + 1);
            }
        }
        facet_map.push((rho, on));
    }
    Ok(SlicePolytope {
        xi: xi.to_vec(),
        vertices,
        facet_map,
        cut_facet: (1..=cdual.rays.len()).collect(),
    })
}

/// A triangulation of a cone into simplicial subcones spanned by its own
/// extreme rays, with the absolute ray determinant of each piece. Evaluating
/// the volume of the slice below (x, xi) = 1 is then a sum of simple terms.
#[derive(Clone, Debug)]
pub struct VolumeFunction {
    pub dim: usize,
    pub rays: Vec<IntVec>,
    pub simplices: Vec<Simplex>,
}

#[derive(Clone, Debug)]
pub struct Simplex {
    /// indices into `rays`
    pub dual_rays: Vec<usize>,
    pub det_abs: Int,
}

/// Placing triangulation without new rays, pulling recursively at the ray
/// that comes first in `order`.
pub fn triangulate_with_order(cdual: &Cone, order: &[usize]) -> VolumeFunction {
    assert_eq!(order.len(), cdual.rays.len());
    let mut pos = vec![0usize; order.len()];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let faces = all_faces(cdual);
    let top = faces
        .iter()
        .find(|f| f.dim == cdual.dim && f.rays.len() == cdual.rays.len())
        .expect("cone is a face of itself");

    fn pull(
        rayset: &[usize],
        fdim: usize,
        faces: &[crate::cones::Face],
        pos: &[usize],
    ) -> Vec<Vec<usize>> {
        if rayset.len() == fdim {
            return vec![rayset.to_vec()];
        }
        let v0 = *rayset.iter().min_by_key(|&&i| pos[i]).unwrap();
        let mut out = Vec::new();
        for sub in faces.iter().filter(|f| {
            f.dim + 1 == fdim
                && f.rays.iter().all(|i| rayset.contains(i))
                && !f.rays.contains(&v0)
        }) {
            for mut s in pull(&sub.rays, sub.dim, faces, pos) {
                s.push(v0);
                s.sort_unstable();
                out.push(s);
            }
        }
        out
    }

    let simplices = pull(&top.rays, cdual.dim, &faces, &pos)
        .into_iter()
        .map(|idx| {
            let mat = IntMat::from_rows(
                &idx.iter().map(|&i| cdual.rays[i].clone()).collect::<Vec<_>>(),
            );
            let det_abs = mat.det().abs();
            assert!(!det_abs.is_zero(), "degenerate simplex in triangulation");
            Simplex {
                dual_rays: idx,
                det_abs,
            }
        })
        .collect();
    VolumeFunction {
        dim: cdual.dim,
        rays: cdual.rays.clone(),
        simplices,
    }
}

pub fn msy_triangulate(cdual: &Cone) -> VolumeFunction {
    let order: Vec<usize> = (0..cdual.rays.len()).collect();
    triangulate_with_order(cdual, &order)
}

fn pairings(f: &VolumeFunction, s: &Simplex, xi: &[Rat]) -> Result<RatVec> {
    let mut out = Vec::with_capacity(s.dual_rays.len());
    for &i in &s.dual_rays {
        let p = dot_ri(xi, &f.rays[i]);
        if !p.is_positive() {
            return Err(Error::Unbounded);
        }
        out.push(p);
    }
    Ok(out)
}

fn factorial(n: usize) -> Int {
    (1..=n).fold(Int::one(), |acc, i| acc * Int::from(i))
}

/// Lattice-normalized volume of {x in cone : (x, xi) <= 1}:
/// sum over simplices of |det| / (dim! * prod (u_i, xi)).
pub fn volume(f: &VolumeFunction, xi: &[Rat]) -> Result<Rat> {
    let fact = rat_int(&factorial(f.dim));
    let mut total = Rat::zero();
    for s in &f.simplices {
        let ps = pairings(f, s, xi)?;
        let mut denom = fact.clone();
        for p in &ps {
            denom *= p;
        }
        total += rat_int(&s.det_abs) / denom;
    }
    Ok(total)
}

/// Exact gradient of `volume` in xi.
pub fn msy_gradient(f: &VolumeFunction, xi: &[Rat]) -> Result<RatVec> {
    let d = xi.len();
    let fact = rat_int(&factorial(f.dim));
    let mut grad = vec![Rat::zero(); d];
    for s in &f.simplices {
        let ps = pairings(f, s, xi)?;
        let mut term = rat_int(&s.det_abs) / fact.clone();
        for p in &ps {
            term /= p.clone();
        }
        for j in 0..d {
            let mut sum = Rat::zero();
            for (&i, p) in s.dual_rays.iter().zip(&ps) {
                sum += rat_int(&f.rays[i][j]) / p;
            }
            grad[j] -= &term * sum;
        }
    }
    Ok(grad)
}

/// Exact Hessian of `volume` in xi.
pub fn msy_hessian(f: &VolumeFunction, xi: &[Rat]) -> Result<Vec<RatVec>> {
    let d = xi.len();
    let fact = rat_int(&factorial(f.dim));
    let mut hess = vec![vec![Rat::zero(); d]; d];
    for s in &f.simplices {
        let ps = pairings(f, s, xi)?;
        let mut term = rat_int(&s.det_abs) / fact.clone();
        for p in &ps {
            term /= p.clone();
        }
        let sums: RatVec = (0..d)
            .map(|j| {
                s.dual_rays
                    .iter()
                    .zip(&ps)
                    .map(|(&i, p)| rat_int(&f.rays[i][j]) / p)
                    .sum()
            })
            .collect();
        for j in 0..d {
            for k in j..d {
                let mut second: Rat = Rat::zero();
                for (&i, p) in s.dual_rays.iter().zip(&ps) {
                    second += rat_int(&f.rays[i][j]) * rat_int(&f.rays[i][k]) / (p * p);
                }
                let v = &term * (&sums[j] * &sums[k] + second);
                hess[j][k] += v.clone();
                if k != j {
                    hess[k][j] += v;
                }
            }
        }
    }
    Ok(hess)
}

/// Relative n-volume of the slice facet H_rho = {x in Cdual : (x, xi) <= 1,
/// (x, v_rho) = 0}, measured against the rank-(dim-1) lattice M ∩ rho^perp.
/// This equals Vol_n(H_rho) / |v_rho| for the standard inner product.
pub fn facet_relative_volume(cdual: &Cone, xi: &[Rat], rho: usize) -> Result<Rat> {
    let v = &cdual.facet_normals[rho];
    let d = cdual.dim;
    // saturated basis of {m : (m, v) = 0}
    let col = IntMat::from_rows(&v.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>());
    let basis = left_kernel_basis(&col);
    debug_assert_eq!(basis.len(), d - 1);
    // dual rays on the facet, in basis coordinates
    let bt = IntMat::from_rows(&basis).transpose();
    let mut sub_rays: Vec<IntVec> = Vec::new();
    for u in &cdual.rays {
        if !dot(u, v).is_zero() {
            continue;
        }
        let rhs = rvec(u);
        let sol = solve_rational(&bt, &rhs).expect("facet ray lies in the kernel lattice");
        let coords: IntVec = sol
            .x
            .iter()
            .map(|c| {
                debug_assert!(c.denom().is_one(), "saturated basis gives integer coordinates");
                c.numer().clone()
            })
            .collect();
        sub_rays.push(coords);
    }
    if sub_rays.is_empty() {
        return Ok(Rat::zero());
    }
    let sub_cone = make_cone(&sub_rays).map_err(|_| Error::Unbounded)?;
    let sub_vf = msy_triangulate(&sub_cone);
    // level covector in basis coordinates: (x, xi) = sum coords_j (b_j, xi)
    let level: RatVec = basis.iter().map(|b| dot_ri(xi, b)).collect();
    volume(&sub_vf, &level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::dual;

    fn example_cone() -> Cone {
        crate::cones::make_cone(&[ivec(&[1, 0]), ivec(&[-1, 3])]).unwrap()
    }

    fn orthant(n: usize) -> Cone {
        let gens: Vec<IntVec> = (0..n)
            .map(|i| {
                let mut v = vec![Int::zero(); n];
                v[i] = Int::one();
                v
            })
            .collect();
        crate::cones::make_cone(&gens).unwrap()
    }

    fn rv(xs: &[i64]) -> RatVec {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn slice_example_vertices() {
        let cd = dual(&example_cone());
        let s = slice(&cd, &rv(&[1, 1])).unwrap();
        let mut vs = s.vertices.clone();
        vs.sort();
        assert_eq!(
            vs,
            vec![
                vec![rat(0, 1), rat(0, 1)],
                vec![rat(0, 1), rat(1, 1)],
                vec![rat(3, 4), rat(1, 4)],
            ]
        );
        // xi = (0,1): vertices (0,0),(0,1),(3,1)
        let s = slice(&cd, &rv(&[0, 1])).unwrap();
        let mut vs = s.vertices.clone();
        vs.sort();
        assert_eq!(
            vs,
            vec![
                vec![rat(0, 1), rat(0, 1)],
                vec![rat(0, 1), rat(1, 1)],
                vec![rat(3, 1), rat(1, 1)],
            ]
        );
        assert!(matches!(slice(&cd, &rv(&[1, 0])), Err(Error::Unbounded)));
    }

    #[test]
    fn slice_orthant_is_standard_simplex() {
        let c = orthant(3);
        let s = slice(&dual(&c), &rv(&[1, 1, 1])).unwrap();
        assert_eq!(s.vertices.len(), 4);
        for v in &s.vertices[1..] {
            assert_eq!(v.iter().cloned().sum::<Rat>(), Rat::one());
        }
    }

    #[test]
    fn triangulation_cases() {
        // simplicial dual: one simplex with |det| = 3
        let vf = msy_triangulate(&dual(&example_cone()));
        assert_eq!(vf.simplices.len(), 1);
        assert_eq!(vf.simplices[0].det_abs, int(3));
        // cone over the unit square: two unimodular simplices
        let sq = crate::cones::make_cone(&[
            ivec(&[0, 0, 1]),
            ivec(&[1, 0, 1]),
            ivec(&[0, 1, 1]),
            ivec(&[1, 1, 1]),
        ])
        .unwrap();
        let vf = msy_triangulate(&sq);
        assert_eq!(vf.simplices.len(), 2);
        assert!(vf.simplices.iter().all(|s| s.det_abs.is_one()));
        assert_eq!(volume(&vf, &rv(&[0, 0, 1])).unwrap(), rat(1, 3));
    }

    #[test]
    fn volume_examples() {
        let vf = msy_triangulate(&dual(&example_cone()));
        assert_eq!(volume(&vf, &rv(&[1, 1])).unwrap(), rat(3, 8));
        assert_eq!(volume(&vf, &rv(&[0, 1])).unwrap(), rat(3, 2));
        let o = orthant(4);
        let vf = msy_triangulate(&dual(&o));
        assert_eq!(volume(&vf, &rv(&[1, 1, 1, 1])).unwrap(), rat(1, 24));
    }

    #[test]
    fn facet_relative_volumes() {
        let c = example_cone();
        let cd = dual(&c);
        let xi = rv(&[1, 1]);
        let i10 = c.rays.iter().position(|r| r == &ivec(&[1, 0])).unwrap();
        let im13 = c.rays.iter().position(|r| r == &ivec(&[-1, 3])).unwrap();
        assert_eq!(facet_relative_volume(&cd, &xi, i10).unwrap(), rat(1, 1));
        assert_eq!(facet_relative_volume(&cd, &xi, im13).unwrap(), rat(1, 4));
        // orthant: every facet of the standard simplex has w = 1/n!
        let o = orthant(3);
        let od = dual(&o);
        for rho in 0..3 {
            assert_eq!(
                facet_relative_volume(&od, &rv(&[1, 1, 1]), rho).unwrap(),
                rat(1, 2)
            );
        }
    }

    #[test]
    fn gradient_matches_slice_reduction() {
        // on the slice 3x + 2y = 6 of the example cone, F = 3/(2 y (6 - y));
        // the directional derivative along the slice vanishes at (0, 3)
        let vf = msy_triangulate(&dual(&example_cone()));
        let p = vec![rat(0, 1), rat(3, 1)];
        let g = msy_gradient(&vf, &p).unwrap();
        let dir = vec![rat(2, 1), rat(-3, 1)];
        assert_eq!(dot_rr(&g, &dir), rat(0, 1));
        // orthant symmetry: equal gradient components
        let o = orthant(3);
        let g = msy_gradient(&msy_triangulate(&dual(&o)), &rv(&[1, 1, 1])).unwrap();
        assert_eq!(g[0], g[1]);
        assert_eq!(g[1], g[2]);
    }

    #[test]
    fn volume_scaling_law() {
        let vf = msy_triangulate(&dual(&example_cone()));
        let xi = rv(&[1, 1]);
        for t in [rat(1, 2), rat(3, 1), rat(7, 5)] {
            let scaled: RatVec = xi.iter().map(|x| x / &t).collect();
            let lhs = volume(&vf, &scaled).unwrap();
            let mut rhs = volume(&vf, &xi).unwrap();
            for _ in 0..2 {
                rhs *= &t;
            }
            assert_eq!(lhs, rhs);
        }
    }
}
