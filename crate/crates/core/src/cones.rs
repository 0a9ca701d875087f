//! Rational cone geometry: construction by double description, duality,
//! the face lattice, and Gorenstein certification.

use crate::error::{Error, Result};
use crate::ratmath::*;
use num::{Integer, One, Signed, Zero};

/// A pointed, full-dimensional rational cone, stored by its primitive extreme
/// rays together with the primitive facet normals of the dual description.
/// Both lists are sorted lexicographically, so equal cones compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub dim: usize,
    pub rays: Vec<IntVec>,
    pub facet_normals: Vec<IntVec>,
}

impl Cone {
    /// Membership test against the facet description.
    pub fn contains(&self, x: &[Int]) -> bool {
        self.facet_normals.iter().all(|u| !dot(u, x).is_negative())
    }

    /// Strict interior test.
    pub fn interior_contains(&self, x: &[Int]) -> bool {
        self.facet_normals.iter().all(|u| dot(u, x).is_positive())
    }

    pub fn interior_contains_rat(&self, x: &[Rat]) -> bool {
        self.facet_normals
            .iter()
            .all(|u| dot_ri(x, u).is_positive())
    }
}

/// The dual cone: rays and facet normals trade places.
pub fn dual(c: &Cone) -> Cone {
    Cone {
        dim: c.dim,
        rays: c.facet_normals.clone(),
        facet_normals: c.rays.clone(),
    }
}

/// Extreme rays of {y : c·y >= 0 for all constraints}, by incremental double
/// description over exact integers. The constraints are assumed to span; the
/// result spans only if that intersection is full-dimensional.
fn dd_extreme_rays(constraints: &[IntVec], dim: usize) -> Vec<IntVec> {
    let mut cons: Vec<IntVec> = constraints.iter().map(|c| primitive(c)).collect();
    cons.sort();
    cons.dedup();

    // initial simplicial cone from a maximal independent subset
    let mut basis_idx: Vec<usize> = Vec::new();
    {
        let mut rows: Vec<RatVec> = Vec::new();
        for (i, c) in cons.iter().enumerate() {
            let mut cand = rows.clone();
            cand.push(rvec(c));
            if rank_of(&mut cand, dim) > rows.len() {
                rows.push(rvec(c));
                basis_idx.push(i);
                if basis_idx.len() == dim {
                    break;
                }
            }
        }
    }
    assert_eq!(basis_idx.len(), dim, "constraints do not span");

    let a_init = IntMat::from_rows(&basis_idx.iter().map(|&i| cons[i].clone()).collect::<Vec<_>>());
    let mut rays: Vec<IntVec> = Vec::new();
    for i in 0..dim {
        let mut e = vec![Rat::zero(); dim];
        e[i] = Rat::one();
        let sol = solve_rational(&a_init, &e).expect("independent rows are solvable");
        rays.push(primitive_from_rat(&sol.x));
    }

    let mut processed: Vec<usize> = basis_idx.clone();
    for idx in 0..cons.len() {
        if basis_idx.contains(&idx) {
            continue;
        }
        let c = &cons[idx];
        let vals: Vec<Int> = rays.iter().map(|r| dot(c, r)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if minus.is_empty() {
            processed.push(idx);
            continue;
        }
        let zeros: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .copied()
                    .filter(|&t| dot(&cons[t], r).is_zero())
                    .collect()
            })
            .collect();
        let mut new_rays: Vec<IntVec> = Vec::new();
        for &p in &plus {
            for &m in &minus {
                let common: Vec<usize> = zeros[p]
                    .iter()
                    .copied()
                    .filter(|t| zeros[m].contains(t))
                    .collect();
                // combinatorial adjacency: no third ray's zero set contains the
                // common zero set of the pair
                let adjacent = (0..rays.len()).all(|r3| {
                    r3 == p || r3 == m || !common.iter().all(|t| zeros[r3].contains(t))
                });
                if !adjacent {
                    continue;
                }
                let w: IntVec = (0..dim)
                    .map(|j| &vals[p] * &rays[m][j] - &vals[m] * &rays[p][j])
                    .collect();
                let w = primitive(&w);
                if w.iter().any(|x| !x.is_zero()) {
                    new_rays.push(w);
                }
            }
        }
        let mut next: Vec<IntVec> = Vec::new();
        for i in 0..rays.len() {
            if !vals[i].is_negative() {
                next.push(rays[i].clone());
            }
        }
        next.extend(new_rays);
        next.sort();
        next.dedup();
        rays = next;
        processed.push(idx);
    }
    rays.sort();
    rays
}

fn rank_of(rows: &mut Vec<RatVec>, cols: usize) -> usize {
    let mut r = 0;
    for j in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][j].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][j].clone();
        for i in 0..rows.len() {
            if i == r || rows[i][j].is_zero() {
                continue;
            }
            let f = &rows[i][j] / &pivot;
            for t in j..cols {
                let sub = &f * &rows[r][t];
                rows[i][t] -= sub;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

fn rank_vectors(vs: &[IntVec], dim: usize) -> usize {
    let mut rows: Vec<RatVec> = vs.iter().map(|v| rvec(v)).collect();
    rank_of(&mut rows, dim)
}

/// Build a cone from generators: redundant generators are dropped, rays are
/// reduced to primitive extreme rays, and facet normals are computed exactly.
pub fn make_cone(generators: &[IntVec]) -> Result<Cone> {
    assert!(!generators.is_empty(), "empty generator list");
    let dim = generators[0].len();
    assert!(
        generators.iter().all(|g| g.len() == dim),
        "generators of mixed dimension"
    );
    if rank_vectors(generators, dim) < dim {
        return Err(Error::NotFullDim);
    }
    let normals = dd_extreme_rays(generators, dim);
    if rank_vectors(&normals, dim) < dim {
        return Err(Error::NotPointed);
    }
    let rays = dd_extreme_rays(&normals, dim);
    Ok(Cone {
        dim,
        rays,
        facet_normals: normals,
    })
}

/// A face of the cone: the extreme rays it contains and the facet normals
/// active (vanishing) on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub rays: Vec<usize>,
    pub normals: Vec<usize>,
}

/// Every face of the cone, apex and the cone itself included, ordered by
/// dimension then lexicographically by ray index set.
pub fn all_faces(c: &Cone) -> Vec<Face> {
    use std::collections::BTreeSet;
    let facet_raysets: Vec<BTreeSet<usize>> = c
        .facet_normals
        .iter()
        .map(|u| {
            (0..c.rays.len())
                .filter(|&i| dot(u, &c.rays[i]).is_zero())
                .collect()
        })
        .collect();
    let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    sets.insert((0..c.rays.len()).collect()); // the cone itself
    for f in &facet_raysets {
        sets.insert(f.clone());
    }
    // close under pairwise intersection
    loop {
        let mut added = false;
        let list: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
        for a in &list {
            for b in &list {
                let i: BTreeSet<usize> = a.intersection(b).copied().collect();
                if !sets.contains(&i) {
                    sets.insert(i);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let mut out: Vec<Face> = sets
        .into_iter()
        .map(|rayset| {
            let rays: Vec<usize> = rayset.iter().copied().collect();
            let vecs: Vec<IntVec> = rays.iter().map(|&i| c.rays[i].clone()).collect();
            let dim = if rays.is_empty() {
                0
            } else {
                rank_vectors(&vecs, c.dim)
            };
            let normals: Vec<usize> = (0..c.facet_normals.len())
                .filter(|&j| rays.iter().all(|&i| facet_raysets[j].contains(&i)))
                .collect();
            Face { dim, rays, normals }
        })
        .collect();
    out.sort_by(|a, b| (a.dim, &a.rays).cmp(&(b.dim, &b.rays)));
    out
}

/// Faces of one dimension.
pub fn faces(c: &Cone, d: usize) -> Vec<Face> {
    assert!(d <= c.dim, "face dimension out of range");
    all_faces(c).into_iter().filter(|f| f.dim == d).collect()
}

/// The Gorenstein certificate: lambda pairs to -l with every ray, l minimal
/// positive; `smooth` records whether every proper facet's rays extend to a
/// lattice basis (checked via Smith normal form), with one offending facet
/// kept for reporting.
#[derive(Clone, Debug)]
pub struct GorensteinData {
    pub lambda: IntVec,
    pub l: Int,
    pub smooth: bool,
    pub offending_facet: Option<Vec<usize>>,
}

pub fn gorenstein_check(c: &Cone) -> Result<GorensteinData> {
    let rays = IntMat::from_rows(&c.rays);
    let b: RatVec = vec![-Rat::one(); c.rays.len()];
    let Some(sol) = solve_rational(&rays, &b) else {
        return Err(Error::NotGorenstein);
    };
    debug_assert!(sol.unique, "full-dimensional ray matrix has full column rank");
    let mut l = Int::one();
    for x in &sol.x {
        l = l.lcm(x.denom());
    }
    let lambda: IntVec = sol
        .x
        .iter()
        .map(|x| {
            let v = x * rat_int(&l);
            debug_assert!(v.denom().is_one());
            v.numer().clone()
        })
        .collect();
    let mut smooth = true;
    let mut offending = None;
    for f in faces(c, c.dim - 1) {
        let mat = IntMat::from_rows(&f.rays.iter().map(|&i| c.rays[i].clone()).collect::<Vec<_>>());
        let (s, _, _) = snf(&mat);
        let ok = f.rays.len() == c.dim - 1
            && (0..s.rows.min(s.cols)).all(|i| s.at(i, i).is_one());
        if !ok {
            smooth = false;
            offending = Some(f.rays.clone());
            break;
        }
    }
    Ok(GorensteinData {
        lambda,
        l,
        smooth,
        offending_facet: offending,
    })
}

/// The ratio q defined by (lambda, xi) = -q l for interior xi.
pub fn q_ratio(c: &Cone, g: &GorensteinData, xi: &[Int]) -> Result<Rat> {
    if !c.interior_contains(xi) {
        return Err(Error::NotInterior);
    }
    Ok(Rat::new(-dot(&g.lambda, xi), g.l.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn cone2(r1: &[i64], r2: &[i64]) -> Cone {
        make_cone(&[ivec(r1), ivec(r2)]).unwrap()
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

    #[test]
    fn example_cone_dual_data() {
        let c = cone2(&[1, 0], &[-1, 3]);
        assert_eq!(c.rays, vec![ivec(&[-1, 3]), ivec(&[1, 0])]);
        let mut normals = c.facet_normals.clone();
        normals.sort();
        assert_eq!(normals, vec![ivec(&[0, 1]), ivec(&[3, 1])]);
    }

    #[test]
    fn orthant_self_dual() {
        let c = orthant(3);
        assert_eq!(c.rays, c.facet_normals);
        assert_eq!(dual(&c), c);
    }

    #[test]
    fn non_extreme_generator_removed() {
        let c = make_cone(&[ivec(&[1, 0]), ivec(&[1, 2]), ivec(&[1, 1])]).unwrap();
        assert_eq!(c.rays, vec![ivec(&[1, 0]), ivec(&[1, 2])]);
    }

    #[test]
    fn biduality() {
        for c in [
            cone2(&[1, 0], &[-1, 3]),
            orthant(2),
            orthant(4),
            make_cone(&[ivec(&[0, 0, 1]), ivec(&[1, 0, 1]), ivec(&[0, 1, 1]), ivec(&[1, 1, 1])])
                .unwrap(),
        ] {
            assert_eq!(dual(&dual(&c)), c);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            make_cone(&[ivec(&[1, 0]), ivec(&[2, 0])]),
            Err(Error::NotFullDim)
        ));
        assert!(matches!(
            make_cone(&[ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1])]),
            Err(Error::NotPointed)
        ));
    }

    #[test]
    fn face_counts() {
        let c = cone2(&[1, 0], &[-1, 3]);
        assert_eq!(faces(&c, 1).len(), 2);
        let o3 = orthant(3);
        assert_eq!(faces(&o3, 2).len(), 3);
        assert_eq!(faces(&o3, 1).len(), 3);
        let apex = faces(&o3, 0);
        assert_eq!(apex.len(), 1);
        assert!(apex[0].rays.is_empty());
        // cone over the unit square: 4 facets, 4 edges
        let sq = make_cone(&[
            ivec(&[0, 0, 1]),
            ivec(&[1, 0, 1]),
            ivec(&[0, 1, 1]),
            ivec(&[1, 1, 1]),
        ])
        .unwrap();
        assert_eq!(faces(&sq, 2).len(), 4);
        assert_eq!(faces(&sq, 1).len(), 4);
    }

    #[test]
    fn gorenstein_example() {
        let c = cone2(&[1, 0], &[-1, 3]);
        let g = gorenstein_check(&c).unwrap();
        assert_eq!(g.lambda, ivec(&[-3, -2]));
        assert_eq!(g.l, int(3));
        assert!(g.smooth);
        for r in &c.rays {
            assert_eq!(dot(&g.lambda, r), -g.l.clone());
        }
        assert_eq!(q_ratio(&c, &g, &ivec(&[1, 1])).unwrap(), rat(5, 3));
        assert_eq!(q_ratio(&c, &g, &ivec(&[0, 1])).unwrap(), rat(2, 3));
        assert!(matches!(
            q_ratio(&c, &g, &ivec(&[1, 0])),
            Err(Error::NotInterior)
        ));
    }

    #[test]
    fn gorenstein_orthant() {
        for n in 2..=4 {
            let c = orthant(n);
            let g = gorenstein_check(&c).unwrap();
            assert_eq!(g.lambda, vec![int(-1); n]);
            assert_eq!(g.l, int(1));
            assert!(g.smooth);
            let xi: IntVec = vec![Int::one(); n];
            assert_eq!(q_ratio(&c, &g, &xi).unwrap(), rat(n as i64, 1));
        }
    }

    #[test]
    fn gorenstein_skew() {
        let c = cone2(&[1, 0], &[1, 2]);
        let g = gorenstein_check(&c).unwrap();
        assert_eq!(g.lambda, ivec(&[-1, 0]));
        assert_eq!(g.l, int(1));
        assert!(g.smooth);
    }

    #[test]
    fn non_smooth_facet_detected() {
        // facet {(1,0,0),(-1,3,0)} spans an index-3 lattice in its plane
        let c = make_cone(&[ivec(&[1, 0, 0]), ivec(&[-1, 3, 0]), ivec(&[0, 0, 1])]).unwrap();
        let g = gorenstein_check(&c).unwrap();
        assert!(!g.smooth);
        assert!(g.offending_facet.is_some());
    }
}
