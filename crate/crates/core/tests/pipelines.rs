//! Cross-checks between independent routes through the pipeline.

mod common;

use std::collections::BTreeSet;

use common::{corpus, flag_map, gram_map, random_basic_cone, random_gram, rng};
use num::{BigInt, One, Zero};
use rand::RngExt;
use sumint::complement::{pn_fan, pn_rays, ComplementMap};
use sumint::exact::{IntVec, Rational};
use sumint::geometry::{subdivide_to_basic, Cone};
use sumint::interpolator::{mu_basic, mu_basic_with, mu_explicit, mu_table, RelationSource};
use sumint::series::LaurentSeries;
use sumint::valuations::{
    count_via_local_formula, edge_directions, s_series, verify_interpolator, Direction,
};

fn maps(n: usize) -> Vec<ComplementMap> {
    vec![
        ComplementMap::standard_inner_product(n),
        gram_map(n),
        flag_map(n),
    ]
}

/// Basic children of the corpus's non-basic normal cones, per dimension.
fn subdivision_children() -> Vec<(usize, Vec<Cone>)> {
    let mut by_dim: Vec<BTreeSet<Vec<IntVec>>> = vec![BTreeSet::new(); 3];
    for (_, p) in corpus() {
        for f in p.faces() {
            let c = p.normal_cone(f);
            if c.is_zero() || c.is_basic() {
                continue;
            }
            for child in subdivide_to_basic(&c).unwrap().children {
                by_dim[p.ambient() - 1].insert(child.generators().to_vec());
            }
        }
    }
    by_dim
        .into_iter()
        .enumerate()
        .map(|(i, set)| {
            let n = i + 1;
            let cones = set.into_iter().map(|g| Cone::new(g, n).unwrap()).collect();
            (n, cones)
        })
        .collect()
}

#[test]
fn explicit_matches_reduction_on_sampled_subdivision_children() {
    let order = 4;
    let mut checked = 0;
    for (n, cones) in subdivision_children() {
        let stride = if n == 3 { 9 } else { 1 };
        for map in maps(n) {
            for cone in cones.iter().step_by(stride) {
                if !map.is_generic(cone).unwrap() {
                    continue;
                }
                let a = mu_basic(&map, cone, order).unwrap();
                let b = mu_explicit(&map, cone, order).unwrap();
                assert_eq!(
                    a.series,
                    b.series,
                    "{:?} under {}",
                    cone.generators(),
                    map.id()
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 50, "only {checked} cones checked");
}

#[test]
fn raising_the_degree_cap_leaves_mu_unchanged() {
    let order = 5;
    let mut r = rng(3);
    let mut cones: Vec<Cone> = Vec::new();
    for n in 1..=3 {
        for _ in 0..4 {
            cones.push(random_basic_cone(&mut r, n, 3));
        }
    }
    cones.push(Cone::new(vec![vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap());
    for cone in &cones {
        let n = cone.ambient();
        let k = cone.num_rays() as u32;
        for map in maps(n) {
            if !map.is_generic(cone).unwrap() {
                continue;
            }
            let base = mu_basic(&map, cone, order).unwrap();
            let raised = mu_basic_with(
                &map,
                cone,
                order,
                RelationSource::FaceLevel,
                Some(k + order + 2),
            )
            .unwrap();
            assert_eq!(base.series, raised.series, "{:?}", cone.generators());
        }
    }
}

#[test]
fn ray_level_relations_agree_with_face_level() {
    let order = 4;
    let mut r = rng(5);
    let mut checked = 0;
    for n in 1..=3 {
        for _ in 0..6 {
            let cone = random_basic_cone(&mut r, n, 3);
            let map = random_gram(&mut r, n);
            // faces too, so lower-dimensional cones are exercised
            for s in cone.faces().unwrap() {
                let face = cone.face_cone(&s);
                if face.is_zero() || !map.is_generic(&face).unwrap() {
                    continue;
                }
                let a = mu_basic_with(&map, &face, order, RelationSource::FaceLevel, None).unwrap();
                let b = mu_basic_with(&map, &face, order, RelationSource::RayLevel, None).unwrap();
                assert_eq!(a.series, b.series);
                checked += 1;
            }
        }
    }
    for n in 2..=3 {
        let map = ComplementMap::diaconis_fulton(n);
        let rays = pn_rays(n);
        for sigma in pn_fan(n) {
            let cone = Cone::new(sigma.iter().map(|&i| rays[i].clone()).collect(), n).unwrap();
            let a = mu_basic_with(&map, &cone, order, RelationSource::FaceLevel, None).unwrap();
            let b = mu_basic_with(&map, &cone, order, RelationSource::RayLevel, None).unwrap();
            assert_eq!(a.series, b.series);
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn ray_level_relations_are_refused_for_flags() {
    let map = flag_map(2);
    let cone = Cone::new(vec![vec![1, 0], vec![0, 1]], 2).unwrap();
    assert!(mu_basic_with(&map, &cone, 2, RelationSource::RayLevel, None).is_err());
}

fn exp_series(c: &Rational, order: i64) -> LaurentSeries {
    let mut coeffs = Vec::new();
    let mut term = Rational::one();
    for k in 0..=order {
        coeffs.push(term.clone());
        term = term * c / Rational::from_integer(BigInt::from(k + 1));
    }
    LaurentSeries::from_power_series(coeffs, order)
}

#[test]
fn translation_keeps_mu_and_shifts_the_lattice_sum() {
    let order = 4;
    for (name, p) in corpus().into_iter().step_by(3) {
        let n = p.ambient();
        let v: IntVec = (0..n as i64).map(|i| 2 * i - 3).collect();
        let q = p.translate(&v);
        let map = gram_map(n);
        let tp = mu_table(&p, &map, order, false).unwrap();
        let tq = mu_table(&q, &map, order, false).unwrap();
        assert_eq!(tp, tq, "{name}");

        let dir = Direction::sample(n, 21, &edge_directions(&p)).unwrap();
        let sp = s_series(&p, &dir, order as i64).unwrap();
        let sq = s_series(&q, &dir, order as i64).unwrap();
        // each point pairs to -<y0, x>, so the shift contributes exp(-t <y0, v>)
        let shift = exp_series(&-dir.pair(&v), order as i64);
        assert_eq!(sq, sp.mul(&shift), "{name}");

        assert!(verify_interpolator(&q, &map, &dir, order, None, &name)
            .unwrap()
            .pass());
    }
}

#[test]
fn local_count_matches_enumeration_under_every_map() {
    for (name, p) in corpus() {
        let expected = Rational::from_integer(BigInt::from(p.lattice_points().unwrap().len()));
        for map in maps(p.ambient()) {
            let got = count_via_local_formula(&p, &map).unwrap();
            assert_eq!(got.count, expected, "{name} under {}", map.id());
        }
    }
}

#[test]
fn subdivisions_cover_their_parent() {
    let mut r = rng(9);
    for (name, p) in corpus() {
        let n = p.ambient();
        for f in p.faces() {
            let c = p.normal_cone(f);
            if c.is_zero() || c.is_basic() {
                continue;
            }
            let sub = subdivide_to_basic(&c).unwrap();
            for child in &sub.children {
                assert!(child.is_basic());
                assert_eq!(child.dim(), c.dim());
                for g in child.generators() {
                    let x: Vec<Rational> = g
                        .iter()
                        .map(|&a| Rational::from_integer(a.into()))
                        .collect();
                    assert!(c.contains(&x).unwrap(), "{name}: child ray outside parent");
                }
            }
            // interiors are disjoint: a child's barycenter lies in no other child
            for (i, a) in sub.children.iter().enumerate() {
                let mut centre = vec![Rational::zero(); n];
                for g in a.generators() {
                    for (ci, &gi) in centre.iter_mut().zip(g) {
                        *ci += Rational::from_integer(gi.into());
                    }
                }
                for (j, b) in sub.children.iter().enumerate() {
                    if i != j {
                        assert!(!b.contains(&centre).unwrap(), "{name}: children overlap");
                    }
                }
            }
            // random interior combinations of the parent rays land in a child
            for _ in 0..10 {
                let mut x = vec![Rational::zero(); n];
                for g in c.generators() {
                    let w = Rational::new(
                        BigInt::from(r.random_range(1..=50)),
                        BigInt::from(r.random_range(1..=7)),
                    );
                    for (xi, &gi) in x.iter_mut().zip(g) {
                        *xi += &w * BigInt::from(gi);
                    }
                }
                let hits = sub
                    .children
                    .iter()
                    .filter(|ch| ch.contains(&x).unwrap())
                    .count();
                assert!(hits >= 1, "{name}: point not covered");
            }
        }
    }
}
