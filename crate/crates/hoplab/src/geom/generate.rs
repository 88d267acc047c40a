//! Deterministic instance generator.
//!
//! Instances are a pure function of the generator arguments. Lines get
//! pairwise-distinct integer slopes, and every accepted line is checked
//! against all earlier intersection points, so no three lines concur.
//! Points get pairwise-distinct integer x-coordinates (so planar duals
//! stay representable), no three are collinear, non-planted points avoid
//! every line (hence every vertex), and planted points lie on exactly
//! their line at x-coordinates distinct from all intersection
//! x-coordinates.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::instance::{gcd_i64, reduce};
use super::{mix64, GeomError, Hyperplane, Instance, Line2, PointD, Rat, Surfaces, COEFF_BOUND};

const MAX_ROUNDS: u32 = 10_000;

/// Generate a deterministic instance with exactly `planted_count`
/// incidences in general position.
pub fn gen_instance(
    d: usize,
    n_lines: usize,
    m_points: usize,
    planted_count: usize,
    coord_bound: i64,
    seed: u64,
) -> Result<Instance, GeomError> {
    if d < 2 {
        return Err(GeomError::DimensionTooSmall(d));
    }
    if planted_count > n_lines.min(m_points) {
        return Err(GeomError::BadGenArgs(format!(
            "planted_count {} exceeds min(n_lines, m_points) = {}",
            planted_count,
            n_lines.min(m_points)
        )));
    }
    if n_lines > (COEFF_BOUND as usize) {
        return Err(GeomError::BadGenArgs(format!(
            "n_lines {} exceeds the 2^20 distinct-slope budget",
            n_lines
        )));
    }
    if coord_bound < 1 || coord_bound > COEFF_BOUND {
        return Err(GeomError::BadGenArgs(format!(
            "coord_bound {} outside [1, 2^20]",
            coord_bound
        )));
    }

    // Stream key mixes every argument so distinct argument tuples draw
    // from unrelated streams.
    let mut key = seed;
    for v in [d as u64, n_lines as u64, m_points as u64, planted_count as u64, coord_bound as u64]
    {
        key = mix64(key ^ mix64(v.wrapping_add(0x9e3779b97f4a7c15)));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(key);

    if d == 2 {
        gen_planar(n_lines, m_points, planted_count, coord_bound, seed, &mut rng)
    } else {
        gen_highdim(d, n_lines, m_points, planted_count, coord_bound, seed, &mut rng)
    }
}

fn gen_planar(
    n_lines: usize,
    m_points: usize,
    planted_count: usize,
    coord_bound: i64,
    seed: u64,
    rng: &mut ChaCha12Rng,
) -> Result<Instance, GeomError> {
    let slope_bound = (coord_bound.max(2 * n_lines as i64)).min(COEFF_BOUND);
    let intercept_bound = coord_bound;
    let x_bound = coord_bound.max(2 * m_points as i64);

    let mut rounds: u32 = 0;
    let bump = |rounds: &mut u32| -> Result<(), GeomError> {
        *rounds += 1;
        if *rounds > MAX_ROUNDS {
            Err(GeomError::ExhaustedRetries(MAX_ROUNDS))
        } else {
            Ok(())
        }
    };

    // Lines: distinct slopes, no triple concurrence. Vertex coordinates
    // are hashed exactly (canonical fractions), so every true concurrence
    // collides; a hash collision merely forces a spurious resample.
    let mut lines: Vec<Line2> = Vec::with_capacity(n_lines);
    let mut used_slopes: HashSet<i64> = HashSet::with_capacity(n_lines * 2);
    let mut vertex_hashes: HashSet<u64> =
        HashSet::with_capacity(n_lines * n_lines.saturating_sub(1) / 2 + 1);
    let mut integer_vertex_xs: HashSet<i64> = HashSet::new();
    let mut scratch: Vec<(u64, Option<i64>)> = Vec::with_capacity(n_lines);

    while lines.len() < n_lines {
        let a = rng.random_range(-slope_bound..=slope_bound);
        if !used_slopes.insert(a) {
            bump(&mut rounds)?;
            continue;
        }
        let b = rng.random_range(-intercept_bound..=intercept_bound);
        scratch.clear();
        let mut clash = false;
        for l in &lines {
            let (xn, xd) = reduce(b - l.b, l.a - a);
            let (yn, yd) = reduce(l.a * xn + l.b * xd, xd);
            let h = mix64(
                mix64(xn as u64) ^ mix64((xd as u64).rotate_left(17))
                    ^ mix64((yn as u64).rotate_left(31))
                    ^ mix64((yd as u64).rotate_left(47)),
            );
            if vertex_hashes.contains(&h) {
                clash = true;
                break;
            }
            scratch.push((h, (xd == 1).then_some(xn)));
        }
        // Also reject duplicate vertices among the new line's own
        // intersections (a concurrence through the new line).
        if !clash {
            scratch.sort_unstable_by_key(|&(h, _)| h);
            clash = scratch.windows(2).any(|w| w[0].0 == w[1].0);
        }
        if clash {
            used_slopes.remove(&a);
            bump(&mut rounds)?;
            continue;
        }
        for &(h, int_x) in &scratch {
            vertex_hashes.insert(h);
            if let Some(x) = int_x {
                integer_vertex_xs.insert(x);
            }
        }
        lines.push(Line2::new(lines.len() as u32, a, b)?);
    }

    // Planted pairs: distinct lines, assigned to point ids 0..planted.
    let mut planted_lines: Vec<u32> = Vec::with_capacity(planted_count);
    let mut taken: HashSet<u32> = HashSet::new();
    while planted_lines.len() < planted_count {
        let li = rng.random_range(0..n_lines as u32);
        if taken.insert(li) {
            planted_lines.push(li);
        }
    }

    // Points: distinct integer x, no collinear triple, exact incidence
    // control. A point off every line is automatically off every vertex.
    let mut points: Vec<PointD> = Vec::with_capacity(m_points);
    let mut pts_i64: Vec<(i64, i64)> = Vec::with_capacity(m_points);
    let mut used_xs: HashSet<i64> = HashSet::with_capacity(m_points * 2);
    let mut dir_hashes: HashSet<u64> = HashSet::new();

    let collinear_with_earlier = |pts: &[(i64, i64)], cand: (i64, i64), dirs: &mut HashSet<u64>| {
        dirs.clear();
        for &(px, py) in pts {
            let (mut dx, mut dy) = (px - cand.0, py - cand.1);
            let g = gcd_i64(dx.unsigned_abs(), dy.unsigned_abs()) as i64;
            dx /= g;
            dy /= g;
            if dx < 0 || (dx == 0 && dy < 0) {
                dx = -dx;
                dy = -dy;
            }
            if !dirs.insert(mix64(mix64(dx as u64) ^ (dy as u64).rotate_left(23))) {
                return true;
            }
        }
        false
    };

    // Value of the planted load: y ranges near the lines' span.
    let y_bound = slope_bound
        .saturating_mul(x_bound)
        .saturating_add(intercept_bound);

    for pi in 0..m_points {
        let planted_line = planted_lines.get(pi).map(|&li| lines[li as usize]);
        loop {
            let x = rng.random_range(-x_bound..=x_bound);
            if used_xs.contains(&x) {
                bump(&mut rounds)?;
                continue;
            }
            let y = match planted_line {
                Some(l) => {
                    // On the line, at an x no intersection point shares
                    // (only integer vertex x-coordinates can collide with
                    // an integer x).
                    if integer_vertex_xs.contains(&x) {
                        bump(&mut rounds)?;
                        continue;
                    }
                    l.a * x + l.b
                }
                None => rng.random_range(-y_bound..=y_bound),
            };
            let on_other = lines.iter().any(|l| {
                Some(*l) != planted_line && (l.a as i128) * (x as i128) + l.b as i128 == y as i128
            });
            if on_other || collinear_with_earlier(&pts_i64, (x, y), &mut dir_hashes) {
                bump(&mut rounds)?;
                continue;
            }
            used_xs.insert(x);
            pts_i64.push((x, y));
            points.push(PointD::from_ints(&[x, y]));
            break;
        }
    }

    let mut planted: Vec<(u32, u32)> = planted_lines
        .iter()
        .enumerate()
        .map(|(pi, &li)| (li, pi as u32))
        .collect();
    planted.sort_unstable();

    Instance::new(2, seed, Surfaces::Lines(lines), points, planted)
}

#[allow(clippy::too_many_arguments)]
fn gen_highdim(
    d: usize,
    n_planes: usize,
    m_points: usize,
    planted_count: usize,
    coord_bound: i64,
    seed: u64,
    rng: &mut ChaCha12Rng,
) -> Result<Instance, GeomError> {
    let mut rounds: u32 = 0;
    let bump = |rounds: &mut u32| -> Result<(), GeomError> {
        *rounds += 1;
        if *rounds > MAX_ROUNDS {
            Err(GeomError::ExhaustedRetries(MAX_ROUNDS))
        } else {
            Ok(())
        }
    };

    let mut planes: Vec<Hyperplane> = Vec::with_capacity(n_planes);
    let mut seen: HashSet<(Vec<i64>, i64)> = HashSet::new();
    while planes.len() < n_planes {
        let coeffs: Vec<i64> = (0..d)
            .map(|_| rng.random_range(-coord_bound..=coord_bound))
            .collect();
        if coeffs.iter().all(|&c| c == 0) {
            bump(&mut rounds)?;
            continue;
        }
        let offset = rng.random_range(-coord_bound..=coord_bound);
        if !seen.insert((coeffs.clone(), offset)) {
            bump(&mut rounds)?;
            continue;
        }
        planes.push(Hyperplane::new(planes.len() as u32, coeffs, offset)?);
    }

    let mut planted_planes: Vec<u32> = Vec::with_capacity(planted_count);
    let mut taken: HashSet<u32> = HashSet::new();
    while planted_planes.len() < planted_count {
        let hi = rng.random_range(0..n_planes as u32);
        if taken.insert(hi) {
            planted_planes.push(hi);
        }
    }

    let mut points: Vec<PointD> = Vec::with_capacity(m_points);
    let mut point_set: HashSet<Vec<(String, String)>> = HashSet::new();
    for pi in 0..m_points {
        let planted_plane = planted_planes.get(pi).map(|&hi| planes[hi as usize].clone());
        loop {
            let candidate = match &planted_plane {
                Some(h) => {
                    // Solve for the last nonzero-coefficient coordinate.
                    let pivot = h
                        .coeffs
                        .iter()
                        .rposition(|&c| c != 0)
                        .expect("nonzero normal");
                    let mut coords: Vec<Rat> = (0..d)
                        .map(|_| Rat::from_int(rng.random_range(-coord_bound..=coord_bound)))
                        .collect();
                    let mut partial = Rat::zero();
                    for (k, c) in h.coeffs.iter().enumerate() {
                        if k != pivot {
                            partial = &partial + &(&Rat::from_int(*c) * &coords[k]);
                        }
                    }
                    coords[pivot] = (Rat::from_int(h.offset) - partial)
                        / Rat::from_int(h.coeffs[pivot]);
                    PointD::new(coords)
                }
                None => PointD::new(
                    (0..d)
                        .map(|_| Rat::from_int(rng.random_range(-coord_bound..=coord_bound)))
                        .collect(),
                ),
            };
            let on_other = planes
                .iter()
                .any(|h| Some(h) != planted_plane.as_ref() && h.contains(&candidate));
            let key: Vec<(String, String)> = candidate
                .coords()
                .map(|c| (c.numer_string(), c.denom_string()))
                .collect();
            if on_other || point_set.contains(&key) {
                bump(&mut rounds)?;
                continue;
            }
            point_set.insert(key);
            points.push(candidate);
            break;
        }
    }

    let mut planted: Vec<(u32, u32)> = planted_planes
        .iter()
        .enumerate()
        .map(|(pi, &hi)| (hi, pi as u32))
        .collect();
    planted.sort_unstable();

    Instance::new(d, seed, Surfaces::Hyperplanes(planes), points, planted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivers::brute_force;
    use crate::geom::validate_general_position;

    #[test]
    fn planted_instance_has_exactly_one_incidence() {
        let inst = gen_instance(2, 3, 1, 1, 1 << 10, 42).unwrap();
        assert!(validate_general_position(&inst).is_empty());
        let mut count = 0;
        for l in inst.lines() {
            for p in &inst.points {
                if l.contains(p) {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 1);
        assert!(brute_force(&inst).is_some());
    }

    #[test]
    fn empty_instance_has_no_incidence() {
        let inst = gen_instance(2, 3, 5, 0, 1 << 10, 7).unwrap();
        assert!(validate_general_position(&inst).is_empty());
        assert_eq!(brute_force(&inst), None);
    }

    #[test]
    fn deterministic() {
        let a = gen_instance(2, 16, 16, 2, 1 << 10, 99).unwrap();
        let b = gen_instance(2, 16, 16, 2, 1 << 10, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        let c = gen_instance(2, 16, 16, 2, 1 << 10, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn planted_count_respected_across_sizes() {
        for k in 0..=4 {
            let inst = gen_instance(2, 24, 12, k, 1 << 9, 5 + k as u64).unwrap();
            let mut count = 0;
            for l in inst.lines() {
                for p in &inst.points {
                    if l.contains(p) {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, k, "planted_count={k}");
            assert!(validate_general_position(&inst).is_empty());
        }
    }

    #[test]
    fn rejects_bad_args() {
        assert!(gen_instance(2, 2, 2, 3, 1 << 10, 0).is_err());
        assert!(gen_instance(1, 2, 2, 0, 1 << 10, 0).is_err());
        assert!(gen_instance(2, 2, 2, 0, 0, 0).is_err());
    }

    #[test]
    fn highdim_planted() {
        let inst = gen_instance(3, 10, 8, 3, 1 << 8, 13).unwrap();
        assert_eq!(inst.d, 3);
        let planes = match &inst.surfaces {
            crate::geom::Surfaces::Hyperplanes(v) => v,
            _ => unreachable!(),
        };
        let mut count = 0;
        for h in planes {
            for p in &inst.points {
                if h.contains(p) {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 3);
    }
}
