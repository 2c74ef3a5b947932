//! Test-only helpers: a seeded synthetic world and an unindexed
//! winding-number containment oracle that shares no code with the crate's
//! even-odd implementation.

#![allow(dead_code)]

use std::path::PathBuf;

use geoscale::geoassign::{Coord, Polygon, Region, RegionSet, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(path)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Ring {
    vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]
}

fn star(cx: f64, cy: f64, r_min: f64, r_max: f64, n: usize, rng: &mut ChaCha8Rng) -> Ring {
    let mut ring: Ring = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + rng.gen_range(0.0..0.6)) / n as f64;
            let r = rng.gen_range(r_min..r_max);
            [cx + r * angle.cos(), cy + r * angle.sin()]
        })
        .collect();
    ring.push(ring[0]);
    ring
}

pub struct World {
    pub regions: RegionSet,
    /// Points whose answer hinges on boundary, hole or overlap handling.
    pub adversarial: Vec<Coord>,
    pub lon_range: (f64, f64),
    pub lat_range: (f64, f64),
}

/// A 12 x 10 grid of 10-degree cells, one region per cell, cycling through
/// plain squares (which share borders with each other), non-convex stars,
/// squares with holes, and two-part multipolygons. Two extra regions
/// overlap the grid to exercise the smallest-id tie rule.
pub fn synthetic_world(seed: u64) -> World {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nx, ny, cell) = (12usize, 10usize, 10.0);
    let (x_origin, y_origin) = (-60.0, -50.0);
    let mut regions = Vec::new();
    let mut adversarial = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let x0 = x_origin + cell * i as f64;
            let y0 = y_origin + cell * j as f64;
            let (cx, cy) = (x0 + cell / 2.0, y0 + cell / 2.0);
            // ids deliberately out of spatial order
            let id = format!("R{:03}", (i * 37 + j * 11) % 1000);
            let kind = (i + j) % 4;
            let polygons = match kind {
                0 => {
                    adversarial.extend([[x0, cy], [cx, y0], [x0, y0], [x0 + cell, y0 + cell], [cx, cy]]);
                    vec![Polygon::new(rect(x0, y0, x0 + cell, y0 + cell), vec![])]
                }
                1 => {
                    let ring = star(cx, cy, 2.0, 4.9, 16, &mut rng);
                    adversarial.extend(ring.iter().copied());
                    adversarial.push([cx, cy]);
                    vec![Polygon::new(ring, vec![])]
                }
                2 => {
                    let hole = rect(cx - 2.0, cy - 2.0, cx + 2.0, cy + 2.0);
                    adversarial.extend([[cx, cy], [cx - 2.0, cy], [cx + 2.0, cy + 2.0], [cx, cy - 2.0], [cx + 2.5, cy]]);
                    adversarial.extend([[x0 + 1.0, y0 + 1.0], [x0 + 1.0, cy], [x0 + 9.0, y0 + 9.0]]);
                    vec![Polygon::new(rect(x0 + 1.0, y0 + 1.0, x0 + 9.0, y0 + 9.0), vec![hole])]
                }
                _ => {
                    let left = star(x0 + 2.5, cy, 1.0, 2.2, 9, &mut rng);
                    let right_outer = rect(x0 + 5.5, y0 + 1.0, x0 + 9.5, y0 + 9.0);
                    let right_hole = star(x0 + 7.5, cy, 0.5, 1.5, 7, &mut rng);
                    adversarial.extend(left.iter().copied());
                    adversarial.extend(right_hole.iter().copied());
                    adversarial.extend([[x0 + 7.5, cy], [x0 + 5.5, cy], [x0 + 4.5, cy]]);
                    vec![Polygon::new(left, vec![]), Polygon::new(right_outer, vec![right_hole])]
                }
            };
            regions.push(Region { region_id: id.clone(), name: id.clone(), country_id: id, polygons, population: Some(1.0e6) });
        }
    }
    // overlapping regions spanning several cells
    let overlap_a = Polygon::new(vec![[-20.0, -5.0], [5.0, -30.0], [30.0, -5.0], [5.0, 20.0], [-20.0, -5.0]], vec![]);
    let overlap_z = Polygon::new(rect(-45.0, 15.0, -5.0, 35.0), vec![rect(-30.0, 20.0, -20.0, 30.0)]);
    adversarial.extend([[5.0, -5.0], [-20.0, -5.0], [-25.0, 25.0], [-30.0, 25.0], [-45.0, 15.0], [-5.0, 35.0]]);
    regions.push(Region {
        region_id: "AAA".into(),
        name: "overlap".into(),
        country_id: "AAA".into(),
        polygons: vec![overlap_a],
        population: Some(5.0e7),
    });
    regions.push(Region {
        region_id: "zzz".into(),
        name: "overlap".into(),
        country_id: "zzz".into(),
        polygons: vec![overlap_z],
        population: Some(2.0e7),
    });
    // ocean
    adversarial.extend([[-70.0, 0.0], [179.9, 89.9], [-180.0, -90.0]]);

    World {
        regions: RegionSet::new(regions).expect("synthetic world is valid"),
        adversarial,
        lon_range: (-70.0, 70.0),
        lat_range: (-60.0, 60.0),
    }
}

pub fn random_points(n: usize, world: &World, seed: u64) -> Vec<Coord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| [rng.gen_range(world.lon_range.0..world.lon_range.1), rng.gen_range(world.lat_range.0..world.lat_range.1)])
        .collect()
}

fn on_segment_oracle(a: Coord, b: Coord, p: Coord) -> bool {
    let (ux, uy) = (b[0] - a[0], b[1] - a[1]);
    let (vx, vy) = (p[0] - a[0], p[1] - a[1]);
    let dot = ux * vx + uy * vy;
    ux * vy - uy * vx == 0.0 && dot >= 0.0 && dot <= ux * ux + uy * uy
}

fn winding_number(ring: &Ring, p: Coord) -> i32 {
    let is_left = |a: Coord, b: Coord| (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
    let mut wn = 0;
    for e in ring.windows(2) {
        let (a, b) = (e[0], e[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && is_left(a, b) > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && is_left(a, b) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn ring_boundary(ring: &Ring, p: Coord) -> bool {
    ring.windows(2).any(|e| on_segment_oracle(e[0], e[1], p))
}

pub fn oracle_polygon_contains(poly: &Polygon, p: Coord) -> bool {
    let in_exterior = ring_boundary(&poly.exterior, p) || winding_number(&poly.exterior, p) != 0;
    in_exterior && poly.holes.iter().all(|h| ring_boundary(h, p) || winding_number(h, p) == 0)
}

/// Exhaustive scan over every region; smallest id among the containing ones.
pub fn oracle_assign(regions: &[Region], p: Coord) -> Option<String> {
    regions.iter().filter(|r| r.polygons.iter().any(|poly| oracle_polygon_contains(poly, p))).map(|r| r.region_id.clone()).min()
}
