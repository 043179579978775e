//! Planar points on a (possibly toroidal) square window, plus a uniform-grid
//! spatial index for nearest-neighbor and range queries.

/// Point in the simulation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }
}

#[inline]
fn axis_delta(a: f64, b: f64, window: f64, toroidal: bool) -> f64 {
    let d = (a - b).abs();
    if toroidal {
        d.min(window - d)
    } else {
        d
    }
}

/// Squared distance under the window metric.
#[inline]
pub fn dist_sq(a: Vec2, b: Vec2, window: f64, toroidal: bool) -> f64 {
    let dx = axis_delta(a.x, b.x, window, toroidal);
    let dy = axis_delta(a.y, b.y, window, toroidal);
    dx * dx + dy * dy
}

/// Wraps a coordinate into [0, window).
#[inline]
pub fn wrap(x: f64, window: f64) -> f64 {
    let r = x.rem_euclid(window);
    if r == window {
        0.0
    } else {
        r
    }
}

/// Uniform bucket grid over the window. Point sets here are small enough
/// that per-bucket `Vec`s are fine.
pub struct Grid {
    n: usize,
    cell: f64,
    window: f64,
    buckets: Vec<Vec<u32>>,
}

impl Grid {
    pub fn build(points: &[Vec2], window: f64) -> Grid {
        // Aim for a handful of points per bucket.
        let n = ((points.len() as f64 / 2.0).sqrt().floor() as usize).clamp(1, 512);
        let cell = window / n as f64;
        let mut buckets = vec![Vec::new(); n * n];
        for (i, p) in points.iter().enumerate() {
            let ix = ((p.x / cell) as usize).min(n - 1);
            let iy = ((p.y / cell) as usize).min(n - 1);
            buckets[iy * n + ix].push(i as u32);
        }
        Grid { n, cell, window, buckets }
    }

    #[inline]
    fn bucket_of(&self, ix: i64, iy: i64, toroidal: bool) -> Option<usize> {
        let n = self.n as i64;
        if toroidal {
            Some((iy.rem_euclid(n) * n + ix.rem_euclid(n)) as usize)
        } else if ix < 0 || iy < 0 || ix >= n || iy >= n {
            None
        } else {
            Some((iy * n + ix) as usize)
        }
    }

    /// Index and squared distance of the nearest point, scanning outward in
    /// cell rings until no closer point can exist.
    pub fn nearest(&self, from: Vec2, points: &[Vec2], toroidal: bool) -> Option<(u32, f64)> {
        if points.is_empty() {
            return None;
        }
        let n = self.n as i64;
        let cx = ((from.x / self.cell) as i64).clamp(0, n - 1);
        let cy = ((from.y / self.cell) as i64).clamp(0, n - 1);
        let mut best: Option<(u32, f64)> = None;
        let max_ring = if toroidal { (self.n / 2 + 1) as i64 } else { n };
        for ring in 0..=max_ring {
            // Any point in a ring at Chebyshev cell-distance `ring` is at
            // least (ring-1) cells away in metric distance.
            if let Some((_, bd)) = best {
                let reach = (ring - 1).max(0) as f64 * self.cell;
                if bd <= reach * reach {
                    break;
                }
            }
            let mut visit = |ix: i64, iy: i64| {
                if let Some(b) = self.bucket_of(ix, iy, toroidal) {
                    for &idx in &self.buckets[b] {
                        let d = dist_sq(from, points[idx as usize], self.window, toroidal);
                        if best.map_or(true, |(_, bd)| d < bd) {
                            best = Some((idx, d));
                        }
                    }
                }
            };
            if ring == 0 {
                visit(cx, cy);
            } else if 2 * ring >= n {
                // The ring wraps over the whole torus; scan everything left.
                for iy in 0..n {
                    for ix in 0..n {
                        visit(ix, iy);
                    }
                }
                break;
            } else {
                for ix in (cx - ring)..=(cx + ring) {
                    visit(ix, cy - ring);
                    visit(ix, cy + ring);
                }
                for iy in (cy - ring + 1)..(cy + ring) {
                    visit(cx - ring, iy);
                    visit(cx + ring, iy);
                }
            }
        }
        best
    }

    /// Calls `f(index, dist_sq)` for every point within `radius` of `center`.
    pub fn for_each_within<F: FnMut(u32, f64)>(
        &self,
        center: Vec2,
        radius: f64,
        points: &[Vec2],
        toroidal: bool,
        mut f: F,
    ) {
        if points.is_empty() || radius <= 0.0 {
            return;
        }
        let n = self.n as i64;
        let r2 = radius * radius;
        let span = (radius / self.cell).ceil() as i64 + 1;
        let cx = ((center.x / self.cell) as i64).clamp(0, n - 1);
        let cy = ((center.y / self.cell) as i64).clamp(0, n - 1);
        let (x0, x1, y0, y1) = if 2 * span + 1 >= n {
            (0, n - 1, 0, n - 1)
        } else {
            (cx - span, cx + span, cy - span, cy + span)
        };
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                if let Some(b) = self.bucket_of(ix, iy, toroidal) {
                    for &idx in &self.buckets[b] {
                        let d = dist_sq(center, points[idx as usize], self.window, toroidal);
                        if d <= r2 {
                            f(idx, d);
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_nearest(from: Vec2, pts: &[Vec2], w: f64, t: bool) -> Option<(u32, f64)> {
        pts.iter()
            .enumerate()
            .map(|(i, p)| (i as u32, dist_sq(from, *p, w, t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    #[test]
    fn toroidal_distance_wraps() {
        let w = 100.0;
        let a = Vec2::new(1.0, 1.0);
        let b = Vec2::new(99.0, 99.0);
        assert!((dist_sq(a, b, w, true) - 8.0).abs() < 1e-12);
        assert!((dist_sq(a, b, w, false) - 2.0 * 98.0 * 98.0).abs() < 1e-9);
    }

    #[test]
    fn grid_nearest_matches_brute_force() {
        let w = 1000.0;
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / 9007199254740992.0
        };
        for &toroidal in &[true, false] {
            for &count in &[1usize, 7, 100, 900] {
                let pts: Vec<Vec2> =
                    (0..count).map(|_| Vec2::new(next() * w, next() * w)).collect();
                let grid = Grid::build(&pts, w);
                for _ in 0..50 {
                    let q = Vec2::new(next() * w, next() * w);
                    let got = grid.nearest(q, &pts, toroidal).unwrap();
                    let want = brute_nearest(q, &pts, w, toroidal).unwrap();
                    assert!(
                        (got.1 - want.1).abs() < 1e-9,
                        "toroidal={toroidal} count={count}: {got:?} vs {want:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn grid_range_query_matches_brute_force() {
        let w = 500.0;
        let mut state = 999u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / 9007199254740992.0
        };
        let pts: Vec<Vec2> = (0..400).map(|_| Vec2::new(next() * w, next() * w)).collect();
        let grid = Grid::build(&pts, w);
        for &toroidal in &[true, false] {
            for &radius in &[5.0, 60.0, 400.0] {
                let q = Vec2::new(next() * w, next() * w);
                let mut got = Vec::new();
                grid.for_each_within(q, radius, &pts, toroidal, |i, _| got.push(i));
                got.sort_unstable();
                let mut want: Vec<u32> = pts
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| dist_sq(q, **p, w, toroidal) <= radius * radius)
                    .map(|(i, _)| i as u32)
                    .collect();
                want.sort_unstable();
                assert_eq!(got, want, "toroidal={toroidal} radius={radius}");
            }
        }
    }
}
