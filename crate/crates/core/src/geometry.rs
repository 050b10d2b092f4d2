//! Small planar/3D geometry helpers used by the arena.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn planar(self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn planar_distance(self, o: Vec3) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Upright collision cylinder standing on `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub base: Vec3,
    pub radius: f64,
    pub height: f64,
}

impl Cylinder {
    pub fn contains(&self, p: Vec3) -> bool {
        p.planar_distance(self.base) <= self.radius && p.z >= self.base.z && p.z <= self.base.z + self.height
    }

    pub fn centre(&self) -> Vec3 {
        Vec3::new(self.base.x, self.base.y, self.base.z + self.height / 2.0)
    }
}

/// First parameter `t` in `[t_min, t_max]` at which `origin + t·dir` is inside the cylinder.
pub fn ray_cylinder(origin: Vec3, dir: Vec3, cyl: &Cylinder, t_min: f64, t_max: f64) -> Option<f64> {
    let ox = origin.x - cyl.base.x;
    let oy = origin.y - cyl.base.y;
    let a = dir.x * dir.x + dir.y * dir.y;
    let b = 2.0 * (ox * dir.x + oy * dir.y);
    let c = ox * ox + oy * oy - cyl.radius * cyl.radius;

    // interval where the planar projection is inside the circle
    let (mut lo, mut hi) = if a == 0.0 {
        if c > 0.0 {
            return None;
        }
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a))
    };

    // interval where z lies between the caps
    let z0 = cyl.base.z;
    let z1 = cyl.base.z + cyl.height;
    if dir.z == 0.0 {
        if origin.z < z0 || origin.z > z1 {
            return None;
        }
    } else {
        let ta = (z0 - origin.z) / dir.z;
        let tb = (z1 - origin.z) / dir.z;
        lo = lo.max(ta.min(tb));
        hi = hi.min(ta.max(tb));
    }

    lo = lo.max(t_min);
    hi = hi.min(t_max);
    (lo <= hi).then_some(lo)
}

/// Line segment in the plane, used for walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Segment {
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Self {
        Segment { a, b }
    }

    /// Parameter along `p → q` where it crosses this segment, if it does.
    pub fn intersect_param(&self, p: [f64; 2], q: [f64; 2]) -> Option<f64> {
        let r = [q[0] - p[0], q[1] - p[1]];
        let s = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        let denom = r[0] * s[1] - r[1] * s[0];
        if denom == 0.0 {
            return None;
        }
        let ap = [self.a[0] - p[0], self.a[1] - p[1]];
        let t = (ap[0] * s[1] - ap[1] * s[0]) / denom;
        let u = (ap[0] * r[1] - ap[1] * r[0]) / denom;
        ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some(t)
    }

    pub fn intersects(&self, p: [f64; 2], q: [f64; 2]) -> bool {
        let d1 = cross(self.a, self.b, p);
        let d2 = cross(self.a, self.b, q);
        let d3 = cross(p, q, self.a);
        let d4 = cross(p, q, self.b);
        (d1 * d2 <= 0.0) && (d3 * d4 <= 0.0) && !(d1 == 0.0 && d2 == 0.0 && d3 == 0.0 && d4 == 0.0)
    }

    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        let s = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        let len2 = s[0] * s[0] + s[1] * s[1];
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p[0] - self.a[0]) * s[0] + (p[1] - self.a[1]) * s[1]) / len2).clamp(0.0, 1.0)
        };
        let c = [self.a[0] + t * s[0], self.a[1] + t * s[1]];
        (p[0] - c[0]).hypot(p[1] - c[1])
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Rect { min, max }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }

    /// Rectangle grown by `margin` on every side.
    pub fn inflate(&self, margin: f64) -> Rect {
        Rect::new([self.min[0] - margin, self.min[1] - margin], [self.max[0] + margin, self.max[1] + margin])
    }

    pub fn edges(&self) -> [Segment; 4] {
        let [x0, y0] = self.min;
        let [x1, y1] = self.max;
        [
            Segment::new([x0, y0], [x1, y0]),
            Segment::new([x1, y0], [x1, y1]),
            Segment::new([x1, y1], [x0, y1]),
            Segment::new([x0, y1], [x0, y0]),
        ]
    }

    pub fn intersects_segment(&self, p: [f64; 2], q: [f64; 2]) -> bool {
        self.contains(p) || self.contains(q) || self.edges().iter().any(|e| e.intersects(p, q))
    }
}

/// Heading of a planar vector in degrees, counter-clockwise from +x.
pub fn heading_deg(v: [f64; 2]) -> f64 {
    v[1].atan2(v[0]).to_degrees()
}

pub fn unit_from_heading(deg: f64) -> [f64; 2] {
    let r = deg.to_radians();
    [r.cos(), r.sin()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PLAYER: Cylinder = Cylinder {
        base: Vec3::new(100.0, 0.0, 0.0),
        radius: 17.0,
        height: 39.0,
    };

    #[test]
    fn ray_hits_front_of_cylinder() {
        let t = ray_cylinder(Vec3::new(0.0, 0.0, 20.0), Vec3::new(1.0, 0.0, 0.0), &PLAYER, 0.0, 1e9).unwrap();
        assert!((t - 83.0).abs() < 1e-9);
    }

    #[test]
    fn ray_over_the_head_misses() {
        assert!(ray_cylinder(Vec3::new(0.0, 0.0, 40.0), Vec3::new(1.0, 0.0, 0.0), &PLAYER, 0.0, 1e9).is_none());
        assert!(ray_cylinder(Vec3::new(0.0, 18.0, 20.0), Vec3::new(1.0, 0.0, 0.0), &PLAYER, 0.0, 1e9).is_none());
    }

    #[test]
    fn vertical_ray_through_cap() {
        let t = ray_cylinder(Vec3::new(100.0, 5.0, 100.0), Vec3::new(0.0, 0.0, -1.0), &PLAYER, 0.0, 1e9).unwrap();
        assert!((t - 61.0).abs() < 1e-9);
    }

    #[test]
    fn segment_limits_are_respected() {
        assert!(ray_cylinder(Vec3::new(0.0, 0.0, 20.0), Vec3::new(1.0, 0.0, 0.0), &PLAYER, 0.0, 50.0).is_none());
        // origin inside returns the lower bound
        let t = ray_cylinder(Vec3::new(100.0, 0.0, 20.0), Vec3::new(1.0, 0.0, 0.0), &PLAYER, 0.0, 10.0).unwrap();
        assert_eq!(t, 0.0);
    }

    #[test]
    fn segments() {
        let wall = Segment::new([0.0, -10.0], [0.0, 10.0]);
        assert!(wall.intersects([-5.0, 0.0], [5.0, 0.0]));
        assert!(!wall.intersects([1.0, 0.0], [5.0, 0.0]));
        assert_eq!(wall.intersect_param([-5.0, 0.0], [5.0, 0.0]), Some(0.5));
        assert_eq!(wall.distance_to([3.0, 20.0]), 10.0_f64.hypot(3.0));
    }

    proptest! {
        // sampled points along the ray agree with the analytic entry parameter
        #[test]
        fn ray_cylinder_matches_sampling(
            ox in -200.0f64..200.0, oy in -200.0f64..200.0, oz in -20.0f64..80.0,
            dx in -1.0f64..1.0, dy in -1.0f64..1.0, dz in -0.3f64..0.3,
        ) {
            let dir = Vec3::new(dx, dy, dz);
            prop_assume!(dir.length() > 1e-3);
            let origin = Vec3::new(ox, oy, oz);
            let cyl = Cylinder { base: Vec3::new(0.0, 0.0, 0.0), radius: 17.0, height: 39.0 };
            let t_max = 600.0;
            let analytic = ray_cylinder(origin, dir, &cyl, 0.0, t_max);
            let steps = 60_000;
            let sampled = (0..=steps)
                .map(|i| t_max * i as f64 / steps as f64)
                .find(|&t| cyl.contains(origin + dir * t));
            match (analytic, sampled) {
                (Some(a), Some(s)) => prop_assert!((a - s).abs() <= t_max / steps as f64 + 1e-9, "{a} vs {s}"),
                (None, None) => {}
                // grazing contacts can fall between samples
                (Some(a), None) => {
                    let p = origin + dir * a;
                    prop_assert!(p.planar_distance(cyl.base) > 16.9 || p.z < 0.1 || p.z > 38.9 || a > t_max - 0.02);
                }
                (None, Some(s)) => prop_assert!(false, "sampling hit at {s} but analytic missed"),
            }
        }
    }
}
