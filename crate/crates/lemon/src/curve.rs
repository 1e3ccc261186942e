//! Ordered polylines in the plane with a parameter per vertex.

#[derive(Clone, Debug, PartialEq)]
pub struct CurveTrace {
    pub label: String,
    pub points: Vec<[f64; 2]>,
    /// Parameter of each vertex (free coordinate, arclength, or iteration index).
    pub params: Vec<f64>,
}

impl CurveTrace {
    pub fn new(label: impl Into<String>) -> Self {
        CurveTrace {
            label: label.into(),
            points: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn from_points(label: impl Into<String>, points: Vec<[f64; 2]>) -> Self {
        let params = (0..points.len()).map(|i| i as f64).collect();
        CurveTrace {
            label: label.into(),
            points,
            params,
        }
    }

    pub fn push(&mut self, p: [f64; 2], param: f64) {
        self.points.push(p);
        self.params.push(param);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn arclength(&self) -> f64 {
        self.points.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    pub fn max_gap(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| dist(w[0], w[1]))
            .fold(0.0, f64::max)
    }

    pub fn map(&self, label: impl Into<String>, f: impl Fn([f64; 2]) -> [f64; 2]) -> CurveTrace {
        CurveTrace {
            label: label.into(),
            points: self.points.iter().map(|&p| f(p)).collect(),
            params: self.params.clone(),
        }
    }

    pub fn reversed(&self) -> CurveTrace {
        let mut c = self.clone();
        c.points.reverse();
        c.params.reverse();
        c
    }

    /// Distance from `p` to the polyline (a single vertex counts as a point).
    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        match self.points.len() {
            0 => f64::INFINITY,
            1 => dist(p, self.points[0]),
            _ => self
                .points
                .windows(2)
                .map(|w| point_segment_distance(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Minimum distance between two polylines.
    pub fn distance_to_curve(&self, other: &CurveTrace) -> f64 {
        if self.points.len() < 2 || other.points.len() < 2 {
            let a = self.points.iter().map(|&p| other.distance_to(p));
            let b = other.points.iter().map(|&p| self.distance_to(p));
            return a.chain(b).fold(f64::INFINITY, f64::min);
        }
        let mut best = f64::INFINITY;
        for s in self.points.windows(2) {
            for o in other.points.windows(2) {
                best = best.min(segment_distance(s[0], s[1], o[0], o[1]));
                if best == 0.0 {
                    return 0.0;
                }
            }
        }
        best
    }

    /// Largest distance from a vertex of `self` to `other`.
    pub fn one_sided_hausdorff(&self, other: &CurveTrace) -> f64 {
        self.points
            .iter()
            .map(|&p| other.distance_to(p))
            .fold(0.0, f64::max)
    }

    /// Proper crossings with another polyline, as points.
    pub fn intersections(&self, other: &CurveTrace) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for s in self.points.windows(2) {
            for o in other.points.windows(2) {
                if let Some(p) = segment_intersection(s[0], s[1], o[0], o[1]) {
                    out.push(p);
                }
            }
        }
        out
    }
}

pub fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let s = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + s * ab[0], a[1] + s * ab[1]])
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

pub fn segment_intersection(
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
) -> Option<[f64; 2]> {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        let s = d1 / (d1 - d2);
        return Some([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
    }
    None
}

pub fn segment_distance(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    if segment_intersection(a, b, c, d).is_some() {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}
