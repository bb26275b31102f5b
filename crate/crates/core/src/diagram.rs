use serde::{Deserialize, Serialize};

/// A point of the birth/death plane. Diagonal points have `birth == death`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirthDeathPoint {
    pub birth: f64,
    pub death: f64,
}

impl BirthDeathPoint {
    pub const fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_diagonal(&self) -> bool {
        self.birth == self.death
    }
}

impl From<(f64, f64)> for BirthDeathPoint {
    fn from((birth, death): (f64, f64)) -> Self {
        Self { birth, death }
    }
}

/// Multiset of persistence pairs. Each pair is stored as the interval spanned
/// by its two critical values, so `birth <= death` holds for join and split
/// trees alike.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub points: Vec<BirthDeathPoint>,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<BirthDeathPoint>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points sorted lexicographically, for order-insensitive comparisons.
    pub fn sorted_points(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<_> = self.points.iter().map(|p| (p.birth, p.death)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    }
}

impl FromIterator<(f64, f64)> for PersistenceDiagram {
    fn from_iter<I: IntoIterator<Item = (f64, f64)>>(iter: I) -> Self {
        Self {
            points: iter.into_iter().map(BirthDeathPoint::from).collect(),
        }
    }
}
