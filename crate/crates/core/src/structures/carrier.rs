use std::collections::HashMap;
use std::fmt;

use super::StructureError;

/// Largest carrier a [`PointSet`] can index.
pub const MAX_POINTS: usize = 64;

/// A finite non-empty set of named points. Points are referred to by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier {
    points: Vec<String>,
    index: HashMap<String, usize>,
}

impl Carrier {
    pub fn new<S: AsRef<str>>(points: &[S]) -> Result<Self, StructureError> {
        if points.is_empty() {
            return Err(StructureError::EmptyCarrier);
        }
        if points.len() > MAX_POINTS {
            return Err(StructureError::CarrierTooLarge(points.len()));
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.as_ref().to_string(), i).is_some() {
                return Err(StructureError::DuplicatePoint(p.as_ref().to_string()));
            }
        }
        Ok(Carrier {
            points: points.iter().map(|p| p.as_ref().to_string()).collect(),
            index,
        })
    }

    /// Points named `x0`, `x1`, ...
    pub fn numbered(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        Self::new(&names).expect("numbered carrier")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn name(&self, x: usize) -> &str {
        &self.points[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// Renders a subset as `{a,b}`.
    pub fn set_name(&self, set: PointSet) -> String {
        let names: Vec<&str> = set.iter().map(|x| self.name(x)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// A subset of a carrier as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn singleton(x: usize) -> Self {
        PointSet(1 << x)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn contains(self, x: usize) -> bool {
        self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1 << x;
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(x)
            }
        })
    }

    /// All subsets of an `n`-point carrier in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = PointSet> {
        (0..1u64 << n).map(PointSet)
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}
