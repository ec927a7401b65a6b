use crate::limits::{power, Limits, SizeGuard};
use crate::quantale::{Elem, Quantale};

use super::{Carrier, StructureError};

/// An `X × X → L` table, row-major. Validity depends on a quantale, so it is
/// checked by [`validate_lmetric`] or [`LMetric::is_valid`] rather than on
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LMetric {
    n: usize,
    values: Vec<Elem>,
}

impl LMetric {
    /// Wraps a raw table. Panics unless it has `n * n` entries.
    pub fn from_table(n: usize, values: Vec<Elem>) -> Self {
        assert_eq!(values.len(), n * n, "metric table must be n x n");
        LMetric { n, values }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let values = (0..n * n).map(|i| f(i / n, i % n)).collect();
        LMetric { n, values }
    }

    /// `⊤` on the diagonal and `⊥` elsewhere; the least L-metric.
    pub fn discrete(q: &Quantale, n: usize) -> Self {
        Self::from_fn(n, |x, y| if x == y { q.top() } else { q.bottom() })
    }

    /// Constantly `⊤`; the greatest L-metric.
    pub fn indiscrete(q: &Quantale, n: usize) -> Self {
        Self::from_fn(n, |_, _| q.top())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Elem {
        self.values[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[Elem] {
        &self.values[x * self.n..(x + 1) * self.n]
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    pub fn meet(&self, q: &Quantale, other: &LMetric) -> LMetric {
        LMetric {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| q.meet_of(a, b))
                .collect(),
        }
    }

    /// Pointwise order.
    pub fn leq(&self, q: &Quantale, other: &LMetric) -> bool {
        self.values.iter().zip(&other.values).all(|(&a, &b)| q.leq(a, b))
    }

    /// `d ∘ (f × f)` for a map given by its image indices.
    pub fn pullback(&self, f: &[usize]) -> LMetric {
        LMetric::from_fn(f.len(), |x, y| self.get(f[x], f[y]))
    }

    pub fn is_valid(&self, q: &Quantale) -> bool {
        first_violation(q, self).is_none()
    }
}

enum Violation {
    Reflexive(usize),
    Triangle(usize, usize, usize),
}

fn first_violation(q: &Quantale, d: &LMetric) -> Option<Violation> {
    let n = d.n;
    if let Some(x) = (0..n).find(|&x| d.get(x, x) != q.top()) {
        return Some(Violation::Reflexive(x));
    }
    for x in 0..n {
        for y in 0..n {
            let dxy = d.get(x, y);
            for z in 0..n {
                if !q.leq(q.star(dxy, d.get(y, z)), d.get(x, z)) {
                    return Some(Violation::Triangle(x, y, z));
                }
            }
        }
    }
    None
}

/// Checks reflexivity (`d(x,x) = ⊤`) and the triangle law
/// `d(x,y) ∗ d(y,z) ≤ d(x,z)`.
pub fn validate_lmetric(q: &Quantale, carrier: &Carrier, values: Vec<Elem>) -> Result<LMetric, StructureError> {
    let n = carrier.len();
    if values.len() != n * n {
        return Err(StructureError::TableShape {
            expected: n * n,
            found: values.len(),
        });
    }
    let d = LMetric { n, values };
    match first_violation(q, &d) {
        None => Ok(d),
        Some(Violation::Reflexive(x)) => Err(StructureError::NotReflexiveTop(carrier.name(x).to_string())),
        Some(Violation::Triangle(x, y, z)) => Err(StructureError::TriangleViolation(
            carrier.name(x).to_string(),
            carrier.name(y).to_string(),
            carrier.name(z).to_string(),
        )),
    }
}

/// Every L-metric on an `n`-point carrier, in lexicographic order of the
/// off-diagonal entries.
pub fn enumerate_metrics(q: &Quantale, n: usize, limits: &Limits) -> Result<Vec<LMetric>, SizeGuard> {
    let free = n * n - n;
    SizeGuard::check(
        "L-metric candidate tables",
        power(q.len(), free),
        limits.metric_candidates as u128,
    )?;
    let cells: Vec<usize> = (0..n * n).filter(|i| i / n != i % n).collect();
    let mut table = LMetric::discrete(q, n);
    for &c in &cells {
        table.values[c] = Elem(0);
    }
    let mut out = Vec::new();
    fill(q, &cells, 0, &mut table, &mut out);
    Ok(out)
}

/// Depth-first over off-diagonal cells, pruning on triangle failures among
/// already assigned cells.
fn fill(q: &Quantale, cells: &[usize], k: usize, d: &mut LMetric, out: &mut Vec<LMetric>) {
    if k == cells.len() {
        out.push(d.clone());
        return;
    }
    let c = cells[k];
    for v in 0..q.len() {
        d.values[c] = Elem(v as u8);
        if consistent(q, d, &cells[..=k]) {
            fill(q, cells, k + 1, d, out);
        }
    }
}

/// Triangle law on triples whose three cells are all assigned, restricted
/// to triples that touch the newest cell.
fn consistent(q: &Quantale, d: &LMetric, assigned: &[usize]) -> bool {
    let n = d.n;
    let newest = *assigned.last().expect("non-empty");
    let known = |i: usize| i / n == i % n || assigned.contains(&i);
    let (a, b) = (newest / n, newest % n);
    for w in 0..n {
        // (a,b),(b,w) ≤ (a,w)
        for (x, y, z) in [(a, b, w), (w, a, b), (a, w, b)] {
            let (xy, yz, xz) = (x * n + y, y * n + z, x * n + z);
            if known(xy) && known(yz) && known(xz) && !q.leq(q.star(d.values[xy], d.values[yz]), d.values[xz]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Lattice;

    fn brute_force(q: &Quantale, n: usize) -> Vec<LMetric> {
        let free = n * n - n;
        let total = q.len().pow(free as u32);
        let mut out = Vec::new();
        for mut code in 0..total {
            let d = LMetric::from_fn(n, |x, y| {
                if x == y {
                    q.top()
                } else {
                    let v = code % q.len();
                    code /= q.len();
                    Elem(v as u8)
                }
            });
            if d.is_valid(q) {
                out.push(d);
            }
        }
        out.sort();
        out
    }

    fn tensors(n: usize) -> Vec<Quantale> {
        let l = Lattice::chain_of(n);
        let cells = n * n;
        (0..n.pow(cells as u32))
            .filter_map(|mut code| {
                let star = (0..cells)
                    .map(|_| {
                        let v = code % n;
                        code /= n;
                        Elem(v as u8)
                    })
                    .collect();
                Quantale::new(l.clone(), star).ok()
            })
            .collect()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for q in tensors(2).into_iter().chain(tensors(3)) {
            for n in 1..=3 {
                let mut fast = enumerate_metrics(&q, n, &Limits::default()).unwrap();
                fast.sort();
                assert_eq!(fast, brute_force(&q, n), "{:?} n={n}", q.star_table());
            }
        }
    }

    #[test]
    fn two_chain_two_points_has_four_metrics() {
        let q = Quantale::meet(Lattice::chain_of(2)).unwrap();
        assert_eq!(enumerate_metrics(&q, 2, &Limits::default()).unwrap().len(), 4);
        assert_eq!(enumerate_metrics(&q, 1, &Limits::default()).unwrap().len(), 1);
    }

    #[test]
    fn discrete_is_least() {
        for q in tensors(2).into_iter().chain(tensors(3)) {
            for n in 1..=2 {
                let dis = LMetric::discrete(&q, n);
                assert!(dis.is_valid(&q));
                for d in enumerate_metrics(&q, n, &Limits::default()).unwrap() {
                    assert!(dis.leq(&q, &d));
                }
            }
        }
    }

    #[test]
    fn validation_errors() {
        let q = Quantale::meet(Lattice::chain_of(2)).unwrap();
        let c = Carrier::new(&["a", "b"]).unwrap();
        let (t, b) = (q.top(), q.bottom());
        assert_eq!(
            validate_lmetric(&q, &c, vec![b, t, t, t]),
            Err(StructureError::NotReflexiveTop("a".into()))
        );
        assert!(validate_lmetric(&q, &c, vec![t, t, t, t]).is_ok());
        let c3 = Carrier::new(&["a", "b", "c"]).unwrap();
        // a→b, b→c are ⊤ but a→c is ⊥
        let err = validate_lmetric(&q, &c3, vec![t, t, b, b, t, t, b, b, t]).unwrap_err();
        assert!(matches!(err, StructureError::TriangleViolation(..)), "{err:?}");
    }

    #[test]
    fn size_guard() {
        let q = Quantale::meet(Lattice::chain_of(4)).unwrap();
        let limits = Limits {
            metric_candidates: 100,
            ..Limits::default()
        };
        assert!(enumerate_metrics(&q, 3, &limits).is_err());
    }

    #[test]
    fn pullback_along_constant_map() {
        let q = Quantale::meet(Lattice::chain_of(3)).unwrap();
        let d = LMetric::discrete(&q, 2);
        let p = d.pullback(&[1, 1, 1]);
        assert_eq!(p, LMetric::indiscrete(&q, 3));
    }
}
