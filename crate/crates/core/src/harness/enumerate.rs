//! Exhaustive generation of small quantales and structures.

use std::collections::HashSet;
use std::sync::Arc;

use crate::limits::{power, Limits, SizeGuard};
use crate::quantale::{Elem, Lattice, Quantale};
use crate::structures::{enumerate_metrics, is_locally_directed, ApproachDistance, Carrier, GaugeBase, LMetric, StructureError};

/// Elements covering exactly one element.
fn join_irreducibles(l: &Lattice) -> Vec<Elem> {
    let covers = l.covers();
    l.elements()
        .filter(|&e| covers.iter().filter(|&&(_, b)| b == e).count() == 1)
        .collect()
}

/// Every quantale tensor on `lattice`, in lexicographic order of the values
/// on pairs of join-irreducibles.
///
/// A tensor preserves joins in each argument, so it is fixed by those values:
/// `x * y` is the join of `j * k` over join-irreducibles `j <= x`, `k <= y`.
pub fn enumerate_tensors(lattice: &Lattice, limits: &Limits) -> Result<Vec<Quantale>, SizeGuard> {
    let n = lattice.len();
    let ji = join_irreducibles(lattice);
    let cells = ji.len() * ji.len();
    SizeGuard::check("tensor tables on join-irreducibles", power(n, cells), limits.function_candidates as u128)?;
    let below: Vec<Vec<usize>> = lattice
        .elements()
        .map(|x| (0..ji.len()).filter(|&i| lattice.leq(ji[i], x)).collect())
        .collect();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; cells];
    'tables: loop {
        let mut star = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let v = below[x]
                    .iter()
                    .flat_map(|&j| below[y].iter().map(move |&k| (j, k)))
                    .fold(lattice.bottom(), |acc, (j, k)| lattice.join(acc, Elem(assignment[j * ji.len() + k] as u8)));
                star.push(v);
            }
        }
        // each table is reached once, from its own restriction
        let consistent = (0..ji.len())
            .flat_map(|j| (0..ji.len()).map(move |k| (j, k)))
            .all(|(j, k)| star[ji[j].index() * n + ji[k].index()].index() == assignment[j * ji.len() + k]);
        let associative = consistent
            && (0..n).all(|a| {
                (0..n).all(|b| {
                    (0..n).all(|c| {
                        let ab = star[a * n + b].index();
                        let bc = star[b * n + c].index();
                        star[ab * n + c] == star[a * n + bc]
                    })
                })
            });
        if associative {
            if let Ok(q) = Quantale::with_limits(lattice.clone(), star, limits) {
                out.push(q);
            }
        }
        let mut i = cells;
        loop {
            if i == 0 {
                break 'tables;
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < n {
                break;
            }
            assignment[i] = 0;
        }
    }
    Ok(out)
}

/// Every approach distance on `carrier` whose singleton table is reflexive,
/// completed by unions; tables failing an axiom are dropped.
pub fn enumerate_distances(
    q: &Arc<Quantale>,
    carrier: &Carrier,
    max_tables: u128,
    limits: &Limits,
) -> Result<Vec<ApproachDistance>, SizeGuard> {
    let n = carrier.len();
    let m = q.len();
    let free = n * n - n;
    SizeGuard::check("singleton tables", power(m, free), max_tables)?;
    let mut out = Vec::new();
    let mut values = vec![0usize; free];
    loop {
        let mut it = values.iter();
        let singles = LMetric::from_fn(n, |x, y| if x == y { q.top() } else { Elem(*it.next().expect("sized") as u8) });
        match ApproachDistance::from_singletons(q.clone(), carrier.clone(), &singles, limits) {
            Ok(d) => out.push(d),
            Err(StructureError::SizeGuard(g)) => return Err(g),
            Err(_) => {}
        }
        let mut i = free;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            values[i] += 1;
            if values[i] < m {
                break;
            }
            values[i] = 0;
        }
    }
}

/// Advances `chosen` to the next increasing selection from `0..n`.
fn next_combination(chosen: &mut [usize], n: usize) -> bool {
    let k = chosen.len();
    for i in (0..k).rev() {
        if chosen[i] < n - k + i {
            chosen[i] += 1;
            for j in i + 1..k {
                chosen[j] = chosen[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gauge bases of up to `max_base` metrics, closed under meets and locally
/// directed, one per distinct gauge, at most `cap` of them.
pub fn enumerate_gauges(
    q: &Arc<Quantale>,
    carrier: &Carrier,
    max_base: usize,
    cap: usize,
    limits: &Limits,
) -> Result<Vec<GaugeBase>, SizeGuard> {
    let all = enumerate_metrics(q, carrier.len(), limits)?;
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    // subsets in order of size, then lexicographically
    for size in 1..=max_base.min(all.len()) {
        chosen.clear();
        chosen.extend(0..size);
        loop {
            let mut base: Vec<LMetric> = chosen.iter().map(|&i| all[i].clone()).collect();
            let mut k = 0;
            while k < base.len() {
                for j in 0..k {
                    let m = base[j].meet(q, &base[k]);
                    if !base.contains(&m) {
                        base.push(m);
                    }
                }
                k += 1;
            }
            if is_locally_directed(q, &base, limits)? {
                let g = GaugeBase::without_directedness(q.clone(), carrier.clone(), base).expect("non-empty valid metrics");
                let key: Vec<bool> = all.iter().map(|d| g.contains(d)).collect();
                if seen.insert(key) {
                    out.push(g);
                    if out.len() >= cap {
                        return Ok(out);
                    }
                }
            }
            if !next_combination(&mut chosen, all.len()) {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every table through the full validator.
    fn brute_force(lattice: &Lattice) -> Vec<Vec<Elem>> {
        let n = lattice.len();
        let cells = n * n;
        let mut out = Vec::new();
        let mut t = vec![0u8; cells];
        loop {
            let star: Vec<Elem> = t.iter().map(|&v| Elem(v)).collect();
            if Quantale::new(lattice.clone(), star.clone()).is_ok() {
                out.push(star);
            }
            let mut i = cells;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                t[i] += 1;
                if (t[i] as usize) < n {
                    break;
                }
                t[i] = 0;
            }
        }
    }

    #[test]
    fn tensors_match_brute_force_on_small_chains() {
        for n in 1..=3 {
            let l = Lattice::chain_of(n);
            let mut fast: Vec<Vec<Elem>> = enumerate_tensors(&l, &Limits::default())
                .unwrap()
                .iter()
                .map(|q| q.star_table().to_vec())
                .collect();
            let mut slow = brute_force(&l);
            fast.sort();
            slow.sort();
            assert_eq!(fast, slow, "chain of {n}");
        }
        assert_eq!(enumerate_tensors(&Lattice::chain_of(2), &Limits::default()).unwrap().len(), 2);
    }

    #[test]
    fn diamond_tensors_are_quantales_and_include_meet() {
        let l = Lattice::diamond();
        let all = enumerate_tensors(&l, &Limits::default()).unwrap();
        assert!(all.iter().any(|q| q.is_meet()));
        let distinct: HashSet<Vec<Elem>> = all.iter().map(|q| q.star_table().to_vec()).collect();
        assert_eq!(distinct.len(), all.len());
    }

    /// Full tables over all subsets, checked against the axioms as stated.
    fn literal_distances(q: &Quantale, n: usize) -> Vec<Vec<Elem>> {
        let sets = 1usize << n;
        let cells = n * sets;
        let m = q.len();
        let mut out = Vec::new();
        let mut t = vec![0usize; cells];
        let l = q.lattice();
        loop {
            let v = |x: usize, a: usize| Elem(t[x * sets + a] as u8);
            let ok = (0..n).all(|x| {
                v(x, 1 << x) == q.top()
                    && v(x, 0) == q.bottom()
                    && (0..sets).all(|a| (0..sets).all(|b| v(x, a | b) == l.join(v(x, a), v(x, b))))
                    && (0..sets).all(|a| {
                        l.elements().all(|alpha| {
                            let closure = (0..n).filter(|&y| l.leq(alpha, v(y, a))).fold(0, |s, y| s | 1 << y);
                            l.leq(q.star(v(x, closure), alpha), v(x, a))
                        })
                    })
            });
            if ok {
                out.push(t.iter().map(|&e| Elem(e as u8)).collect());
            }
            let mut i = cells;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                t[i] += 1;
                if t[i] < m {
                    break;
                }
                t[i] = 0;
            }
        }
    }

    #[test]
    fn distances_match_literal_axioms() {
        let l = Lattice::chain_of(3);
        for q in enumerate_tensors(&l, &Limits::default()).unwrap() {
            let q = Arc::new(q);
            for n in 1..=2 {
                let c = Carrier::numbered(n);
                let mut fast: Vec<Vec<Elem>> = enumerate_distances(&q, &c, 1 << 20, &Limits::default())
                    .unwrap()
                    .iter()
                    .map(|d| d.values().to_vec())
                    .collect();
                let mut slow = literal_distances(&q, n);
                fast.sort();
                slow.sort();
                assert_eq!(fast, slow);
            }
        }
    }

    #[test]
    fn gauges_are_distinct_and_directed() {
        let q = Arc::new(Quantale::meet(Lattice::chain_of(3)).unwrap());
        let c = Carrier::numbered(2);
        let gs = enumerate_gauges(&q, &c, 2, 1000, &Limits::default()).unwrap();
        let all = enumerate_metrics(&q, 2, &Limits::default()).unwrap();
        // on two points a gauge is fixed by its least member
        assert_eq!(gs.len(), all.len());
        for g in &gs {
            assert!(g.is_locally_directed(&Limits::default()).unwrap());
        }
        assert_eq!(enumerate_gauges(&q, &c, 2, 3, &Limits::default()).unwrap().len(), 3);
    }

    #[test]
    fn singleton_guard() {
        let q = Arc::new(Quantale::meet(Lattice::chain_of(3)).unwrap());
        assert!(enumerate_distances(&q, &Carrier::numbered(3), 100, &Limits::default()).is_err());
    }
}
