//! Brute-force exact solver for small instances.
//!
//! Enumerates stop sets and assignments explicitly and prices each structure
//! with Held–Karp dynamic programs. Shares no search logic with the
//! branch-and-cut engine, so the two can certify each other.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::Solution;

pub const MAX_BRUTE_FORCE_N: usize = 10;
pub const MAX_ENUMERATE_N: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    pub solution: Solution,
    /// Feasible (stop set, assignment) pairs priced.
    pub structures: u64,
}

/// Minimum-cost Hamiltonian cycle over `nodes` starting at `nodes[0]`.
///
/// Returns the cost and the visiting order (starting at `nodes[0]`). A
/// single node costs zero.
pub fn held_karp(nodes: &[usize], cost: impl Fn(usize, usize) -> f64) -> (f64, Vec<usize>) {
    let k = nodes.len();
    if k <= 1 {
        return (0.0, nodes.to_vec());
    }
    let start = nodes[0];
    let rest = &nodes[1..];
    let m = rest.len();
    let full = 1usize << m;
    // dp[mask * m + last]: cheapest path from start through mask ending at rest[last]
    let mut dp = vec![f64::INFINITY; full * m];
    let mut from = vec![usize::MAX; full * m];
    for (j, &v) in rest.iter().enumerate() {
        dp[(1 << j) * m + j] = cost(start, v);
    }
    for mask in 1..full {
        for last in 0..m {
            let cur = dp[mask * m + last];
            if mask & (1 << last) == 0 || !cur.is_finite() {
                continue;
            }
            for next in 0..m {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let c = cur + cost(rest[last], rest[next]);
                if c < dp[nm * m + next] {
                    dp[nm * m + next] = c;
                    from[nm * m + next] = last;
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut best_last = 0;
    for last in 0..m {
        let c = dp[(full - 1) * m + last] + cost(rest[last], start);
        if c < best {
            best = c;
            best_last = last;
        }
    }
    let mut order = Vec::with_capacity(k);
    let mut mask = full - 1;
    let mut last = best_last;
    while last != usize::MAX {
        order.push(rest[last]);
        let prev = from[mask * m + last];
        mask &= !(1 << last);
        last = prev;
    }
    order.push(start);
    order.reverse();
    (best, order)
}

/// Exact optimum by exhaustive enumeration; refuses `n > 10`.
pub fn brute_force(inst: &Instance) -> Result<OracleResult> {
    let n = inst.n();
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::invalid(format!(
            "brute force is limited to n <= {MAX_BRUTE_FORCE_N} targets (got {n}); use the branch-and-cut solver"
        )));
    }
    let depot = inst.depot();
    let mut uav_memo: HashMap<(usize, u32), (f64, Vec<usize>)> = HashMap::new();
    let mut structures = 0u64;
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;

    for stop_mask in 0u32..(1 << n) {
        if stop_mask >> depot & 1 == 0 || stop_mask.count_ones() < 3 {
            continue;
        }
        let stops: Vec<usize> = std::iter::once(depot)
            .chain((0..n).filter(|&i| i != depot && stop_mask >> i & 1 == 1))
            .collect();
        let others: Vec<usize> = (0..n).filter(|&i| stop_mask >> i & 1 == 0).collect();
        let options: Vec<Vec<usize>> = others
            .iter()
            .map(|&t| stops.iter().copied().filter(|&s| inst.comm_ok(t, s)).collect())
            .collect();
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let (tour_cost, tour) = held_karp(&stops, |a, b| inst.gv_cost(a, b));
        if let Some((b, _, _)) = &best {
            if tour_cost >= *b {
                // UAV costs are nonnegative, so nothing here can improve
                structures += options.iter().map(|o| o.len() as u64).product::<u64>();
                continue;
            }
        }
        let mut choice = vec![0usize; others.len()];
        loop {
            structures += 1;
            let mut assigned: BTreeMap<usize, u32> = BTreeMap::new();
            for (k, &t) in others.iter().enumerate() {
                *assigned.entry(options[k][choice[k]]).or_default() |= 1 << t;
            }
            let mut total = tour_cost;
            for (&s, &mask) in &assigned {
                let entry = uav_memo.entry((s, mask)).or_insert_with(|| {
                    let nodes: Vec<usize> = std::iter::once(s)
                        .chain((0..n).filter(|&t| mask >> t & 1 == 1))
                        .collect();
                    held_karp(&nodes, |a, b| inst.uav_cost(a, b))
                });
                total += entry.0;
            }
            let improves = best.as_ref().is_none_or(|(b, _, _)| total < *b);
            if improves {
                let mut assignment: Vec<usize> = (0..n).collect();
                for (k, &t) in others.iter().enumerate() {
                    assignment[t] = options[k][choice[k]];
                }
                best = Some((total, tour.clone(), assignment));
            }
            // next assignment in odometer order
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < options[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }

    let (_, tour, assignment) =
        best.ok_or_else(|| Error::invalid("instance has no feasible tour structure"))?;
    let mut subtours = BTreeMap::new();
    for &s in &tour {
        let mask = (0..n)
            .filter(|&t| t != s && assignment[t] == s)
            .fold(0u32, |m, t| m | 1 << t);
        if mask != 0 {
            subtours.insert(s, uav_memo[&(s, mask)].1.clone());
        }
    }
    let solution = Solution::from_structure(inst, tour, subtours, assignment);
    Ok(OracleResult {
        objective: solution.objective,
        solution,
        structures,
    })
}

/// Every feasible solution, up to `limit`; refuses `n > 6`.
///
/// Ground tours are listed once per undirected cyclic order (starting at the
/// depot); UAV sub-tours once per directed cyclic order (starting at their
/// stop).
pub fn enumerate_feasible(inst: &Instance, limit: usize) -> Result<Vec<Solution>> {
    let n = inst.n();
    if n > MAX_ENUMERATE_N {
        return Err(Error::invalid(format!(
            "enumeration is limited to n <= {MAX_ENUMERATE_N} targets (got {n})"
        )));
    }
    let depot = inst.depot();
    let mut out = Vec::new();
    for stop_mask in 0u32..(1 << n) {
        if stop_mask >> depot & 1 == 0 || stop_mask.count_ones() < 3 {
            continue;
        }
        let others: Vec<usize> = (0..n).filter(|&i| stop_mask >> i & 1 == 0).collect();
        let rest: Vec<usize> = (0..n)
            .filter(|&i| i != depot && stop_mask >> i & 1 == 1)
            .collect();
        let stops: Vec<usize> = std::iter::once(depot).chain(rest.iter().copied()).collect();
        let options: Vec<Vec<usize>> = others
            .iter()
            .map(|&t| stops.iter().copied().filter(|&s| inst.comm_ok(t, s)).collect())
            .collect();
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let tours: Vec<Vec<usize>> = permutations(&rest)
            .into_iter()
            .filter(|p| p.first() < p.last())
            .map(|p| std::iter::once(depot).chain(p).collect())
            .collect();
        for assignment in assignments(n, &others, &options) {
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &t in &others {
                groups.entry(assignment[t]).or_default().push(t);
            }
            let choices: Vec<(usize, Vec<Vec<usize>>)> = groups
                .into_iter()
                .map(|(s, members)| {
                    let cycles = permutations(&members)
                        .into_iter()
                        .map(|p| std::iter::once(s).chain(p).collect())
                        .collect();
                    (s, cycles)
                })
                .collect();
            for tour in &tours {
                let mut pick = vec![0usize; choices.len()];
                loop {
                    let subtours: BTreeMap<usize, Vec<usize>> = choices
                        .iter()
                        .zip(&pick)
                        .map(|((s, cycles), &k)| (*s, cycles[k].clone()))
                        .collect();
                    out.push(Solution::from_structure(inst, tour.clone(), subtours, assignment.clone()));
                    if out.len() >= limit {
                        return Ok(out);
                    }
                    let mut k = 0;
                    while k < pick.len() {
                        pick[k] += 1;
                        if pick[k] < choices[k].1.len() {
                            break;
                        }
                        pick[k] = 0;
                        k += 1;
                    }
                    if k == pick.len() {
                        break;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn assignments(n: usize, others: &[usize], options: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut choice = vec![0usize; others.len()];
    loop {
        let mut a: Vec<usize> = (0..n).collect();
        for (k, &t) in others.iter().enumerate() {
            a[t] = options[k][choice[k]];
        }
        out.push(a);
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            return out;
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    fn triangle() -> Instance {
        Instance::euclidean("tri", vec![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]], 0, 0.3, 200.0).unwrap()
    }

    fn square_center(alpha: f64) -> Instance {
        let pts = vec![[0.0, 0.0], [20.0, 0.0], [20.0, 20.0], [0.0, 20.0], [10.0, 10.0]];
        Instance::euclidean("sq", pts, 0, alpha, 30.0).unwrap()
    }

    #[test]
    fn held_karp_on_a_square() {
        let pts = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let d = |a: usize, b: usize| {
            let (p, q): ([f64; 2], [f64; 2]) = (pts[a], pts[b]);
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
        };
        let (c, order) = held_karp(&[0, 1, 2, 3], d);
        assert!((c - 4.0).abs() < 1e-12);
        assert_eq!(order[0], 0);
        assert_eq!(order.len(), 4);
    }

    #[test]
    fn triangle_perimeter() {
        let r = brute_force(&triangle()).unwrap();
        assert!((r.objective - (20.0 + 200f64.sqrt())).abs() < 1e-9);
        assert_eq!(r.structures, 1);
        assert!(validate(&triangle(), &r.solution).is_empty());
    }

    #[test]
    fn center_is_flown_at_low_alpha() {
        let inst = square_center(0.1);
        let r = brute_force(&inst).unwrap();
        assert!(r.solution.tour.len() < 5);
        assert!(validate(&inst, &r.solution).is_empty());
        // center plus one corner on the ground, the other corners flown:
        // 20 + 2 sqrt(200) on the ground, 0.1 * (20 + 2 sqrt(200)) in the air
        let both = 20.0 + 2.0 * 200f64.sqrt();
        assert!((r.objective - 1.1 * both).abs() < 1e-9);
        // the five-stop tour costs 60 + 2 * sqrt(200)
        assert!(r.objective < 60.0 + 2.0 * 200f64.sqrt() - 1e-6);
    }

    #[test]
    fn raising_alpha_turns_every_target_into_a_stop() {
        let mut last = 0.0;
        let mut switched = false;
        for k in 1..=20 {
            let r = brute_force(&square_center(0.05 * k as f64)).unwrap();
            assert!(r.objective >= last - 1e-9);
            last = r.objective;
            let all_stops = r.solution.tour.len() == 5;
            assert!(all_stops || !switched, "switch is not monotone at step {k}");
            switched |= all_stops;
        }
        assert!(switched);
    }

    #[test]
    fn unreachable_target_becomes_a_stop() {
        let pts = vec![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [90.0, 90.0]];
        let inst = Instance::euclidean("far", pts, 0, 0.3, 20.0).unwrap();
        let r = brute_force(&inst).unwrap();
        assert!(r.solution.tour.contains(&3));
    }

    #[test]
    fn size_guards() {
        let big = Instance::generate_random(11, 1, 0.1, 50.0).unwrap();
        assert!(brute_force(&big).is_err());
        let seven = Instance::generate_random(7, 1, 0.1, 50.0).unwrap();
        assert!(enumerate_feasible(&seven, 10).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_feasible(&triangle(), usize::MAX).unwrap().len(), 1);
        let pts = vec![[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]];
        let tiny = Instance::euclidean("tiny", pts, 0, 0.3, 1.0).unwrap();
        assert_eq!(enumerate_feasible(&tiny, usize::MAX).unwrap().len(), 3);
        assert_eq!(enumerate_feasible(&square_center(0.1), 1).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_is_feasible_and_bounded_by_the_optimum() {
        for seed in 0..3 {
            let inst = Instance::generate_random(6, seed, 0.2, 50.0).unwrap();
            let best = brute_force(&inst).unwrap().objective;
            let all = enumerate_feasible(&inst, usize::MAX).unwrap();
            assert!(!all.is_empty());
            let mut min = f64::INFINITY;
            for s in &all {
                assert!(validate(&inst, s).is_empty());
                assert!(best <= s.objective + 1e-9);
                min = min.min(s.objective);
            }
            assert!((min - best).abs() < 1e-9);
        }
    }
}
