//! Breadth-first augmenting-path max flow on a dense capacity matrix.

use std::collections::VecDeque;

const EPS: f64 = 1e-12;

/// Dense directed network; `cap[u * n + v]` is the capacity of `u -> v`.
#[derive(Clone, Debug)]
pub struct Network {
    n: usize,
    cap: Vec<f64>,
}

/// A minimum cut: flow value and the source side of the cut (vertices
/// reachable from the source in the final residual graph).
#[derive(Clone, Debug, PartialEq)]
pub struct MinCut {
    pub value: f64,
    pub source_side: Vec<bool>,
}

impl Network {
    pub fn new(n: usize) -> Self {
        Network {
            n,
            cap: vec![0.0; n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_arc(&mut self, u: usize, v: usize, c: f64) {
        self.cap[u * self.n + v] += c;
    }

    pub fn add_edge(&mut self, u: usize, v: usize, c: f64) {
        self.add_arc(u, v, c);
        self.add_arc(v, u, c);
    }

    pub fn capacity(&self, u: usize, v: usize) -> f64 {
        self.cap[u * self.n + v]
    }

    pub fn min_cut(&self, s: usize, t: usize) -> MinCut {
        assert!(s != t, "source equals sink");
        let n = self.n;
        let mut res = self.cap.clone();
        let mut value = 0.0;
        let mut prev = vec![usize::MAX; n];
        loop {
            prev.iter_mut().for_each(|p| *p = usize::MAX);
            prev[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for v in 0..n {
                    if prev[v] == usize::MAX && res[u * n + v] > EPS {
                        prev[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if prev[t] == usize::MAX {
                break;
            }
            let mut bottleneck = f64::INFINITY;
            let mut v = t;
            while v != s {
                let u = prev[v];
                bottleneck = bottleneck.min(res[u * n + v]);
                v = u;
            }
            let mut v = t;
            while v != s {
                let u = prev[v];
                res[u * n + v] -= bottleneck;
                res[v * n + u] += bottleneck;
                v = u;
            }
            value += bottleneck;
        }
        let source_side = prev.iter().map(|&p| p != usize::MAX).collect();
        MinCut { value, source_side }
    }

    /// Sum of capacities on arcs leaving `side`.
    pub fn cut_value(&self, side: &[bool]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for u in 0..n {
            if !side[u] {
                continue;
            }
            for v in 0..n {
                if !side[v] {
                    total += self.cap[u * n + v];
                }
            }
        }
        total
    }
}
