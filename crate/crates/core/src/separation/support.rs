use super::flow::Network;
use super::SUPPORT_EPS;
use crate::model::VariableSpace;

/// Graph induced by the positive ground edges or UAV arcs of a point.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportGraph {
    n: usize,
    vertices: Vec<usize>,
    edges: Vec<(usize, usize, f64)>,
    directed: bool,
}

impl SupportGraph {
    /// Vertices are the depot, targets with `y_ii > eps` and edge endpoints;
    /// edges are those with `x_e > eps`.
    pub fn undirected(sp: &VariableSpace, depot: usize, point: &[f64]) -> Self {
        let n = sp.n();
        let mut present = vec![false; n];
        present[depot] = true;
        for i in 0..n {
            if point[sp.y(i, i)] > SUPPORT_EPS {
                present[i] = true;
            }
        }
        let mut edges = Vec::new();
        for e in sp.x_range() {
            if point[e] > SUPPORT_EPS {
                let (a, b) = sp.edge_endpoints(e);
                present[a] = true;
                present[b] = true;
                edges.push((a, b, point[e]));
            }
        }
        SupportGraph {
            n,
            vertices: (0..n).filter(|&v| present[v]).collect(),
            edges,
            directed: false,
        }
    }

    /// All targets are vertices; arcs are `w_ij > eps` with `i != j`.
    pub fn directed(sp: &VariableSpace, point: &[f64]) -> Self {
        let n = sp.n();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && point[sp.w(i, j)] > SUPPORT_EPS {
                    edges.push((i, j, point[sp.w(i, j)]));
                }
            }
        }
        SupportGraph {
            n,
            vertices: (0..n).collect(),
            edges,
            directed: true,
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Weakly connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b, _)| (a, b)).collect();
        let all = components_of(self.n, &pairs);
        let mut present = vec![false; self.n];
        for &v in &self.vertices {
            present[v] = true;
        }
        let mut comps: Vec<Vec<usize>> = all.into_iter().filter(|c| present[c[0]]).collect();
        let mut covered = vec![false; self.n];
        for c in &comps {
            for &v in c {
                covered[v] = true;
            }
        }
        for &v in &self.vertices {
            if !covered[v] {
                comps.push(vec![v]);
            }
        }
        comps.sort();
        comps
    }

    /// Capacitated network over all `n` targets.
    pub fn network(&self) -> Network {
        let mut net = Network::new(self.n);
        for &(a, b, w) in &self.edges {
            if self.directed {
                net.add_arc(a, b, w);
            } else {
                net.add_edge(a, b, w);
            }
        }
        net
    }
}

/// Components (of size at least two) of the graph on `0..n` with the given
/// edges; each sorted, ordered by smallest vertex.
pub(crate) fn components_of(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    let mut touched = vec![false; n];
    for &(a, b) in edges {
        touched[a] = true;
        touched[b] = true;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if touched[v] {
            let r = find(&mut parent, v);
            groups[r].push(v);
        }
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}
