//! Problem instances: target coordinates, the depot, cost matrices and the
//! communication-feasibility rule.
//!
//! A target `i` may be assigned to a stop `j` only when the two lie within
//! the communication radius of each other. The test is a closed ball
//! (`distance <= radius`).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

/// Side length of the square used by [`Instance::generate_random`].
pub const GRID_SIDE: f64 = 100.0;

/// Default communication radius used by the CLI and experiments.
pub const DEFAULT_RADIUS: f64 = 50.0;

pub type Point = [f64; 2];

/// An immutable CAGVRP instance.
///
/// Costs are dense `n x n` matrices. Ground costs are symmetric; UAV costs
/// may be asymmetric when supplied explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    points: Vec<Point>,
    depot: usize,
    radius: f64,
    alpha: f64,
    gv_cost: Vec<Vec<f64>>,
    uav_cost: Vec<Vec<f64>>,
    comm_ok: Vec<Vec<bool>>,
}

impl Instance {
    /// Samples `n` points uniformly in the `100 x 100` grid.
    ///
    /// The generator is ChaCha8 seeded with `seed`. Points are drawn in index
    /// order, `x` before `y`, each as `100 * u` with `u` uniform in `[0, 1)`.
    pub fn generate_random(n: usize, seed: u64, alpha: f64, radius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!("n must be at least 3, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n)
            .map(|_| {
                let x = rng.gen::<f64>() * GRID_SIDE;
                let y = rng.gen::<f64>() * GRID_SIDE;
                [x, y]
            })
            .collect();
        let name = format!("rand-n{n}-s{seed}-a{alpha}-r{radius}");
        Self::euclidean(name, points, 0, alpha, radius)
    }

    /// Builds an instance with Euclidean ground costs and `alpha`-scaled UAV
    /// costs derived from `points`.
    pub fn euclidean(
        name: impl Into<String>,
        points: Vec<Point>,
        depot: usize,
        alpha: f64,
        radius: f64,
    ) -> Result<Self> {
        check_points(&points)?;
        let dist = distance_matrix(&points);
        let uav = scale(&dist, alpha);
        Self::with_costs(name, points, depot, alpha, radius, dist, uav)
    }

    /// Builds an instance with explicit cost matrices. Communication
    /// feasibility is still derived from the point coordinates.
    pub fn with_costs(
        name: impl Into<String>,
        points: Vec<Point>,
        depot: usize,
        alpha: f64,
        radius: f64,
        gv_cost: Vec<Vec<f64>>,
        uav_cost: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_points(&points)?;
        let n = points.len();
        if depot >= n {
            return Err(Error::validation(
                "depot",
                format!("index {depot} out of range for {n} targets"),
            ));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::validation("radius", "must be positive and finite"));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::validation("alpha", "must be positive and finite"));
        }
        check_matrix("gv_cost", &gv_cost, n, true)?;
        check_matrix("uav_cost", &uav_cost, n, false)?;
        let dist = distance_matrix(&points);
        let comm_ok = dist
            .iter()
            .map(|row| row.iter().map(|&d| d <= radius).collect())
            .collect();
        Ok(Instance {
            name: name.into(),
            points,
            depot,
            radius,
            alpha,
            gv_cost,
            uav_cost,
            comm_ok,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of targets, depot included.
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn depot(&self) -> usize {
        self.depot
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn gv_cost(&self, i: usize, j: usize) -> f64 {
        self.gv_cost[i][j]
    }

    #[inline]
    pub fn uav_cost(&self, i: usize, j: usize) -> f64 {
        self.uav_cost[i][j]
    }

    /// True iff target `i` may be served from stop `j`.
    #[inline]
    pub fn comm_ok(&self, i: usize, j: usize) -> bool {
        self.comm_ok[i][j]
    }

    pub fn gv_matrix(&self) -> &[Vec<f64>] {
        &self.gv_cost
    }

    pub fn uav_matrix(&self) -> &[Vec<f64>] {
        &self.uav_cost
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclid(self.points[i], self.points[j])
    }

    /// Big-M used by the penalty encoding of forbidden assignments.
    pub fn penalty_weight(&self) -> f64 {
        10.0 * self.gv_cost.iter().flatten().sum::<f64>()
    }

    /// Returns a copy with a different UAV scale factor. UAV costs are
    /// recomputed from the ground costs.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let uav = scale(&self.gv_cost, alpha);
        Self::with_costs(
            self.name.clone(),
            self.points.clone(),
            self.depot,
            alpha,
            self.radius,
            self.gv_cost.clone(),
            uav,
        )
    }

    /// Returns a copy with a different communication radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::with_costs(
            self.name.clone(),
            self.points.clone(),
            self.depot,
            self.alpha,
            radius,
            self.gv_cost.clone(),
            self.uav_cost.clone(),
        )
    }

    /// Targets that cannot be served from any stop other than themselves.
    pub fn isolated_targets(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| (0..self.n()).all(|j| j == i || !self.comm_ok[i][j]))
            .collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: InstanceFile = io::read_json(path)?;
        file.into_instance()
    }

    /// Writes the instance. Cost matrices are only written when they differ
    /// from the Euclidean defaults.
    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_json(&InstanceFile::from_instance(self), path)
    }
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    Instance::load(path)
}

pub fn save_instance(instance: &Instance, path: &Path) -> Result<()> {
    instance.save(path)
}

/// On-disk layout of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub name: String,
    pub targets: Vec<Point>,
    #[serde(default)]
    pub depot: usize,
    pub radius: f64,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gv_cost: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uav_cost: Option<Vec<Vec<f64>>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let dist = distance_matrix(&inst.points);
        let gv_default = dist == inst.gv_cost;
        let uav_default = scale(&inst.gv_cost, inst.alpha) == inst.uav_cost;
        InstanceFile {
            name: inst.name.clone(),
            targets: inst.points.clone(),
            depot: inst.depot,
            radius: inst.radius,
            alpha: inst.alpha,
            gv_cost: (!gv_default).then(|| inst.gv_cost.clone()),
            uav_cost: (!uav_default).then(|| inst.uav_cost.clone()),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        if self.targets.len() < 3 {
            return Err(Error::validation(
                "targets",
                format!("n >= 3 required, file has {} targets", self.targets.len()),
            ));
        }
        check_points(&self.targets)?;
        let gv = match self.gv_cost {
            Some(m) => m,
            None => distance_matrix(&self.targets),
        };
        let uav = match self.uav_cost {
            Some(m) => m,
            None => scale(&gv, self.alpha),
        };
        Instance::with_costs(
            self.name,
            self.targets,
            self.depot,
            self.alpha,
            self.radius,
            gv,
            uav,
        )
    }
}

fn euclid(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

fn distance_matrix(points: &[Point]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&a| points.iter().map(|&b| euclid(a, b)).collect())
        .collect()
}

fn scale(m: &[Vec<f64>], factor: f64) -> Vec<Vec<f64>> {
    m.iter()
        .map(|row| row.iter().map(|&v| factor * v).collect())
        .collect()
}

fn check_points(points: &[Point]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "n >= 3 required, got {} points",
            points.len()
        )));
    }
    if let Some(i) = points.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::invalid(format!("target {i} has a non-finite coordinate")));
    }
    Ok(())
}

fn check_matrix(field: &'static str, m: &[Vec<f64>], n: usize, symmetric: bool) -> Result<()> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::validation(field, format!("expected a {n}x{n} matrix")));
    }
    for i in 0..n {
        if m[i][i] != 0.0 {
            return Err(Error::validation(field, format!("diagonal entry {i} is not zero")));
        }
        for j in 0..n {
            let v = m[i][j];
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(
                    field,
                    format!("entry ({i},{j}) = {v} is not a finite nonnegative number"),
                ));
            }
            if symmetric && v != m[j][i] {
                return Err(Error::validation(
                    field,
                    format!("entries ({i},{j}) and ({j},{i}) differ"),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(alpha: f64, radius: f64) -> Instance {
        Instance::euclidean("tri", vec![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]], 0, alpha, radius)
            .unwrap()
    }

    #[test]
    fn random_is_deterministic_and_in_range() {
        let a = Instance::generate_random(10, 7, 0.1, 50.0).unwrap();
        let b = Instance::generate_random(10, 7, 0.1, 50.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n(), 10);
        for p in a.points() {
            assert!((0.0..=100.0).contains(&p[0]) && (0.0..=100.0).contains(&p[1]));
        }
        assert_eq!(a.depot(), 0);
    }

    #[test]
    fn large_radius_makes_everything_reachable() {
        let inst = Instance::generate_random(3, 1, 0.3, 200.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(inst.comm_ok(i, j));
            }
        }
    }

    #[test]
    fn alpha_only_scales_uav_costs() {
        let a = Instance::generate_random(10, 7, 0.1, 50.0).unwrap();
        let b = Instance::generate_random(10, 7, 0.2, 50.0).unwrap();
        assert_eq!(a.points(), b.points());
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(b.uav_cost(i, j), 2.0 * a.uav_cost(i, j));
                assert_eq!(a.gv_cost(i, j), b.gv_cost(i, j));
            }
        }
    }

    #[test]
    fn too_few_targets_rejected() {
        assert!(matches!(
            Instance::generate_random(2, 0, 0.1, 50.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(Instance::euclidean("x", vec![[0.0, 0.0], [1.0, 1.0]], 0, 0.1, 1.0).is_err());
    }

    #[test]
    fn non_finite_coordinate_rejected() {
        let pts = vec![[0.0, 0.0], [f64::NAN, 0.0], [1.0, 1.0]];
        assert!(matches!(
            Instance::euclidean("x", pts, 0, 0.1, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn pythagoras_costs() {
        let inst = triangle(0.5, 50.0);
        assert!((inst.gv_cost(1, 2) - 200f64.sqrt()).abs() < 1e-12);
        assert!((inst.uav_cost(1, 2) - 7.0710678118654755).abs() < 1e-12);
    }

    #[test]
    fn radius_is_a_closed_ball() {
        let inst = triangle(0.5, 10.0);
        assert!(!inst.comm_ok(1, 2));
        assert!(inst.comm_ok(0, 1));
        assert!(inst.comm_ok(1, 0));
        for i in 0..3 {
            assert!(inst.comm_ok(i, i));
        }
    }

    #[test]
    fn collinear_points() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        let inst = Instance::euclidean("line", pts, 0, 0.1, 1.0).unwrap();
        assert_eq!(inst.gv_cost(0, 3), 3.0);
        for i in 0..4 {
            assert_eq!(inst.gv_cost(i, i), 0.0);
            assert_eq!(inst.uav_cost(i, i), 0.0);
        }
    }

    #[test]
    fn explicit_matrices_are_checked() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        let mut gv = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let uav = gv.clone();
        assert!(Instance::with_costs("ok", pts.clone(), 0, 1.0, 5.0, gv.clone(), uav.clone()).is_ok());
        gv[0][1] = 3.0;
        let err = Instance::with_costs("bad", pts, 0, 1.0, 5.0, gv, uav).unwrap_err();
        assert!(matches!(err, Error::Validation { field: "gv_cost", .. }));
    }

    #[test]
    fn depot_out_of_range() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        let err = Instance::euclidean("x", pts, 3, 0.1, 5.0).unwrap_err();
        assert!(matches!(err, Error::Validation { field: "depot", .. }));
    }
}
