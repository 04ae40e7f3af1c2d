use num::Zero;

use crate::error::{Error, MetricAxiom, Result};
use crate::numeric::Rational;

/// A finite metric space with a self-map. Points are the ids `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSystem {
    labels: Vec<String>,
    metric: Vec<Vec<Rational>>,
    map: Vec<usize>,
}

impl FiniteSystem {
    /// Validates every metric axiom (over all triples) and totality of the map.
    pub fn new(labels: Vec<String>, metric: Vec<Vec<Rational>>, map: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Spec("a finite system needs at least one point".into()));
        }
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return Err(Error::Spec(format!("metric must be a {n}x{n} table")));
        }
        if map.len() != n {
            return Err(Error::PartialMap(format!("map has {} entries for {n} points", map.len())));
        }
        if let Some(u) = map.iter().position(|&v| v >= n) {
            return Err(Error::PartialMap(format!("image of {} is not a point", labels[u])));
        }
        let sys = FiniteSystem { labels, metric, map };
        sys.check_metric()?;
        Ok(sys)
    }

    /// Constructor for front ends whose metric is valid by construction: all axioms are
    /// still checked exhaustively for systems of at most 512 points.
    pub(crate) fn from_trusted_metric(labels: Vec<String>, metric: Vec<Vec<Rational>>, map: Vec<usize>) -> Result<Self> {
        if labels.len() <= 512 {
            return FiniteSystem::new(labels, metric, map);
        }
        if map.iter().any(|&v| v >= labels.len()) {
            return Err(Error::PartialMap("image outside the grid".into()));
        }
        Ok(FiniteSystem { labels, metric, map })
    }

    /// Discrete metric (all distinct points at distance 1).
    pub fn discrete(labels: &[&str], map: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        let metric = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::zero() } else { Rational::from_integer(1) }).collect())
            .collect();
        FiniteSystem::new(labels.iter().map(|s| s.to_string()).collect(), metric, map)
    }

    fn violation(&self, axiom: MetricAxiom, pts: &[usize]) -> Error {
        Error::MetricViolation { axiom, points: pts.iter().map(|&p| self.labels[p].clone()).collect() }
    }

    fn check_metric(&self) -> Result<()> {
        let n = self.len();
        let d = &self.metric;
        for u in 0..n {
            if !d[u][u].is_zero() {
                return Err(self.violation(MetricAxiom::Definiteness, &[u, u]));
            }
            for v in 0..n {
                if d[u][v] < Rational::zero() {
                    return Err(self.violation(MetricAxiom::Nonnegativity, &[u, v]));
                }
                if u != v && d[u][v].is_zero() {
                    return Err(self.violation(MetricAxiom::Definiteness, &[u, v]));
                }
                if d[u][v] != d[v][u] {
                    return Err(self.violation(MetricAxiom::Symmetry, &[u, v]));
                }
            }
        }
        // reported as (u, via, w): d(u,w) > d(u,via) + d(via,w)
        for u in 0..n {
            for w in 0..n {
                for v in 0..n {
                    if d[u][w] > d[u][v] + d[v][w] {
                        return Err(self.violation(MetricAxiom::Triangle, &[u, v, w]));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn metric(&self, u: usize, v: usize) -> Rational {
        self.metric[u][v]
    }

    pub fn metric_table(&self) -> &[Vec<Rational>] {
        &self.metric
    }

    pub fn map(&self, u: usize) -> usize {
        self.map[u]
    }

    pub fn map_table(&self) -> &[usize] {
        &self.map
    }

    /// `f^k(u)`.
    pub fn iterate(&self, mut u: usize, k: usize) -> usize {
        for _ in 0..k {
            u = self.map[u];
        }
        u
    }

    /// Forward orbit `u, f(u), ..., f^(len-1)(u)`.
    pub fn orbit(&self, u: usize, len: usize) -> Vec<usize> {
        std::iter::successors(Some(u), |&x| Some(self.map[x])).take(len).collect()
    }

    /// Smallest positive distance between distinct points (`None` for one point).
    pub fn min_positive_distance(&self) -> Option<Rational> {
        let n = self.len();
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).map(|(u, v)| self.metric[u][v]).min()
    }
}
