//! Directed balls `B(a, r)` and their outer boundaries.
//!
//! A ball holds every vertex reachable from the center by at most `r`
//! positive-probability steps. Its boundary is the set of vertices outside the
//! ball with an in-edge from it, which for a ball is exactly the sphere at
//! distance `r + 1`.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::group::{GroupElement, StepDistribution};

pub const DEFAULT_SIZE_CAP: usize = 5_000_000;

/// Endpoint of an edge leaving an interior vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Interior(usize),
    Boundary(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub target: Target,
    /// Index into the step distribution.
    pub step: usize,
}

#[derive(Clone, Debug)]
pub struct DirectedBall {
    center: GroupElement,
    radius: usize,
    steps: StepDistribution,
    vertices: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
    distance: Vec<usize>,
    adjacency: Vec<Vec<Edge>>,
    boundary: Vec<GroupElement>,
    boundary_index: HashMap<GroupElement, usize>,
    boundary_preds: Vec<Vec<usize>>,
    predecessor: Vec<Option<usize>>,
    boundary_predecessor: Vec<usize>,
}

impl DirectedBall {
    /// Breadth-first construction by right multiplication, with steps tried in
    /// declared order. Indices follow discovery order, so index 0 is the center.
    pub fn build(center: &GroupElement, steps: &StepDistribution, radius: usize) -> Result<Self> {
        Self::build_capped(center, steps, radius, DEFAULT_SIZE_CAP)
    }

    pub fn build_capped(
        center: &GroupElement,
        steps: &StepDistribution,
        radius: usize,
        cap: usize,
    ) -> Result<Self> {
        crate::group::Group::new(steps.family().clone())?.check(center)?;
        let mut vertices = vec![center.clone()];
        let mut index = HashMap::from([(center.clone(), 0usize)]);
        let mut distance = vec![0usize];
        let mut predecessor = vec![None];
        let mut adjacency: Vec<Vec<Edge>> = Vec::new();
        let mut boundary = Vec::new();
        let mut boundary_index: HashMap<GroupElement, usize> = HashMap::new();
        let mut boundary_preds: Vec<Vec<usize>> = Vec::new();
        let mut boundary_predecessor = Vec::new();

        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let d = distance[v];
            let mut edges = Vec::with_capacity(steps.len());
            for (si, step) in steps.steps().iter().enumerate() {
                let w = vertices[v].try_mul(&step.element)?;
                let target = if let Some(&wi) = index.get(&w) {
                    Target::Interior(wi)
                } else if d < radius {
                    let wi = vertices.len();
                    index.insert(w.clone(), wi);
                    vertices.push(w);
                    distance.push(d + 1);
                    predecessor.push(Some(v));
                    queue.push_back(wi);
                    Target::Interior(wi)
                } else if let Some(&bi) = boundary_index.get(&w) {
                    boundary_preds[bi].push(v);
                    Target::Boundary(bi)
                } else {
                    let bi = boundary.len();
                    boundary_index.insert(w.clone(), bi);
                    boundary.push(w);
                    boundary_preds.push(vec![v]);
                    boundary_predecessor.push(v);
                    Target::Boundary(bi)
                };
                edges.push(Edge { target, step: si });
                if vertices.len() + boundary.len() > cap {
                    return Err(Error::SizeCap { cap, radius_reached: d });
                }
            }
            adjacency.push(edges);
        }

        Ok(Self {
            center: center.clone(),
            radius,
            steps: steps.clone(),
            vertices,
            index,
            distance,
            adjacency,
            boundary,
            boundary_index,
            boundary_preds,
            predecessor,
            boundary_predecessor,
        })
    }

    /// Reassembles a ball from stored vertices, distances and adjacency,
    /// recomputing lookups and first-discoverer predecessors. Fails if the
    /// data is inconsistent with a breadth-first construction.
    pub(crate) fn from_parts(
        center: GroupElement,
        radius: usize,
        steps: StepDistribution,
        vertices: Vec<GroupElement>,
        distance: Vec<usize>,
        adjacency: Vec<Vec<Edge>>,
        boundary: Vec<GroupElement>,
    ) -> Result<Self> {
        let bad = |m: &str| Error::Cache(m.to_string());
        let n = vertices.len();
        if n == 0 || vertices[0] != center || distance.len() != n || adjacency.len() != n || distance[0] != 0 {
            return Err(bad("inconsistent ball header"));
        }
        let index: HashMap<_, _> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let boundary_index: HashMap<_, _> = boundary.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        if index.len() != n || boundary_index.len() != boundary.len() {
            return Err(bad("duplicate vertices"));
        }
        let mut predecessor = vec![None; n];
        let mut boundary_predecessor = vec![usize::MAX; boundary.len()];
        let mut boundary_preds = vec![Vec::new(); boundary.len()];
        for (u, edges) in adjacency.iter().enumerate() {
            if edges.len() != steps.len() {
                return Err(bad("adjacency arity"));
            }
            for (si, e) in edges.iter().enumerate() {
                if e.step != si {
                    return Err(bad("edge order"));
                }
                let w = vertices[u].try_mul(&steps.steps()[si].element)?;
                match e.target {
                    Target::Interior(w_idx) => {
                        if vertices.get(w_idx) != Some(&w) {
                            return Err(bad("interior edge target"));
                        }
                        if w_idx != 0 && predecessor[w_idx].is_none() {
                            predecessor[w_idx] = Some(u);
                        }
                    }
                    Target::Boundary(b_idx) => {
                        if boundary.get(b_idx) != Some(&w) || distance[u] != radius {
                            return Err(bad("boundary edge target"));
                        }
                        if boundary_predecessor[b_idx] == usize::MAX {
                            boundary_predecessor[b_idx] = u;
                        }
                        boundary_preds[b_idx].push(u);
                    }
                }
            }
        }
        for w in 1..n {
            match predecessor[w] {
                Some(u) if distance[w] == distance[u] + 1 && distance[w] <= radius => {}
                _ => return Err(bad("distance labels")),
            }
        }
        if boundary_predecessor.contains(&usize::MAX) {
            return Err(bad("orphan boundary vertex"));
        }
        Ok(Self {
            center,
            radius,
            steps,
            vertices,
            index,
            distance,
            adjacency,
            boundary,
            boundary_index,
            boundary_preds,
            predecessor,
            boundary_predecessor,
        })
    }

    pub fn center(&self) -> &GroupElement {
        &self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn steps(&self) -> &StepDistribution {
        &self.steps
    }

    pub fn interior_len(&self) -> usize {
        self.vertices.len()
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    pub fn vertices(&self) -> &[GroupElement] {
        &self.vertices
    }

    pub fn boundary(&self) -> &[GroupElement] {
        &self.boundary
    }

    pub fn vertex(&self, i: usize) -> &GroupElement {
        &self.vertices[i]
    }

    pub fn boundary_vertex(&self, j: usize) -> &GroupElement {
        &self.boundary[j]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn boundary_index_of(&self, g: &GroupElement) -> Option<usize> {
        self.boundary_index.get(g).copied()
    }

    pub fn target_of(&self, g: &GroupElement) -> Option<Target> {
        self.index_of(g)
            .map(Target::Interior)
            .or_else(|| self.boundary_index_of(g).map(Target::Boundary))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn interior_index(&self, g: &GroupElement) -> Result<usize> {
        self.index_of(g).ok_or_else(|| Error::NotInterior(g.to_string()))
    }

    pub fn distance(&self, i: usize) -> usize {
        self.distance[i]
    }

    pub fn edges(&self, i: usize) -> &[Edge] {
        &self.adjacency[i]
    }

    pub fn boundary_predecessors(&self, j: usize) -> &[usize] {
        &self.boundary_preds[j]
    }

    pub fn predecessor(&self, i: usize) -> Option<usize> {
        self.predecessor[i]
    }

    /// Number of vertices at each distance `0..=radius`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &d in &self.distance {
            out[d] += 1;
        }
        out
    }

    /// Interior indices `a = γ_0, ..., γ_r` of the first-discoverer geodesic to
    /// boundary vertex `j`; the path continues with one step to `j`.
    pub fn geodesic_indices(&self, j: usize) -> Vec<usize> {
        let mut path = vec![self.boundary_predecessor[j]];
        while let Some(p) = self.predecessor[*path.last().expect("non-empty")] {
            path.push(p);
        }
        path.reverse();
        path
    }

    /// The geodesic from the center to a boundary vertex `x`, both endpoints
    /// included. Every prefix is itself a geodesic.
    pub fn geodesic(&self, x: &GroupElement) -> Result<Vec<GroupElement>> {
        let j = self.boundary_index_of(x).ok_or_else(|| Error::NotBoundary(x.to_string()))?;
        let mut path: Vec<GroupElement> =
            self.geodesic_indices(j).into_iter().map(|i| self.vertices[i].clone()).collect();
        path.push(x.clone());
        Ok(path)
    }

    /// The indices of `other`'s interior inside this ball, or `None` if some
    /// vertex of `other` is not interior here.
    pub fn embed(&self, other: &DirectedBall) -> Option<Vec<usize>> {
        other.vertices.iter().map(|v| self.index_of(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    fn ball(spec: &str, center: &str, r: usize) -> DirectedBall {
        let g = Group::from_spec(spec).unwrap();
        let c = g.parse_element(center).unwrap();
        DirectedBall::build(&c, &g.uniform_steps(), r).unwrap()
    }

    fn names(v: &[GroupElement]) -> Vec<String> {
        v.iter().map(|g| g.to_string()).collect()
    }

    #[test]
    fn z1_radius_two() {
        let b = ball("z:1", "0", 2);
        assert_eq!(names(b.vertices()), ["(0)", "(1)", "(-1)", "(2)", "(-2)"]);
        assert_eq!(names(b.boundary()), ["(3)", "(-3)"]);
    }

    #[test]
    fn radius_zero_is_center_and_neighbors() {
        let b = ball("free:2", "ab", 0);
        assert_eq!(b.interior_len(), 1);
        assert_eq!(names(b.boundary()), ["aba", "abA", "abb", "a"]);
    }

    #[test]
    fn f2_radius_one_counts() {
        let b = ball("free:2", "e", 1);
        assert_eq!(b.interior_len(), 5);
        assert_eq!(b.boundary_len(), 12);
        assert_eq!(b.boundary_vertex(0).to_string(), "aa");
    }

    #[test]
    fn geodesic_examples() {
        let b = ball("z:1", "0", 2);
        let g = Group::from_spec("z:1").unwrap();
        let path = b.geodesic(&g.parse_element("3").unwrap()).unwrap();
        assert_eq!(names(&path), ["(0)", "(1)", "(2)", "(3)"]);

        let f2 = Group::from_spec("free:2").unwrap();
        let b = ball("free:2", "e", 1);
        assert_eq!(names(&b.geodesic(&f2.word("ab").unwrap()).unwrap()), ["e", "a", "ab"]);
        assert!(b.geodesic(&f2.word("a").unwrap()).is_err());

        let b = ball("z:2", "e", 2);
        let path = b.geodesic(&GroupElement::Zd(vec![2, 1])).unwrap();
        assert_eq!(names(&path), ["(0,0)", "(1,0)", "(2,0)", "(2,1)"]);
    }

    #[test]
    fn size_cap_reports_radius() {
        let g = Group::from_spec("free:2").unwrap();
        let err = DirectedBall::build_capped(g.identity(), &g.uniform_steps(), 6, 100).unwrap_err();
        assert!(matches!(err, Error::SizeCap { cap: 100, radius_reached } if radius_reached < 6));
    }

    #[test]
    fn boundary_is_next_sphere() {
        let small = ball("lamplighter", "e", 3);
        let big = ball("lamplighter", "e", 4);
        let layers = big.layer_sizes();
        assert_eq!(small.boundary_len(), layers[4]);
        for x in small.boundary() {
            assert_eq!(big.distance(big.index_of(x).unwrap()), 4);
        }
    }
}
