use std::collections::{HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Group, GroupElement, GroupFamily};
use crate::error::{Error, Result};

/// Depth of the bounded search that certifies strong connectedness.
pub const CERTIFICATE_DEPTH: usize = 16;
const CERTIFICATE_CAP: usize = 200_000;

/// A finitely supported step law: the chain moves from `g` to `g * s` with
/// probability `p(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDistribution {
    family: GroupFamily,
    steps: Vec<Step>,
    min_prob: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub name: char,
    pub element: GroupElement,
    pub prob: BigRational,
}

impl StepDistribution {
    /// Uniform law on the group's standard generators.
    pub fn uniform(group: &Group) -> Result<Self> {
        let n = group.generators().len();
        let p = BigRational::new(1.into(), (n as i64).into());
        Self::with_probabilities(group, &vec![p; n])
    }

    /// Law on the standard generators with the given probabilities, in
    /// generator order.
    pub fn with_probabilities(group: &Group, probs: &[BigRational]) -> Result<Self> {
        let gens = group.generators();
        if probs.len() != gens.len() {
            return Err(Error::InvalidSteps(format!(
                "{} probabilities given for {} generators",
                probs.len(),
                gens.len()
            )));
        }
        let steps = gens
            .iter()
            .zip(probs)
            .map(|(g, p)| Step { name: g.name, element: g.element.clone(), prob: p.clone() })
            .collect();
        Self::new(group, steps)
    }

    /// Validates positivity, exact normalization, distinct support and the
    /// strong-connectedness certificate.
    pub fn new(group: &Group, steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidSteps("empty support".into()));
        }
        let mut seen = HashSet::new();
        let mut total = BigRational::zero();
        for s in &steps {
            group.check(&s.element)?;
            if s.prob <= BigRational::zero() || s.prob > BigRational::one() {
                return Err(Error::InvalidSteps(format!("probability {} of `{}` not in (0,1]", s.prob, s.name)));
            }
            if !seen.insert(s.element.clone()) {
                return Err(Error::InvalidSteps(format!("duplicate step `{}`", s.name)));
            }
            total += &s.prob;
        }
        if !total.is_one() {
            return Err(Error::InvalidSteps(format!("probabilities sum to {total}, not 1")));
        }
        let min_prob = steps.iter().map(|s| s.prob.clone()).min().expect("non-empty");
        let dist = Self { family: group.family().clone(), steps, min_prob };
        dist.certify_strongly_connected()?;
        Ok(dist)
    }

    /// Checks that every step's inverse and every standard generator is a
    /// product of at most `CERTIFICATE_DEPTH` steps. Then the semigroup
    /// generated by the support is a group containing the standard generators.
    pub fn certify_strongly_connected(&self) -> Result<()> {
        let group = Group::new(self.family.clone())?;
        let identity = group.identity().clone();
        let mut reach: HashSet<GroupElement> = HashSet::new();
        let mut frontier: VecDeque<(GroupElement, usize)> = VecDeque::new();
        let mut missing: Vec<(char, GroupElement)> =
            self.steps.iter().map(|s| (s.name, s.element.inverse())).collect();
        missing.extend(group.generators().iter().map(|g| (g.name, g.element.clone())));
        frontier.push_back((identity, 0));
        while let Some((g, depth)) = frontier.pop_front() {
            if missing.is_empty() {
                return Ok(());
            }
            if depth == CERTIFICATE_DEPTH || reach.len() >= CERTIFICATE_CAP {
                continue;
            }
            for s in &self.steps {
                let h = g.try_mul(&s.element)?;
                if reach.insert(h.clone()) {
                    missing.retain(|(_, inv)| *inv != h);
                    frontier.push_back((h, depth + 1));
                }
            }
        }
        match missing.first() {
            None => Ok(()),
            Some((name, _)) => Err(Error::NotStronglyConnected(name.to_string(), CERTIFICATE_DEPTH)),
        }
    }

    pub fn family(&self) -> &GroupFamily {
        &self.family
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Minimum step probability, `p` in the growth bound.
    pub fn min_prob(&self) -> &BigRational {
        &self.min_prob
    }

    pub fn prob(&self, i: usize) -> &BigRational {
        &self.steps[i].prob
    }

    /// Stable textual description used for content addressing.
    pub fn fingerprint(&self) -> String {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| format!("{}={}:{}", s.name, s.element, s.prob))
            .collect();
        format!("{}|{}", self.family, parts.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn uniform_min_prob() {
        let g = Group::from_spec("free:2").unwrap();
        let d = StepDistribution::uniform(&g).unwrap();
        assert_eq!(d.min_prob(), &q(1, 4));
        let g = Group::from_spec("lamplighter").unwrap();
        assert_eq!(StepDistribution::uniform(&g).unwrap().min_prob(), &q(1, 3));
    }

    #[test]
    fn biased_law_keeps_support() {
        let g = Group::from_spec("z:1").unwrap();
        let d = StepDistribution::with_probabilities(&g, &[q(2, 3), q(1, 3)]).unwrap();
        assert_eq!(d.min_prob(), &q(1, 3));
    }

    #[test]
    fn rejects_bad_laws() {
        let g = Group::from_spec("z:1").unwrap();
        assert!(StepDistribution::with_probabilities(&g, &[q(1, 2), q(1, 3)]).is_err());
        assert!(StepDistribution::with_probabilities(&g, &[q(1, 1), q(0, 1)]).is_err());
        assert!(StepDistribution::with_probabilities(&g, &[q(1, 1)]).is_err());
    }

    #[test]
    fn one_sided_support_fails_certificate() {
        let g = Group::from_spec("z:1").unwrap();
        let steps = vec![Step { name: 'a', element: g.word("a").unwrap(), prob: q(1, 1) }];
        assert!(matches!(StepDistribution::new(&g, steps), Err(Error::NotStronglyConnected(..))));
    }

    #[test]
    fn non_symmetric_support_certified() {
        // Steps +1 and -2 generate Z as a semigroup: -1 = (+1) + (-2).
        let g = Group::from_spec("z:1").unwrap();
        let steps = vec![
            Step { name: 'a', element: GroupElement::Zd(vec![1]), prob: q(2, 3) },
            Step { name: 'm', element: GroupElement::Zd(vec![-2]), prob: q(1, 3) },
        ];
        StepDistribution::new(&g, steps).unwrap();
    }

    #[test]
    fn proper_subgroup_fails_certificate() {
        let g = Group::from_spec("z:1").unwrap();
        let steps = vec![
            Step { name: 'a', element: GroupElement::Zd(vec![2]), prob: q(1, 2) },
            Step { name: 'A', element: GroupElement::Zd(vec![-2]), prob: q(1, 2) },
        ];
        assert!(StepDistribution::new(&g, steps).is_err());
    }
}
