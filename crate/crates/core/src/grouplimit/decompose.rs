//! Stabilization, canonical decomposition into basis elements, and freeness
//! certificates for products of basis elements.

use std::collections::HashMap;

use serde_json::{json, Value};

use super::{GroupElem, GroupSystem, LimitElement, LimitError, Variant};
use crate::invsys::{FiberIdx, Thread};
use crate::poset::{Point, PosetError};
use crate::words::{AbelianVector, Exponent, Word};

/// Probe window and budget for lazily evaluated elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilizationParams {
    pub window: usize,
    pub budget: usize,
}

impl Default for StabilizationParams {
    fn default() -> Self {
        StabilizationParams { window: 3, budget: 64 }
    }
}

/// A point from which the syllable length (or support size) is constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stabilization {
    pub point: Point,
    pub length: usize,
}

/// `g = b_{t_1}^{k_1} ... b_{t_n}^{k_n}`. In the free case adjacent threads
/// differ; in the abelian case threads are distinct and listed by the name of
/// their value at the stabilizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub stabilizer: Point,
    pub terms: Vec<(Thread, Exponent)>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A point where a product of basis elements is visibly nontrivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub point: Point,
    pub value: GroupElem,
}

impl GroupSystem {
    /// Finite bases: the maximum. Otherwise: the probe chain is walked until
    /// `window` consecutive probes share a length, within `budget` probes.
    pub fn stabilization_point(&self, g: &LimitElement) -> Result<Stabilization, LimitError> {
        self.stabilization_point_with(g, StabilizationParams::default())
    }

    pub fn stabilization_point_with(
        &self,
        g: &LimitElement,
        params: StabilizationParams,
    ) -> Result<Stabilization, LimitError> {
        let base = self.carrier.base();
        if base.is_finite() {
            let top = base.maximum().ok_or(PosetError::SymbolicUnsupported)?;
            return Ok(Stabilization { point: top, length: self.evaluate(g, top)?.complexity() });
        }
        let window = params.window.max(1);
        let mut run: Option<(Point, usize, usize)> = None;
        let probes = params.budget.min(base.len());
        for p in base.points().take(probes) {
            let len = self.evaluate(g, p)?.complexity();
            run = match run {
                Some((start, l, count)) if l == len => Some((start, l, count + 1)),
                _ => Some((p, len, 1)),
            };
            if let Some((start, length, count)) = run {
                if count >= window {
                    return Ok(Stabilization { point: start, length });
                }
            }
        }
        Err(LimitError::Unstable { probes })
    }

    /// Canonical decomposition, using the base's own upper bounds.
    pub fn decompose(&self, g: &LimitElement) -> Result<Decomposition, LimitError> {
        let base = self.carrier.base();
        self.decompose_with_bounds(g, &|set| base.upper_bound(set))
    }

    /// Canonical decomposition with a caller-chosen upper bound for each
    /// `{p, stabilizer}`. Any choice yields the same result.
    pub fn decompose_with_bounds(
        &self,
        g: &LimitElement,
        bound: &dyn Fn(&[Point]) -> Result<Point, PosetError>,
    ) -> Result<Decomposition, LimitError> {
        let stab = self.stabilization_point(g)?;
        let s = stab.point;
        let base = self.carrier.base();
        let at_s = self.evaluate(g, s)?;
        let n = stab.length;
        // per point, the i-th generator
        let mut columns: Vec<Vec<FiberIdx>> = Vec::with_capacity(base.len());
        let exps: Vec<Exponent>;
        let order: Vec<FiberIdx>;
        match &at_s {
            GroupElem::Free(w) => {
                exps = w.syllables().iter().map(|s| s.1).collect();
                order = w.syllables().iter().map(|s| s.0).collect();
            }
            GroupElem::Abelian(v) => {
                let fiber = self.carrier.fiber(s);
                let mut support: Vec<(FiberIdx, Exponent)> = v.entries().iter().map(|(&a, &k)| (a, k)).collect();
                support.sort_by(|x, y| fiber.name(x.0).cmp(&fiber.name(y.0)));
                exps = support.iter().map(|t| t.1).collect();
                order = support.iter().map(|t| t.0).collect();
            }
        }
        for p in base.points() {
            let pbar = bound(&[p, s])?;
            if !base.leq(p, pbar) || !base.leq(s, pbar) {
                return Err(LimitError::ClaimViolated(format!("`{}` is not an upper bound", base.name(pbar))));
            }
            let above = self.evaluate(g, pbar)?;
            if above.complexity() != n {
                return Err(LimitError::ClaimViolated(format!(
                    "length {} at `{}` differs from {} at the stabilizer",
                    above.complexity(),
                    base.name(pbar),
                    n
                )));
            }
            let at_pbar: Vec<FiberIdx> = match &above {
                GroupElem::Free(w) => w.syllables().iter().map(|s| s.0).collect(),
                GroupElem::Abelian(v) => {
                    // the connecting map is a bijection between supports
                    let mut back: HashMap<FiberIdx, FiberIdx> = HashMap::new();
                    for (&b, &k) in v.entries() {
                        let a = self.carrier.map(s, pbar, b);
                        if back.insert(a, b).is_some() || v_coefficient(&at_s, a) != k {
                            return Err(LimitError::ClaimViolated(format!(
                                "support over `{}` does not match the stabilizer",
                                base.name(pbar)
                            )));
                        }
                    }
                    order
                        .iter()
                        .map(|a| {
                            back.get(a).copied().ok_or_else(|| {
                                LimitError::ClaimViolated("support element lost under projection".into())
                            })
                        })
                        .collect::<Result<_, _>>()?
                }
            };
            columns.push(at_pbar.into_iter().map(|b| self.carrier.map(p, pbar, b)).collect());
        }
        let terms = (0..n)
            .map(|i| (Thread(columns.iter().map(|c| c[i]).collect()), exps[i]))
            .collect();
        Ok(Decomposition { stabilizer: s, terms })
    }

    /// `b_{t_1}^{k_1} ... b_{t_n}^{k_n}` as an eager element.
    pub fn recompose(&self, d: &Decomposition) -> Result<LimitElement, LimitError> {
        let mut acc = self.identity();
        for (t, k) in &d.terms {
            let b = self.pow(&self.basis_element(t)?, *k)?;
            acc = self.multiply(&acc, &b)?;
        }
        Ok(acc)
    }

    /// Whether `d` is in the canonical shape: nonzero exponents, genuine
    /// threads, adjacent (free) or all (abelian) threads distinct, abelian
    /// terms in name order at the stabilizer.
    pub fn is_canonical(&self, d: &Decomposition) -> bool {
        let s = d.stabilizer;
        let terms_ok = d.terms.iter().all(|(t, k)| *k != 0 && self.carrier.is_thread(t));
        let shape_ok = match self.variant {
            Variant::Free => d.terms.windows(2).all(|w| w[0].0 != w[1].0),
            Variant::Abelian => {
                let fiber = self.carrier.fiber(s);
                d.terms.windows(2).all(|w| fiber.name(w[0].0.at(s)) < fiber.name(w[1].0.at(s)))
            }
        };
        terms_ok && shape_ok
    }

    /// For a nonempty product of basis elements with adjacent threads
    /// distinct (free) or all threads distinct (abelian), finds a point
    /// where the threads are separated and returns the value there, which is
    /// a reduced word of the same length.
    pub fn freeness_certificate(&self, terms: &[(Thread, Exponent)]) -> Result<Certificate, LimitError> {
        if terms.is_empty() {
            return Err(LimitError::EmptyProduct);
        }
        let base = self.carrier.base();
        let pairs: Vec<(usize, usize)> = match self.variant {
            Variant::Free => (1..terms.len()).map(|i| (i - 1, i)).collect(),
            Variant::Abelian => {
                (0..terms.len()).flat_map(|i| (i + 1..terms.len()).map(move |j| (i, j))).collect()
            }
        };
        let mut witnesses = Vec::with_capacity(pairs.len());
        for &(i, j) in &pairs {
            let (s, t) = (&terms[i].0, &terms[j].0);
            match base.points().find(|&p| s.at(p) != t.at(p)) {
                Some(p) => witnesses.push(p),
                None => return Err(LimitError::NotSeparable(i, j)),
            }
        }
        if witnesses.is_empty() {
            witnesses.push(0);
        }
        let point = base.upper_bound(&witnesses)?;
        let raw = terms.iter().map(|(t, k)| (t.at(point), *k));
        let value = match self.variant {
            Variant::Free => GroupElem::Free(Word::reduce(raw)?),
            Variant::Abelian => GroupElem::Abelian(AbelianVector::from_terms(raw)?),
        };
        if value.complexity() != terms.len() || terms.iter().any(|(_, k)| *k == 0) {
            return Err(LimitError::ClaimViolated("separated product is not reduced".into()));
        }
        Ok(Certificate { point, value })
    }

    /// `{"stabilizer": id, "terms": [{"thread": {point: elem}, "exp": k}]}`.
    pub fn decomposition_json(&self, d: &Decomposition) -> Value {
        let base = self.carrier.base();
        let terms: Vec<Value> = d
            .terms
            .iter()
            .map(|(t, k)| {
                let thread: serde_json::Map<String, Value> =
                    self.carrier.thread_names(t).into_iter().map(|(p, a)| (p, Value::String(a))).collect();
                json!({ "thread": thread, "exp": k })
            })
            .collect();
        json!({ "stabilizer": base.name(d.stabilizer), "terms": terms })
    }
}

fn v_coefficient(g: &GroupElem, a: FiberIdx) -> Exponent {
    match g {
        GroupElem::Abelian(v) => v.coefficient(&a),
        GroupElem::Free(_) => 0,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;
    use std::sync::Arc;

    use super::super::tests::collapse;
    use super::*;
    use crate::invsys::InverseSystem;
    use crate::poset::DirectedSet;

    fn lits(m: &[(&str, &str)]) -> HashMap<String, String> {
        m.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn collapse_decomposition() {
        let g = collapse(Variant::Free);
        let x = g.eager_from_literals(&lits(&[("q", "a.b^-1"), ("p", "")])).unwrap();
        let d = g.decompose(&x).unwrap();
        assert_eq!(g.carrier().base().name(d.stabilizer), "q");
        assert_eq!(d.terms, vec![(Thread(vec![0, 0]), 1), (Thread(vec![0, 1]), -1)]);
        assert!(g.is_canonical(&d));
        assert!(g.equal(&g.recompose(&d).unwrap(), &x).unwrap());
        let j = g.decomposition_json(&d);
        assert_eq!(j["terms"][1]["thread"]["q"], "b");
        assert_eq!(j["terms"][1]["exp"], -1);
    }

    #[test]
    fn abelian_terms_in_name_order() {
        let g = collapse(Variant::Abelian);
        let x = g.eager_from_literals(&lits(&[("q", "{b:3,a:-1}"), ("p", "{c:2}")])).unwrap();
        let d = g.decompose(&x).unwrap();
        assert_eq!(d.terms, vec![(Thread(vec![0, 0]), -1), (Thread(vec![0, 1]), 3)]);
    }

    #[test]
    fn identity_decomposes_to_nothing() {
        let g = GroupSystem::new(InverseSystem::restriction(2).unwrap(), Variant::Free);
        assert!(g.decompose(&g.identity()).unwrap().is_empty());
    }

    #[test]
    fn certificate_for_alternating_product() {
        let g = GroupSystem::new(InverseSystem::restriction(2).unwrap(), Variant::Free);
        let th = g.carrier().enumerate_threads().unwrap();
        let terms = vec![(th[0].clone(), 2), (th[1].clone(), -1), (th[0].clone(), 1)];
        let c = g.freeness_certificate(&terms).unwrap();
        assert_eq!(c.value.complexity(), 3);
        assert_eq!(g.freeness_certificate(&[(th[2].clone(), 1), (th[2].clone(), 1)]), Err(LimitError::NotSeparable(0, 1)));
        assert_eq!(g.freeness_certificate(&[]), Err(LimitError::EmptyProduct));
    }

    /// A_n = {0..n} on the naturals, with everything above m collapsing to 0.
    fn collapsing_chain(probe: usize) -> GroupSystem {
        let base = DirectedSet::omega(probe).unwrap();
        let fibers: HashMap<String, Vec<String>> =
            (0..probe).map(|n| (n.to_string(), (0..=n).map(|i| i.to_string()).collect())).collect();
        let maps: Vec<_> = (1..probe)
            .map(|n| {
                let m = n - 1;
                let f = (0..=n).map(|i| (i.to_string(), if i <= m { i } else { 0 }.to_string())).collect();
                (m.to_string(), n.to_string(), f)
            })
            .collect();
        GroupSystem::new(InverseSystem::from_named(base, &fibers, &maps).unwrap(), Variant::Free)
    }

    fn commutators(p: Point) -> Result<GroupElem, LimitError> {
        let raw = (1..=p.min(10)).flat_map(|i| [(i, 1), (0, 1), (i, -1), (0, -1)]);
        Ok(GroupElem::Free(Word::reduce(raw)?))
    }

    #[test]
    fn lazy_stabilization_on_the_naturals() {
        let g = collapsing_chain(20);
        let x = g.lazy(Arc::new(commutators));
        let s = g.stabilization_point(&x).unwrap();
        assert_eq!((g.carrier().base().name(s.point), s.length), ("10", 40));
        let y = g.lazy(Arc::new(commutators));
        let short = StabilizationParams { window: 3, budget: 5 };
        assert_eq!(g.stabilization_point_with(&y, short), Err(LimitError::Unstable { probes: 5 }));
    }
}
