//! Order-by-order expansion of the interacting field
//! `φ_S(y) = Σ_k (κ/ħ)ᵏ/k! R_{k,1}(S^{⊗k}, φ(y))` for `S = −(1/n!) ∫ g Γₙ φⁿ`.
//!
//! Three independent routes produce the same canonical [`TermSum`]:
//!
//! * `rules`: diagram enumeration, one nested commutator per time order;
//! * `bogoliubov`: the alternating subset sum of T̄- and T-products;
//! * `closed`: the explicit first- and second-order formulas.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use super::label::{Label, Vertex};
use super::term::{CanonicalAccumulator, DiagramTerm, Propagator, TermSum, Topology, SCHEMA_VERSION};
use super::wick::{complete_chain, contractions_at, permutations, star_terms, vertex_term};
use crate::error::{Error, Result};

/// Largest order accepted by the expansion routes.
pub const MAX_ORDER: u32 = 3;
/// Largest interaction power accepted by the expansion routes.
pub const MAX_POWER: u32 = 4;

pub fn check_guard(k: u32, n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("interaction power must be at least 1".into()));
    }
    if k > MAX_ORDER || n > MAX_POWER {
        return Err(Error::Guard(format!(
            "order {k} with power {n} exceeds the limits k ≤ {MAX_ORDER}, n ≤ {MAX_POWER}"
        )));
    }
    Ok(())
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// `φ(y)`.
pub fn free_field() -> TermSum {
    let mut t = DiagramTerm::monomial(vec![Label::Y]);
    t.theta_chain = vec![Label::Y];
    TermSum::new(vec![t])
}

/// `(κ/ħ) S` at stamp `id`.
fn interaction(id: u32, n: u32) -> DiagramTerm {
    let mut t = vertex_term(&Vertex::Stamp { id, n });
    t.kappa_power = 1;
    t.hbar_power = -1;
    t.sym_factor = Ratio::new(-1, factorial(n));
    t
}

fn observable() -> DiagramTerm {
    vertex_term(&Vertex::External { id: 0 })
}

fn time_labels(k: u32) -> Vec<Label> {
    std::iter::once(Label::Y).chain((1..=k).map(Label::Stamp)).collect()
}

/// `Σ_π θ(π) f_{π₁} ⋆ ⋯ ⋆ f_{π_m}`, or with the `⋆` order reversed.
fn time_ordered(factors: &[(Label, DiagramTerm)], reverse: bool) -> Vec<DiagramTerm> {
    if factors.is_empty() {
        return vec![DiagramTerm::monomial(Vec::new())];
    }
    let mut out = Vec::new();
    for perm in permutations(factors.len()) {
        let chain: Vec<Label> = perm.iter().map(|&i| factors[i].0).collect();
        let mut ordered: Vec<&DiagramTerm> = perm.iter().map(|&i| &factors[i].1).collect();
        if reverse {
            ordered.reverse();
        }
        let mut acc = vec![ordered[0].clone()];
        for f in &ordered[1..] {
            acc = acc.iter().flat_map(|t| star_terms(t, f)).collect();
        }
        for mut t in acc {
            t.theta_chain = chain.clone();
            out.push(t);
        }
    }
    out
}

fn factor(label: Label, n: u32) -> (Label, DiagramTerm) {
    match label {
        Label::Stamp(id) => (label, interaction(id, n)),
        _ => (label, observable()),
    }
}

/// Collects `sign · iᵏ/k! · (product)` into canonical form.
fn finish(acc: &mut CanonicalAccumulator, terms: Vec<DiagramTerm>, sign: i64, k: u32) {
    let labels = time_labels(k);
    for mut t in terms {
        t.scale(Ratio::new(sign, factorial(k)), (k % 4) as u8);
        for full in complete_chain(&t, &labels) {
            acc.add(&full);
        }
    }
}

/// `Rₖ = iᵏ Σ_I (−1)^{|I|} T̄(S_I ⊗ F) ⋆ T(S_{I^c})`, Wick-expanded.
pub fn r_product_bogoliubov(k: u32, n: u32) -> Result<TermSum> {
    check_guard(k, n)?;
    if k == 0 {
        return Ok(free_field());
    }
    let mut acc = CanonicalAccumulator::default();
    for mask in 0u32..(1 << k) {
        let (inside, outside): (Vec<u32>, Vec<u32>) = (1..=k).partition(|s| mask & (1 << (s - 1)) != 0);
        let mut left: Vec<(Label, DiagramTerm)> = inside.iter().map(|&s| factor(Label::Stamp(s), n)).collect();
        left.push(factor(Label::Y, n));
        let right: Vec<(Label, DiagramTerm)> = outside.iter().map(|&s| factor(Label::Stamp(s), n)).collect();
        let left = time_ordered(&left, true);
        let right = time_ordered(&right, false);
        let sign = if inside.len() % 2 == 0 { 1 } else { -1 };
        for l in &left {
            for r in &right {
                finish(&mut acc, star_terms(l, r), sign, k);
            }
        }
    }
    Ok(acc.finish())
}

/// A signed `⋆` product of T-product blocks, one top-level group of an
/// explicit retarded-product formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisplayGroup {
    pub sign: i8,
    pub blocks: Vec<Vec<Label>>,
}

/// The top-level groups of the explicit formulas
/// `R₁(S, F) = T(S, F) − S ⋆ F` and
/// `R₂(S₁, S₂, F) = T(S₁, S₂, F) − S₁ ⋆ T(S₂, F) − S₂ ⋆ T(S₁, F) − T(S₁, S₂) ⋆ F + S₁ ⋆ S₂ ⋆ F + S₂ ⋆ S₁ ⋆ F`,
/// both up to the overall `iᵏ`.
pub fn closed_display_groups(k: u32) -> Option<Vec<DisplayGroup>> {
    let (x1, x2, y) = (Label::Stamp(1), Label::Stamp(2), Label::Y);
    let g = |sign: i8, blocks: Vec<Vec<Label>>| DisplayGroup { sign, blocks };
    match k {
        1 => Some(vec![g(1, vec![vec![x1, y]]), g(-1, vec![vec![x1], vec![y]])]),
        2 => Some(vec![
            g(1, vec![vec![x1, x2, y]]),
            g(-1, vec![vec![x1], vec![x2, y]]),
            g(-1, vec![vec![x2], vec![x1, y]]),
            g(-1, vec![vec![x1, x2], vec![y]]),
            g(1, vec![vec![x1], vec![x2], vec![y]]),
            g(1, vec![vec![x2], vec![x1], vec![y]]),
        ]),
        _ => None,
    }
}

/// The explicit formulas for `k ≤ 2`. Higher orders fall back to the
/// subset sum and come back with `checked = false`.
pub fn r_product_closed(k: u32, n: u32) -> Result<(TermSum, bool)> {
    check_guard(k, n)?;
    if k == 0 {
        return Ok((free_field(), true));
    }
    let Some(groups) = closed_display_groups(k) else {
        return Ok((r_product_bogoliubov(k, n)?, false));
    };
    let mut acc = CanonicalAccumulator::default();
    for group in groups {
        let mut product = vec![DiagramTerm::monomial(Vec::new())];
        for block in &group.blocks {
            let factors: Vec<(Label, DiagramTerm)> = block.iter().map(|&l| factor(l, n)).collect();
            let ordered = time_ordered(&factors, false);
            product = product.iter().flat_map(|p| ordered.iter().flat_map(move |o| star_terms(p, o))).collect();
        }
        finish(&mut acc, product, group.sign as i64, k);
    }
    Ok((acc.finish(), true))
}

/// Labelled terms of the diagram rules before canonicalization.
///
/// For each time order `y > x_{π₁} > ⋯ > x_{π_k}` the stamp `x_{π_m}`
/// attaches through one commutator group of `c ≥ 1` lines to fields left
/// free by the later vertices; remaining slots become field factors.
pub fn feynman_diagrams(k: u32, n: u32) -> Result<TermSum> {
    check_guard(k, n)?;
    if k == 0 {
        return Ok(free_field());
    }
    let mut coefficient = Ratio::new(if k.is_multiple_of(2) { 1 } else { -1 }, factorial(k));
    for _ in 0..k {
        coefficient /= factorial(n);
    }
    let mut out = Vec::new();
    for perm in permutations(k as usize) {
        let order: Vec<u32> = perm.iter().map(|&i| i as u32 + 1).collect();
        let mut partial = vec![(vec![Label::Y], Vec::<Propagator>::new())];
        for &stamp in &order {
            let slots: Vec<Label> = (1..=n).map(|i| Label::slot(stamp, i)).collect();
            partial = partial
                .into_iter()
                .flat_map(|(free, groups)| {
                    let max = free.len().min(n as usize);
                    (1..=max)
                        .flat_map(|c| contractions_at(&free, &slots, c))
                        .map(|con| {
                            let mut groups = groups.clone();
                            groups.push(Propagator::Commutator { lines: con.pairs });
                            (con.rest, groups)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        let base = {
            let mut t = DiagramTerm::monomial(Vec::new());
            t.kappa_power = k;
            t.theta_chain = std::iter::once(Label::Y).chain(order.iter().map(|&s| Label::Stamp(s))).collect();
            t.kernels = (1..=k).map(|s| super::term::KernelFactor::for_stamp(s, n)).collect();
            t.cutoffs = (1..=k).map(Label::Stamp).collect();
            t.scale(coefficient, (k % 4) as u8);
            t
        };
        for (fields, propagators) in partial {
            let mut t = DiagramTerm { fields, propagators, ..base.clone() };
            t.hbar_power = t.lines() as i32 - k as i32;
            out.push(t);
        }
    }
    Ok(TermSum::new(out))
}

/// Canonical form of [`feynman_diagrams`].
pub fn feynman_terms(k: u32, n: u32) -> Result<TermSum> {
    Ok(feynman_diagrams(k, n)?.canonicalize())
}

/// One diagram shape with its multiplicities.
#[derive(Debug, Clone, Serialize)]
pub struct TopologySummary {
    pub topology: Topology,
    pub lines: usize,
    pub hbar_power: i32,
    /// Canonical terms (one per choice of Wightman directions).
    pub terms: usize,
    /// Labelled assignments behind each canonical term.
    pub assignments: u64,
    /// Coefficient magnitude per assignment with parallel lines summed over ordered tuples.
    #[serde(serialize_with = "ratio_json")]
    pub display_prefactor: Ratio<i64>,
}

fn ratio_json<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Ratio", 2)?;
    st.serialize_field("num", r.numer())?;
    st.serialize_field("den", r.denom())?;
    st.end()
}

pub fn summarize_topologies(terms: &TermSum) -> Vec<TopologySummary> {
    terms
        .topologies()
        .into_iter()
        .map(|(topology, members)| {
            let first = members[0];
            TopologySummary {
                topology,
                lines: first.lines(),
                hbar_power: first.hbar_power,
                terms: members.len(),
                assignments: first.orbit_size(),
                display_prefactor: first.display_prefactor(),
            }
        })
        .collect()
}

/// Output of an expansion route.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub strategy: &'static str,
    pub order: u32,
    pub power: u32,
    /// `false` when a route fell back to another one it was asked to cross-check.
    pub checked: bool,
    pub terms: TermSum,
}

impl Expansion {
    pub fn topology_count(&self) -> usize {
        self.terms.topologies().len()
    }

    pub fn hbar_histogram(&self) -> BTreeMap<i32, usize> {
        self.terms.hbar_histogram()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "strategy": self.strategy,
            "order": self.order,
            "power": self.power,
            "checked": self.checked,
            "topologies": summarize_topologies(&self.terms),
            "terms": self.terms.to_json()["terms"],
        })
    }
}

pub trait ExpansionStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn expand(&self, order: u32, power: u32) -> Result<Expansion>;
}

pub struct Rules;

impl ExpansionStrategy for Rules {
    fn name(&self) -> &'static str {
        "rules"
    }
    fn description(&self) -> &'static str {
        "diagram enumeration with nested commutators per time order"
    }
    fn expand(&self, order: u32, power: u32) -> Result<Expansion> {
        let terms = feynman_terms(order, power)?;
        Ok(Expansion { strategy: self.name(), order, power, checked: true, terms })
    }
}

pub struct Bogoliubov;

impl ExpansionStrategy for Bogoliubov {
    fn name(&self) -> &'static str {
        "bogoliubov"
    }
    fn description(&self) -> &'static str {
        "alternating subset sum of anti-time-ordered and time-ordered products"
    }
    fn expand(&self, order: u32, power: u32) -> Result<Expansion> {
        let terms = r_product_bogoliubov(order, power)?;
        Ok(Expansion { strategy: self.name(), order, power, checked: true, terms })
    }
}

pub struct Closed;

impl ExpansionStrategy for Closed {
    fn name(&self) -> &'static str {
        "closed"
    }
    fn description(&self) -> &'static str {
        "explicit first- and second-order formulas"
    }
    fn expand(&self, order: u32, power: u32) -> Result<Expansion> {
        let (terms, checked) = r_product_closed(order, power)?;
        Ok(Expansion { strategy: self.name(), order, power, checked, terms })
    }
}

#[derive(Clone, Default)]
pub struct StrategyRegistry {
    strategies: BTreeMap<&'static str, Arc<dyn ExpansionStrategy>>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_defaults() -> Self {
        let mut reg = Self::new();
        reg.register(Rules);
        reg.register(Bogoliubov);
        reg.register(Closed);
        reg
    }

    pub fn register<S: ExpansionStrategy + 'static>(&mut self, strategy: S) {
        self.strategies.insert(strategy.name(), Arc::new(strategy));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ExpansionStrategy>> {
        self.strategies.get(name).cloned().ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }
}
