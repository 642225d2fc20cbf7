//! Symbolic integrand terms, their canonical form and serialization.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::label::Label;
use crate::error::{Error, Result};

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Propagator {
    /// `Δ⁺(from − to)`.
    Wightman { from: Label, to: Label },
    /// `∏ Δ⁺(a − b) − ∏ Δ⁺(b − a)` over the listed lines `(a, b)`.
    /// A single line is the Pauli–Jordan function `Δ_m(a − b)`.
    Commutator { lines: Vec<(Label, Label)> },
}

impl Propagator {
    pub fn lines(&self) -> usize {
        match self {
            Propagator::Wightman { .. } => 1,
            Propagator::Commutator { lines } => lines.len(),
        }
    }

    fn endpoints(&self) -> Vec<Label> {
        match self {
            Propagator::Wightman { from, to } => vec![*from, *to],
            Propagator::Commutator { lines } => lines.iter().flat_map(|&(a, b)| [a, b]).collect(),
        }
    }
}

/// `Γₙ(slots; vertex)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KernelFactor {
    pub vertex: Label,
    pub slots: Vec<Label>,
    pub n: u32,
}

impl KernelFactor {
    pub fn for_stamp(stamp: u32, n: u32) -> Self {
        KernelFactor { vertex: Label::Stamp(stamp), slots: (1..=n).map(|i| Label::slot(stamp, i)).collect(), n }
    }
}

/// One integrand term
/// `sym · i^{i_power} · κ^{kappa_power} ħ^{hbar_power} · θ-chain · g · Γ · propagators · fields`.
///
/// `hbar_power` is `L − k` (lines minus stamps): the global `ħ^{-k}` of the
/// expansion is already applied. The rules' `κᵏħᴸ` grading is
/// [`DiagramTerm::rules_hbar_power`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagramTerm {
    pub kappa_power: u32,
    pub hbar_power: i32,
    /// Power of `i`, kept in `{0, 1}`; signs live in `sym_factor`.
    pub i_power: u8,
    /// Time labels in decreasing time: `[a, b, c]` stands for `θ(a⁰−b⁰)θ(b⁰−c⁰)`.
    pub theta_chain: Vec<Label>,
    pub kernels: Vec<KernelFactor>,
    pub propagators: Vec<Propagator>,
    pub fields: Vec<Label>,
    pub cutoffs: Vec<Label>,
    pub sym_factor: Ratio<i64>,
}

impl DiagramTerm {
    /// The bare field monomial `φ(l₁)⋯φ(l_m)` with unit coefficient.
    pub fn monomial(fields: Vec<Label>) -> Self {
        DiagramTerm {
            kappa_power: 0,
            hbar_power: 0,
            i_power: 0,
            theta_chain: Vec::new(),
            kernels: Vec::new(),
            propagators: Vec::new(),
            fields,
            cutoffs: Vec::new(),
            sym_factor: Ratio::from_integer(1),
        }
    }

    /// Multiplies the coefficient by `r · iᵖ`, keeping `i_power ∈ {0, 1}`.
    pub fn scale(&mut self, r: Ratio<i64>, p: u8) {
        let total = (self.i_power + p) % 4;
        self.sym_factor *= r;
        if total >= 2 {
            self.sym_factor = -self.sym_factor;
        }
        self.i_power = total % 2;
    }

    pub fn theta_factors(&self) -> Vec<(Label, Label)> {
        self.theta_chain.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Number of propagator lines `L`.
    pub fn lines(&self) -> usize {
        self.propagators.iter().map(Propagator::lines).sum()
    }

    pub fn rules_hbar_power(&self) -> i32 {
        self.hbar_power + self.kappa_power as i32
    }

    /// Every vertex and slot the term is integrated over; the external
    /// point `y` is not among them.
    pub fn integration_vars(&self) -> Vec<Label> {
        let mut vars: Vec<Label> = self.theta_chain.iter().copied().filter(|&l| l != Label::Y).collect();
        for k in &self.kernels {
            vars.push(k.vertex);
            vars.extend(&k.slots);
        }
        vars.sort();
        vars.dedup();
        vars
    }

    /// Checks that every kernel slot is used exactly once, either as a
    /// propagator end or as a field, that no stray slots appear, and that
    /// `hbar_power = L − k`.
    pub fn check_occupancy(&self) -> Result<()> {
        let mut uses: HashMap<Label, usize> = HashMap::new();
        for p in &self.propagators {
            for l in p.endpoints() {
                *uses.entry(l).or_default() += 1;
            }
        }
        for &l in &self.fields {
            *uses.entry(l).or_default() += 1;
        }
        let mut declared = 0;
        for k in &self.kernels {
            for s in &k.slots {
                declared += 1;
                match uses.get(s) {
                    Some(1) => {}
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "slot {s} used {} times",
                            other.copied().unwrap_or(0)
                        )))
                    }
                }
            }
        }
        let slot_uses = uses.keys().filter(|l| l.is_slot()).count();
        if slot_uses != declared {
            return Err(Error::InvalidArgument("slot used without a kernel factor".into()));
        }
        if self.hbar_power != self.lines() as i32 - self.kappa_power as i32 {
            return Err(Error::InvalidArgument(format!(
                "hbar power {} but {} lines at order {}",
                self.hbar_power,
                self.lines(),
                self.kappa_power
            )));
        }
        Ok(())
    }

    /// Replaces every commutator group by its two signed Wightman products.
    pub fn expand_commutators(&self) -> Vec<DiagramTerm> {
        let mut out = vec![DiagramTerm { propagators: Vec::new(), ..self.clone() }];
        for p in &self.propagators {
            match p {
                Propagator::Wightman { .. } => out.iter_mut().for_each(|t| t.propagators.push(p.clone())),
                Propagator::Commutator { lines } => {
                    let forward: Vec<Propagator> =
                        lines.iter().map(|&(a, b)| Propagator::Wightman { from: a, to: b }).collect();
                    let backward: Vec<Propagator> =
                        lines.iter().map(|&(a, b)| Propagator::Wightman { from: b, to: a }).collect();
                    out = out
                        .into_iter()
                        .flat_map(|t| {
                            let mut plus = t.clone();
                            plus.propagators.extend(forward.iter().cloned());
                            let mut minus = t;
                            minus.propagators.extend(backward.iter().cloned());
                            minus.sym_factor = -minus.sym_factor;
                            [plus, minus]
                        })
                        .collect();
                }
            }
        }
        out
    }

    /// Normal form of a term without commutator groups: stamps renumbered
    /// by θ-chain position, slots renumbered by incidence, factors sorted.
    fn canonical_form(&self) -> DiagramTerm {
        fn note(stamps: &mut Vec<u32>, l: Label) {
            if let Label::Stamp(s) | Label::Slot { stamp: s, .. } = l {
                if !stamps.contains(&s) {
                    stamps.push(s);
                }
            }
        }
        let mut stamps: Vec<u32> = Vec::new();
        self.theta_chain.iter().for_each(|&l| note(&mut stamps, l));
        let chained = stamps.len();
        self.kernels.iter().for_each(|k| note(&mut stamps, k.vertex));
        self.cutoffs.iter().for_each(|&l| note(&mut stamps, l));
        self.fields.iter().for_each(|&l| note(&mut stamps, l));
        self.propagators.iter().flat_map(Propagator::endpoints).for_each(|l| note(&mut stamps, l));
        stamps[chained..].sort_unstable();
        let renumber: HashMap<u32, u32> = stamps.iter().enumerate().map(|(i, &s)| (s, i as u32 + 1)).collect();
        let vertex = |l: Label| match l.vertex() {
            Label::Stamp(s) => Label::Stamp(renumber[&s]),
            v => v,
        };

        // Role of a slot: 0 = line leaving towards a vertex, 1 = line arriving, 2 = field.
        type Role = (u8, Option<Label>);
        let mut lines: Vec<(Label, Label)> = self
            .propagators
            .iter()
            .map(|p| match p {
                Propagator::Wightman { from, to } => (*from, *to),
                Propagator::Commutator { .. } => unreachable!("canonical_form runs after expansion"),
            })
            .collect();
        let mut role_counts: BTreeMap<(Label, Role), u32> = BTreeMap::new();
        for &(a, b) in &lines {
            if a.is_slot() {
                *role_counts.entry((vertex(a), (0, Some(vertex(b))))).or_default() += 1;
            }
            if b.is_slot() {
                *role_counts.entry((vertex(b), (1, Some(vertex(a))))).or_default() += 1;
            }
        }
        for &f in &self.fields {
            if f.is_slot() {
                *role_counts.entry((vertex(f), (2, None))).or_default() += 1;
            }
        }
        let mut next: HashMap<(Label, Role), u32> = HashMap::new();
        let mut current: Option<Label> = None;
        let mut cursor = 1;
        for (&(v, role), &count) in &role_counts {
            if current != Some(v) {
                current = Some(v);
                cursor = 1;
            }
            next.insert((v, role), cursor);
            cursor += count;
        }
        let mut take = |l: Label, role: Role| -> Label {
            if !l.is_slot() {
                return l;
            }
            let v = vertex(l);
            let slot = next.get_mut(&(v, role)).expect("role counted above");
            let index = *slot;
            *slot += 1;
            match v {
                Label::Stamp(s) => Label::slot(s, index),
                _ => unreachable!(),
            }
        };

        lines.sort_by_key(|&(a, b)| (vertex(a), vertex(b)));
        let mut propagators: Vec<Propagator> = lines
            .iter()
            .map(|&(a, b)| Propagator::Wightman {
                from: take(a, (0, Some(vertex(b)))),
                to: take(b, (1, Some(vertex(a)))),
            })
            .collect();
        propagators.sort();
        let mut fields: Vec<Label> = self.fields.iter().map(|&f| take(f, (2, None))).collect();
        fields.sort();
        let mut kernels: Vec<KernelFactor> = self
            .kernels
            .iter()
            .map(|k| match vertex(k.vertex) {
                Label::Stamp(s) => KernelFactor::for_stamp(s, k.n),
                v => KernelFactor { vertex: v, ..k.clone() },
            })
            .collect();
        kernels.sort();
        let mut cutoffs: Vec<Label> = self.cutoffs.iter().map(|&l| vertex(l)).collect();
        cutoffs.sort();

        DiagramTerm {
            theta_chain: self.theta_chain.iter().map(|&l| vertex(l)).collect(),
            kernels,
            propagators,
            fields,
            cutoffs,
            ..self.clone()
        }
    }

    /// Number of labelled terms (stamp and slot relabelings) that share this
    /// canonical form, assuming the θ-chain orders every stamp.
    pub fn orbit_size(&self) -> u64 {
        let stamps = self.kernels.len() as u64;
        let mut orbit: u64 = (1..=stamps).product();
        for k in &self.kernels {
            orbit *= (1..=k.n as u64).product::<u64>();
        }
        let mut denominators: BTreeMap<(Label, Option<Label>), u64> = BTreeMap::new();
        for p in &self.propagators {
            if let Propagator::Wightman { from, to } = p {
                *denominators.entry((from.vertex(), Some(to.vertex()))).or_default() += 1;
            }
        }
        for f in self.fields.iter().filter(|f| f.is_slot()) {
            *denominators.entry((f.vertex(), None)).or_default() += 1;
        }
        for &c in denominators.values() {
            orbit /= (1..=c).product::<u64>();
        }
        orbit
    }

    /// Per-assignment coefficient with parallel lines summed over ordered
    /// label tuples, the normalization used when a diagram is written out
    /// as explicit sums over slot labels.
    pub fn display_prefactor(&self) -> Ratio<i64> {
        let parallel: u64 = self.topology().bundles.values().map(|&t| (1..=t as u64).product::<u64>()).product();
        self.sym_factor.abs() / Ratio::from_integer((self.orbit_size() * parallel) as i64)
    }

    pub fn topology(&self) -> Topology {
        let mut bundles: BTreeMap<(Label, Label), u32> = BTreeMap::new();
        for p in &self.propagators {
            let ends: Vec<(Label, Label)> = match p {
                Propagator::Wightman { from, to } => vec![(*from, *to)],
                Propagator::Commutator { lines } => lines.clone(),
            };
            for (a, b) in ends {
                let (u, v) = (a.vertex(), b.vertex());
                *bundles.entry(if u <= v { (u, v) } else { (v, u) }).or_default() += 1;
            }
        }
        let mut fields: BTreeMap<Label, u32> = BTreeMap::new();
        for f in &self.fields {
            *fields.entry(f.vertex()).or_default() += 1;
        }
        Topology { theta_chain: self.theta_chain.clone(), bundles, fields }
    }

    fn shape_key(&self) -> DiagramTerm {
        DiagramTerm { sym_factor: Ratio::zero(), ..self.clone() }
    }

    pub fn to_json(&self) -> Value {
        let kernels: Vec<Value> =
            self.kernels.iter().map(|k| json!({"vertex": k.vertex, "slots": k.slots, "n": k.n})).collect();
        json!({
            "kappa_power": self.kappa_power,
            "hbar_power": self.hbar_power,
            "i_power": self.i_power,
            "sym_factor": {"num": *self.sym_factor.numer(), "den": *self.sym_factor.denom()},
            "theta_chain": self.theta_chain,
            "theta_factors": self.theta_factors(),
            "kernels": kernels,
            "propagators": self.propagators,
            "fields": self.fields,
            "cutoffs": self.cutoffs,
            "integration_vars": self.integration_vars(),
        })
    }
}

impl fmt::Display for DiagramTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.sym_factor)?;
        if self.i_power == 1 {
            write!(f, "·i")?;
        }
        write!(f, " κ^{} ħ^{}", self.kappa_power, self.hbar_power)?;
        if self.theta_chain.len() > 1 {
            let chain: Vec<String> = self.theta_chain.iter().map(Label::to_string).collect();
            write!(f, " θ({})", chain.join(" > "))?;
        }
        for c in &self.cutoffs {
            write!(f, " g({c})")?;
        }
        for k in &self.kernels {
            let slots: Vec<String> = k.slots.iter().map(Label::to_string).collect();
            write!(f, " Γ{}({}; {})", k.n, slots.join(", "), k.vertex)?;
        }
        for p in &self.propagators {
            match p {
                Propagator::Wightman { from, to } => write!(f, " Δ⁺({from} − {to})")?,
                Propagator::Commutator { lines } => {
                    let mut fwd = String::new();
                    let mut bwd = String::new();
                    for (a, b) in lines {
                        let _ = write!(fwd, "Δ⁺({a} − {b})");
                        let _ = write!(bwd, "Δ⁺({b} − {a})");
                    }
                    write!(f, " [{fwd} − {bwd}]")?;
                }
            }
        }
        for l in &self.fields {
            write!(f, " φ({l})")?;
        }
        Ok(())
    }
}

/// Vertex-level shape of a term: θ-chain, undirected line multiplicities
/// between vertices, and free fields per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Topology {
    pub theta_chain: Vec<Label>,
    #[serde(serialize_with = "pairs_as_list")]
    pub bundles: BTreeMap<(Label, Label), u32>,
    pub fields: BTreeMap<Label, u32>,
}

fn pairs_as_list<S: serde::Serializer>(
    map: &BTreeMap<(Label, Label), u32>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(map.iter().map(|((a, b), t)| (a, b, t)))
}

/// Streams terms into canonical form, merging as it goes.
#[derive(Debug, Default)]
pub(crate) struct CanonicalAccumulator {
    merged: HashMap<DiagramTerm, Ratio<i64>>,
}

impl CanonicalAccumulator {
    pub fn add(&mut self, term: &DiagramTerm) {
        for expanded in term.expand_commutators() {
            let canonical = expanded.canonical_form();
            *self.merged.entry(canonical.shape_key()).or_insert_with(Ratio::zero) += canonical.sym_factor;
        }
    }

    pub fn finish(self) -> TermSum {
        let mut terms: Vec<DiagramTerm> = self
            .merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(key, c)| DiagramTerm { sym_factor: c, ..key })
            .collect();
        terms.sort();
        TermSum { terms }
    }
}

/// A formal sum of terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermSum {
    terms: Vec<DiagramTerm>,
}

impl TermSum {
    pub fn new(terms: Vec<DiagramTerm>) -> Self {
        TermSum { terms }
    }

    pub fn terms(&self) -> &[DiagramTerm] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<DiagramTerm> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn extend(&mut self, other: TermSum) {
        self.terms.extend(other.terms);
    }

    /// Expands commutator groups, relabels into normal form, merges equal
    /// terms by adding coefficients and drops the ones that cancel.
    pub fn canonicalize(&self) -> TermSum {
        let mut acc = CanonicalAccumulator::default();
        self.terms.iter().for_each(|t| acc.add(t));
        acc.finish()
    }

    /// Merges terms that are identical as written, without relabeling.
    pub fn merge_identical(&self) -> TermSum {
        let mut merged: HashMap<DiagramTerm, Ratio<i64>> = HashMap::new();
        for t in &self.terms {
            let mut key = t.shape_key();
            key.propagators.sort();
            key.fields.sort();
            key.kernels.sort();
            key.cutoffs.sort();
            *merged.entry(key).or_insert_with(Ratio::zero) += t.sym_factor;
        }
        let mut terms: Vec<DiagramTerm> =
            merged.into_iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| DiagramTerm { sym_factor: c, ..k }).collect();
        terms.sort();
        TermSum { terms }
    }

    /// Replaces every θ-chain by 1.
    pub fn forget_theta(&self) -> TermSum {
        TermSum { terms: self.terms.iter().map(|t| DiagramTerm { theta_chain: Vec::new(), ..t.clone() }).collect() }
    }

    pub fn topologies(&self) -> BTreeMap<Topology, Vec<&DiagramTerm>> {
        let mut out: BTreeMap<Topology, Vec<&DiagramTerm>> = BTreeMap::new();
        for t in &self.terms {
            out.entry(t.topology()).or_default().push(t);
        }
        out
    }

    /// Term count per `ħ` power.
    pub fn hbar_histogram(&self) -> BTreeMap<i32, usize> {
        let mut h = BTreeMap::new();
        for t in &self.terms {
            *h.entry(t.hbar_power).or_default() += 1;
        }
        h
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "terms": self.terms.iter().map(DiagramTerm::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn render_text(&self) -> String {
        self.terms.iter().map(|t| format!("{t}\n")).collect()
    }
}
