//! Wick contractions and the products built from them.

use std::collections::HashSet;

use super::label::{Label, Vertex};
use super::term::{DiagramTerm, KernelFactor, Propagator, TermSum};
use crate::error::{Error, Result};

/// One way of pairing fields of a left factor with fields of a right factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    /// `(left, right)` pairs, each contributing `ħ Δ⁺(left − right)`.
    pub pairs: Vec<(Label, Label)>,
    /// Uncontracted fields, left operand first.
    pub rest: Vec<Label>,
}

fn choose_indices(len: usize, c: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, len: usize, c: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == c {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            if len - i < c - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, len, c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, len, c, &mut Vec::with_capacity(c), &mut out);
    out
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(items, k + 1, out);
            items.swap(k, i);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), 0, &mut out);
    out.sort();
    out
}

/// All contractions of `left` against `right` with exactly `c` pairs.
pub fn contractions_at(left: &[Label], right: &[Label], c: usize) -> Vec<Contraction> {
    let mut out = Vec::new();
    if c > left.len().min(right.len()) {
        return out;
    }
    let perms = permutations(c);
    for ls in choose_indices(left.len(), c) {
        for rs in choose_indices(right.len(), c) {
            let rest: Vec<Label> = left
                .iter()
                .enumerate()
                .filter(|(i, _)| !ls.contains(i))
                .chain(right.iter().enumerate().filter(|(i, _)| !rs.contains(i)))
                .map(|(_, &l)| l)
                .collect();
            for p in &perms {
                let pairs = ls.iter().zip(p).map(|(&i, &j)| (left[i], right[rs[j]])).collect();
                out.push(Contraction { pairs, rest: rest.clone() });
            }
        }
    }
    out
}

/// All contractions of every order `c = 0..=min(|left|, |right|)`.
pub fn contractions(left: &[Label], right: &[Label]) -> Vec<Contraction> {
    (0..=left.len().min(right.len())).flat_map(|c| contractions_at(left, right, c)).collect()
}

/// `C(p, c) · C(q, c) · c!`.
pub fn contraction_count(p: u64, q: u64, c: u64) -> u64 {
    if c > p.min(q) {
        return 0;
    }
    let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
    binom(p, c) * binom(q, c) * (1..=c).product::<u64>()
}

/// `A ⋆ B` for two normally ordered monomials at distinct points.
pub fn star_wick(a: &[Label], b: &[Label]) -> Result<TermSum> {
    let seen: HashSet<&Label> = a.iter().collect();
    if let Some(l) = b.iter().find(|l| seen.contains(l)) {
        return Err(Error::RepeatedLabel(l.to_string()));
    }
    Ok(TermSum::new(star_terms(&DiagramTerm::monomial(a.to_vec()), &DiagramTerm::monomial(b.to_vec()))))
}

/// Every order-preserving merge of disjoint chains.
pub fn interleavings(chains: &[Vec<Label>]) -> Vec<Vec<Label>> {
    fn rec(chains: &[Vec<Label>], pos: &mut Vec<usize>, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        let mut done = true;
        for i in 0..chains.len() {
            if pos[i] < chains[i].len() {
                done = false;
                cur.push(chains[i][pos[i]]);
                pos[i] += 1;
                rec(chains, pos, cur, out);
                pos[i] -= 1;
                cur.pop();
            }
        }
        if done {
            out.push(cur.clone());
        }
    }
    let chains: Vec<Vec<Label>> = chains.iter().filter(|c| !c.is_empty()).cloned().collect();
    let mut out = Vec::new();
    rec(&chains, &mut vec![0; chains.len()], &mut Vec::new(), &mut out);
    out
}

/// `a ⋆ b` for two terms. Products of θ-chains are resolved into the sum
/// over all total orders compatible with both.
pub fn star_terms(a: &DiagramTerm, b: &DiagramTerm) -> Vec<DiagramTerm> {
    let chains = interleavings(&[a.theta_chain.clone(), b.theta_chain.clone()]);
    let mut out = Vec::new();
    for c in contractions(&a.fields, &b.fields) {
        let mut propagators = a.propagators.clone();
        propagators.extend(b.propagators.iter().cloned());
        propagators.extend(c.pairs.iter().map(|&(from, to)| Propagator::Wightman { from, to }));
        let mut base = DiagramTerm {
            kappa_power: a.kappa_power + b.kappa_power,
            hbar_power: a.hbar_power + b.hbar_power + c.pairs.len() as i32,
            i_power: a.i_power,
            theta_chain: Vec::new(),
            kernels: [a.kernels.clone(), b.kernels.clone()].concat(),
            propagators,
            fields: c.rest,
            cutoffs: [a.cutoffs.clone(), b.cutoffs.clone()].concat(),
            sym_factor: a.sym_factor,
        };
        base.scale(b.sym_factor, b.i_power);
        for chain in &chains {
            out.push(DiagramTerm { theta_chain: chain.clone(), ..base.clone() });
        }
    }
    out
}

/// Left-to-right `⋆` product of several terms.
pub fn star_chain(factors: &[DiagramTerm]) -> Vec<DiagramTerm> {
    let Some((first, rest)) = factors.split_first() else {
        return vec![DiagramTerm::monomial(Vec::new())];
    };
    rest.iter().fold(vec![first.clone()], |acc, f| acc.iter().flat_map(|t| star_terms(t, f)).collect())
}

/// Extends the θ-chain to a total order on `labels` by summing over every
/// placement of the labels it does not mention.
pub fn complete_chain(term: &DiagramTerm, labels: &[Label]) -> Vec<DiagramTerm> {
    let mut chains = vec![term.theta_chain.clone()];
    chains.extend(labels.iter().filter(|l| !term.theta_chain.contains(l)).map(|&l| vec![l]));
    interleavings(&chains).into_iter().map(|theta_chain| DiagramTerm { theta_chain, ..term.clone() }).collect()
}

/// The bare factor a vertex contributes: its fields, plus `g` and `Γₙ` for a stamp.
pub fn vertex_term(v: &Vertex) -> DiagramTerm {
    let mut t = DiagramTerm::monomial(v.fields());
    if let Vertex::Stamp { id, n } = *v {
        t.kernels.push(KernelFactor::for_stamp(id, n));
        t.cutoffs.push(Label::Stamp(id));
    }
    t
}

fn check_distinct(vertices: &[Vertex]) -> Result<()> {
    let mut seen = HashSet::new();
    for v in vertices {
        if !seen.insert(v.time_label()) {
            return Err(Error::RepeatedLabel(v.time_label().to_string()));
        }
    }
    Ok(())
}

fn ordered_product(vertices: &[Vertex], reverse: bool) -> Result<Vec<DiagramTerm>> {
    check_distinct(vertices)?;
    let mut out = Vec::new();
    for perm in permutations(vertices.len()) {
        let chain: Vec<Label> = perm.iter().map(|&i| vertices[i].time_label()).collect();
        let mut factors: Vec<DiagramTerm> = perm.iter().map(|&i| vertex_term(&vertices[i])).collect();
        if reverse {
            factors.reverse();
        }
        for mut t in star_chain(&factors) {
            t.theta_chain = chain.clone();
            out.push(t);
        }
    }
    Ok(out)
}

/// `T(v₁ ⊗ ⋯ ⊗ v_m) = Σ_π θ(π₁ > ⋯ > π_m) v_{π₁} ⋆ ⋯ ⋆ v_{π_m}`.
pub fn t_product(vertices: &[Vertex]) -> Result<TermSum> {
    ordered_product(vertices, false).map(TermSum::new)
}

/// Antichronological product: the same θ-chains with the `⋆` order reversed.
pub fn t_bar_product(vertices: &[Vertex]) -> Result<TermSum> {
    ordered_product(vertices, true).map(TermSum::new)
}
