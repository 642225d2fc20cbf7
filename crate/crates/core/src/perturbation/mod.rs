//! Symbolic perturbation theory for the non-local `φⁿ` interaction.
//!
//! Terms are formal integrands: rational coefficients, `κ`/`ħ` powers,
//! θ-chains over time stamps, kernel and cutoff factors, Wightman
//! propagators and leftover fields. Nothing here evaluates `Λₙ`.

pub mod expand;
pub mod interaction;
pub mod label;
pub mod term;
pub mod wick;

pub use expand::{
    check_guard, closed_display_groups, feynman_diagrams, feynman_terms, free_field, r_product_bogoliubov,
    r_product_closed, summarize_topologies, Bogoliubov, Closed, DisplayGroup, Expansion, ExpansionStrategy, Rules,
    StrategyRegistry, TopologySummary, MAX_ORDER, MAX_POWER,
};
pub use interaction::{effective_interaction, EffectiveInteraction, LocalFieldSpec};
pub use label::{Label, Vertex};
pub use term::{DiagramTerm, KernelFactor, Propagator, TermSum, Topology, SCHEMA_VERSION};
pub use wick::{
    contraction_count, contractions, contractions_at, interleavings, star_terms, star_wick, t_bar_product, t_product,
    Contraction,
};
