use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::json;

use qst_core::algebra::{check_stur, default_step, state_moments, StateFunctional};
use qst_core::gamma::{commutative_limit_table, gamma_slice, SliceSpec};
use qst_core::kernel::{beta_pair, lambda_quadrature, lambda_split, KernelRegistry, SphereQuadrature};
use qst_core::microlocal::{classify_direction, ray_decay};
use qst_core::perturbation::{summarize_topologies, Expansion, StrategyRegistry};

use crate::input::{parse_line, read_momenta, ParseError};
use crate::table::{Cell, Format, Table};
use crate::Global;

/// What a verb produced, plus an optional tolerance breach report.
pub struct Outcome {
    pub body: Body,
    pub breach: Option<String>,
}

pub enum Body {
    Table(Table),
    Json(serde_json::Value),
}

impl From<Table> for Outcome {
    fn from(t: Table) -> Self {
        Outcome { body: Body::Table(t), breach: None }
    }
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Momentum file, one configuration per line.
    pub file: PathBuf,
}

pub fn kernel(g: &Global, args: &KernelArgs) -> Result<Outcome> {
    let rows = read_momenta(&args.file)?;
    let quad = SphereQuadrature::new(g.quad_order)?;
    let mut table = Table::new(
        "kernel",
        &[
            "line",
            "n",
            "beta_plus",
            "beta_minus",
            "lambda_closed",
            "lambda_quad_re",
            "lambda_quad_im",
            "delta_part",
            "continuous_part",
            "class",
        ],
    );
    table.meta("lambda_p", g.lambda_p);
    table.meta("quad_order", g.quad_order);
    table.meta("tol", g.tol);
    let mut breaches = Vec::new();
    for row in &rows {
        let b = beta_pair(&row.config, g.lambda_p);
        let split = lambda_split(&row.config, g.lambda_p);
        let quad_value = lambda_quadrature(&row.config, g.lambda_p, &quad);
        let class = if row.config.n() < 2 || row.config.is_zero() {
            Cell::Na
        } else {
            classify_direction(&row.config, g.variety_tol)?.membership.as_str().into()
        };
        let gap = (quad_value.re - split.total).abs().max(quad_value.im.abs());
        if gap > g.tol {
            breaches.push(format!("line {}: closed and quadrature differ by {gap:e}", row.line));
        }
        table.push(vec![
            row.line.into(),
            row.config.n().into(),
            b.beta_plus.into(),
            b.beta_minus.into(),
            split.total.into(),
            quad_value.re.into(),
            quad_value.im.into(),
            split.delta_part.into(),
            split.continuous_part.into(),
            class,
        ]);
    }
    Ok(Outcome { body: Body::Table(table), breach: join(breaches) })
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    /// Ray file, one direction per line.
    pub file: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
}

pub fn decay(g: &Global, args: &DecayArgs) -> Result<Outcome> {
    let rows = read_momenta(&args.file)?;
    let mut table = Table::new("decay", &["line", "class", "asymptote", "exponent", "residual", "method"]);
    table.meta("lambda_p", g.lambda_p);
    table.meta("t_range", json!([args.t_min, args.t_max]));
    table.meta("samples", args.samples);
    for row in &rows {
        let report = ray_decay(&row.config, g.lambda_p, args.t_min, args.t_max, args.samples)
            .map_err(|e| ParseError { line: row.line, message: e.to_string() })?;
        table.push(vec![
            row.line.into(),
            report.class.membership.as_str().into(),
            report.asymptote.into(),
            report.fitted_exponent.into(),
            report.fit_residual.into(),
            format!("{:?}", report.fit_method).to_lowercase().as_str().into(),
        ]);
    }
    Ok(table.into())
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// Base configuration as 4n numbers, e.g. "0 0 0 0 1 0 0 0".
    #[arg(long, allow_hyphen_values = true)]
    pub config: String,
    /// Varied component as `j:mu` (momentum index, coordinate index); give once or twice.
    #[arg(long = "axis", value_parser = parse_axis, required = true)]
    pub axes: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 64.0)]
    pub k_max: f64,
    /// Grid points per axis, a power of two.
    #[arg(long, default_value_t = 256)]
    pub points: usize,
}

fn parse_axis(s: &str) -> Result<(usize, usize), String> {
    let (j, mu) = s.split_once(':').ok_or_else(|| format!("expected j:mu, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(j)?, parse(mu)?))
}

pub fn slice(g: &Global, args: &SliceArgs) -> Result<Outcome> {
    let fixed = parse_line(&args.config, 1)?.context("--config is empty")?;
    let spec = SliceSpec::new(args.axes.clone(), fixed, args.k_max, args.points)?;
    let registry = KernelRegistry::with_defaults(g.quad_order)?;
    let kernel = registry.get(&g.kernel)?;
    let result = gamma_slice(&spec, g.lambda_p, kernel.as_ref())?;

    let dims = result.shape.len();
    let columns: &[&'static str] = if dims == 1 { &["x", "re", "im"] } else { &["x1", "x2", "re", "im"] };
    let mut table = Table::new("slice", columns);
    let xs = &result.positions[0];
    for (idx, v) in result.values.iter().enumerate() {
        let mut row: Vec<Cell> = if dims == 1 {
            vec![xs[idx].into()]
        } else {
            vec![xs[idx / args.points].into(), xs[idx % args.points].into()]
        };
        row.extend([v.re.into(), v.im.into()]);
        table.push(row);
    }
    table.meta("lambda_p", g.lambda_p);
    table.meta("kernel", result.kernel.clone());
    table.meta("axes", json!(args.axes));
    table.meta("shape", json!(result.shape));
    table.meta("k_max", args.k_max);
    table.meta("mass_concentration", result.mass_concentration);
    table.meta("nyquist_warning", result.nyquist_warning);
    eprintln!("mass concentration {:.6}", result.mass_concentration);
    if result.nyquist_warning {
        eprintln!("warning: kernel is not small at the grid edge; the transform is aliased (raise --k-max)");
    }
    Ok(table.into())
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Perturbative order k.
    #[arg(short, long)]
    pub order: u32,
    /// Interaction power n.
    #[arg(short = 'n', long, default_value_t = 4)]
    pub power: u32,
    #[arg(long, default_value = "rules")]
    pub strategy: String,
}

pub fn expand(g: &Global, args: &ExpandArgs) -> Result<Outcome> {
    let registry = StrategyRegistry::with_defaults();
    let strategy = registry.get(&args.strategy)?;
    let expansion = strategy.expand(args.order, args.power)?;
    eprintln!("{}", expand_summary(&expansion));
    if !expansion.checked {
        eprintln!("note: `{}` fell back to the subset-sum route at this order", args.strategy);
    }
    Ok(match g.format.unwrap_or(Format::Json) {
        Format::Json => Outcome { body: Body::Json(expansion.to_json()), breach: None },
        Format::Csv => {
            let mut table =
                Table::new("expand", &["theta_chain", "lines", "hbar_power", "terms", "orbit", "display_prefactor"]);
            for s in summarize_topologies(&expansion.terms) {
                let chain: Vec<String> = s.topology.theta_chain.iter().map(ToString::to_string).collect();
                table.push(vec![
                    chain.join(">").as_str().into(),
                    s.lines.into(),
                    Cell::Int(s.hbar_power.into()),
                    s.terms.into(),
                    Cell::Int(s.assignments as i64),
                    s.display_prefactor.to_string().as_str().into(),
                ]);
            }
            table.into()
        }
    })
}

fn expand_summary(e: &Expansion) -> String {
    let hist: Vec<String> = e.hbar_histogram().iter().map(|(p, c)| format!("ħ^{p}: {c}")).collect();
    format!("{} terms, {} topologies, [{}]", e.terms.len(), e.topology_count(), hist.join(", "))
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    /// Comma-separated λ_P ladder.
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25,0.125")]
    pub lambdas: Vec<f64>,
    /// Momenta per probe configuration.
    #[arg(short = 'n', long, default_value_t = 3)]
    pub momenta: usize,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 500)]
    pub probes: usize,
}

pub fn limits(g: &Global, args: &LimitsArgs) -> Result<Outcome> {
    let rows = commutative_limit_table(args.radius, args.probes, args.momenta, &args.lambdas, g.seed)?;
    let mut table = Table::new("limits", &["lambda_p", "sup", "bound"]);
    table.meta("radius", args.radius);
    table.meta("probes", args.probes);
    table.meta("n", args.momenta);
    table.meta("seed", g.seed);
    let mut breaches = Vec::new();
    for r in &rows {
        if r.sup > r.bound {
            breaches.push(format!("λ_P = {}: sup {:e} exceeds bound {:e}", r.lambda_p, r.sup, r.bound));
        }
        table.push(vec![r.lambda_p.into(), r.sup.into(), r.bound.into()]);
    }
    Ok(Outcome { body: Body::Table(table), breach: join(breaches) })
}

#[derive(Debug, Args)]
pub struct SturArgs {
    /// Check these four uncertainties instead of the optimally localized state.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
}

pub fn stur(g: &Global, args: &SturArgs) -> Result<Outcome> {
    let deltas: [f64; 4] = match &args.deltas {
        Some(d) => {
            if d.len() != 4 || d.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                bail!(ParseError { line: 1, message: "--deltas must be four positive numbers".into() });
            }
            [d[0], d[1], d[2], d[3]]
        }
        None => {
            let state = StateFunctional::optimal([0.0; 4], g.lambda_p)?;
            let step = default_step(g.lambda_p);
            let mut out = [0.0; 4];
            for (mu, slot) in out.iter_mut().enumerate() {
                *slot = state_moments(&state, mu, step)?.std_dev();
            }
            out
        }
    };
    let (time_space, space_space) = check_stur(&deltas, g.lambda_p);
    let mut table = Table::new(
        "stur",
        &[
            "lambda_p",
            "dq0",
            "dq1",
            "dq2",
            "dq3",
            "time_space",
            "space_space",
            "bound",
            "time_space_ok",
            "space_space_ok",
        ],
    );
    let ts = deltas[0] * (deltas[1] + deltas[2] + deltas[3]);
    let ss = deltas[1] * deltas[2] + deltas[1] * deltas[3] + deltas[2] * deltas[3];
    let mut row: Vec<Cell> = vec![g.lambda_p.into()];
    row.extend(deltas.iter().map(|&d| Cell::from(d)));
    row.extend([ts.into(), ss.into(), (0.5 * g.lambda_p * g.lambda_p).into(), time_space.into(), space_space.into()]);
    table.push(row);
    let breach = (!(time_space && space_space)).then(|| "uncertainty relations violated".to_string());
    Ok(Outcome { body: Body::Table(table), breach })
}

fn join(lines: Vec<String>) -> Option<String> {
    (!lines.is_empty()).then(|| lines.join("\n"))
}
