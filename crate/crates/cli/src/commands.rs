//! One function per subcommand; each returns the rendered output and its exit code.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use gbs_core::exactmat::format_rat;
use gbs_core::gog::SpanningTree;
use gbs_core::hgraph::{build_cycle_witness, merge_same_phenotype, ClosureOutcome, MergeOutcome, SaturateOptions, SearchOptions};
use gbs_core::phenotype::{self, CorVerdict, EquivOptions, EquivVerdict};
use gbs_core::semidirect::{self, ClassifyOptions, FreeWord, OrbitOutcome, RoseRep, StallingsGraph, SubgroupRep, Tri};
use gbs_core::{Exec, GbsGraph, HGraph, Lattice, PointedHGraph, RatMatrix};

use crate::input::{load_gog, load_hgraph, parse_lattice, required};
use crate::{Budget, Cli, CliError, Command, Format, Output, SemiCommand, SiteLabel, EXIT_NO, EXIT_OK, EXIT_UNKNOWN};

/// Span-orbit classes listed by `phenotype` and `classify-label`; orbit entries grow geometrically.
const SPAN_CLASSES: usize = 32;

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes")
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn exec(cli: &Cli) -> Exec {
    if cli.jobs == Some(1) {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn format(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = cli.format.unwrap_or(default);
    if f != default && !allowed.contains(&f) {
        return Err(CliError::usage(format!("format {f:?} is not available for this command")));
    }
    Ok(f)
}

fn valid_gog(path: &Path) -> Result<Arc<GbsGraph>, CliError> {
    let g = load_gog(path)?;
    g.ensure_valid()?;
    Ok(g)
}

fn site(gog: &GbsGraph, name: &Option<String>) -> Result<usize, CliError> {
    match name {
        Some(s) => Ok(gog.vertex(s)?),
        None if gog.vertex_count() == 1 => Ok(0),
        None => Err(CliError::usage("missing --site")),
    }
}

fn site_label(gog: &GbsGraph, at: &SiteLabel) -> Result<(usize, Lattice), CliError> {
    let v = site(gog, &at.site)?;
    let l = parse_lattice("label", required("label", &at.label)?, gog.dim())?;
    Ok((v, l))
}

fn pointed(h: HGraph, base: Option<usize>, base_flag: &Option<String>) -> Result<PointedHGraph, CliError> {
    let base = match base_flag {
        Some(id) => h.vertex_index(id)?,
        None => base.ok_or_else(|| CliError::usage("the H-graph has no base vertex; pass --base"))?,
    };
    Ok(PointedHGraph { graph: h, base })
}

fn render_pointed(p: &PointedHGraph, f: Format) -> String {
    match f {
        Format::Dot => p.graph.export_dot(Some(p.base)),
        _ => p.to_json(),
    }
}

fn render_graph(h: &HGraph, base: Option<usize>, f: Format) -> String {
    match f {
        Format::Dot => h.export_dot(base),
        _ => serde_json::to_string_pretty(&h.to_doc(base)).expect("H-graph serializes"),
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::ValidateGog { gog } => validate_gog(cli, gog),
        Command::Reduce { gog } => {
            let g = valid_gog(gog)?;
            Ok(Output::new(g.reduce()?.to_json(), EXIT_OK))
        }
        Command::Amenable { gog } => amenable(cli, gog),
        Command::Unimodular { gog } => {
            let u = valid_gog(gog)?.is_unimodular()?;
            let body = match format(cli, Format::Text, &[Format::Json])? {
                Format::Json => pretty(&json!({ "unimodular": u })),
                _ => (if u { "unimodular" } else { "not unimodular" }).to_string(),
            };
            Ok(Output::new(body, if u { EXIT_OK } else { EXIT_NO }))
        }
        Command::Modular { gog, site: s, tree } => modular(cli, gog, s, tree),
        Command::Delta { gog, at } => {
            let g = valid_gog(gog)?;
            let l = parse_lattice("label", required("label", &at.label)?, g.dim())?;
            let d = phenotype::delta(&g, &l)?;
            let body = match format(cli, Format::Text, &[Format::Json])? {
                Format::Json => pretty(&json!({ "delta": d, "rank": l.rank() })),
                _ => format!("delta: {d}"),
            };
            Ok(Output::new(body, EXIT_OK))
        }
        Command::PrimeSet { gog } => {
            let ps: Vec<String> = phenotype::prime_set(&*valid_gog(gog)?)?.iter().map(ToString::to_string).collect();
            let body = match format(cli, Format::Text, &[Format::Json])? {
                Format::Json => pretty(&json!(ps)),
                _ => format!("{{{}}}", ps.join(", ")),
            };
            Ok(Output::new(body, EXIT_OK))
        }
        Command::ValidateHgraph { hgraph } => validate_hgraph(cli, hgraph),
        Command::Saturate { hgraph, budget } => saturate(cli, hgraph, budget),
        Command::KernelCheck { hgraph, budget } => kernel_check(cli, hgraph, budget),
        Command::Equiv { gog, site: s, a, b, budget } => equiv(cli, gog, s, a, b, budget),
        Command::ClassifyLabel { gog, at, budget } => classify_label(cli, gog, at, budget),
        Command::Phenotype { gog, at, budget } => {
            let g = valid_gog(gog)?;
            let (v, l) = site_label(&g, at)?;
            let report = phenotype::phenotype_report(&g, v, &l, budget.budget.min(SPAN_CLASSES))?;
            Ok(Output::new(pretty(&to_value(&report)), EXIT_OK))
        }
        Command::CycleWitness { gog, at } => {
            let g = valid_gog(gog)?;
            let (v, l) = site_label(&g, at)?;
            let w = build_cycle_witness(g, v, &l)?;
            Ok(Output::new(render_pointed(&w, format(cli, Format::Json, &[Format::Dot])?), EXIT_OK))
        }
        Command::Merge { hgraphs, base, budget } => merge(cli, hgraphs, base, budget),
        Command::Semidirect(sc) => semidirect_cmd(cli, sc),
        Command::ExportDot { hgraph, base } => {
            let (h, b) = load_hgraph(hgraph)?;
            let b = match base {
                Some(id) => Some(h.vertex_index(id)?),
                None => b,
            };
            Ok(Output::new(h.export_dot(b), EXIT_OK))
        }
    }
}

fn validate_gog(cli: &Cli, path: &Path) -> Result<Output, CliError> {
    let g = load_gog(path)?;
    let vs = g.validate();
    let body = match format(cli, Format::Text, &[Format::Json])? {
        Format::Json => pretty(&json!({ "valid": vs.is_empty(), "violations": vs })),
        _ if vs.is_empty() => "valid".to_string(),
        _ => vs.iter().map(|v| format!("invalid: {v}")).collect::<Vec<_>>().join("\n"),
    };
    Ok(Output::new(body, if vs.is_empty() { EXIT_OK } else { EXIT_NO }))
}

fn amenable(cli: &Cli, path: &Path) -> Result<Output, CliError> {
    let a = valid_gog(path)?.reduce()?.is_amenable()?;
    let body = match format(cli, Format::Text, &[Format::Json])? {
        Format::Json => pretty(&to_value(&a)),
        _ if a.amenable => format!("amenable: {}", a.reason),
        _ => format!("not amenable: {}", a.reason),
    };
    Ok(Output::new(body, if a.amenable { EXIT_OK } else { EXIT_NO }))
}

/// `M = s/c * N` with `c > 0` the common denominator, `N` integral and its first nonzero entry positive.
fn factor(m: &RatMatrix) -> (String, gbs_core::IntMatrix) {
    let c = m.common_denominator();
    let n = m.scale(&BigRational::from_integer(c.clone())).to_int().expect("common denominator clears");
    let rows = n.to_rows();
    let negative = rows.iter().flatten().find(|x| **x != BigInt::from(0)).is_some_and(|x| *x < BigInt::from(0));
    let (sign, n) = if negative { (BigInt::from(-1), n.neg()) } else { (BigInt::from(1), n) };
    (format_rat(&BigRational::new(sign, c)), n)
}

fn modular(cli: &Cli, path: &Path, s: &Option<String>, tree: &Option<String>) -> Result<Output, CliError> {
    let g = valid_gog(path)?;
    let v = site(&g, s)?;
    let tree: SpanningTree = match tree {
        Some(t) => {
            let ids: Vec<&str> = t.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
            g.tree_from_edges(&ids)?
        }
        None => g.spanning_tree()?,
    };
    let tree_ids: Vec<String> = tree.edges.iter().map(|&e| g.edge_record(e).id.clone()).collect();
    let gens = g.modular_generators(v, Some(&tree))?;
    let f = format(cli, Format::Text, &[Format::Json])?;
    let mut lines = vec![format!("site {}, spanning tree {{{}}}", g.vertex_id(v), tree_ids.join(", "))];
    let mut items = Vec::new();
    for gen in &gens {
        let id = &g.edge_record(gen.edge).id;
        let det = format_rat(&gen.matrix.det()?);
        let (scale, n) = factor(&gen.matrix);
        lines.push(format!("t_{id} -> ({scale}) * {n}"));
        lines.push(format!("  exact {}", gen.matrix));
        lines.push(format!("  det {det}"));
        let exact: Vec<Vec<String>> = gen.matrix.to_rows().iter().map(|r| r.iter().map(format_rat).collect()).collect();
        items.push(json!({ "edge": id, "matrix": exact, "det": det, "scale": scale, "integer_matrix": n }));
    }
    let body = match f {
        Format::Json => pretty(&json!({ "site": g.vertex_id(v), "tree": tree_ids, "generators": items })),
        _ => lines.join("\n"),
    };
    Ok(Output::new(body, EXIT_OK))
}

fn validate_hgraph(cli: &Cli, path: &Path) -> Result<Output, CliError> {
    let (h, _) = load_hgraph(path)?;
    let vs = h.validate();
    let body = match format(cli, Format::Text, &[Format::Json])? {
        Format::Json => pretty(&json!({ "valid": vs.is_empty(), "violations": vs })),
        _ if vs.is_empty() => "valid".to_string(),
        _ => vs.iter().map(|v| format!("invalid: {v}")).collect::<Vec<_>>().join("\n"),
    };
    Ok(Output::new(body, if vs.is_empty() { EXIT_OK } else { EXIT_NO }))
}

fn saturate(cli: &Cli, path: &Path, b: &Budget) -> Result<Output, CliError> {
    let (h, base) = load_hgraph(path)?;
    h.ensure_valid()?;
    let run = h.saturate_with(SaturateOptions { depth: b.depth, max_vertices: b.budget, exec: exec(cli) })?;
    let f = format(cli, Format::Json, &[Format::Dot, Format::Text])?;
    let body = match f {
        Format::Text => format!(
            "{}: {} vertices, {} edges, frontier sizes {:?}{}",
            if run.saturated { "saturated" } else { "not saturated" },
            run.graph.vertex_count(),
            run.graph.edge_count(),
            run.frontier_sizes,
            if run.truncated { " (vertex cap reached)" } else { "" }
        ),
        _ => render_graph(&run.graph, base, f),
    };
    Ok(Output::new(body, if run.saturated { EXIT_OK } else { EXIT_UNKNOWN }))
}

fn kernel_check(cli: &Cli, path: &Path, b: &Budget) -> Result<Output, CliError> {
    let (h, _) = load_hgraph(path)?;
    h.ensure_valid()?;
    let out = h.close_or_grow(b.depth, b.budget, exec(cli))?;
    let f = format(cli, Format::Text, &[Format::Json])?;
    Ok(match out {
        ClosureOutcome::Finite => {
            let body = match f {
                Format::Json => pretty(&json!({ "outcome": "finite", "in_kernel": false })),
                _ => "finite: saturation closes, the subgroup is not in the perfect kernel".to_string(),
            };
            Output::new(body, EXIT_NO)
        }
        ClosureOutcome::NotClosed { frontier_sizes, truncated } => {
            let body = match f {
                Format::Json => pretty(&json!({ "outcome": "not_closed", "frontier_sizes": frontier_sizes, "truncated": truncated })),
                _ => format!(
                    "not closed within depth {}: frontier sizes {:?}{}",
                    b.depth,
                    frontier_sizes,
                    if truncated { " (vertex cap reached)" } else { "" }
                ),
            };
            Output::new(body, EXIT_UNKNOWN)
        }
    })
}

fn equiv(cli: &Cli, path: &Path, s: &Option<String>, a: &str, b: &str, budget: &Budget) -> Result<Output, CliError> {
    let g = valid_gog(path)?;
    let v = site(&g, s)?;
    let la = parse_lattice("a", a, g.dim())?;
    let lb = parse_lattice("b", b, g.dim())?;
    let opts = EquivOptions { depth: budget.depth, budget: budget.budget, exec: exec(cli) };
    let f = format(cli, Format::Json, &[Format::Text, Format::Dot])?;
    Ok(match phenotype::equiv_decide(&g, v, &la, &lb, &opts)? {
        EquivVerdict::Equivalent(path) => {
            let p = path.to_hgraph(g.clone())?;
            let body = match f {
                Format::Text => {
                    let types: Vec<String> = path.types().iter().map(|&o| g.oriented_name(o)).collect();
                    format!("equivalent: witness of length {}: {}", path.len(), types.join(" "))
                }
                _ => render_pointed(&p, f),
            };
            Output::new(body, EXIT_OK)
        }
        EquivVerdict::Distinguished(d) => {
            let body = match f {
                Format::Text => format!("distinguished: {}", serde_json::to_string(&d).expect("serializes")),
                _ => {
                    let mut v = to_value(&d);
                    v["verdict"] = json!("distinguished");
                    pretty(&v)
                }
            };
            Output::new(body, EXIT_NO)
        }
        EquivVerdict::Unknown => {
            let body = match f {
                Format::Text => format!("unknown: no witness within depth {} and no separating invariant", budget.depth),
                _ => pretty(&json!({ "verdict": "unknown" })),
            };
            Output::new(body, EXIT_UNKNOWN)
        }
    })
}

fn classify_label(cli: &Cli, path: &Path, at: &SiteLabel, budget: &Budget) -> Result<Output, CliError> {
    let g = valid_gog(path)?;
    let (v, l) = site_label(&g, at)?;
    let classes = budget.budget.min(SPAN_CLASSES);
    let verdict = phenotype::cor_criterion(&g, v, &l, classes)?;
    let orbit = phenotype::modular_span_orbit(&g, v, &l, classes)?;
    let code = match verdict {
        CorVerdict::Satisfied { .. } => EXIT_OK,
        CorVerdict::Violated { .. } => EXIT_NO,
        CorVerdict::Unknown => EXIT_UNKNOWN,
    };
    let body = match format(cli, Format::Json, &[Format::Text])? {
        Format::Text => format!("{}; {} span classes listed, closed: {}", serde_json::to_string(&verdict).expect("serializes"), orbit.classes.len(), orbit.closed),
        _ => {
            let mut v = to_value(&verdict);
            v["span_orbit"] = to_value(&orbit);
            pretty(&v)
        }
    };
    Ok(Output::new(body, code))
}

fn merge(cli: &Cli, paths: &[std::path::PathBuf], base: &Option<String>, budget: &Budget) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    for p in paths {
        let (h, b) = load_hgraph(p)?;
        inputs.push(pointed(h, b, base)?);
    }
    let opts = SearchOptions { depth: budget.depth, max_states: budget.budget, edge_filter: None, candidates: Vec::new(), exec: exec(cli) };
    let f = format(cli, Format::Json, &[Format::Dot])?;
    Ok(match merge_same_phenotype(&inputs, &opts)? {
        MergeOutcome::Merged(rep) => Output::new(render_pointed(&rep.merged, f), EXIT_OK),
        MergeOutcome::NotFound { pair, reason } => {
            Output::new(pretty(&json!({ "merged": false, "pair": [pair.0, pair.1], "reason": reason })), EXIT_UNKNOWN)
        }
    })
}

fn core_value(core: &StallingsGraph) -> Value {
    let edges: Vec<Value> = core.edges().iter().map(|&(s, g, t)| json!({ "src": s, "gen": format!("a{}", g + 1), "trg": t })).collect();
    json!({
        "vertices": core.vertex_count(),
        "edges": edges,
        "finite_index": core.is_finite_index(),
        "index": core.index(),
        "free_basis": core.free_basis(),
    })
}

fn render_core(core: &StallingsGraph, f: Format) -> String {
    match f {
        Format::Dot => core.export_dot(),
        _ => pretty(&core_value(core)),
    }
}

fn load_rose(path: &Path) -> Result<(Arc<GbsGraph>, RoseRep), CliError> {
    let g = valid_gog(path)?;
    let r = RoseRep::from_gog(&g)?;
    Ok((g, r))
}

fn load_subgroup(path: &Path, rose: &RoseRep) -> Result<SubgroupRep, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    if let Err(e) = serde_json::from_str::<Value>(&text) {
        return Err(CliError::parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())));
    }
    Ok(SubgroupRep::from_json(&text, rose)?)
}

fn semidirect_cmd(cli: &Cli, sc: &SemiCommand) -> Result<Output, CliError> {
    match sc {
        SemiCommand::Fold { rose, words } => {
            let (_, r) = load_rose(rose)?;
            let ws = words.iter().map(|w| FreeWord::parse(w)).collect::<gbs_core::Result<Vec<_>>>()?;
            let core = StallingsGraph::fold(r.generators(), &ws)?;
            Ok(Output::new(render_core(&core, format(cli, Format::Json, &[Format::Dot])?), EXIT_OK))
        }
        SemiCommand::Orbit { rose, label, budget } => {
            let (_, r) = load_rose(rose)?;
            let l = parse_lattice("label", label, r.dim())?;
            let out = semidirect::orbit_lattice(&r, &l, *budget)?;
            let code = if out.is_closed() { EXIT_OK } else { EXIT_UNKNOWN };
            let body = match format(cli, Format::Json, &[Format::Text])? {
                Format::Text => match &out {
                    OrbitOutcome::Closed { lattices } => format!("closed: {} lattices", lattices.len()),
                    OrbitOutcome::ExceededBudget { reached } => format!("exceeded budget: {} lattices reached", reached.len()),
                },
                _ => pretty(&to_value(&out)),
            };
            Ok(Output::new(body, code))
        }
        SemiCommand::Stab { rose, label, depth } => {
            let (_, r) = load_rose(rose)?;
            let l = parse_lattice("label", label, r.dim())?;
            let f = format(cli, Format::Json, &[Format::Dot])?;
            if l.is_full_rank() {
                return Ok(Output::new(render_core(&semidirect::stabilizer_core(&r, &l)?, f), EXIT_OK));
            }
            let words = semidirect::stabilizer_words(&r, &l, *depth, exec(cli))?;
            let core = StallingsGraph::fold(r.generators(), &words)?;
            let body = match f {
                Format::Dot => core.export_dot(),
                _ => {
                    let mut v = core_value(&core);
                    v["approximation"] = json!(true);
                    v["max_len"] = json!(depth);
                    v["words"] = to_value(&words);
                    pretty(&v)
                }
            };
            Ok(Output::new(body, EXIT_UNKNOWN))
        }
        SemiCommand::Kernel { rose, subgroup } => {
            let (_, r) = load_rose(rose)?;
            let rep = load_subgroup(subgroup, &r)?;
            let k = semidirect::kernel_member(&rep, &r)?;
            let body = match format(cli, Format::Text, &[Format::Json])? {
                Format::Json => pretty(&json!({ "in_kernel": k })),
                _ if k => "in the perfect kernel: the projection to F_r has infinite index".to_string(),
                _ => "not in the perfect kernel: the projection to F_r has finite index".to_string(),
            };
            Ok(Output::new(body, if k { EXIT_OK } else { EXIT_NO }))
        }
        SemiCommand::Classify { rose, label, budget, depth } => {
            let (_, r) = load_rose(rose)?;
            let l = parse_lattice("label", label, r.dim())?;
            let c = semidirect::classify_piece(&r, &l, &ClassifyOptions { budget: *budget, word_len: *depth, exec: exec(cli) })?;
            let code = if c.p_closed == Tri::Unknown || c.d_empty == Tri::Unknown { EXIT_UNKNOWN } else { EXIT_OK };
            let body = match format(cli, Format::Json, &[Format::Text])? {
                Format::Text => format!("{} ({})", c.case, c.reason),
                _ => pretty(&to_value(&c)),
            };
            Ok(Output::new(body, code))
        }
        SemiCommand::Hgraph { rose, subgroup } => {
            let (g, r) = load_rose(rose)?;
            let rep = load_subgroup(subgroup, &r)?;
            let p = semidirect::hgraph_of_subgroup(&rep, &r, g)?;
            Ok(Output::new(render_pointed(&p, format(cli, Format::Json, &[Format::Dot])?), EXIT_OK))
        }
    }
}
