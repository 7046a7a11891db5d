//! Command-line surface: orbit listings, pairwise queries, poset export,
//! dictionary translation, verification, and primary decomposition.
//!
//! Exit codes: `0` success (including `false` query answers), `1` a
//! verification suite failed, `2` invalid input, `3` an enumeration bound was
//! exceeded.  The enumeration cap is, in order of precedence, `--bound`, the
//! `ULM_ORBITS_BOUND` environment variable, or `2^20`.
//!
//! Elements are written as comma-separated coordinates in factor order, e.g.
//! `1,2`; over a polynomial ring each coordinate of an exponent-`alpha`
//! factor is `alpha` field-element codes, lowest degree first, spliced into
//! the same flat list.  Tuples separate elements with `;`.  Height sequences
//! are written `0,1,inf`; ideals as `{(v,alpha),...}`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::linear::EXHAUSTIVE_CAP;
use crate::module::{primary_decomposition, Element, ElementTuple, ModuleShape, UlmSequence};
use crate::orbits::{
    build_automorphism, degenerates, degeneration_failure, enumerate_tuple_orbits,
    extend_homomorphism, same_orbit, submodule_orbit_map,
};
use crate::posets::{
    ideal_from_sequence, ideal_lattice, kappa, orbit_poset, support_poset, FinitePoset,
    OrderIdeal, PElem,
};
use crate::ring::{Backend, Scalar};
use crate::schema::{ElementDoc, HomTableDoc, ShapeDocument};
use crate::verify;

#[derive(Parser)]
#[command(
    name = "ulm-orbits",
    version,
    about = "Orbits and degenerations of tuples in finite modules over discrete valuation rings"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the automorphism orbits of n-tuples over a shape.
    Orbits {
        /// Shape document (JSON file).
        #[arg(long, value_name = "FILE")]
        shape: PathBuf,
        /// Tuple length.
        #[arg(short, default_value_t = 1)]
        n: usize,
        /// Emit JSON instead of the text table.
        #[arg(long)]
        json: bool,
        /// Enumeration cap override.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Answer a pairwise question, with a constructive witness when one exists.
    Query {
        /// What to decide about the pair.
        #[arg(value_enum)]
        kind: QueryKind,
        /// Shape document (JSON file).
        #[arg(long, value_name = "FILE")]
        shape: PathBuf,
        /// First tuple (elements separated by `;`).
        first: String,
        /// Second tuple.
        second: String,
        /// Enumeration cap override.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Export a poset attached to a shape as DOT (default) or JSON.
    Poset {
        /// Shape document (JSON file).
        #[arg(long, value_name = "FILE")]
        shape: PathBuf,
        /// Which poset to export.
        #[arg(value_enum)]
        view: PosetView,
        /// Write the DOT digraph to this file instead of stdout.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Emit JSON (nodes and covers) instead of DOT.
        #[arg(long)]
        json: bool,
        /// Enumeration cap override.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Translate between height sequences and order ideals.
    Dictionary {
        /// Shape document (JSON file).
        #[arg(long, value_name = "FILE")]
        shape: PathBuf,
        /// Which way to translate.
        #[arg(value_enum)]
        direction: Direction,
        /// An ideal `{(v,alpha),...}` for kappa, a sequence `0,1,inf` for ideal.
        input: String,
    },
    /// Run every self-verification suite against the brute-force oracle.
    Verify {
        /// Shape document (JSON file).
        #[arg(long, value_name = "FILE")]
        shape: PathBuf,
        /// Tuple length.
        #[arg(short, default_value_t = 1)]
        n: usize,
        /// Enumeration cap override.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Split a finite abelian group, given by cyclic orders, into one shape
    /// file per prime.
    Decompose {
        /// Cyclic factor orders, each greater than 1.
        #[arg(required = true)]
        orders: Vec<u64>,
        /// Directory for the generated shape files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryKind {
    /// Same automorphism orbit (witness: an automorphism).
    SameOrbit,
    /// Degeneration (witness: a homomorphism, or a failing coefficient vector).
    Degenerates,
    /// Same orbit of generated submodules (witness: an automorphism).
    SubmoduleOrbit,
}

#[derive(Clone, Copy, ValueEnum)]
enum PosetView {
    /// Element orbits labelled by height sequence and a representative.
    Elements,
    /// The lattice of order ideals of the support poset.
    Ideals,
    /// Admissible height sequences.
    Hf,
    /// The support poset of factor positions.
    Pf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Ideal to height sequence.
    Kappa,
    /// Height sequence to ideal.
    Ideal,
}

impl Cli {
    /// Executes the parsed command, returning the process exit code; errors
    /// map to code 2 (invalid input) or 3 (bound exceeded) in `main`.
    pub fn run(&self) -> Result<u8> {
        match &self.command {
            Command::Orbits { shape, n, json, bound } => {
                cmd_orbits(&load_shape(shape)?, *n, *json, resolve_bound(*bound)?)
            }
            Command::Query { kind, shape, first, second, bound } => {
                cmd_query(*kind, &load_shape(shape)?, first, second, resolve_bound(*bound)?)
            }
            Command::Poset { shape, view, dot, json, bound } => cmd_poset(
                &load_shape(shape)?,
                *view,
                dot.as_deref(),
                *json,
                resolve_bound(*bound)?,
            ),
            Command::Dictionary { shape, direction, input } => {
                cmd_dictionary(&load_shape(shape)?, *direction, input)
            }
            Command::Verify { shape, n, bound } => {
                cmd_verify(&load_shape(shape)?, *n, resolve_bound(*bound)?)
            }
            Command::Decompose { orders, out } => cmd_decompose(orders, out),
        }
    }
}

fn load_shape(path: &Path) -> Result<ModuleShape> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    ShapeDocument::from_json(&text)?.to_shape()
}

fn resolve_bound(explicit: Option<u64>) -> Result<u64> {
    if let Some(b) = explicit {
        return Ok(b);
    }
    match std::env::var("ULM_ORBITS_BOUND") {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::Parse(format!("ULM_ORBITS_BOUND must be an integer, got {text:?}"))
        }),
        Err(_) => Ok(EXHAUSTIVE_CAP),
    }
}

/// Parses `1,2` (integer backend) or a flat lowest-degree-first coefficient
/// list, `alpha` entries per factor (polynomial backend).
pub fn parse_element(shape: &ModuleShape, text: &str) -> Result<Element> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')').trim();
    let values: Vec<u64> = if inner.is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad coordinate {tok:?} in {text:?}")))
            })
            .collect::<Result<_>>()?
    };
    match shape.ring().backend() {
        Backend::IntegerLocal => shape.element_from_codes(&values),
        Backend::PolynomialLocal => {
            let expected: usize = shape.factor_exponents().iter().map(|&a| a as usize).sum();
            if values.len() != expected {
                return Err(Error::Parse(format!(
                    "expected {expected} coefficients for {shape}, got {}",
                    values.len()
                )));
            }
            let mut codes = Vec::new();
            let mut pos = 0usize;
            for &alpha in shape.factor_exponents() {
                let cs = &values[pos..pos + alpha as usize];
                pos += alpha as usize;
                codes.push(shape.ring().scalar_from_coefficients(cs)?.code());
            }
            shape.element_from_codes(&codes)
        }
    }
}

/// Parses a tuple literal, elements separated by `;`.
pub fn parse_tuple(shape: &ModuleShape, text: &str) -> Result<ElementTuple> {
    let elems: Vec<Element> = text
        .split(';')
        .map(|t| parse_element(shape, t))
        .collect::<Result<_>>()?;
    ElementTuple::new(elems)
}

/// Parses `0,1,inf` (the `inf` tail is optional, parentheses allowed).
pub fn parse_sequence(text: &str) -> Result<UlmSequence> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let mut finite = Vec::new();
    let mut ended = false;
    for tok in inner.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        if ended {
            return Err(Error::Parse(format!("entries after inf in {text:?}")));
        }
        if tok == "inf" {
            ended = true;
            continue;
        }
        finite.push(
            tok.parse()
                .map_err(|_| Error::Parse(format!("bad height {tok:?} in {text:?}")))?,
        );
    }
    UlmSequence::new(finite)
}

/// Parses `{(v,alpha),...}` into the generated ideal of the support poset.
pub fn parse_ideal(shape: &ModuleShape, text: &str) -> Result<OrderIdeal> {
    let t = text.trim();
    let t = t.strip_prefix("downset").unwrap_or(t).trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .unwrap_or(t);
    let mut generators = Vec::new();
    let mut rest = inner;
    while let Some(start) = rest.find('(') {
        if rest[..start].chars().any(|c| c != ',' && !c.is_whitespace()) {
            return Err(Error::Parse(format!("unexpected text in ideal {text:?}")));
        }
        let end = rest[start..]
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed pair in {text:?}")))?
            + start;
        let body = &rest[start + 1..end];
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("a poset point is (v,alpha), got ({body})")));
        }
        let v = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad height in ({body})")))?;
        let alpha = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in ({body})")))?;
        generators.push(PElem::new(v, alpha)?);
        rest = &rest[end + 1..];
    }
    if rest.chars().any(|c| c != ',' && !c.is_whitespace()) {
        return Err(Error::Parse(format!("unexpected text in ideal {text:?}")));
    }
    OrderIdeal::from_generators(shape, &generators)
}

/// Renders an element in the same syntax `parse_element` accepts.
pub fn render_element(shape: &ModuleShape, a: &Element) -> String {
    let ring = shape.ring();
    let mut parts: Vec<String> = Vec::new();
    for (&alpha, &x) in shape.factor_exponents().iter().zip(a.coords()) {
        match ring.backend() {
            Backend::IntegerLocal => parts.push(x.code().to_string()),
            Backend::PolynomialLocal => {
                let mut cs = ring.scalar_coefficients(x);
                cs.resize(alpha as usize, 0);
                parts.extend(cs.iter().map(u64::to_string));
            }
        }
    }
    parts.join(",")
}

pub fn render_tuple(shape: &ModuleShape, t: &ElementTuple) -> String {
    t.entries()
        .iter()
        .map(|e| render_element(shape, e))
        .collect::<Vec<_>>()
        .join(";")
}

fn render_ideal(ideal: &OrderIdeal) -> String {
    let inner: Vec<String> = ideal.antichain().iter().map(PElem::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn render_coefficients(coeffs: &[Scalar]) -> String {
    coeffs
        .iter()
        .map(|c| c.code().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_orbits(shape: &ModuleShape, n: usize, as_json: bool, bound: u64) -> Result<u8> {
    let infos = enumerate_tuple_orbits(shape, n, bound)?;
    if as_json {
        let orbits: Vec<serde_json::Value> = infos
            .iter()
            .enumerate()
            .map(|(i, info)| {
                let representative: Vec<ElementDoc> = info
                    .representative
                    .entries()
                    .iter()
                    .map(|e| ElementDoc::from_element(shape, e))
                    .collect();
                let table: Vec<Vec<Vec<u64>>> = info
                    .table
                    .iter()
                    .map(|form| {
                        form.rows()
                            .iter()
                            .map(|row| row.iter().map(|s| s.code()).collect())
                            .collect()
                    })
                    .collect();
                let mut value = json!({
                    "index": i,
                    "size": info.size,
                    "n_invariant": info.n_invariant(),
                    "representative": serde_json::to_value(representative).expect("docs serialise"),
                    "table": table,
                });
                if n == 1 {
                    value["ulm"] =
                        shape.ulm_sequence(&info.representative.entries()[0]).to_string().into();
                }
                value
            })
            .collect();
        let doc = json!({ "count": infos.len(), "orbits": orbits });
        println!("{}", serde_json::to_string_pretty(&doc).expect("plain values"));
    } else {
        if n == 1 {
            println!("orbit\tsize\tulm\tN\trepresentative");
        } else {
            println!("orbit\tsize\tlog_sizes\tN\trepresentative");
        }
        for (i, info) in infos.iter().enumerate() {
            let invariant = if n == 1 {
                shape.ulm_sequence(&info.representative.entries()[0]).to_string()
            } else {
                info.table
                    .iter()
                    .map(|f| f.log_cardinality().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            println!(
                "{i}\t{}\t{invariant}\t{}\t{}",
                info.size,
                info.n_invariant(),
                render_tuple(shape, &info.representative)
            );
        }
    }
    Ok(0)
}

fn cmd_query(
    kind: QueryKind,
    shape: &ModuleShape,
    first: &str,
    second: &str,
    bound: u64,
) -> Result<u8> {
    match kind {
        QueryKind::SameOrbit => {
            let a = parse_tuple(shape, first)?;
            let b = parse_tuple(shape, second)?;
            let answer = same_orbit(shape, &a, &b)?;
            println!("{answer}");
            if answer {
                let table = build_automorphism(shape, &a, &b, bound)?;
                println!("witness: {}", HomTableDoc::from_hom_table(shape, &table).to_json());
            } else if let Some((h, coeffs)) = degeneration_failure(shape, &a, shape, &b)? {
                println!(
                    "witness: first tuple does not degenerate to second at level {h} \
                     with coefficients {}",
                    render_coefficients(&coeffs)
                );
            } else if let Some((h, coeffs)) = degeneration_failure(shape, &b, shape, &a)? {
                println!(
                    "witness: second tuple does not degenerate to first at level {h} \
                     with coefficients {}",
                    render_coefficients(&coeffs)
                );
            }
        }
        QueryKind::Degenerates => {
            let a = parse_tuple(shape, first)?;
            let b = parse_tuple(shape, second)?;
            let answer = degenerates(shape, &a, &b)?;
            println!("{answer}");
            if answer {
                let table = extend_homomorphism(shape, shape, &a, &b, bound)?;
                println!("witness: {}", HomTableDoc::from_hom_table(shape, &table).to_json());
            } else if let Some((h, coeffs)) = degeneration_failure(shape, &a, shape, &b)? {
                println!(
                    "witness: heights drop at level {h} with coefficients {}",
                    render_coefficients(&coeffs)
                );
            }
        }
        QueryKind::SubmoduleOrbit => {
            let s = parse_tuple(shape, first)?;
            let t = parse_tuple(shape, second)?;
            match submodule_orbit_map(shape, s.entries(), t.entries(), bound)? {
                Some(table) => {
                    println!("true");
                    println!("witness: {}", HomTableDoc::from_hom_table(shape, &table).to_json());
                }
                None => println!("false"),
            }
        }
    }
    Ok(0)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render_poset<T: Clone + Eq + std::fmt::Debug>(
    poset: &FinitePoset<T>,
    label: impl Fn(&T) -> String,
    dot_path: Option<&Path>,
    as_json: bool,
) -> Result<u8> {
    let labels: Vec<String> = poset.elements().iter().map(&label).collect();
    let covers = poset.covers();
    if as_json {
        let doc = json!({ "nodes": labels, "covers": covers });
        println!("{}", serde_json::to_string_pretty(&doc).expect("plain values"));
        return Ok(0);
    }
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n");
    for (i, l) in labels.iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{}\"];\n", dot_escape(l)));
    }
    for (lo, hi) in covers {
        out.push_str(&format!("  n{lo} -> n{hi};\n"));
    }
    out.push_str("}\n");
    match dot_path {
        Some(path) => fs::write(path, out)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{out}"),
    }
    Ok(0)
}

fn cmd_poset(
    shape: &ModuleShape,
    view: PosetView,
    dot_path: Option<&Path>,
    as_json: bool,
    bound: u64,
) -> Result<u8> {
    match view {
        PosetView::Pf => {
            render_poset(&support_poset(shape)?, PElem::to_string, dot_path, as_json)
        }
        PosetView::Hf => render_poset(
            &orbit_poset(shape, bound)?,
            UlmSequence::to_string,
            dot_path,
            as_json,
        ),
        PosetView::Ideals => {
            render_poset(&ideal_lattice(shape, bound)?, |i| render_ideal(i), dot_path, as_json)
        }
        PosetView::Elements => {
            // Attach to each orbit the least-index element realising its
            // height sequence.
            let mut reps: std::collections::BTreeMap<UlmSequence, Element> =
                std::collections::BTreeMap::new();
            for e in shape.enumerate_elements(bound)? {
                reps.entry(shape.ulm_sequence(&e)).or_insert(e);
            }
            let poset = orbit_poset(shape, bound)?;
            render_poset(
                &poset,
                |seq| {
                    let rep = &reps[seq];
                    format!("{seq} [{}]", render_element(shape, rep))
                },
                dot_path,
                as_json,
            )
        }
    }
}

fn cmd_dictionary(shape: &ModuleShape, direction: Direction, input: &str) -> Result<u8> {
    let round_trip_ok = match direction {
        Direction::Kappa => {
            let ideal = parse_ideal(shape, input)?;
            let seq = kappa(&ideal);
            println!("{seq}");
            ideal_from_sequence(shape, &seq)? == ideal
        }
        Direction::Ideal => {
            let seq = parse_sequence(input)?;
            let ideal = ideal_from_sequence(shape, &seq)?;
            println!("{}", render_ideal(&ideal));
            kappa(&ideal) == seq
        }
    };
    println!("round-trip: {}", if round_trip_ok { "ok" } else { "FAILED" });
    Ok(if round_trip_ok { 0 } else { 1 })
}

fn cmd_verify(shape: &ModuleShape, n: usize, bound: u64) -> Result<u8> {
    let reports = verify::run_all(shape, n, bound)?;
    let mut all = true;
    for r in &reports {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        all &= r.passed;
    }
    println!("result: {}", if all { "pass" } else { "fail" });
    Ok(if all { 0 } else { 1 })
}

fn cmd_decompose(orders: &[u64], out: &Path) -> Result<u8> {
    for &o in orders {
        if o <= 1 {
            return Err(Error::Parse(format!("cyclic orders must exceed 1, got {o}")));
        }
    }
    let parts = primary_decomposition(orders)?;
    fs::create_dir_all(out)
        .map_err(|e| Error::Parse(format!("cannot create {}: {e}", out.display())))?;
    for (p, shape) in parts {
        let path = out.join(format!("shape-p{p}.json"));
        let mut text = ShapeDocument::from_shape(&shape).to_json();
        text.push('\n');
        fs::write(&path, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
        println!("p={p} -> {}", path.display());
    }
    Ok(0)
}
