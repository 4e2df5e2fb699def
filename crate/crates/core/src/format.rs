//! The model text format and graph emission.
//!
//! A model file holds named blocks:
//!
//! ```text
//! # a process block
//! pts example
//! states s0 s1 nil
//! actions a b
//! init s0
//! trans s0 a -> s1: 1/2, nil: 1/2
//! trans s1 b -> nil: 1
//! end
//!
//! # a test block carries a success state
//! npt probe
//! states q0 top
//! actions a
//! init q0
//! success top
//! trans q0 a -> top: 1
//! end
//! ```
//!
//! Probabilities are exact rationals, written `a/b` or as terminating
//! decimals (`0.5` means one half, never a binary float). `#` starts a
//! comment. Emission is canonical: parsing what was emitted reproduces the
//! emitted text byte for byte.

use crate::npt::Npt;
use crate::pts::{Pts, StateId};
use crate::rat::Rat;
use crate::{Error, Result};

/// One named block of a model file.
#[derive(Debug, Clone)]
pub enum Block {
    Process(Pts),
    Test(Npt),
}

impl Block {
    pub fn name(&self) -> &str {
        match self {
            Block::Process(p) => p.name(),
            Block::Test(t) => t.name(),
        }
    }

    pub fn pts(&self) -> &Pts {
        match self {
            Block::Process(p) => p,
            Block::Test(t) => t.pts(),
        }
    }
}

/// A parsed model file.
#[derive(Debug, Clone, Default)]
pub struct Model {
    pub blocks: Vec<Block>,
}

impl Model {
    pub fn find(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name() == name)
    }

    pub fn find_process(&self, name: &str) -> Option<&Pts> {
        self.blocks.iter().find_map(|b| match b {
            Block::Process(p) if p.name() == name => Some(p),
            _ => None,
        })
    }

    pub fn find_test(&self, name: &str) -> Option<&Npt> {
        self.blocks.iter().find_map(|b| match b {
            Block::Test(t) if t.name() == name => Some(t),
            _ => None,
        })
    }

    /// The sole process block, or the named one.
    pub fn process(&self, name: Option<&str>) -> Result<&Pts> {
        match name {
            Some(n) => self
                .find_process(n)
                .ok_or_else(|| Error::Invalid(format!("no process block named `{n}`"))),
            None => {
                let mut iter = self.blocks.iter().filter_map(|b| match b {
                    Block::Process(p) => Some(p),
                    _ => None,
                });
                match (iter.next(), iter.next()) {
                    (Some(p), None) => Ok(p),
                    (None, _) => Err(Error::Invalid("model has no process block".to_string())),
                    _ => Err(Error::Invalid(
                        "model has several process blocks; name one".to_string(),
                    )),
                }
            }
        }
    }
}

struct RawBlock {
    kind: String,
    name: String,
    line: usize,
    states: Vec<String>,
    actions: Vec<String>,
    init: Option<String>,
    success: Option<String>,
    trans: Vec<(usize, String, String, Vec<(String, Rat)>)>,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<Model> {
    let mut blocks: Vec<RawBlock> = Vec::new();
    let mut current: Option<RawBlock> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col_of = |token: &str| line.find(token).map(|c| c + 1).unwrap_or(1);
        let mut words = trimmed.split_whitespace();
        let head = words.next().unwrap();
        match head {
            "pts" | "npt" => {
                if current.is_some() {
                    return Err(err(lineno, 1, "block started before previous `end`"));
                }
                let name = words
                    .next()
                    .ok_or_else(|| err(lineno, col_of(head), "missing block name"))?;
                if words.next().is_some() {
                    return Err(err(lineno, 1, "trailing tokens after block name"));
                }
                current = Some(RawBlock {
                    kind: head.to_string(),
                    name: name.to_string(),
                    line: lineno,
                    states: Vec::new(),
                    actions: Vec::new(),
                    init: None,
                    success: None,
                    trans: Vec::new(),
                });
            }
            "states" => {
                let b = current
                    .as_mut()
                    .ok_or_else(|| err(lineno, 1, "`states` outside a block"))?;
                b.states.extend(words.map(str::to_string));
            }
            "actions" => {
                let b = current
                    .as_mut()
                    .ok_or_else(|| err(lineno, 1, "`actions` outside a block"))?;
                b.actions.extend(words.map(str::to_string));
            }
            "init" => {
                let b = current
                    .as_mut()
                    .ok_or_else(|| err(lineno, 1, "`init` outside a block"))?;
                let s = words
                    .next()
                    .ok_or_else(|| err(lineno, col_of(head), "missing initial state"))?;
                if b.init.is_some() {
                    return Err(err(lineno, 1, "duplicate `init`"));
                }
                b.init = Some(s.to_string());
            }
            "success" => {
                let b = current
                    .as_mut()
                    .ok_or_else(|| err(lineno, 1, "`success` outside a block"))?;
                if b.kind != "npt" {
                    return Err(err(lineno, 1, "`success` is only valid in an npt block"));
                }
                let s = words
                    .next()
                    .ok_or_else(|| err(lineno, col_of(head), "missing success state"))?;
                b.success = Some(s.to_string());
            }
            "trans" => {
                let b = current
                    .as_mut()
                    .ok_or_else(|| err(lineno, 1, "`trans` outside a block"))?;
                let src = words
                    .next()
                    .ok_or_else(|| err(lineno, 1, "missing source state"))?;
                let act = words
                    .next()
                    .ok_or_else(|| err(lineno, 1, "missing action"))?;
                let rest: Vec<&str> = words.collect();
                if rest.first() != Some(&"->") {
                    return Err(err(lineno, col_of(act), "expected `->` after the action"));
                }
                let body = rest[1..].join(" ");
                if body.trim().is_empty() {
                    return Err(err(lineno, 1, "empty target distribution"));
                }
                let mut dist: Vec<(String, Rat)> = Vec::new();
                for part in body.split(',') {
                    let part = part.trim();
                    let (state, prob) = part.split_once(':').ok_or_else(|| {
                        err(lineno, col_of(part), "expected `state: probability`")
                    })?;
                    let prob: Rat = prob.trim().parse().map_err(|_| {
                        err(
                            lineno,
                            col_of(prob.trim()),
                            format!("invalid probability `{}`", prob.trim()),
                        )
                    })?;
                    dist.push((state.trim().to_string(), prob));
                }
                let total: Rat = dist.iter().map(|(_, p)| p.clone()).sum();
                if !total.is_one() {
                    return Err(err(
                        lineno,
                        1,
                        format!("distribution sums to {total}"),
                    ));
                }
                b.trans
                    .push((lineno, src.to_string(), act.to_string(), dist));
            }
            "end" => {
                let b = current
                    .take()
                    .ok_or_else(|| err(lineno, 1, "`end` outside a block"))?;
                blocks.push(b);
            }
            other => {
                return Err(err(
                    lineno,
                    col_of(other),
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }
    if let Some(b) = current {
        return Err(err(b.line, 1, format!("block `{}` is never closed", b.name)));
    }

    let mut model = Model::default();
    for raw in blocks {
        if model.find(&raw.name).is_some() {
            return Err(err(raw.line, 1, format!("duplicate block name `{}`", raw.name)));
        }
        let states = raw.states.clone();
        let actions = raw.actions.clone();
        let lookup_state = |name: &str, line: usize| -> Result<usize> {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| err(line, 1, format!("undeclared state `{name}`")))
        };
        let lookup_action = |name: &str, line: usize| -> Result<usize> {
            actions
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| err(line, 1, format!("undeclared action `{name}`")))
        };
        let init = raw
            .init
            .as_deref()
            .ok_or_else(|| err(raw.line, 1, "missing `init` line"))?;
        let root = lookup_state(init, raw.line)?;
        let mut triples = Vec::new();
        for (line, src, act, dist) in &raw.trans {
            let s = lookup_state(src, *line)?;
            let a = lookup_action(act, *line)?;
            let mut d = Vec::new();
            for (tgt, p) in dist {
                d.push((lookup_state(tgt, *line)?, p.clone()));
            }
            triples.push((s, a, d));
        }
        let success_id = match (raw.kind.as_str(), raw.success.as_deref()) {
            ("npt", Some(succ)) => Some(lookup_state(succ, raw.line)?),
            ("npt", None) => return Err(err(raw.line, 1, "missing `success` line")),
            _ => None,
        };
        let pts = Pts::new(raw.name.clone(), states, actions, root, triples).map_err(|e| {
            err(raw.line, 1, format!("block `{}`: {e}", raw.name))
        })?;
        let block = match success_id {
            Some(succ_id) => {
                let npt = Npt::new(pts, StateId(succ_id))
                    .map_err(|e| err(raw.line, 1, format!("block `{}`: {e}", raw.name)))?;
                Block::Test(npt)
            }
            None => Block::Process(pts),
        };
        model.blocks.push(block);
    }
    Ok(model)
}

fn emit_pts(out: &mut String, kind: &str, p: &Pts, success: Option<StateId>) {
    out.push_str(&format!("{kind} {}\n", p.name()));
    out.push_str("states");
    for s in p.state_names() {
        out.push(' ');
        out.push_str(s);
    }
    out.push('\n');
    out.push_str("actions");
    for a in p.action_names() {
        out.push(' ');
        out.push_str(a);
    }
    out.push('\n');
    out.push_str(&format!("init {}\n", p.state_name(p.root())));
    if let Some(s) = success {
        out.push_str(&format!("success {}\n", p.state_name(s)));
    }
    for s in p.states() {
        for t in p.transitions_from(s) {
            let dist: Vec<String> = t
                .target
                .iter()
                .map(|(c, prob)| format!("{}: {}", p.state_name(c), prob))
                .collect();
            out.push_str(&format!(
                "trans {} {} -> {}\n",
                p.state_name(s),
                p.action_name(t.label),
                dist.join(", ")
            ));
        }
    }
    out.push_str("end\n");
}

/// Canonical text for a whole model.
pub fn emit_model(model: &Model) -> String {
    let mut out = String::new();
    for (i, b) in model.blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match b {
            Block::Process(p) => emit_pts(&mut out, "pts", p, None),
            Block::Test(t) => emit_pts(&mut out, "npt", t.pts(), Some(t.success())),
        }
    }
    out
}

/// Canonical text for a single process.
pub fn emit_process(p: &Pts) -> String {
    let mut out = String::new();
    emit_pts(&mut out, "pts", p, None);
    out
}

/// DOT graph for a block: states as circles, one point node per transition
/// fanning out probability-weighted dotted edges.
pub fn emit_graph_description(block: &Block) -> String {
    let p = block.pts();
    let success = match block {
        Block::Test(t) => Some(t.success()),
        _ => None,
    };
    let mut out = String::new();
    out.push_str(&format!("digraph \"{}\" {{\n", p.name()));
    out.push_str("  rankdir=TB;\n");
    for s in p.states() {
        let shape = if Some(s) == success {
            "doublecircle"
        } else {
            "circle"
        };
        let marker = if s == p.root() { ",penwidth=2" } else { "" };
        out.push_str(&format!(
            "  \"{}\" [shape={shape}{marker}];\n",
            p.state_name(s)
        ));
    }
    for s in p.states() {
        for (i, t) in p.transitions_from(s).iter().enumerate() {
            let mid = format!("{}__{}", p.state_name(s), i);
            out.push_str(&format!("  \"{mid}\" [shape=point,label=\"\"];\n"));
            out.push_str(&format!(
                "  \"{}\" -> \"{mid}\" [label=\"{}\"];\n",
                p.state_name(s),
                p.action_name(t.label)
            ));
            for (c, prob) in t.target.iter() {
                out.push_str(&format!(
                    "  \"{mid}\" -> \"{}\" [label=\"{}\",style=dotted];\n",
                    p.state_name(c),
                    prob
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
