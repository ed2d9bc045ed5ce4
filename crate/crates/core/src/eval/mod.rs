//! Interpretation of terms on concrete graphs.
//!
//! [`Evaluator`] compiles a term to slot-indexed nodes and prunes
//! aggregations whose body vanishes off a neighbourhood: for a binder `v` it
//! collects variables `x` with "body = 0 whenever `¬E(x, v)`" (from edge
//! atoms, zero-absorbing connective arguments and nested aggregates) and
//! iterates only common neighbours. Sums are compensated, so skipping zero
//! terms leaves results bit-identical. A full evaluation still costs at most
//! `n^depth` body evaluations.

mod reference;

pub use reference::eval_reference;

use crate::connective::Connective;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::stats::Neumaier;
use crate::term::{AggKind, Term};
use std::collections::HashMap;
use std::sync::Arc;

/// A graph together with the values of a term's free variables, in the
/// order of [`Term::free_vars`]. Repeated vertices are allowed.
#[derive(Clone, Debug)]
pub struct Environment<'g> {
    pub graph: &'g Graph,
    pub assignment: Vec<usize>,
}

impl<'g> Environment<'g> {
    pub fn new(graph: &'g Graph, assignment: Vec<usize>) -> Environment<'g> {
        Environment { graph, assignment }
    }

    pub fn closed(graph: &'g Graph) -> Environment<'g> {
        Environment { graph, assignment: Vec::new() }
    }

    /// Builds the assignment from `name = vertex` pairs.
    pub fn named(graph: &'g Graph, t: &Term, values: &[(&str, usize)]) -> Result<Environment<'g>> {
        let assignment = t
            .free_vars()
            .iter()
            .map(|v| {
                values
                    .iter()
                    .find(|(n, _)| n == v)
                    .map(|(_, x)| *x)
                    .ok_or_else(|| Error::Input(format!("unbound variable {v:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Environment { graph, assignment })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Memoise nodes with at most one free variable per evaluation.
    pub cache: bool,
}

type Slot = usize;

#[derive(Clone, Debug)]
enum Node {
    Const(f64),
    Edge(Slot, Slot),
    Eq(Slot, Slot),
    Apply(Arc<Connective>, Vec<usize>),
    Agg {
        kind: AggKind,
        slot: Slot,
        body: usize,
        guards: Vec<Slot>,
        pin: Option<Slot>,
    },
    LMean {
        anchor: Slot,
        slot: Slot,
        body: usize,
    },
}

/// Zero-certificates of a subterm relative to one variable.
#[derive(Clone, Debug, Default)]
struct Guards {
    /// The subterm is 0 whenever `¬E(x, v)`.
    adjacent: Vec<Slot>,
    /// The subterm is 0 whenever `v ≠ x`.
    equal: Vec<Slot>,
}

impl Guards {
    fn union(&mut self, o: Guards) {
        for x in o.adjacent {
            if !self.adjacent.contains(&x) {
                self.adjacent.push(x);
            }
        }
        for x in o.equal {
            if !self.equal.contains(&x) {
                self.equal.push(x);
            }
        }
    }

    fn without(mut self, s: Slot) -> Guards {
        self.adjacent.retain(|&x| x != s);
        self.equal.retain(|&x| x != s);
        self
    }
}

/// A compiled term, reusable across graphs and assignments.
#[derive(Clone, Debug)]
pub struct Evaluator {
    nodes: Vec<Node>,
    root: usize,
    free: Vec<String>,
    slots: usize,
    /// For cacheable nodes, the single free slot (or `None` when closed).
    cache_key: Vec<Option<Option<Slot>>>,
    options: EvalOptions,
}

struct Compiler {
    nodes: Vec<Node>,
    free_masks: Vec<u64>,
    slot_of: HashMap<String, Slot>,
}

impl Compiler {
    fn slot(&self, v: &str) -> Slot {
        self.slot_of[v]
    }

    fn push(&mut self, node: Node, mask: u64) -> usize {
        self.nodes.push(node);
        self.free_masks.push(mask);
        self.nodes.len() - 1
    }

    fn compile(&mut self, t: &Term) -> usize {
        match t {
            Term::Const(c) => self.push(Node::Const(*c), 0),
            Term::Edge(x, y) | Term::Eq(x, y) => {
                let (a, b) = (self.slot(x), self.slot(y));
                let node = if matches!(t, Term::Edge(..)) { Node::Edge(a, b) } else { Node::Eq(a, b) };
                self.push(node, 1 << a | 1 << b)
            }
            Term::Apply(c, args) => {
                let ids: Vec<usize> = args.iter().map(|a| self.compile(a)).collect();
                let mask = ids.iter().fold(0, |m, &i| m | self.free_masks[i]);
                self.push(Node::Apply(c.clone(), ids), mask)
            }
            Term::Agg(kind, v, body) => {
                let slot = self.slot(v);
                let b = self.compile(body);
                let g = self.guards(b, slot);
                let pin = g.equal.first().copied();
                let mask = self.free_masks[b] & !(1 << slot);
                self.push(
                    Node::Agg {
                        kind: *kind,
                        slot,
                        body: b,
                        guards: g.adjacent,
                        pin,
                    },
                    mask,
                )
            }
            Term::LMean { anchor, bound, body } => {
                let (a, slot) = (self.slot(anchor), self.slot(bound));
                let b = self.compile(body);
                let mask = (self.free_masks[b] & !(1 << slot)) | 1 << a;
                self.push(Node::LMean { anchor: a, slot, body: b }, mask)
            }
        }
    }

    /// Variables certifying that node `id` vanishes off a neighbourhood of `v`.
    fn guards(&self, id: usize, v: Slot) -> Guards {
        match &self.nodes[id] {
            Node::Const(_) => Guards::default(),
            Node::Edge(a, b) => {
                let mut g = Guards::default();
                if *a == v && *b != v {
                    g.adjacent.push(*b);
                } else if *b == v && *a != v {
                    g.adjacent.push(*a);
                }
                g
            }
            Node::Eq(a, b) => {
                let mut g = Guards::default();
                if *a == v && *b != v {
                    g.equal.push(*b);
                } else if *b == v && *a != v {
                    g.equal.push(*a);
                }
                g
            }
            Node::Apply(c, args) => {
                let mut g = Guards::default();
                for (i, &a) in args.iter().enumerate() {
                    if c.absorbs_zero(i) {
                        g.union(self.guards(a, v));
                    }
                }
                g
            }
            Node::Agg { slot, body, .. } | Node::LMean { slot, body, .. } => {
                if *slot == v {
                    Guards::default()
                } else {
                    self.guards(*body, v).without(*slot)
                }
            }
        }
    }
}

impl Evaluator {
    pub fn new(t: &Term) -> Result<Evaluator> {
        Evaluator::with_options(t, EvalOptions::default())
    }

    pub fn with_options(t: &Term, options: EvalOptions) -> Result<Evaluator> {
        let free = t.free_vars();
        let mut slot_of = HashMap::new();
        for v in &free {
            let k = slot_of.len();
            slot_of.insert(v.clone(), k);
        }
        for v in t.all_vars() {
            let k = slot_of.len();
            slot_of.entry(v).or_insert(k);
        }
        if slot_of.len() > 64 {
            return Err(Error::Input("terms with more than 64 variables are not supported".into()));
        }
        let mut c = Compiler {
            nodes: Vec::new(),
            free_masks: Vec::new(),
            slot_of,
        };
        let root = c.compile(t);
        let cache_key = c
            .nodes
            .iter()
            .zip(&c.free_masks)
            .map(|(node, &mask)| {
                let worth = matches!(node, Node::Agg { .. } | Node::LMean { .. } | Node::Apply(..));
                match (worth, mask.count_ones()) {
                    (true, 0) => Some(None),
                    (true, 1) => Some(Some(mask.trailing_zeros() as usize)),
                    _ => None,
                }
            })
            .collect();
        Ok(Evaluator {
            slots: c.slot_of.len(),
            nodes: c.nodes,
            root,
            free,
            cache_key,
            options,
        })
    }

    pub fn set_cache(&mut self, on: bool) {
        self.options.cache = on;
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    /// `⟦τ⟧` on `g` with the free variables assigned in order.
    pub fn eval(&self, g: &Graph, assignment: &[usize]) -> Result<f64> {
        let n = g.n();
        if n == 0 {
            return Err(Error::Input("terms are evaluated on graphs with at least one vertex".into()));
        }
        if assignment.len() != self.free.len() {
            return Err(Error::Input(format!(
                "term has free variables {:?} but {} values were assigned",
                self.free,
                assignment.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&x| x >= n) {
            return Err(Error::Input(format!("assigned vertex {bad} is not in a graph on {n} vertices")));
        }
        let mut env = vec![0usize; self.slots];
        env[..assignment.len()].copy_from_slice(assignment);
        let mut run = Run {
            ev: self,
            g,
            env,
            cache: if self.options.cache { vec![Vec::new(); self.nodes.len()] } else { Vec::new() },
        };
        Ok(run.node(self.root))
    }
}

struct Run<'a> {
    ev: &'a Evaluator,
    g: &'a Graph,
    env: Vec<usize>,
    cache: Vec<Vec<f64>>,
}

impl Run<'_> {
    fn node(&mut self, id: usize) -> f64 {
        if self.cache.is_empty() {
            return self.compute(id);
        }
        let Some(key) = self.ev.cache_key[id] else {
            return self.compute(id);
        };
        let idx = key.map_or(0, |s| self.env[s]);
        if self.cache[id].is_empty() {
            let len = if key.is_some() { self.g.n() } else { 1 };
            self.cache[id] = vec![f64::NAN; len];
        }
        let hit = self.cache[id][idx];
        if !hit.is_nan() {
            return hit;
        }
        let v = self.compute(id);
        self.cache[id][idx] = v;
        v
    }

    fn compute(&mut self, id: usize) -> f64 {
        let ev = self.ev;
        match &ev.nodes[id] {
            Node::Const(c) => *c,
            Node::Edge(a, b) => {
                if self.g.has_edge(self.env[*a], self.env[*b]) {
                    1.0
                } else {
                    0.0
                }
            }
            Node::Eq(a, b) => {
                if self.env[*a] == self.env[*b] {
                    1.0
                } else {
                    0.0
                }
            }
            Node::Apply(c, args) => {
                let mut buf = [0.0f64; 8];
                let mut heap = Vec::new();
                let vals: &mut [f64] = if args.len() <= 8 {
                    &mut buf[..args.len()]
                } else {
                    heap.resize(args.len(), 0.0);
                    &mut heap
                };
                for (i, &a) in args.iter().enumerate() {
                    let v = self.node(a);
                    if v == 0.0 && c.absorbs_zero(i) {
                        return 0.0;
                    }
                    vals[i] = v;
                }
                c.eval(vals)
            }
            Node::LMean { anchor, slot, body } => {
                let u = self.env[*anchor];
                let g = self.g;
                let nb = g.neighbors(u);
                if nb.is_empty() {
                    return 0.0;
                }
                let mut acc = Neumaier::new();
                for &w in nb {
                    self.env[*slot] = w as usize;
                    acc.add(self.node(*body));
                }
                acc.value() / nb.len() as f64
            }
            Node::Agg {
                kind,
                slot,
                body,
                guards,
                pin,
            } => self.aggregate(*kind, *slot, *body, guards, *pin),
        }
    }

    fn aggregate(&mut self, kind: AggKind, slot: Slot, body: usize, guards: &[Slot], pin: Option<Slot>) -> f64 {
        let g = self.g;
        let n = g.n();
        let mut acc = Neumaier::new();
        let mut best = 0.0f64;
        let mut least = f64::INFINITY;
        let mut visited = 0usize;
        let mut visit = |run: &mut Run, v: usize| {
            run.env[slot] = v;
            let x = run.node(body);
            visited += 1;
            match kind {
                AggKind::Sum | AggKind::Mean => acc.add(x),
                AggKind::Max => best = best.max(x),
                AggKind::Min => least = least.min(x),
            }
        };
        if let Some(p) = pin {
            let x = self.env[p];
            visit(self, x);
        } else if guards.is_empty() {
            for v in 0..n {
                visit(self, v);
            }
        } else {
            let vals: Vec<usize> = guards.iter().map(|&s| self.env[s]).collect();
            let (lead, _) = vals
                .iter()
                .enumerate()
                .min_by_key(|(_, &x)| g.degree(x))
                .expect("guards nonempty");
            for &w in g.neighbors(vals[lead]) {
                let w = w as usize;
                if vals.iter().enumerate().all(|(i, &x)| i == lead || g.has_edge(x, w)) {
                    visit(self, w);
                }
            }
        }
        match kind {
            AggKind::Sum => acc.value(),
            AggKind::Mean => acc.value() / n as f64,
            AggKind::Max => best,
            AggKind::Min => {
                if visited < n {
                    0.0
                } else {
                    least
                }
            }
        }
    }
}

/// `⟦τ⟧` in the given environment.
pub fn eval(t: &Term, env: &Environment) -> Result<f64> {
    Evaluator::new(t)?.eval(env.graph, &env.assignment)
}

pub fn eval_with(t: &Term, env: &Environment, options: EvalOptions) -> Result<f64> {
    Evaluator::with_options(t, options)?.eval(env.graph, &env.assignment)
}

/// Upper bound `n^depth` on body evaluations for one evaluation.
pub fn cost_bound(t: &Term, n: usize) -> f64 {
    (n as f64).powi(t.depth() as i32)
}
