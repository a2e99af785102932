//! Happens-before and calculation-dependency graphs over transcript events.
//!
//! Ordinals follow the transcript: the `i`-th send of a processor is
//! `send(p, i)`, counted from 1. In the phase protocols odd ordinals carry
//! data and even ordinals carry validation values, so round `r` uses ordinals
//! `2r − 1` and `2r`. Processor `h` validates round `h + 1`.

use std::collections::HashMap;

use serde::Serialize;

use super::OracleError;
use crate::ring::{EventKind, ProcessorId, Transcript};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EventRef {
    pub kind: EventKind,
    pub proc: ProcessorId,
    pub ordinal: u32,
}

impl EventRef {
    pub fn send(proc: ProcessorId, ordinal: u32) -> Self {
        EventRef { kind: EventKind::Send, proc, ordinal }
    }

    pub fn recv(proc: ProcessorId, ordinal: u32) -> Self {
        EventRef { kind: EventKind::Recv, proc, ordinal }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Dag {
    succ: Vec<Vec<u32>>,
}

impl Dag {
    fn new(nodes: usize) -> Self {
        Dag { succ: vec![Vec::new(); nodes] }
    }

    fn add(&mut self, a: usize, b: usize) {
        self.succ[a].push(b as u32);
    }

    pub fn nodes(&self) -> usize {
        self.succ.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |&b| (a, b as usize)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_acyclic(&self) -> bool {
        let mut indeg = vec![0u32; self.nodes()];
        for (_, b) in self.edges() {
            indeg[b] += 1;
        }
        let mut stack: Vec<usize> = (0..self.nodes()).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &self.succ[v] {
                indeg[w as usize] -= 1;
                if indeg[w as usize] == 0 {
                    stack.push(w as usize);
                }
            }
        }
        seen == self.nodes()
    }

    /// Path of at least one edge from `a` to `b`.
    pub fn path(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.nodes()];
        let mut stack: Vec<usize> = self.succ[a].iter().map(|&x| x as usize).collect();
        while let Some(v) = stack.pop() {
            if v == b {
                return true;
            }
            if !std::mem::replace(&mut seen[v], true) {
                stack.extend(self.succ[v].iter().map(|&x| x as usize));
            }
        }
        false
    }
}

#[derive(Clone, Debug)]
pub struct DependencyGraphs {
    pub n: usize,
    pub events: Vec<EventRef>,
    pub hb: Dag,
    pub cd: Dag,
    index: HashMap<EventRef, usize>,
}

impl DependencyGraphs {
    pub fn node(&self, e: EventRef) -> Result<usize, OracleError> {
        self.index.get(&e).copied().ok_or(OracleError::UnknownEvent(e))
    }

    pub fn contains(&self, e: EventRef) -> bool {
        self.index.contains_key(&e)
    }

    /// `s(h)`: `h` sends its own validation value.
    pub fn s(&self, h: ProcessorId) -> EventRef {
        EventRef::send(h, 2 * (h as u32 + 1))
    }

    /// `r(h)`: the predecessor hands the validation value of round `h + 1` back to `h`.
    pub fn r(&self, h: ProcessorId) -> EventRef {
        EventRef::send((h + self.n - 1) % self.n, 2 * (h as u32 + 1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    Validated,
    NotValidated,
    /// `s(h)` or `r(h)` never happened.
    Indeterminate,
}

/// Build both graphs. `coalition` marks the processors whose sends get the
/// conservative adversary calculation edges.
pub fn build_graphs(t: &Transcript, coalition: &[ProcessorId]) -> Result<DependencyGraphs, OracleError> {
    let n = t.n;
    let mut events = Vec::with_capacity(t.events.len());
    let mut index = HashMap::with_capacity(t.events.len());
    let mut trigger: HashMap<EventRef, Option<u32>> = HashMap::new();
    let mut per_proc: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut last = [vec![0u32; n], vec![0u32; n]];
    let mut prev_seq = None;
    for e in &t.events {
        if e.proc >= n {
            return Err(OracleError::Malformed(format!("processor {} outside ring", e.proc)));
        }
        if prev_seq.is_some_and(|s| e.seq <= s) {
            return Err(OracleError::Malformed(format!("seq {} not increasing", e.seq)));
        }
        prev_seq = Some(e.seq);
        let k = (e.kind == EventKind::Recv) as usize;
        if e.ordinal != last[k][e.proc] + 1 {
            return Err(OracleError::Malformed(format!("ordinal gap at processor {} seq {}", e.proc, e.seq)));
        }
        last[k][e.proc] = e.ordinal;
        let r = EventRef { kind: e.kind, proc: e.proc, ordinal: e.ordinal };
        if e.kind == EventKind::Recv {
            let from = (e.proc + n - 1) % n;
            if !index.contains_key(&EventRef::send(from, e.ordinal)) {
                return Err(OracleError::Malformed(format!("recv without matching send at seq {}", e.seq)));
            }
        }
        if let Some(tr) = e.trigger {
            if tr > last[1][e.proc] {
                return Err(OracleError::Malformed(format!("trigger {tr} not yet received at seq {}", e.seq)));
            }
        }
        index.insert(r, events.len());
        per_proc[e.proc].push(events.len());
        trigger.insert(r, e.trigger);
        events.push(r);
    }
    let mut adversary = vec![false; n];
    for &a in coalition {
        if a >= n {
            return Err(OracleError::Coalition(a));
        }
        adversary[a] = true;
    }

    let id = |e: EventRef| index.get(&e).copied();
    let mut hb = Dag::new(events.len());
    let mut cd = Dag::new(events.len());
    let nn = n as u32;
    for (i, &e) in events.iter().enumerate() {
        let p = e.proc;
        match e.kind {
            EventKind::Send => {
                if let Some(j) = id(EventRef::recv((p + 1) % n, e.ordinal)) {
                    hb.add(i, j);
                    cd.add(i, j);
                }
                if let Some(j) = id(EventRef::send(p, e.ordinal + 1)) {
                    hb.add(i, j);
                }
                let tr = trigger[&e];
                let first_after = tr.map_or(1, |t| t + 1);
                if let Some(j) = id(EventRef::recv(p, first_after)) {
                    hb.add(i, j);
                }
                if let Some(t) = tr {
                    let src = id(EventRef::recv(p, t)).expect("checked above");
                    hb.add(src, i);
                    if adversary[p] {
                        for u in 1..=t {
                            cd.add(id(EventRef::recv(p, u)).expect("ordinals are consecutive"), i);
                        }
                    }
                }
            }
            EventKind::Recv => {
                if let Some(j) = id(EventRef::recv(p, e.ordinal + 1)) {
                    hb.add(i, j);
                }
                if adversary[p] {
                    continue;
                }
                let o = e.ordinal;
                if o % 2 == 0 {
                    let round = o / 2;
                    if round != p as u32 + 1 {
                        if let Some(j) = id(EventRef::send(p, o)) {
                            cd.add(i, j);
                        }
                    }
                } else {
                    let round = o.div_ceil(2);
                    if round < nn {
                        if let Some(j) = id(EventRef::send(p, o + 2)) {
                            cd.add(i, j);
                        }
                    }
                }
            }
        }
    }
    Ok(DependencyGraphs { n, events, hb, cd, index })
}

/// `a ⇝ b` in `graph` (path of at least one edge).
pub fn reachable(g: &DependencyGraphs, graph: &Dag, a: EventRef, b: EventRef) -> Result<bool, OracleError> {
    Ok(graph.path(g.node(a)?, g.node(b)?))
}

/// Whether honest `h` got its own validation value back through a chain of
/// calculations starting at the value it sent.
pub fn is_validated(h: ProcessorId, g: &DependencyGraphs) -> Validation {
    let (s, r) = (g.s(h), g.r(h));
    match (g.node(s), g.node(r)) {
        (Ok(a), Ok(b)) => {
            if g.cd.path(a, b) {
                Validation::Validated
            } else {
                Validation::NotValidated
            }
        }
        _ => Validation::Indeterminate,
    }
}
