//! Asynchronous unidirectional ring with FIFO links.
//!
//! Processor `i` sends only to `(i + 1) mod n` and receives only from `(i - 1) mod n`.
//! The scheduler is oblivious: it picks the next link to deliver on without looking at
//! message contents, either round-robin or from a seeded RNG.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type ProcessorId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Data,
    Validation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Msg {
    pub value: u64,
    pub channel: Channel,
}

impl Msg {
    pub fn data(value: u64) -> Self {
        Msg { value, channel: Channel::Data }
    }

    pub fn validation(value: u64) -> Self {
        Msg { value, channel: Channel::Validation }
    }
}

/// Terminal state of a processor. `Abort` is the ⊥ output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    Output(u64),
    Abort,
}

/// Collects what a processor does during one activation.
#[derive(Debug, Default)]
pub struct Outbox {
    sends: Vec<Msg>,
    terminal: Option<Terminal>,
}

impl Outbox {
    pub fn send(&mut self, msg: Msg) {
        debug_assert!(self.terminal.is_none(), "send after terminate");
        self.sends.push(msg);
    }

    pub fn output(&mut self, value: u64) {
        self.terminal.get_or_insert(Terminal::Output(value));
    }

    pub fn abort(&mut self) {
        self.terminal.get_or_insert(Terminal::Abort);
    }

    pub fn terminated(&self) -> bool {
        self.terminal.is_some()
    }

    pub fn sent(&self) -> usize {
        self.sends.len()
    }

    /// Messages and terminal state collected so far.
    pub fn into_parts(self) -> (Vec<Msg>, Option<Terminal>) {
        (self.sends, self.terminal)
    }
}

/// A processor's local algorithm. Honest protocol code and adversarial
/// deviations implement the same trait.
pub trait Strategy: Send {
    fn wake(&mut self, _out: &mut Outbox) {}
    fn receive(&mut self, msg: Msg, out: &mut Outbox);
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    #[default]
    #[serde(rename = "rr")]
    RoundRobin,
    Random,
}

impl std::str::FromStr for Schedule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rr" | "round-robin" => Ok(Schedule::RoundRobin),
            "random" => Ok(Schedule::Random),
            other => Err(format!("unknown schedule `{other}` (expected rr|random)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimOptions {
    pub schedule: Schedule,
    pub seed: u64,
    pub record: bool,
    /// Event budget; defaults to 64·n².
    pub budget: Option<u64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { schedule: Schedule::RoundRobin, seed: 0, record: true, budget: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Send,
    Recv,
}

/// One transcript line. `ordinal` is 1-based per (processor, kind).
/// `trigger` is the ordinal of the receive whose activation produced a send;
/// `None` for sends made at wake-up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub kind: EventKind,
    pub proc: ProcessorId,
    pub ordinal: u32,
    pub value: u64,
    #[serde(default = "data_channel", skip_serializing_if = "is_data")]
    pub channel: Channel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger: Option<u32>,
}

fn data_channel() -> Channel {
    Channel::Data
}

fn is_data(c: &Channel) -> bool {
    *c == Channel::Data
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub n: usize,
    pub events: Vec<Event>,
    /// Terminal state per processor; empty when parsed from JSONL.
    pub outputs: Vec<Option<Terminal>>,
}

impl Transcript {
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn from_jsonl(n: usize, text: &str) -> Result<Self, serde_json::Error> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<Event>, _>>()?;
        Ok(Transcript { n, events, outputs: Vec::new() })
    }

    /// Messages sent by `p`, in order.
    pub fn sends_of(&self, p: ProcessorId) -> Vec<Msg> {
        self.events
            .iter()
            .filter(|e| e.proc == p && e.kind == EventKind::Send)
            .map(|e| Msg { value: e.value, channel: e.channel })
            .collect()
    }

    pub fn recvs_of(&self, p: ProcessorId) -> Vec<Msg> {
        self.events
            .iter()
            .filter(|e| e.proc == p && e.kind == EventKind::Recv)
            .map(|e| Msg { value: e.value, channel: e.channel })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stall {
    /// No deliverable message while someone is still running.
    Quiescent,
    /// The event budget ran out.
    Budget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailReason {
    Abort,
    Disagreement,
    Nontermination(Stall),
}

impl FailReason {
    pub fn label(&self) -> &'static str {
        match self {
            FailReason::Abort => "abort",
            FailReason::Disagreement => "disagreement",
            FailReason::Nontermination(Stall::Quiescent) => "nontermination",
            FailReason::Nontermination(Stall::Budget) => "nontermination(budget)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Elected(u64),
    Fail(FailReason),
}

impl Outcome {
    pub fn elected(&self) -> Option<u64> {
        match self {
            Outcome::Elected(j) => Some(*j),
            Outcome::Fail(_) => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Elected(j) => write!(f, "Elected({j})"),
            Outcome::Fail(r) => write!(f, "Fail({})", r.label()),
        }
    }
}

/// Global outcome from per-processor terminal states.
///
/// Abort wins over disagreement, which wins over nontermination. An output
/// outside `[0, n)` counts as ⊥.
pub fn outcome_of(n: usize, terminals: &[Option<Terminal>], stall: Stall) -> Outcome {
    outcome_among(n, terminals, stall, 0..terminals.len())
}

/// Like [`outcome_of`], restricted to the given processors.
pub fn outcome_among(
    n: usize,
    terminals: &[Option<Terminal>],
    stall: Stall,
    members: impl IntoIterator<Item = ProcessorId>,
) -> Outcome {
    let mut seen: Option<u64> = None;
    let mut disagree = false;
    let mut missing = false;
    for p in members {
        match terminals[p] {
            None => missing = true,
            Some(Terminal::Abort) => return Outcome::Fail(FailReason::Abort),
            Some(Terminal::Output(v)) if v >= n as u64 => return Outcome::Fail(FailReason::Abort),
            Some(Terminal::Output(v)) => match seen {
                None => seen = Some(v),
                Some(s) if s != v => disagree = true,
                _ => {}
            },
        }
    }
    if disagree {
        Outcome::Fail(FailReason::Disagreement)
    } else if missing {
        Outcome::Fail(FailReason::Nontermination(stall))
    } else {
        match seen {
            Some(v) => Outcome::Elected(v),
            None => Outcome::Fail(FailReason::Nontermination(stall)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Execution {
    pub n: usize,
    pub terminals: Vec<Option<Terminal>>,
    pub sent: Vec<u32>,
    pub received: Vec<u32>,
    /// How the run stopped if someone never terminated.
    pub stall: Stall,
    pub events: u64,
    pub transcript: Option<Transcript>,
}

impl Execution {
    pub fn outcome(&self) -> Outcome {
        outcome_of(self.n, &self.terminals, self.stall)
    }

    pub fn outcome_among(&self, members: impl IntoIterator<Item = ProcessorId>) -> Outcome {
        outcome_among(self.n, &self.terminals, self.stall, members)
    }

    pub fn all_terminated(&self) -> bool {
        self.terminals.iter().all(Option::is_some)
    }
}

/// Processors with a pending deliverable message.
enum Ready {
    Ordered { set: BTreeSet<usize>, cursor: usize },
    Random { items: Vec<usize>, pos: Vec<usize>, rng: ChaCha8Rng },
}

const ABSENT: usize = usize::MAX;

impl Ready {
    fn new(n: usize, schedule: Schedule, seed: u64) -> Self {
        match schedule {
            Schedule::RoundRobin => Ready::Ordered { set: BTreeSet::new(), cursor: 0 },
            Schedule::Random => Ready::Random {
                items: Vec::with_capacity(n),
                pos: vec![ABSENT; n],
                rng: ChaCha8Rng::seed_from_u64(seed),
            },
        }
    }

    fn insert(&mut self, p: usize) {
        match self {
            Ready::Ordered { set, .. } => {
                set.insert(p);
            }
            Ready::Random { items, pos, .. } => {
                if pos[p] == ABSENT {
                    pos[p] = items.len();
                    items.push(p);
                }
            }
        }
    }

    fn remove(&mut self, p: usize) {
        match self {
            Ready::Ordered { set, .. } => {
                set.remove(&p);
            }
            Ready::Random { items, pos, .. } => {
                let i = pos[p];
                if i != ABSENT {
                    items.swap_remove(i);
                    if i < items.len() {
                        pos[items[i]] = i;
                    }
                    pos[p] = ABSENT;
                }
            }
        }
    }

    fn pick(&mut self) -> Option<usize> {
        match self {
            Ready::Ordered { set, cursor } => {
                let p = set.range(*cursor..).next().or_else(|| set.iter().next()).copied()?;
                *cursor = p + 1;
                Some(p)
            }
            Ready::Random { items, rng, .. } => {
                if items.is_empty() {
                    None
                } else {
                    Some(items[rng.gen_range(0..items.len())])
                }
            }
        }
    }
}

/// Run a ring to quiescence or budget exhaustion.
///
/// `wakers` are activated once, in order, before any delivery. A processor
/// that has terminated silently discards anything still addressed to it.
pub fn simulate(
    mut strategies: Vec<Box<dyn Strategy>>,
    wakers: &[ProcessorId],
    opts: &SimOptions,
) -> Execution {
    let n = strategies.len();
    assert!(n >= 1, "ring needs at least one processor");
    let budget = opts.budget.unwrap_or(64 * (n as u64) * (n as u64));
    let mut inbox: Vec<VecDeque<Msg>> = vec![VecDeque::new(); n];
    let mut terminals: Vec<Option<Terminal>> = vec![None; n];
    let mut sent = vec![0u32; n];
    let mut received = vec![0u32; n];
    let mut events: Vec<Event> = Vec::new();
    let mut seq: u64 = 0;
    let mut ready = Ready::new(n, opts.schedule, opts.seed);
    let mut out = Outbox::default();

    let flush = |p: usize,
                     trigger: Option<u32>,
                     out: &mut Outbox,
                     inbox: &mut Vec<VecDeque<Msg>>,
                     terminals: &mut Vec<Option<Terminal>>,
                     sent: &mut Vec<u32>,
                     events: &mut Vec<Event>,
                     seq: &mut u64,
                     ready: &mut Ready| {
        let next = (p + 1) % n;
        for m in out.sends.drain(..) {
            sent[p] += 1;
            if opts.record {
                events.push(Event {
                    seq: *seq,
                    kind: EventKind::Send,
                    proc: p,
                    ordinal: sent[p],
                    value: m.value,
                    channel: m.channel,
                    trigger,
                });
            }
            *seq += 1;
            if terminals[next].is_none() {
                inbox[next].push_back(m);
                ready.insert(next);
            }
        }
        if let Some(t) = out.terminal.take() {
            terminals[p] = Some(t);
            inbox[p].clear();
            ready.remove(p);
        }
    };

    for &p in wakers {
        if terminals[p].is_some() {
            continue;
        }
        strategies[p].wake(&mut out);
        flush(p, None, &mut out, &mut inbox, &mut terminals, &mut sent, &mut events, &mut seq, &mut ready);
    }

    let stall = loop {
        if seq >= budget {
            break Stall::Budget;
        }
        let Some(p) = ready.pick() else { break Stall::Quiescent };
        let m = inbox[p].pop_front().expect("ready processor has mail");
        if inbox[p].is_empty() {
            ready.remove(p);
        }
        received[p] += 1;
        if opts.record {
            events.push(Event {
                seq,
                kind: EventKind::Recv,
                proc: p,
                ordinal: received[p],
                value: m.value,
                channel: m.channel,
                trigger: None,
            });
        }
        seq += 1;
        strategies[p].receive(m, &mut out);
        let trig = Some(received[p]);
        flush(p, trig, &mut out, &mut inbox, &mut terminals, &mut sent, &mut events, &mut seq, &mut ready);
    };

    Execution {
        n,
        transcript: opts.record.then(|| Transcript { n, events, outputs: terminals.clone() }),
        terminals,
        sent,
        received,
        stall,
        events: seq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Silent;
    impl Strategy for Silent {
        fn receive(&mut self, _: Msg, _: &mut Outbox) {}
    }

    struct Relay {
        left: u32,
    }
    impl Strategy for Relay {
        fn wake(&mut self, out: &mut Outbox) {
            out.send(Msg::data(7));
        }
        fn receive(&mut self, m: Msg, out: &mut Outbox) {
            self.left -= 1;
            if self.left == 0 {
                out.output(m.value % 3);
            } else {
                out.send(m);
            }
        }
    }

    #[test]
    fn outcome_precedence() {
        use Terminal::*;
        let t = [Some(Output(1)), Some(Abort), Some(Output(2)), None];
        assert_eq!(outcome_of(4, &t, Stall::Quiescent), Outcome::Fail(FailReason::Abort));
        let t = [Some(Output(1)), Some(Output(2)), None];
        assert_eq!(outcome_of(3, &t, Stall::Quiescent), Outcome::Fail(FailReason::Disagreement));
        let t = [Some(Output(1)), None];
        assert_eq!(
            outcome_of(2, &t, Stall::Budget),
            Outcome::Fail(FailReason::Nontermination(Stall::Budget))
        );
        let t = [Some(Output(5)), Some(Output(5))];
        assert_eq!(outcome_of(4, &t, Stall::Quiescent), Outcome::Fail(FailReason::Abort));
        let t = [Some(Output(3)), Some(Output(3))];
        assert_eq!(outcome_of(4, &t, Stall::Quiescent), Outcome::Elected(3));
    }

    #[test]
    fn silent_ring_is_quiescent() {
        let s: Vec<Box<dyn Strategy>> = vec![Box::new(Silent), Box::new(Silent)];
        let ex = simulate(s, &[0, 1], &SimOptions::default());
        assert_eq!(ex.outcome(), Outcome::Fail(FailReason::Nontermination(Stall::Quiescent)));
        assert_eq!(ex.events, 0);
    }

    #[test]
    fn relay_ring_terminates_on_both_schedules() {
        for schedule in [Schedule::RoundRobin, Schedule::Random] {
            let s: Vec<Box<dyn Strategy>> =
                (0..3).map(|_| Box::new(Relay { left: 3 }) as Box<dyn Strategy>).collect();
            let opts = SimOptions { schedule, seed: 9, ..Default::default() };
            let ex = simulate(s, &[0, 1, 2], &opts);
            assert_eq!(ex.outcome(), Outcome::Elected(1));
            assert_eq!(ex.sent, vec![3, 3, 3]);
            let tr = ex.transcript.unwrap();
            let back = Transcript::from_jsonl(3, &tr.to_jsonl()).unwrap();
            assert_eq!(back.events, tr.events);
        }
    }

    #[test]
    fn budget_cutoff_is_flagged() {
        struct Chatty;
        impl Strategy for Chatty {
            fn wake(&mut self, out: &mut Outbox) {
                out.send(Msg::data(0));
            }
            fn receive(&mut self, m: Msg, out: &mut Outbox) {
                out.send(m);
            }
        }
        let s: Vec<Box<dyn Strategy>> = vec![Box::new(Chatty), Box::new(Chatty)];
        let ex = simulate(s, &[0], &SimOptions { record: false, ..Default::default() });
        assert_eq!(ex.stall, Stall::Budget);
        assert!((64 * 4..=64 * 4 + 1).contains(&ex.events), "{}", ex.events);
    }

    #[test]
    fn jsonl_shape() {
        let e = Event {
            seq: 3,
            kind: EventKind::Send,
            proc: 2,
            ordinal: 1,
            value: 5,
            channel: Channel::Validation,
            trigger: Some(1),
        };
        let line = serde_json::to_string(&e).unwrap();
        assert_eq!(
            line,
            r#"{"seq":3,"kind":"send","proc":2,"ordinal":1,"value":5,"channel":"validation","trigger":1}"#
        );
    }
}
