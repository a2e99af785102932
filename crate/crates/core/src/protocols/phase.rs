use crate::ring::{Channel, Msg, Outbox, Strategy};

use super::prf::f_unchecked;

/// How a phase-protocol processor turns what it saw into a leader.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputRule {
    /// `f(d̂, v̂[0..n−l])` with the keyed function.
    Random { fseed: u64, l: usize },
    /// `Σ d̂ mod n`. Broken on purpose.
    Sum,
}

impl OutputRule {
    pub fn apply(&self, n: usize, dhat: &[u64], vhat: &[u64]) -> u64 {
        match *self {
            OutputRule::Random { fseed, l } => f_unchecked(fseed, dhat, &vhat[..n - l], n),
            OutputRule::Sum => dhat.iter().fold(0, |s, &x| (s + x) % n as u64),
        }
    }
}

/// PhaseAsyncLead processor. Processor `id` validates round `id + 1`.
///
/// Rounds are counted from 1. In round `r` a processor receives one data
/// message and one validation message; the data value it gets in round `r`
/// is the secret of processor `id − r`.
#[derive(Debug, Clone)]
pub struct PhaseLead {
    id: usize,
    n: usize,
    m: u64,
    d: u64,
    v: u64,
    rule: OutputRule,
    round: usize,
    buffer: u64,
    expect: Channel,
    dhat: Vec<u64>,
    vhat: Vec<u64>,
}

impl PhaseLead {
    pub fn new(id: usize, n: usize, m: u64, d: u64, v: u64, rule: OutputRule) -> Self {
        assert!(n >= 2 && id < n && m >= 2);
        let d = d % n as u64;
        let v = v % m;
        let mut dhat = vec![0; n];
        let mut vhat = vec![0; n];
        dhat[id] = d;
        vhat[id] = v;
        PhaseLead { id, n, m, d, v, rule, round: 0, buffer: d, expect: Channel::Data, dhat, vhat }
    }

    fn is_origin(&self) -> bool {
        self.id == 0
    }

    fn finish(&mut self, out: &mut Outbox) {
        out.output(self.rule.apply(self.n, &self.dhat, &self.vhat));
    }

    fn on_data(&mut self, value: u64, out: &mut Outbox) {
        let value = value % self.n as u64;
        if self.is_origin() {
            // round already advanced when the previous data message went out
            self.buffer = value;
        } else {
            out.send(Msg::data(self.buffer));
            self.buffer = value;
            self.round += 1;
            if self.round == self.id + 1 {
                out.send(Msg::validation(self.v));
            }
        }
        let slot = (self.id + self.n - self.round % self.n) % self.n;
        if self.round == self.n {
            if value != self.d {
                out.abort();
                return;
            }
        } else {
            self.dhat[slot] = value;
        }
        self.expect = Channel::Validation;
    }

    fn on_validation(&mut self, value: u64, out: &mut Outbox) {
        let value = value % self.m;
        let r = self.round;
        if r == self.id + 1 {
            if value != self.v {
                out.abort();
                return;
            }
        } else {
            self.vhat[r - 1] = value;
            out.send(Msg::validation(value));
        }
        if r == self.n {
            self.finish(out);
            return;
        }
        if self.is_origin() {
            out.send(Msg::data(self.buffer));
            self.round += 1;
        }
        self.expect = Channel::Data;
    }
}

impl Strategy for PhaseLead {
    fn wake(&mut self, out: &mut Outbox) {
        if self.is_origin() {
            out.send(Msg::data(self.d));
            out.send(Msg::validation(self.v));
            self.round = 1;
        }
    }

    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        if msg.channel != self.expect {
            out.abort();
            return;
        }
        match msg.channel {
            Channel::Data => self.on_data(msg.value, out),
            Channel::Validation => self.on_validation(msg.value, out),
        }
    }
}
