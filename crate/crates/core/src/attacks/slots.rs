//! Output scheduling for adversaries in the phase protocols.
//!
//! An adversary emits data and validation messages strictly alternating,
//! `D1 V1 D2 V2 … Dn Vn`, which is what its honest successor expects. A
//! [`SlotPlan`] decides the value of each slot once it has enough input; the
//! engine flushes as many slots as are ready after every activation.

use crate::ring::{Channel, Msg, Outbox, Strategy};

#[derive(Debug, Default, Clone)]
pub struct View {
    pub data_in: Vec<u64>,
    pub val_in: Vec<u64>,
    pub data_out: Vec<u64>,
    pub val_out: Vec<u64>,
}

pub trait SlotPlan: Send {
    /// Value for data slot `r` (1-based), or `None` to wait.
    fn data(&mut self, r: usize, view: &View) -> Option<u64>;
    /// Value for validation slot `r` (1-based), or `None` to wait.
    fn validation(&mut self, r: usize, view: &View) -> Option<u64>;
}

pub struct SlotAdversary<P> {
    n: usize,
    w: u64,
    view: View,
    plan: P,
}

impl<P: SlotPlan> SlotAdversary<P> {
    pub fn new(n: usize, w: u64, plan: P) -> Self {
        SlotAdversary { n, w, view: View::default(), plan }
    }

    fn pump(&mut self, out: &mut Outbox) {
        let n = self.n;
        loop {
            let v = &self.view;
            if v.val_out.len() == n {
                out.output(self.w);
                return;
            }
            if v.data_out.len() == v.val_out.len() {
                let r = v.data_out.len() + 1;
                match self.plan.data(r, &self.view) {
                    Some(x) => {
                        self.view.data_out.push(x);
                        out.send(Msg::data(x));
                    }
                    None => return,
                }
            } else {
                let r = v.val_out.len() + 1;
                match self.plan.validation(r, &self.view) {
                    Some(x) => {
                        self.view.val_out.push(x);
                        out.send(Msg::validation(x));
                    }
                    None => return,
                }
            }
        }
    }
}

impl<P: SlotPlan> Strategy for SlotAdversary<P> {
    fn wake(&mut self, out: &mut Outbox) {
        self.pump(out);
    }

    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        match msg.channel {
            Channel::Data => self.view.data_in.push(msg.value),
            Channel::Validation => self.view.val_in.push(msg.value),
        }
        self.pump(out);
    }
}
