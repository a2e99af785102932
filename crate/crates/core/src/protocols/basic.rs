use crate::ring::{Msg, Outbox, Strategy};

/// Basic-LEAD: everyone wakes, sends its secret and forwards what it hears.
/// The n-th receipt must be its own secret coming back; it is not forwarded.
#[derive(Debug, Clone)]
pub struct BasicLead {
    n: u64,
    d: u64,
    count: u64,
    sum: u64,
}

impl BasicLead {
    pub fn new(n: usize, d: u64) -> Self {
        assert!(n >= 2);
        BasicLead { n: n as u64, d: d % n as u64, count: 0, sum: 0 }
    }
}

impl Strategy for BasicLead {
    fn wake(&mut self, out: &mut Outbox) {
        out.send(Msg::data(self.d));
    }

    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        let value = msg.value % self.n;
        self.count += 1;
        self.sum = (self.sum + value) % self.n;
        if self.count < self.n {
            out.send(Msg::data(value));
        } else if value == self.d {
            out.output(self.sum);
        } else {
            out.abort();
        }
    }
}
