use crate::ring::{Msg, Outbox, Strategy};

/// A-LEAD^uni. A normal processor delays every value by one message: it
/// sends the buffer, then stores what just arrived. The origin starts the
/// chain by sending its secret at wake and then just forwards.
#[derive(Debug, Clone)]
pub struct ALead {
    n: u64,
    d: u64,
    origin: bool,
    buffer: u64,
    count: u64,
    sum: u64,
}

impl ALead {
    pub fn new(n: usize, d: u64, origin: bool) -> Self {
        assert!(n >= 2);
        let d = d % n as u64;
        ALead { n: n as u64, d, origin, buffer: d, count: 0, sum: 0 }
    }
}

impl Strategy for ALead {
    fn wake(&mut self, out: &mut Outbox) {
        if self.origin {
            out.send(Msg::data(self.d));
        }
    }

    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        let value = msg.value % self.n;
        self.count += 1;
        self.sum = (self.sum + value) % self.n;
        if self.origin {
            if self.count < self.n {
                out.send(Msg::data(value));
            }
        } else {
            out.send(Msg::data(self.buffer));
            self.buffer = value;
        }
        if self.count == self.n {
            if value == self.d {
                out.output(self.sum);
            } else {
                out.abort();
            }
        }
    }
}
