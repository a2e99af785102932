//! Coalition strategies against Basic-LEAD and A-LEAD^uni.
//!
//! All of them share one shape: pipe honest values through, slip in one
//! correcting value `M`, pad, and finally replay the secrets of the honest
//! segment that follows, so its identity checks pass.

use crate::ring::{Msg, Outbox, Strategy};

fn sub(a: u64, b: u64, n: u64) -> u64 {
    (a % n + n - b % n) % n
}

fn sum(xs: &[u64], n: u64) -> u64 {
    xs.iter().fold(0, |s, &x| (s + x % n) % n)
}

/// Single adversary against Basic-LEAD: hold back, learn the other n−1
/// secrets, then pick its own so the total is `w`.
#[derive(Debug)]
pub struct BasicSingle {
    n: u64,
    w: u64,
    seen: Vec<u64>,
}

impl BasicSingle {
    pub fn new(n: usize, w: u64) -> Self {
        BasicSingle { n: n as u64, w, seen: Vec::with_capacity(n) }
    }
}

impl Strategy for BasicSingle {
    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        let n = self.n;
        self.seen.push(msg.value % n);
        if self.seen.len() as u64 == n - 1 {
            out.send(Msg::data(sub(self.w, sum(&self.seen, n), n)));
            for &x in &self.seen {
                out.send(Msg::data(x));
            }
            out.output(self.w);
        }
    }
}

/// Naive attack adversary: pipe `n−k` values, send `M`, `k−l−1` zeros, then
/// the last `l` received values.
#[derive(Debug)]
pub struct Naive {
    n: usize,
    k: usize,
    l: usize,
    w: u64,
    seen: Vec<u64>,
}

impl Naive {
    pub fn new(n: usize, k: usize, l: usize, w: u64) -> Self {
        assert!(l < k && k < n);
        Naive { n, k, l, w, seen: Vec::with_capacity(n) }
    }
}

impl Strategy for Naive {
    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        let (n, k, l) = (self.n, self.k, self.l);
        let nn = n as u64;
        if self.seen.len() >= n - k {
            return;
        }
        let v = msg.value % nn;
        self.seen.push(v);
        out.send(Msg::data(v));
        if self.seen.len() == n - k {
            let segment = &self.seen[n - k - l..];
            let m = sub(self.w, (sum(&self.seen, nn) + sum(segment, nn)) % nn, nn);
            out.send(Msg::data(m));
            for _ in 0..k - l - 1 {
                out.send(Msg::data(0));
            }
            for &x in segment {
                out.send(Msg::data(x));
            }
            out.output(self.w);
        }
    }
}

/// Cubic attack adversary with segment length `l`: transfer `n−k−l`
/// values, send `k−1` zeros, keep receiving until `n−k` values, send
/// `M = w − Σ received`, then replay the last `l` received values.
#[derive(Debug)]
pub struct Cubic {
    n: usize,
    k: usize,
    l: usize,
    w: u64,
    seen: Vec<u64>,
}

impl Cubic {
    pub fn new(n: usize, k: usize, l: usize, w: u64) -> Self {
        assert!(k >= 1 && k + l < n, "cubic adversary needs n − k − l ≥ 1");
        Cubic { n, k, l, w, seen: Vec::with_capacity(n) }
    }
}

impl Strategy for Cubic {
    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        let (n, k, l) = (self.n, self.k, self.l);
        let nn = n as u64;
        if self.seen.len() >= n - k {
            return;
        }
        let v = msg.value % nn;
        self.seen.push(v);
        let count = self.seen.len();
        if count <= n - k - l {
            out.send(Msg::data(v));
        }
        if count == n - k - l {
            for _ in 0..k - 1 {
                out.send(Msg::data(0));
            }
        }
        if count == n - k {
            out.send(Msg::data(sub(self.w, sum(&self.seen, nn), nn)));
            for &x in &self.seen[n - k - l..] {
                out.send(Msg::data(x));
            }
            out.output(self.w);
        }
    }
}

/// Location-oblivious adversary. It pipes until the first `C` values it saw
/// come round again, infers the coalition size from where that happens, and
/// then finishes like the naive attack with `k' − C − 1` replayed values.
#[derive(Debug)]
pub struct Randomized {
    n: usize,
    c: usize,
    w: u64,
    seen: Vec<u64>,
    sent: usize,
    /// Inferred coalition size, once circularity was seen.
    pub inferred_k: Option<usize>,
}

impl Randomized {
    pub fn new(n: usize, c: usize, w: u64) -> Self {
        assert!(c >= 1 && c < n);
        Randomized { n, c, w, seen: Vec::with_capacity(n), sent: 0, inferred_k: None }
    }

    fn emit(&mut self, v: u64, out: &mut Outbox) {
        out.send(Msg::data(v));
        self.sent += 1;
    }
}

impl Strategy for Randomized {
    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        let (n, c) = (self.n, self.c);
        let nn = n as u64;
        let v = msg.value % nn;
        self.seen.push(v);
        let t = self.seen.len();
        self.emit(v, out);
        let circular = t > c && self.seen[..c] == self.seen[t - c..];
        if circular {
            let k = n - t + c;
            self.inferred_k = Some(k);
            let replay = k.saturating_sub(c + 1);
            let hi = n - k;
            let lo = hi.saturating_sub(replay);
            let tail: Vec<u64> = self.seen[lo..hi].to_vec();
            let m = sub(self.w, (sum(&self.seen, nn) + sum(&tail, nn)) % nn, nn);
            self.emit(m, out);
            for x in tail {
                if self.sent == n {
                    break;
                }
                self.emit(x, out);
            }
            while self.sent < n {
                self.emit(0, out);
            }
            out.output(self.w);
        } else if t + 1 >= n {
            // never saw the pattern: the hope failed, just finish the count
            while self.sent < n {
                self.emit(0, out);
            }
            out.output(self.w);
        }
    }
}
