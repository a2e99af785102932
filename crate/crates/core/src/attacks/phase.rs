//! Coalition strategies against the phase protocols.

use crate::protocols::prf::f_unchecked;

use super::slots::{SlotPlan, View};

/// Four equally spaced adversaries against the sum variant. Processor 0 is
/// one of them and is also the origin.
///
/// With `L = (n − 4)/4`, adversary `A1` validates round `L + 2` and `A2`
/// validates round `2L + 3`. In the first of these rounds the validation
/// message carries a running sum of the four segment sums, so it returns to
/// `A1` holding `S`, the sum of all honest secrets. In the second round `A1`
/// broadcasts `S`. Each adversary then sends `w − S`, two zeros, and replays
/// its segment's secrets.
#[derive(Debug, Clone)]
pub struct SumAbuse {
    n: usize,
    big_l: usize,
    j: usize,
    w: u64,
    s: Option<u64>,
}

impl SumAbuse {
    /// `j` is the adversary's index in ring order, position `j·(L+1)`.
    pub fn new(n: usize, j: usize, w: u64) -> Self {
        assert!(n % 4 == 0 && n >= 12 && j < 4);
        SumAbuse { n, big_l: (n - 4) / 4, j, w, s: None }
    }

    fn position(&self) -> usize {
        self.j * (self.big_l + 1)
    }

    fn share_round(&self) -> usize {
        self.big_l + 2
    }

    fn broadcast_round(&self) -> usize {
        2 * self.big_l + 3
    }

    fn behind(&self, view: &View) -> Option<u64> {
        let l = self.big_l;
        (view.data_in.len() >= l).then(|| view.data_in[..l].iter().sum::<u64>() % self.n as u64)
    }

    fn known_sum(&mut self, view: &View) -> Option<u64> {
        if self.s.is_none() {
            if self.j == 1 && view.val_in.len() >= self.share_round() {
                self.s = Some(view.val_in[self.share_round() - 1] % self.n as u64);
            }
            if self.j >= 2 && view.val_in.len() >= self.broadcast_round() {
                self.s = Some(view.val_in[self.broadcast_round() - 1] % self.n as u64);
            }
        }
        self.s
    }
}

impl SlotPlan for SumAbuse {
    fn data(&mut self, r: usize, view: &View) -> Option<u64> {
        let n = self.n;
        let l = self.big_l;
        let nn = n as u64;
        let input = |i: usize| view.data_in.get(i - 1).copied();
        let origin = self.j == 0;
        if r == 1 && origin {
            return Some(0);
        }
        if r <= n - l - 3 {
            return if origin { input(r - 1) } else { input(r) };
        }
        if r == n - l - 2 {
            let s = self.known_sum(view)?;
            return Some((self.w % nn + nn - s) % nn);
        }
        if r <= n - l {
            return Some(0);
        }
        let first = if origin { n - l - 3 } else { n - l - 2 };
        input(first + r - (n - l + 1))
    }

    fn validation(&mut self, r: usize, view: &View) -> Option<u64> {
        let nn = self.n as u64;
        let forwarded = view.val_in.get(r - 1).copied();
        if r == self.share_round() {
            let t = self.behind(view)?;
            if self.j == 1 {
                return Some(t);
            }
            let total = (forwarded? + t) % nn;
            if self.j == 0 {
                self.s = Some(total);
            }
            return Some(total);
        }
        if r == self.broadcast_round() {
            return if self.j == 1 { self.known_sum(view) } else { forwarded };
        }
        if r - 1 == self.position() {
            Some(0)
        } else {
            forwarded
        }
    }
}

/// Rushing adversary against PhaseAsyncLead.
///
/// Pipes data for rounds `1..=n−k`, leaves spare data slots, and replays its
/// segment's secrets at the end. Some spare slots are sent only once every
/// validation value that enters `f` is known; those slots (and the adversary's
/// own validation value, if it validates round `n−l`) are searched so that
/// the segment behind it computes `f = w`.
#[derive(Debug, Clone)]
pub struct Rushing {
    n: usize,
    k: usize,
    l: usize,
    m: u64,
    fseed: u64,
    w: u64,
    pos: usize,
    seg: usize,
    budget: u64,
    search: Vec<Entry>,
    chosen: Option<Vec<u64>>,
    /// Set when the search ran and found nothing.
    pub missed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Data(usize),
    Val(usize),
}

impl Rushing {
    /// `coalition` are all adversary positions, `pos` is this one's.
    pub fn new(n: usize, k: usize, l: usize, m: u64, fseed: u64, w: u64, coalition: &[usize], pos: usize) -> Self {
        let mut mask = vec![false; n];
        for &p in coalition {
            mask[p] = true;
        }
        let seg = (1..n).take_while(|d| !mask[(pos + d) % n]).count();
        let mut r = Rushing {
            n,
            k,
            l,
            m,
            fseed,
            w,
            pos,
            seg,
            budget: (n as u64).pow(3),
            search: Vec::new(),
            chosen: None,
            missed: false,
        };
        r.search = r.pick_entries();
        r
    }

    pub fn segment_len(&self) -> usize {
        self.seg
    }

    /// Number of free entries this adversary can steer with full knowledge.
    pub fn informed_entries(&self) -> usize {
        self.search.len()
    }

    fn in_segment(&self, p: usize) -> bool {
        let d = (p + self.n - self.pos) % self.n;
        d >= 1 && d <= self.seg
    }

    fn validates(&self, round: usize) -> bool {
        (round - 1) == self.pos
    }

    fn pick_entries(&self) -> Vec<Entry> {
        let (n, k, l) = (self.n, self.k, self.l);
        let mut entries = Vec::new();
        if self.validates(n - l) {
            entries.push(Entry::Val(n - l));
        }
        for s in (n - k + 1)..=(n - self.seg) {
            let ok = if s == n - l { !self.in_segment(s - 1) } else { s > n - l };
            if ok && entries.len() < 3 {
                entries.push(Entry::Data(s));
            }
        }
        entries
    }

    fn is_free(&self, s: usize) -> bool {
        s > self.n - self.k && s <= self.n - self.seg
    }

    fn replay(&self, s: usize, view: &View) -> Option<u64> {
        let idx = self.n - self.k - self.seg + (s - (self.n - self.seg));
        view.data_in.get(idx - 1).copied()
    }

    fn planned(&self, e: Entry) -> Option<u64> {
        let i = self.search.iter().position(|&x| x == e)?;
        Some(self.chosen.as_ref().map_or(0, |c| c[i]))
    }

    /// Validation values for rounds `1..=n−l` as the segment will record
    /// them, with `None` where still unknown.
    fn validation_prefix(&self, view: &View) -> Option<Vec<u64>> {
        let mut v = Vec::with_capacity(self.n - self.l);
        for r in 1..=self.n - self.l {
            let x = if r <= view.val_out.len() {
                view.val_out[r - 1]
            } else if self.validates(r) {
                // own value: searched below, or 0
                0
            } else {
                *view.val_in.get(r - 1)?
            };
            v.push(x % self.m);
        }
        Some(v)
    }

    fn run_search(&mut self, view: &View) -> Option<()> {
        let n = self.n;
        if view.data_in.len() < n - self.k {
            return None;
        }
        let mut vals = self.validation_prefix(view)?;
        let mut d = vec![0u64; n];
        for s in 1..=n {
            let x = if s <= view.data_out.len() {
                view.data_out[s - 1]
            } else if s <= n - self.k {
                view.data_in[s - 1]
            } else if self.is_free(s) {
                0
            } else {
                self.replay(s, view)?
            };
            d[(self.pos + 1 + n - s % n) % n] = x % n as u64;
        }
        let radix: Vec<u64> = self
            .search
            .iter()
            .map(|e| match e {
                Entry::Data(_) => n as u64,
                Entry::Val(_) => self.m,
            })
            .collect();
        let space = radix.iter().fold(1u64, |a, &b| a.saturating_mul(b));
        let mut digits = vec![0u64; radix.len()];
        for _ in 0..space.min(self.budget) {
            for (e, &x) in self.search.iter().zip(&digits) {
                match *e {
                    Entry::Data(s) => d[(self.pos + 1 + n - s % n) % n] = x,
                    Entry::Val(r) => vals[r - 1] = x,
                }
            }
            if f_unchecked(self.fseed, &d, &vals, n) == self.w {
                self.chosen = Some(digits);
                return Some(());
            }
            for (dg, &rad) in digits.iter_mut().zip(&radix) {
                *dg += 1;
                if *dg < rad {
                    break;
                }
                *dg = 0;
            }
        }
        self.missed = true;
        self.chosen = Some(vec![0; radix.len()]);
        Some(())
    }

    fn ensure_search(&mut self, view: &View) -> Option<()> {
        if self.chosen.is_none() && !self.search.is_empty() {
            self.run_search(view)?;
        }
        Some(())
    }
}

impl SlotPlan for Rushing {
    fn data(&mut self, s: usize, view: &View) -> Option<u64> {
        let n = self.n;
        if s <= n - self.k {
            return view.data_in.get(s - 1).copied();
        }
        if self.is_free(s) {
            if self.search.contains(&Entry::Data(s)) {
                self.ensure_search(view)?;
            }
            return Some(self.planned(Entry::Data(s)).unwrap_or(0));
        }
        self.replay(s, view)
    }

    fn validation(&mut self, r: usize, view: &View) -> Option<u64> {
        if self.validates(r) {
            if self.search.contains(&Entry::Val(r)) {
                self.ensure_search(view)?;
            }
            return Some(self.planned(Entry::Val(r)).unwrap_or(0));
        }
        view.val_in.get(r - 1).copied()
    }
}
