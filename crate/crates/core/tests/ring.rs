use fairring::harness::{run_trials, trial_rng, RunConfig};
use fairring::oracle::fuzz::{Perturbation, Perturbed};
use fairring::protocols::{
    data_inputs, draw_inputs, f_eval, honest_strategies, PhaseParams, ProtocolKind, SecretInput,
};
use fairring::ring::*;
use fairring::Strategy;
use proptest::prelude::{prop_assert, prop_assert_eq, prop_oneof, proptest, Just, ProptestConfig};

fn run(kind: ProtocolKind, inputs: &[SecretInput], params: &PhaseParams, opts: &SimOptions) -> Execution {
    let n = inputs.len();
    simulate(honest_strategies(kind, n, 0, inputs, params), &kind.wakers(n, 0), opts)
}

fn run_d(kind: ProtocolKind, d: &[u64]) -> Outcome {
    let params = PhaseParams::defaults(d.len(), 0);
    run(kind, &data_inputs(d), &params, &SimOptions::default()).outcome()
}

#[test]
fn basic_lead_examples() {
    assert_eq!(run_d(ProtocolKind::Basic, &[1, 2, 3]), Outcome::Elected(0));
    assert_eq!(run_d(ProtocolKind::Basic, &[0, 0]), Outcome::Elected(0));
    assert_eq!(run_d(ProtocolKind::Basic, &[1, 1, 1, 1]), Outcome::Elected(0));
}

#[test]
fn alead_examples() {
    assert_eq!(run_d(ProtocolKind::ALead, &[1, 2, 3, 0]), Outcome::Elected(2));
    assert_eq!(run_d(ProtocolKind::ALead, &[1, 1]), Outcome::Elected(0));
    let r = run_trials(&RunConfig::new(ProtocolKind::ALead, 5), None, 10_000, 17).unwrap();
    assert!(r.tv_distance.unwrap() < 0.02, "{r}");
    assert_eq!(r.fail_rate, 0.0);
}

#[test]
fn outcome_examples() {
    use Terminal::*;
    let o = |t: &[Terminal]| outcome_of(8, &t.iter().copied().map(Some).collect::<Vec<_>>(), Stall::Quiescent);
    assert_eq!(o(&[Output(5); 8]), Outcome::Elected(5));
    assert_eq!(o(&[Output(5), Output(5), Abort, Output(5)]), Outcome::Fail(FailReason::Abort));
    assert_eq!(o(&[Output(5), Output(6), Output(5), Output(5)]), Outcome::Fail(FailReason::Disagreement));
    assert_eq!(o(&[Output(5), Output(6), Abort, Output(5)]), Outcome::Fail(FailReason::Abort));
}

struct Silent;
impl Strategy for Silent {
    fn receive(&mut self, _: Msg, _: &mut Outbox) {}
}

#[test]
fn silent_processor_stalls_the_ring() {
    let d = [1u64, 2, 3, 0];
    let mut s = honest_strategies(ProtocolKind::ALead, 4, 0, &data_inputs(&d), &PhaseParams::defaults(4, 0));
    s[2] = Box::new(Silent);
    let ex = simulate(s, &[0], &SimOptions::default());
    assert_eq!(ex.outcome(), Outcome::Fail(FailReason::Nontermination(Stall::Quiescent)));
}

#[test]
fn wrong_last_value_aborts_successor() {
    let d = [1u64, 2, 3, 0];
    let mut s = honest_strategies(ProtocolKind::ALead, 4, 0, &data_inputs(&d), &PhaseParams::defaults(4, 0));
    s[1] = Box::new(Perturbed::new(4, d[1], false, Perturbation::ReplaceLast { value: 1 }));
    let ex = simulate(s, &[0], &SimOptions::default());
    assert_eq!(ex.terminals[2], Some(Terminal::Abort));
    assert_eq!(ex.outcome(), Outcome::Fail(FailReason::Abort));
}

#[test]
fn exhaustive_uniformity_small_rings() {
    for kind in [ProtocolKind::Basic, ProtocolKind::ALead] {
        for n in 2..=3usize {
            let mut hist = vec![0u64; n];
            let total = n.pow(n as u32);
            for code in 0..total {
                let d: Vec<u64> = (0..n).map(|i| (code / n.pow(i as u32) % n) as u64).collect();
                hist[run_d(kind, &d).elected().unwrap() as usize] += 1;
            }
            assert!(hist.iter().all(|&c| c as usize == total / n), "{kind:?} n={n}: {hist:?}");
        }
    }
}

fn phase_params() -> PhaseParams {
    PhaseParams { l: 2, m: 128, fseed: 99 }
}

#[test]
fn phase_honest_output_is_f() {
    let n = 8;
    let inputs = draw_inputs(n, 128, &mut trial_rng(3, 0));
    let ex = run(ProtocolKind::Phase, &inputs, &phase_params(), &SimOptions::default());
    let d: Vec<u64> = inputs.iter().map(|x| x.d).collect();
    let v: Vec<u64> = inputs.iter().map(|x| x.v).collect();
    let expect = f_eval(99, &d, &v[..n - 2], n).unwrap();
    assert_eq!(ex.outcome(), Outcome::Elected(expect));
}

#[test]
fn sum_variant_elects_sum() {
    let d = [5u64, 3, 0, 1, 0, 2, 0, 0];
    let inputs: Vec<SecretInput> = d.iter().enumerate().map(|(i, &d)| SecretInput { d, v: i as u64 * 7 }).collect();
    let ex = run(ProtocolKind::PhaseSum, &inputs, &phase_params(), &SimOptions::default());
    assert_eq!(ex.outcome(), Outcome::Elected(3));
}

/// Adds 1 to the `which`-th validation message it sends.
struct FlipValidation {
    inner: Box<dyn Strategy>,
    which: usize,
    seen: usize,
}

impl FlipValidation {
    fn rewrite(&mut self, scratch: Outbox, out: &mut Outbox) {
        let (sends, term) = scratch.into_parts();
        for mut m in sends {
            if m.channel == Channel::Validation {
                self.seen += 1;
                if self.seen == self.which {
                    m.value += 1;
                }
            }
            out.send(m);
        }
        match term {
            Some(Terminal::Output(o)) => out.output(o),
            Some(Terminal::Abort) => out.abort(),
            None => {}
        }
    }
}

impl Strategy for FlipValidation {
    fn wake(&mut self, out: &mut Outbox) {
        let mut s = Outbox::default();
        self.inner.wake(&mut s);
        self.rewrite(s, out);
    }
    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        let mut s = Outbox::default();
        self.inner.receive(msg, &mut s);
        self.rewrite(s, out);
    }
}

#[test]
fn flipped_validation_value_aborts_validator() {
    let n = 8;
    for kind in [ProtocolKind::Phase, ProtocolKind::PhaseSum] {
        let inputs = draw_inputs(n, 128, &mut trial_rng(4, 0));
        let mut s = honest_strategies(kind, n, 0, &inputs, &phase_params());
        // processor 2 forwards round 5's validation value, which belongs to processor 4
        let inner = std::mem::replace(&mut s[2], Box::new(Silent));
        s[2] = Box::new(FlipValidation { inner, which: 5, seen: 0 });
        let ex = simulate(s, &[0], &SimOptions::default());
        assert_eq!(ex.terminals[4], Some(Terminal::Abort));
        assert_eq!(ex.outcome(), Outcome::Fail(FailReason::Abort));
    }
}

#[test]
fn f_eval_uniform() {
    let n = 16;
    let mut rng = trial_rng(8, 0);
    let mut hist = vec![0u64; n];
    let trials = 100_000u64;
    for _ in 0..trials {
        let inputs = draw_inputs(n, 512, &mut rng);
        let d: Vec<u64> = inputs.iter().map(|x| x.d).collect();
        let v: Vec<u64> = inputs.iter().map(|x| x.v).collect();
        hist[f_eval(1, &d, &v[..n - 4], n).unwrap() as usize] += 1;
    }
    let (lo, hi) = fairring::harness::binomial_band(1.0 / 16.0, trials, 5.0);
    for &c in &hist {
        let f = c as f64 / trials as f64;
        assert!(f >= lo && f <= hi, "{hist:?}");
    }
}

fn kinds() -> impl proptest::strategy::Strategy<Value = ProtocolKind> {
    prop_oneof![
        Just(ProtocolKind::Basic),
        Just(ProtocolKind::ALead),
        Just(ProtocolKind::Phase),
        Just(ProtocolKind::PhaseSum)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn honest_run_invariants(kind in kinds(), n in 2usize..12, seed: u64, sched_seed: u64) {
        let params = PhaseParams { l: 1.max(n / 3), m: 2 * (n as u64).pow(2), fseed: seed };
        let inputs = draw_inputs(n, params.m, &mut trial_rng(seed, 0));
        let rr = run(kind, &inputs, &params, &SimOptions::default());
        let opts = SimOptions { schedule: Schedule::Random, seed: sched_seed, ..SimOptions::default() };
        let rnd = run(kind, &inputs, &params, &opts);

        // every honest run elects, identically under both schedules
        prop_assert!(rr.outcome().elected().is_some());
        prop_assert_eq!(rr.outcome(), rnd.outcome());
        prop_assert!(rr.all_terminated());
        let per = kind.messages_per_processor(n) as u32;
        prop_assert!(rr.sent.iter().all(|&s| s == per));

        // FIFO on every link
        for ex in [&rr, &rnd] {
            let t = ex.transcript.as_ref().unwrap();
            for p in 0..n {
                prop_assert_eq!(t.sends_of(p), t.recvs_of((p + 1) % n));
            }
        }

        // determinism
        let again = run(kind, &inputs, &params, &opts);
        prop_assert_eq!(again.transcript.unwrap().to_jsonl(), rnd.transcript.unwrap().to_jsonl());
    }

    #[test]
    fn alead_views(n in 2usize..14, seed: u64) {
        let inputs = draw_inputs(n, 1, &mut trial_rng(seed, 1));
        let ex = run(ProtocolKind::ALead, &inputs, &PhaseParams::defaults(n, 0), &SimOptions::default());
        let t = ex.transcript.unwrap();
        let mut all: Vec<u64> = inputs.iter().map(|x| x.d).collect();
        all.sort_unstable();
        for p in 0..n {
            let got = t.recvs_of(p);
            let mut vals: Vec<u64> = got.iter().map(|m| m.value).collect();
            prop_assert_eq!(*vals.last().unwrap(), inputs[p].d);
            vals.sort_unstable();
            prop_assert_eq!(&vals, &all);
        }
    }

    #[test]
    fn phase_views(n in 3usize..12, seed: u64) {
        let params = PhaseParams { l: 1, m: 2 * (n as u64).pow(2), fseed: seed };
        let inputs = draw_inputs(n, params.m, &mut trial_rng(seed, 2));
        let ex = run(ProtocolKind::Phase, &inputs, &params, &SimOptions::default());
        let t = ex.transcript.unwrap();
        for p in 0..n {
            let got = t.recvs_of(p);
            prop_assert_eq!(got.len(), 2 * n);
            for (i, m) in got.iter().enumerate() {
                let want = if i % 2 == 0 { Channel::Data } else { Channel::Validation };
                prop_assert_eq!(m.channel, want);
            }
            // round p+1 validation comes back to its sender
            prop_assert_eq!(got[2 * p + 1].value, inputs[p].v);
        }
    }

    #[test]
    fn f_eval_total(n in 2usize..40, seed: u64, l in 1usize..40) {
        let l = l.min(n - 1);
        let d: Vec<u64> = (0..n as u64).map(|i| i.wrapping_mul(seed)).collect();
        let v: Vec<u64> = (0..(n - l) as u64).collect();
        let a = f_eval(seed, &d, &v, n).unwrap();
        prop_assert!(a < n as u64);
        prop_assert_eq!(a, f_eval(seed, &d, &v, n).unwrap());
    }
}
