use fairring::attacks::{
    cubic_distances, deploy, rushing_positions, segments, AttackError, AttackKind, AttackSpec, Placement,
};
use fairring::harness::{run_trial, run_trials, RunConfig};
use fairring::oracle::{validate_execution, Verdict};
use fairring::protocols::{data_inputs, PhaseParams, ProtocolKind};
use fairring::ring::{simulate, SimOptions};

fn elect_rate(cfg: &RunConfig, spec: &AttackSpec, trials: u64, seed: u64) -> f64 {
    run_trials(cfg, Some(spec), trials, seed).unwrap().success_rate.unwrap()
}

#[test]
fn basic_single_examples() {
    let spec = AttackSpec::new(AttackKind::Single, 3);
    assert_eq!(elect_rate(&RunConfig::new(ProtocolKind::Basic, 5), &spec, 50, 1), 1.0);
    let spec = AttackSpec::new(AttackKind::Single, 1);
    assert_eq!(elect_rate(&RunConfig::new(ProtocolKind::Basic, 2), &spec, 20, 2), 1.0);
    let spec = AttackSpec::new(AttackKind::Single, 0);
    assert_eq!(elect_rate(&RunConfig::new(ProtocolKind::Basic, 8), &spec, 1000, 3), 1.0);
}

#[test]
fn naive_examples() {
    let cfg = RunConfig::new(ProtocolKind::ALead, 9).with_oracle(true);
    let spec = AttackSpec::new(AttackKind::Naive, 7).at(&[0, 3, 6]);
    let r = run_trials(&cfg, Some(&spec), 100, 4).unwrap();
    assert_eq!(r.success_rate, Some(1.0));
    assert_eq!(r.oracle.as_ref().map(|o| o.agree), Some(100));

    let cfg = RunConfig::new(ProtocolKind::ALead, 4);
    let spec = AttackSpec::new(AttackKind::Naive, 0).at(&[0, 2]);
    assert_eq!(elect_rate(&cfg, &spec, 50, 5), 1.0);

    let cfg = RunConfig::new(ProtocolKind::ALead, 9);
    let spec = AttackSpec::new(AttackKind::Naive, 0).at(&[0, 1, 2]);
    assert!(matches!(run_trials(&cfg, Some(&spec), 1, 6), Err(fairring::harness::HarnessError::Attack(AttackError::Precondition(_)))));
}

#[test]
fn cubic_schedule_examples() {
    assert_eq!(cubic_distances(3, 15).unwrap(), vec![6, 4, 2]);
    assert_eq!(cubic_distances(2, 5).unwrap(), vec![2, 1]);
    assert!(matches!(cubic_distances(3, 100), Err(AttackError::Infeasible { .. })));
}

#[test]
fn cubic_attack_examples() {
    let cfg = RunConfig::new(ProtocolKind::ALead, 15).with_oracle(true);
    for w in 0..15 {
        let spec = AttackSpec::new(AttackKind::Cubic, w).with_k(3);
        let r = run_trials(&cfg, Some(&spec), 20, w).unwrap();
        assert_eq!(r.success_rate, Some(1.0), "w = {w}");
        assert_eq!(r.oracle.unwrap().agree, 20);
    }
    let cfg = RunConfig::new(ProtocolKind::ALead, 5);
    let spec = AttackSpec::new(AttackKind::Cubic, 4).with_k(2);
    assert_eq!(elect_rate(&cfg, &spec, 50, 9), 1.0);
}

#[test]
fn cubic_transcript_is_valid_for_target() {
    let cfg = RunConfig::new(ProtocolKind::ALead, 15);
    let spec = AttackSpec::new(AttackKind::Cubic, 11).with_k(3);
    let r = run_trial(&cfg, Some(&spec), 77, 0, true).unwrap();
    let t = r.execution.transcript.as_ref().unwrap();
    assert_eq!(validate_execution(t, &r.coalition, 15).unwrap(), Verdict::Valid(11));
    // exposed adversaries send exactly n
    for s in segments(15, &r.coalition) {
        assert_eq!(r.execution.sent[s.adversary], 15);
    }
}

#[test]
fn randomized_hand_example() {
    // {0,2,4} on n = 9 with C = 1: every adversary sees circularity at T = n − k + C.
    let n = 9;
    let d: Vec<u64> = (0..9).collect();
    let coalition = [0usize, 2, 4];
    let mut strategies: Vec<Box<dyn fairring::Strategy>> = Vec::new();
    let mut probes = Vec::new();
    for i in 0..n {
        if coalition.contains(&i) {
            let (tx, rx) = std::sync::mpsc::channel();
            probes.push(rx);
            strategies.push(Box::new(Probe { inner: fairring::attacks::Randomized::new(n, 1, 5), tx }));
        } else {
            strategies.push(Box::new(fairring::protocols::ALead::new(n, d[i], i == 1)));
        }
    }
    let _ = simulate(strategies, &[1], &SimOptions::default());
    for rx in probes {
        assert_eq!(rx.recv().unwrap(), Some(3));
    }

    // random inputs can fake circularity early; a longer C makes that rare
    let cfg = RunConfig::new(ProtocolKind::ALead, 16);
    let spec = AttackSpec::new(AttackKind::Random, 5).at(&[1, 3, 5, 7, 9, 11, 13, 15]).with_c(3);
    assert!(elect_rate(&cfg, &spec, 500, 1) >= 0.98);
    let cfg = RunConfig::new(ProtocolKind::ALead, 8);
    let spec = AttackSpec::new(AttackKind::Random, 5).at(&[1, 3, 5, 7]).with_c(2);
    assert!(elect_rate(&cfg, &spec, 500, 1) >= 0.9);
}

struct Probe {
    inner: fairring::attacks::Randomized,
    tx: std::sync::mpsc::Sender<Option<usize>>,
}

impl fairring::Strategy for Probe {
    fn receive(&mut self, m: fairring::ring::Msg, out: &mut fairring::ring::Outbox) {
        self.inner.receive(m, out);
        if out.terminated() {
            let _ = self.tx.send(self.inner.inferred_k);
        }
    }
}

#[test]
fn randomized_vacuous_without_adversaries() {
    let cfg = RunConfig::new(ProtocolKind::ALead, 16);
    let spec = AttackSpec::new(AttackKind::Random, 3).with_placement(Placement::Bernoulli { p: 0.0 });
    let r = run_trials(&cfg, Some(&spec), 200, 1).unwrap();
    assert_eq!(r.fail_rate, 0.0);
    assert!(r.histogram.iter().filter(|&&c| c > 0).count() > 8);
}

#[test]
fn sum_abuse_examples() {
    let mut cfg = RunConfig::new(ProtocolKind::PhaseSum, 40);
    cfg.params = PhaseParams { l: 4, m: 2 * 40 * 40, fseed: 0 };
    for w in [6, 0, 13, 27, 39] {
        let spec = AttackSpec::new(AttackKind::SumAbuse, w);
        assert_eq!(elect_rate(&cfg, &spec, 50, w), 1.0, "w = {w}");
    }
    let mut cfg = RunConfig::new(ProtocolKind::PhaseSum, 20);
    cfg.params = PhaseParams { l: 4, m: 800, fseed: 0 };
    assert_eq!(elect_rate(&cfg, &AttackSpec::new(AttackKind::SumAbuse, 0), 50, 1), 1.0);

    let mut cfg = RunConfig::new(ProtocolKind::PhaseSum, 41);
    cfg.params = PhaseParams { l: 4, m: 800, fseed: 0 };
    assert!(run_trials(&cfg, Some(&AttackSpec::new(AttackKind::SumAbuse, 0)), 1, 1).is_err());
}

#[test]
fn rushing_beats_phase_lead() {
    let n = 36;
    let mut cfg = RunConfig::new(ProtocolKind::Phase, n);
    cfg.params = PhaseParams { l: 4, m: 2 * 36 * 36, fseed: 11 };
    assert_eq!(rushing_positions(n, 9, 4), vec![3, 7, 11, 15, 19, 23, 27, 31, 35]);
    let spec = AttackSpec::new(AttackKind::PhaseRush, 0).with_k(9);
    let r = run_trials(&cfg, Some(&spec), 40, 8).unwrap();
    assert!(r.success_rate.unwrap() >= 0.9, "{r}");
}

#[test]
fn rushing_refuses_long_segment() {
    let n = 36;
    let params = PhaseParams { l: 4, m: 2592, fseed: 1 };
    // segment after 26 has length k − 2 = 7
    let spec = AttackSpec::new(AttackKind::PhaseRush, 0).at(&[3, 7, 11, 15, 19, 23, 26, 34, 35]);
    let inputs = data_inputs(&vec![0; n]);
    let mut rng = fairring::harness::trial_rng(0, 0);
    assert!(matches!(
        deploy(&spec, ProtocolKind::Phase, n, &params, &inputs, &mut rng),
        Err(AttackError::Precondition(_))
    ));
}

#[test]
fn attacks_reach_every_target() {
    let cfg = RunConfig::new(ProtocolKind::ALead, 9);
    for w in 0..9 {
        let spec = AttackSpec::new(AttackKind::Naive, w).at(&[0, 3, 6]);
        assert_eq!(elect_rate(&cfg, &spec, 5, w), 1.0);
    }
    let cfg = RunConfig::new(ProtocolKind::Basic, 6);
    for w in 0..6 {
        assert_eq!(elect_rate(&cfg, &AttackSpec::new(AttackKind::Single, w), 5, w), 1.0);
    }
}
