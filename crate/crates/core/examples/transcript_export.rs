//! Write a transcript as JSON lines, read it back, and check it offline.

use fairring::attacks::{AttackKind, AttackSpec};
use fairring::harness::{run_trial, RunConfig};
use fairring::oracle::validate_execution;
use fairring::protocols::ProtocolKind;
use fairring::ring::Transcript;

fn main() -> std::io::Result<()> {
    let cfg = RunConfig::new(ProtocolKind::ALead, 9);
    let spec = AttackSpec::new(AttackKind::Naive, 4).at(&[0, 3, 6]);
    let trial = run_trial(&cfg, Some(&spec), 1, 0, true).unwrap();
    let t = trial.execution.transcript.unwrap();

    let path = std::env::temp_dir().join("fairring-naive.jsonl");
    t.write_jsonl(std::fs::File::create(&path)?)?;
    let text = std::fs::read_to_string(&path)?;
    for line in text.lines().take(4) {
        println!("{line}");
    }
    let back = Transcript::from_jsonl(9, &text).unwrap();
    println!("{} events in {}", back.events.len(), path.display());
    println!("offline verdict {:?}", validate_execution(&back, &trial.coalition, 9).unwrap());
    Ok(())
}
