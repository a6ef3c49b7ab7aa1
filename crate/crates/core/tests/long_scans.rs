//! Slow scans. Run with `cargo test --release -- --ignored`.

use tagforge::cycles::{sporadic_search, CycleFamily};
use tagforge::detect_halt;
use tagforge::enumeration::search_winners;
use tagforge::parse_state_id;

#[test]
#[ignore]
fn sporadic_cycles_through_length_18() {
    let found = sporadic_search(1..=18, 1 << 12, 1 << 34);
    let mut periods: Vec<u64> = found.iter().filter(|d| d.family == CycleFamily::Sporadic).map(|d| d.period).collect();
    periods.sort_unstable();
    periods.dedup();
    for p in [40, 66, 282] {
        assert!(periods.contains(&p), "period {p} missing from {periods:?}");
    }
}

#[test]
#[ignore]
fn winners_through_length_15() {
    let s = search_winners(15, 1 << 34);
    assert!(s.undecided.is_empty());
    let last = s.winners.last().unwrap();
    assert_eq!((last.state_id.as_str(), last.halting_step), ("15:30074:0", 357_007_586));
}

#[test]
#[ignore]
fn long_single_runs() {
    let r = detect_halt(&parse_state_id("15:16346:0").unwrap(), 1 << 34).into_report().unwrap();
    assert_eq!(r.halting_step, 20_858_068);
}
