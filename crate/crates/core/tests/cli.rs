//! End-to-end runs of the command-line binary.

use std::fs;
use std::process::{Command, Output};

fn approxagg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approxagg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn majority_ic_row() {
    let o = approxagg(&["indices", "ic", "--agenda", "conjunction:2", "--mech", "systematic:maj", "--voters", "3", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("mechanism,agenda,index"));
    assert_eq!(lines.next(), Some("n=3:e8/e8/e8,conjunction:2,ic,,exact,3,5,32,0.09375,,,,"));
}

#[test]
fn monte_carlo_needs_seed() {
    let o = approxagg(&["indices", "ic", "--agenda", "conjunction:2", "--mech", "systematic:maj", "--voters", "3", "--mode", "mc"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--seed") && err.contains("example:"), "{err}");
}

#[test]
fn unknown_key_is_a_usage_error() {
    let o = approxagg(&["verify", "mand", "--agenda", "conjunction:2", "--voters", "2", "--colour", "red"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--colour"));
}

#[test]
fn bad_spec_names_its_key() {
    let o = approxagg(&["oracle", "nearest", "--agenda", "xor:2", "--mech", "systematic:median", "--voters", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--mech") && err.contains("median"), "{err}");
}

#[test]
fn agenda_show_by_kind_and_spec() {
    let by_kind = stdout(&approxagg(&["agenda", "show", "--kind", "conjunction", "--premises", "2"]));
    let by_spec = stdout(&approxagg(&["agenda", "show", "--agenda", "conjunction:2"]));
    assert_eq!(by_kind, by_spec);
    let mut ops: Vec<&str> = by_kind.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    ops.sort();
    assert_eq!(ops, ["000", "010", "100", "111"]);
}

#[test]
fn oracle_verify_reports_sixteen() {
    let out = stdout(&approxagg(&["oracle", "verify", "--agenda", "xor:2", "--voters", "2"]));
    assert_eq!(out.lines().nth(1), Some("xor:2,2,true,16,16,0,0"));
}

#[test]
fn enumerated_family_feeds_nearest() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.csv");
    let fam_s = fam.to_str().unwrap();
    let o = approxagg(&["oracle", "enumerate", "--agenda", "conjunction:2", "--voters", "3", "--out", fam_s]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(&fam).unwrap().lines().count(), 520);
    let with = stdout(&approxagg(&["oracle", "nearest", "--agenda", "conjunction:2", "--mech", "systematic:maj", "--voters", "3", "--family", fam_s]));
    let without = stdout(&approxagg(&["oracle", "nearest", "--agenda", "conjunction:2", "--mech", "systematic:maj", "--voters", "3"]));
    assert_eq!(with, without);
}

#[test]
fn file_specs() {
    let dir = tempfile::tempdir().unwrap();
    let affine = dir.path().join("parity.txt");
    fs::write(&affine, "m=3\nshift=100\n111\n").unwrap();
    let tf = dir.path().join("conj.txt");
    fs::write(&tf, "k=2\nAND inputs=1,2 negmask=00 negout=0\n").unwrap();
    let a = stdout(&approxagg(&["agenda", "show", "--agenda", &format!("affine:@{}", affine.display())]));
    assert_eq!(a.lines().count(), 5);
    let t = stdout(&approxagg(&["agenda", "show", "--agenda", &format!("tf:@{}", tf.display())]));
    let c = stdout(&approxagg(&["agenda", "show", "--agenda", "conjunction:2"]));
    assert_eq!(t, c);

    let mech = dir.path().join("mech.txt");
    fs::write(&mech, "independent n=3 m=3\ne8\ne8\ne8\n").unwrap();
    let o = approxagg(&["indices", "ic", "--agenda", "conjunction:2", "--mech", &format!("@{}", mech.display()), "--voters", "3"]);
    assert!(stdout(&o).contains(",3,5,32,"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn strict_flags_violations_only() {
    let o = approxagg(&["verify", "mand", "--agenda", "conjunction:2", "--voters", "2", "--strict"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4097);
    let o = approxagg(&["verify", "granularity", "--fns", "dict1,!dict1", "--voters", "3", "--junta", "1", "--strict"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(",satisfied,"));
}

#[test]
fn blr_reports_recovered_character() {
    let o = approxagg(&["blr", "--f", "n=3:5b", "--g", "lin5", "--h", "lin5", "--voters", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().nth(1).unwrap().split(',').take(5).collect::<Vec<_>>(), ["1", "8", "0.125", "0b101", "+++"]);
}

#[test]
fn spectrum_of_majority() {
    let out = stdout(&approxagg(&["spectrum", "--fn", "maj", "--voters", "3"]));
    assert_eq!(out.lines().nth(1 + 0b111), Some("7,-1,1"));
}
