use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn tsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsep")).args(args).output().expect("tsep runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes `text` to a file named `name` under the test scratch directory.
fn scratch(name: &str, text: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&p, text).unwrap();
    p
}

fn gen_file(recipe: &str, seed: &str, name: &str) -> PathBuf {
    let o = tsep(&["gen", recipe, "--seed", seed]);
    assert!(o.status.success(), "{}", stderr(&o));
    scratch(name, &stdout(&o))
}

#[test]
fn gen_is_byte_identical_for_a_seed() {
    let r = "join2(odd, leaf(bipartite(7, seed)), leaf(line(6, seed)))";
    let a = tsep(&["gen", r, "--seed", "11"]);
    let b = tsep(&["gen", r, "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("# join direct odd X1="));
    assert!(text.contains("hint "));
}

#[test]
fn unrealizable_recipe_is_a_structure_error() {
    let o = tsep(&["gen", "join2(even, leaf(K3), leaf(C6))"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("tsep: error kind=structure exit=2:"));
}

#[test]
fn cssep_build_c4_verifies_and_round_trips() {
    let c4 = gen_file("C4", "0", "c4.tri");
    let o = tsep(&["cssep", "build", c4.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# verified: true"));
    assert!(text.contains("# total: "));
    let sep = scratch("c4.sep", &text);
    let v = tsep(&["cssep", "verify", c4.to_str().unwrap(), sep.to_str().unwrap()]);
    assert!(v.status.success(), "{}", stderr(&v));
    assert!(stdout(&v).contains("verified: true"));
}

#[test]
fn truncated_separator_fails_verification() {
    let c4 = gen_file("C4", "0", "c4t.tri");
    let sep = scratch("short.sep", "cut 0,1 | 2,3\n");
    let o = tsep(&["cssep", "verify", c4.to_str().unwrap(), sep.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kind=verification"));
}

#[test]
fn check_p4_reports_the_skew_partition() {
    let p4 = gen_file("P4", "0", "p4.tri");
    let o = tsep(&["check", p4.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("balanced skew-partition: A="), "{text}");
    assert!(text.contains("berge: true"));
    let c6 = gen_file("C6", "0", "c6c.tri");
    assert!(stdout(&tsep(&["check", c6.to_str().unwrap()])).contains("balanced skew-partition: none"));
}

#[test]
fn biclique_c6_has_a_certificate() {
    let c6 = gen_file("C6", "0", "c6.tri");
    let o = tsep(&["biclique", c6.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("verified: true"));
    assert!(text.contains("biclique "));
}

#[test]
fn biclique_on_p4_is_a_precondition_error() {
    let p4 = gen_file("P4", "0", "p4b.tri");
    let o = tsep(&["biclique", p4.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind=precondition"));
}

#[test]
fn a_low_cap_exits_with_3() {
    let c6 = gen_file("C6", "0", "c6cap.tri");
    let o = tsep(&["--cap", "berge=3", "cssep", "build", c6.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("kind=cap"));
    assert_eq!(tsep(&["--cap", "nonsense=3", "check", c6.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn a_wrong_hint_on_an_odd_hole_is_a_contradiction() {
    let o = tsep(&["gen", "C57"]);
    let text = stdout(&o) + "hint 0,2,4,6\n";
    let f = scratch("c57.tri", &text);
    let o = tsep(&["biclique", "--assume", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("kind=contradiction"));
}

#[test]
fn weighted_biclique_uses_the_file_weights() {
    let c6 = gen_file("C6", "0", "c6w.tri");
    let o = tsep(&["biclique", "--weights", c6.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let mut text = fs::read_to_string(&c6).unwrap();
    text.push_str("weight 0 1 0 0\n");
    let w = scratch("c6w2.tri", &text);
    // One vertex carries all the weight, which is not balanced.
    let o = tsep(&["biclique", "--weights", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not balanced"));
}

#[test]
fn decompose_prints_a_tree() {
    let c6 = gen_file("C6", "0", "c6d.tri");
    let o = tsep(&["decompose", c6.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("leaf "));
}

const KJOIN: &str = "kjoin(10/00, ck(graph(4, 0-1 1-2), {0,3}) @ {0,3}, ck(graph(4, 0-1 1-2), {0,3}) @ {0,3})";

#[test]
fn kjoin_pipelines() {
    let o = tsep(&["kjoin", "compose", KJOIN]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("iface=10/00"));
    let o = tsep(&["kjoin", "cssep", KJOIN]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("# total: 32"));
    let o = tsep(&["kjoin", "biclique", KJOIN, "--c", "1/20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("verified: true"));
    let o = tsep(&["kjoin", "biclique", KJOIN, "--c", "1/3"]);
    assert_eq!(o.status.code(), Some(2));
}
