use std::path::Path;
use std::process::{Command, Output};

fn holegraph(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holegraph"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn holegraph")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gen_layout_render_detect_identify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| {
        let o = holegraph(args, d);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        o
    };
    let o = ok(&["gen", "--n", "80", "--deg", "7", "--kind", "sparse", "--seed", "3", "--out-prefix", "net"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("80 nodes"));
    for ext in ["top", "lay", "gt"] {
        assert!(d.join(format!("net.{ext}")).exists());
    }
    ok(&["layout", "--algo", "fa2", "--in", "net.top", "--iters", "20", "--out-dir", "fa2"]);
    ok(&["render", "--in", "net.lay", "--top", "net.top", "--out", "net.png"]);
    ok(&["detect", "--img", "net.png", "--lay", "net.lay", "--out", "net.det"]);
    ok(&["identify", "--img", "net.png", "--boxes", "net.det", "--lay", "net.lay", "--out", "net.holes"]);
    let found = std::fs::read_to_string(d.join("net.holes")).unwrap();
    let truth = std::fs::read_to_string(d.join("net.gt")).unwrap();
    assert_eq!(found.lines().count(), truth.lines().count());
}

#[test]
fn bad_inputs_fail_with_messages() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.top"), "3\n0 1\n1 7\n").unwrap();

    let cases: &[(&[&str], &str)] = &[
        (&["gen", "--n", "2", "--deg", "4", "--out-prefix", "x"], "invalid input"),
        (&["layout", "--algo", "dh", "--in", "missing.top", "--out-dir", "o"], "missing.top"),
        (&["layout", "--algo", "dh", "--in", "bad.top", "--out-dir", "o"], "bad.top"),
        (&["run", "--top", "bad.top", "--clock", "virtual:-1", "--out-dir", "o"], "clock"),
        (&["layout", "--algo", "spring", "--in", "bad.top", "--out-dir", "o"], "spring"),
    ];
    for (args, needle) in cases {
        let o = holegraph(args, d);
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = holegraph(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
