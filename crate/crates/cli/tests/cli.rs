use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opverify"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("opverify-cli-{}-{name}", std::process::id()))
}

#[test]
fn exit_codes() {
    assert_eq!(bin().args(["verify", "operad"]).output().unwrap().status.code(), Some(0));
    // the frame resolution check is a known negative result
    assert_eq!(bin().args(["verify", "barcobar", "--arity", "3"]).output().unwrap().status.code(), Some(1));
    // stage 1 alone cannot show stabilization
    assert_eq!(bin().args(["verify", "coalgebra", "--stages", "1"]).output().unwrap().status.code(), Some(3));
    assert_eq!(bin().args(["verify", "nonsense"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["verify", "operad", "--stages", "4,2"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["verify"]).output().unwrap().status.code(), Some(2));
}

#[test]
fn reports_and_homology_files() {
    let json = tmp("r.json");
    let st = bin().args(["verify", "symseq", "--seed", "3", "--out"]).arg(&json).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let md = bin().arg("report").arg(&json).args(["--format", "markdown"]).output().unwrap();
    let text = String::from_utf8(md.stdout).unwrap();
    assert!(text.contains("## symseq") && text.contains("symseq.pushout_product"));
    let again = bin().arg("report").arg(&json).args(["--format", "json"]).output().unwrap();
    assert_eq!(String::from_utf8(again.stdout).unwrap(), std::fs::read_to_string(&json).unwrap());

    let cfile = tmp("c.txt");
    let circle = opverify::chain::direct_sum(&[opverify::chain::sphere(1, 0).unwrap(), opverify::chain::disk(0).unwrap()]).unwrap();
    std::fs::write(&cfile, circle.to_text()).unwrap();
    let h = bin().arg("homology").arg(&cfile).output().unwrap();
    assert_eq!(String::from_utf8(h.stdout).unwrap(), "H1 = 1\n");
    assert_eq!(bin().args(["homology", "/nonexistent/file"]).output().unwrap().status.code(), Some(2));
    let _ = std::fs::remove_file(json);
    let _ = std::fs::remove_file(cfile);
}

#[test]
fn config_file_and_flags() {
    let cfg = tmp("cfg.txt");
    std::fs::write(&cfg, "arity = 3\nseed = 5\n").unwrap();
    let out = bin().args(["verify", "operad", "--smax", "1", "--config"]).arg(&cfg).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"arity\": 3") && text.contains("\"seed\": 5") && text.contains("\"s_max\": 1"));
    std::fs::write(&cfg, "arity 3\n").unwrap();
    assert_eq!(bin().args(["verify", "operad", "--config"]).arg(&cfg).output().unwrap().status.code(), Some(2));
    let _ = std::fs::remove_file(cfg);
}
