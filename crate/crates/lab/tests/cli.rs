use std::path::Path;
use std::process::Command;

fn sil(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sil")).current_dir(dir).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr))
}

#[test]
fn converge_is_deterministic_and_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(sil(d, &["converge", "--out", "a", "--threads", "3"]).0, 0);
    assert_eq!(sil(d, &["converge", "--out", "b", "--threads", "1"]).0, 0);
    for f in ["norms.csv", "orders.csv", "curves.csv", "sharp.csv", "history_eps0.02.csv"] {
        assert_eq!(std::fs::read(d.join("a").join(f)).unwrap(), std::fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
    let summary = std::fs::read_to_string(d.join("a/summary.txt")).unwrap();
    assert!(summary.contains("slope(R.sup_radius[all])"));
    let before = std::fs::metadata(d.join("a/norms.csv")).unwrap().modified().unwrap();
    let (code, msg) = sil(d, &["converge", "--out", "a"]);
    assert_eq!(code, 0);
    assert!(msg.contains("nothing to do"), "{msg}");
    assert_eq!(std::fs::metadata(d.join("a/norms.csv")).unwrap().modified().unwrap(), before);
    // every written file is declared in the manifest
    let manifest = std::fs::read_to_string(d.join("a/manifest.txt")).unwrap();
    for entry in std::fs::read_dir(d.join("a")).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name != "manifest.txt" {
            assert!(manifest.contains(&format!("file.{name} = ")), "{name}");
        }
    }
}

#[test]
fn tampered_output_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(sil(d, &["sharp", "--out", "s.csv"]).0, 0);
    let good = std::fs::read(d.join("s.csv")).unwrap();
    std::fs::write(d.join("s.csv"), "t,R\n").unwrap();
    let (code, msg) = sil(d, &["sharp", "--out", "s.csv"]);
    assert_eq!(code, 0);
    assert!(!msg.contains("nothing to do"));
    assert_eq!(std::fs::read(d.join("s.csv")).unwrap(), good);
}

#[test]
fn short_eps_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("two.cfg"), "eps = 0.08, 0.04\n").unwrap();
    let (code, msg) = sil(dir.path(), &["converge", "--config", "two.cfg", "--out", "x"]);
    assert_eq!(code, 2);
    assert!(msg.contains("at least 3"), "{msg}");
    std::fs::write(dir.path().join("inc.cfg"), "eps = 0.02, 0.04, 0.08\n").unwrap();
    assert_eq!(sil(dir.path(), &["converge", "--config", "inc.cfg", "--out", "x"]).0, 2);
    assert_eq!(sil(dir.path(), &["no-such-command"]).0, 2);
}

#[test]
fn invariants_filter_and_named_failures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(sil(d, &["invariants", "--filter", "profiles", "--out", "p"]).0, 0);
    let table = std::fs::read_to_string(d.join("p/invariants.csv")).unwrap();
    assert!(table.lines().skip(1).all(|l| l.starts_with("profiles,") && l.ends_with(",pass")), "{table}");
    std::fs::write(d.join("bad.cfg"), "delta = 0.25\n").unwrap();
    assert_eq!(sil(d, &["invariants", "--config", "bad.cfg", "--filter", "geometry", "--out", "g"]).0, 1);
    let table = std::fs::read_to_string(d.join("g/invariants.csv")).unwrap();
    assert!(table.contains("5*delta") && table.contains("fail"), "{table}");
    assert_eq!(sil(d, &["invariants", "--filter", "nonsense", "--out", "g"]).0, 2);
}

#[test]
fn single_table_commands_write_their_columns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let head = |f: &str| std::fs::read_to_string(d.join(f)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(sil(d, &["profile", "--beta", "1", "--half-width", "20", "--nodes", "4001", "--out", "p.csv"]).0, 0);
    assert_eq!(head("p.csv"), "rho,value,derivative");
    assert_eq!(sil(d, &["sharp", "--R0", "1.0", "--Rout", "2.0", "--T", "0.1", "--out", "s.csv"]).0, 0);
    assert_eq!(head("s.csv"), "t,R,dRdt,mu_interface");
    assert_eq!(sil(d, &["approx", "--eps", "0.05", "--t", "0.0", "--grid", "32", "--out", "a.csv"]).0, 0);
    assert_eq!(head("a.csv"), "x1,x2,d_gamma,rho,cA,muA,vA1,vA2,pA");
    assert_eq!(sil(d, &["geometry-check", "--scenario", "circle", "--R", "1.0", "--Rout", "2.0", "--delta", "0.19", "--out", "g.csv"]).0, 0);
    assert_eq!(head("g.csv"), "check,value,tolerance,status");
    assert_eq!(sil(d, &["diffuse", "--eps", "0.08", "--T", "0.01", "--snapshots", "3", "--out", "run"]).0, 0);
    assert_eq!(head("run/history.csv"), "t,R_eps,energy,mass");
    assert_eq!(head("run/snapshot_002.csv"), "r,c,mu");
    assert_eq!(sil(d, &["residuals", "--eps-list", "0.08,0.04,0.02", "--T", "0.05", "--out", "rep"]).0, 0);
    assert_eq!(head("rep/norms.csv"), "eps,norm_name,stratum,value");
    assert_eq!(head("rep/orders.csv"), "norm_name,slope,fit_residual");
}
