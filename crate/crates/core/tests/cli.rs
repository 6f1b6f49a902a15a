mod common;

use std::path::Path;
use std::process::Command;

use cogam::sweep::{self, evaluate_point, Mode, PointSpec, SweepConfig, SweepResult};
use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cogam"))
}

fn sha256(path: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

#[test]
fn fig1_sweep_writes_header_and_33_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1.csv");
    let status = bin()
        .arg("sweep")
        .arg(common::configs_dir().join("fig1.cfg"))
        .arg("-o")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 34);
    assert!(text
        .starts_with("axis,ns,m,capacity,se_cr,se_dr,gamma0_cap,gamma0_cr,gamma_star_dr,error\n"));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::configs_dir().join("fig4.cfg");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = bin()
            .arg("sweep")
            .arg(&cfg)
            .args(["--set", "mc.validate=true", "--set", "mc.samples=20000"])
            .arg("-o")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        sha256(&out)
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn empty_result_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    let res = SweepResult {
        rows: vec![],
        mc_enabled: true,
    };
    sweep::emit_csv(&res, &out).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.ends_with("mc_se_dr_stderr,error\n"));
}

#[test]
fn unwritable_path_reports_the_path() {
    let res = SweepResult {
        rows: vec![],
        mc_enabled: false,
    };
    let err = sweep::emit_csv(&res, Path::new("/nonexistent-dir/out.csv")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
}

#[test]
fn single_point_sweep_matches_library() {
    let cfg = SweepConfig::parse(
        r#"
mode = "ss"
axis = "q_av_db"
range = [4.0, 4.0, 1.0]
num_users = [5]
m = [2.0]
p_av_db = 10.0
"#,
        &[],
    )
    .unwrap();
    let res = sweep::run_sweep(&cfg).unwrap();
    assert_eq!(res.rows.len(), 1);
    let direct = evaluate_point(&PointSpec {
        mode: Mode::Ss,
        p_av_db: 10.0,
        q_av_db: 4.0,
        users: 5,
        m: 2.0,
        ber_target: 1e-3,
        constellation: vec![0, 4, 8, 16, 64],
    })
    .unwrap();
    let row = res.rows[0].metrics.as_ref().unwrap();
    assert_eq!(row.capacity.to_bits(), direct.capacity.to_bits());
    assert_eq!(row.se_cr.to_bits(), direct.se_cr.to_bits());
    assert_eq!(row.se_dr.to_bits(), direct.se_dr.to_bits());
    assert_eq!(row.gamma_star_dr.to_bits(), direct.gamma_star_dr.to_bits());
}

#[test]
fn rayleigh_beats_nakagami_at_high_interference_budget() {
    let cfg = SweepConfig::load(&common::configs_dir().join("fig4.cfg"), &[]).unwrap();
    let res = sweep::run_sweep(&cfg).unwrap();
    for pair in res.rows.chunks(2) {
        let (r, n) = (&pair[0], &pair[1]);
        assert_eq!((r.m, n.m), (1.0, 2.0));
        if r.axis < 6.0 {
            continue;
        }
        let (r, n) = (r.metrics.as_ref().unwrap(), n.metrics.as_ref().unwrap());
        assert!(r.capacity >= n.capacity);
        assert!(r.se_cr >= n.se_cr);
        assert!(r.se_dr >= n.se_dr);
    }
}

#[test]
fn all_configs_load_and_run() {
    for name in ["fig1.cfg", "fig2.cfg", "fig3.cfg", "fig4.cfg"] {
        let cfg = SweepConfig::load(&common::configs_dir().join(name), &[]).unwrap();
        let res = sweep::run_sweep(&cfg).unwrap();
        assert_eq!(res.rows.len(), cfg.grid().len());
        for row in &res.rows {
            let m = row
                .metrics
                .as_ref()
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            for v in [m.capacity, m.se_cr, m.se_dr, m.gamma0_cap, m.gamma0_cr] {
                assert!(v.is_finite() && v >= 0.0);
            }
        }
    }
}

#[test]
fn transmit_mode_rejects_interference_axis() {
    let out = bin()
        .arg("sweep")
        .arg(common::configs_dir().join("fig1.cfg"))
        .args(["--set", "axis=q_av_db", "-o", "-"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("q_av_db"));
}

#[test]
fn point_subcommand_prints_one_row() {
    let out = bin()
        .args(["point", "--p-av-db", "0", "--users", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,1,1,1.02853893,"), "{}", lines[1]);
}

#[test]
fn point_accepts_negative_db() {
    let out = bin()
        .args([
            "point",
            "--mode",
            "ss",
            "--p-av-db",
            "10",
            "--q-av-db",
            "-10",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn selftest_subcommand_passes() {
    let out = bin().arg("selftest").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn overrides_change_the_grid() {
    let out = bin()
        .arg("sweep")
        .arg(common::configs_dir().join("fig1.cfg"))
        .args([
            "--set",
            "range=[0.0, 4.0, 2.0]",
            "--set",
            "num_users=[2]",
            "-o",
            "-",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}
