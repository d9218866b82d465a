use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use leo_offload_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(leo_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn two_state_example_through_the_abi() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(leo_graph_new(2, 2, &mut g), LeoStatus::Ok);
        assert_eq!(leo_graph_set_edge(g, 0, 0, 1, 5.0), LeoStatus::Ok);
        assert_eq!(leo_graph_set_edge(g, 1, 0, 1, 3.0), LeoStatus::Ok);
        assert_eq!(leo_graph_set_transition(g, 0, 0, 1.0), LeoStatus::Ok);
        assert_eq!(leo_graph_set_transition(g, 0, 1, 2.0), LeoStatus::Ok);
        let (mut len, mut n) = (0.0, 0usize);
        let mut hops = [0usize; 6];
        assert_eq!(leo_graph_shortest_path(g, 0, 1, 0.0, &mut len, hops.as_mut_ptr(), 3, &mut n), LeoStatus::Ok);
        assert_eq!(len, 4.0);
        assert_eq!(n, 3);
        assert_eq!(hops, [0, 0, 1, 0, 1, 1]);
        leo_graph_free(g);
    }
}

#[test]
fn errors_are_reported_with_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(leo_graph_new(0, 2, &mut g), LeoStatus::InvalidArgument);
        assert!(g.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(leo_graph_new(1, 2, &mut g), LeoStatus::Ok);
        assert_eq!(leo_graph_set_edge(g, 0, 0, 5, 1.0), LeoStatus::InvalidArgument);
        assert_eq!(leo_graph_set_transition(g, 0, 0, 1.0), LeoStatus::InvalidArgument);
        assert_eq!(leo_graph_set_edge(g, 0, 0, 1, -1.0), LeoStatus::Ok);
        let (mut len, mut n) = (0.0, 0usize);
        assert_eq!(leo_graph_shortest_path(g, 0, 1, 0.0, &mut len, ptr::null_mut(), 0, &mut n), LeoStatus::InvalidWeight);
        assert!(last_error().contains("-1"), "{}", last_error());
        assert_eq!(leo_graph_shortest_path(g, 0, 9, 0.0, &mut len, ptr::null_mut(), 0, &mut n), LeoStatus::InvalidArgument);
        assert_eq!(leo_graph_shortest_path(ptr::null(), 0, 1, 0.0, &mut len, ptr::null_mut(), 0, &mut n), LeoStatus::NullPointer);
        leo_graph_free(g);
        leo_graph_free(ptr::null_mut());
    }
}

#[test]
fn scenario_run_matches_library() {
    unsafe {
        let text = CString::new("[simulation]\nhorizon_s = 4.0\nseed = 7\n").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(leo_scenario_from_toml(text.as_ptr(), &mut s), LeoStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(leo_run(s, &mut r), LeoStatus::Ok);
        let mut mean = 0.0;
        let mut b = LeoBreakdown::default();
        assert_eq!(leo_report_summary(r, &mut mean, &mut b), LeoStatus::Ok);

        let expected = leo_offload::simulator::run(&leo_offload::simulator::Scenario::from_toml_str("[simulation]\nhorizon_s = 4.0\nseed = 7\n").unwrap()).unwrap();
        assert_eq!(mean, expected.mean_delay_s);
        assert_eq!(leo_report_num_tasks(r), expected.records.len());
        assert_eq!(leo_report_num_dropped(r), 0);
        assert!((b.isl_tx_s + b.sgl_tx_s + b.compute_s - mean).abs() < 1e-9);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tasks.csv");
        let cpath = CString::new(path.to_str().unwrap()).unwrap();
        assert_eq!(leo_report_write_tasks_csv(r, cpath.as_ptr()), LeoStatus::Ok);
        let csv = std::fs::read_to_string(&path).unwrap();
        assert_eq!(csv.lines().count(), expected.records.len() + 1);

        assert_eq!(leo_scenario_set_horizon(s, -1.0), LeoStatus::InvalidArgument);
        leo_report_free(r);
        leo_scenario_free(s);
    }
}

#[test]
fn bad_scenario_names_key() {
    unsafe {
        let text = CString::new("[simulation]\nhorizon_s = 0.0\n").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(leo_scenario_from_toml(text.as_ptr(), &mut s), LeoStatus::Config);
        assert!(last_error().contains("simulation.horizon_s"), "{}", last_error());
        assert_eq!(leo_scenario_from_toml(ptr::null(), &mut s), LeoStatus::NullPointer);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/leo_offload.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for name in exports {
        assert!(text.contains(&format!("{name}(")), "header lacks {name}");
    }
    assert!(text.contains("typedef struct LeoStateGraph LeoStateGraph;"));
    assert!(text.contains("LEO_STATUS_UNREACHABLE = 3"));
}

// Compiles and runs a C program against the static library, when a C
// compiler and the archive are available.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libleo_offload_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or {} missing", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
