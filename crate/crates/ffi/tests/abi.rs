use std::ffi::{CStr, CString};
use std::ptr;

use raqsim_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(raqsim_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

fn template() -> *mut RaqsimConfig {
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { raqsim_config_template(&mut cfg) },
        RaqsimStatus::Ok
    );
    cfg
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(raqsim_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn json_errors_map_to_status_codes() {
    let mut cfg = ptr::null_mut();
    let empty = CString::new("{}").unwrap();
    assert_eq!(
        unsafe { raqsim_config_from_json(empty.as_ptr(), &mut cfg) },
        RaqsimStatus::Validation
    );
    assert!(cfg.is_null());
    assert!(last_error().contains("t2_s"), "{}", last_error());

    let broken = CString::new("{ not json").unwrap();
    assert_eq!(
        unsafe { raqsim_config_from_json(broken.as_ptr(), &mut cfg) },
        RaqsimStatus::Validation
    );

    let bad_utf8 = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { raqsim_config_from_json(bad_utf8.as_ptr().cast(), &mut cfg) },
        RaqsimStatus::InvalidUtf8
    );
    assert_eq!(
        unsafe { raqsim_config_from_json(ptr::null(), &mut cfg) },
        RaqsimStatus::NullPointer
    );
    assert_eq!(
        unsafe { raqsim_config_from_json(empty.as_ptr(), ptr::null_mut()) },
        RaqsimStatus::NullPointer
    );

    let missing = CString::new("/nonexistent/raqsim.json").unwrap();
    assert_eq!(
        unsafe { raqsim_config_load(missing.as_ptr(), &mut cfg) },
        RaqsimStatus::Io
    );
}

#[test]
fn template_round_trips_through_json() {
    let json = CString::new(raqsim::config::Config::template().to_json_pretty()).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { raqsim_config_from_json(json.as_ptr(), &mut cfg) },
        RaqsimStatus::Ok
    );
    assert_eq!(last_error(), "");
    unsafe { raqsim_config_free(cfg) };
    unsafe { raqsim_config_free(ptr::null_mut()) };
}

#[test]
fn frontend_and_bounds() {
    let cfg = template();
    let mut fe = RaqsimFrontend::default();
    assert_eq!(
        unsafe { raqsim_frontend_report(cfg, &mut fe) },
        RaqsimStatus::Ok
    );
    assert!(fe.chi_im > 0.0 && fe.gain > 0.0 && fe.noise_power_w > 0.0);
    assert!(fe.snr_advantage_db > 20.0, "{fe:?}");

    let mut users = 0usize;
    let mut lb = [0.0f64; 32];
    let st = unsafe {
        raqsim_lower_bounds(
            cfg,
            RAQSIM_SYSTEM_RAQ,
            RAQSIM_SCHEME_ZF,
            lb.as_mut_ptr(),
            lb.len(),
            &mut users,
        )
    };
    assert_eq!(st, RaqsimStatus::Ok);
    assert_eq!(users, 20);
    assert!(lb[..20].iter().all(|&r| r > 0.0) && lb[20] == 0.0);

    // size query with no buffer
    users = 0;
    let st = unsafe {
        raqsim_lower_bounds(
            cfg,
            RAQSIM_SYSTEM_MMIMO,
            RAQSIM_SCHEME_MRC,
            ptr::null_mut(),
            0,
            &mut users,
        )
    };
    assert_eq!((st, users), (RaqsimStatus::Ok, 20));

    let st = unsafe {
        raqsim_lower_bounds(
            cfg,
            7,
            RAQSIM_SCHEME_MRC,
            lb.as_mut_ptr(),
            lb.len(),
            &mut users,
        )
    };
    assert_eq!(st, RaqsimStatus::OutOfRange);
    let st = unsafe { raqsim_frontend_report(ptr::null(), &mut fe) };
    assert_eq!(st, RaqsimStatus::NullPointer);
    unsafe { raqsim_config_free(cfg) };
}

#[test]
fn preset_table_matches_library() {
    let cfg = template();
    let preset = CString::new("fig-m").unwrap();
    let mut table = ptr::null_mut();
    assert_eq!(
        unsafe { raqsim_run_preset(cfg, preset.as_ptr(), 2, &mut table) },
        RaqsimStatus::Ok
    );
    assert_eq!(unsafe { raqsim_table_len(table) }, 40);

    let lib_cfg = raqsim::config::Config::template();
    let mut spec = raqsim::sweep::SweepSpec::preset(raqsim::sweep::Preset::FigM, &lib_cfg);
    spec.trials = 2;
    let want = raqsim::sweep::run_sweep(&spec, &lib_cfg, None)
        .unwrap()
        .rows;
    for (i, w) in want.iter().enumerate() {
        let mut row = RaqsimRow::default();
        assert_eq!(
            unsafe { raqsim_table_row(table, i, &mut row) },
            RaqsimStatus::Ok
        );
        assert!(row.ok);
        assert_eq!(
            (row.value, row.rate_mc, row.rate_lb),
            (w.value, w.rate_mc, w.rate_lb)
        );
    }
    let mut row = RaqsimRow::default();
    assert_eq!(
        unsafe { raqsim_table_row(table, 40, &mut row) },
        RaqsimStatus::OutOfRange
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { raqsim_table_write_csv(table, c_path.as_ptr()) },
        RaqsimStatus::Ok
    );
    assert_eq!(raqsim::output::read_csv(&path).unwrap(), want);

    let bad = CString::new(dir.path().join("missing/dir/m.csv").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { raqsim_table_write_csv(table, bad.as_ptr()) },
        RaqsimStatus::Io
    );

    let unknown = CString::new("fig-Q").unwrap();
    let mut other = ptr::null_mut();
    assert_eq!(
        unsafe { raqsim_run_preset(cfg, unknown.as_ptr(), 1, &mut other) },
        RaqsimStatus::Validation
    );
    assert!(other.is_null());

    unsafe {
        raqsim_table_free(table);
        raqsim_table_free(ptr::null_mut());
        raqsim_config_free(cfg);
    }
    assert_eq!(unsafe { raqsim_table_len(ptr::null()) }, 0);
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/raqsim.h")).unwrap();
    for name in [
        "raqsim_last_error",
        "raqsim_version",
        "raqsim_config_from_json",
        "raqsim_config_load",
        "raqsim_config_template",
        "raqsim_config_free",
        "raqsim_frontend_report",
        "raqsim_lower_bounds",
        "raqsim_run_preset",
        "raqsim_table_len",
        "raqsim_table_row",
        "raqsim_table_write_csv",
        "raqsim_table_free",
        "typedef struct RaqsimConfig RaqsimConfig",
        "RAQSIM_STATUS_PANIC = 8",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}
