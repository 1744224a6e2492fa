use std::ffi::{CStr, CString};
use std::ptr;

use nmsse_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = nmsse_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn set(cfg: *mut NmsseConfig, key: &str, value: &str) -> NmsseStatus {
    let (k, v) = (cstr(key), cstr(value));
    nmsse_config_set(cfg, k.as_ptr(), v.as_ptr())
}

unsafe fn small_config() -> *mut NmsseConfig {
    let cfg = nmsse_config_new();
    for (k, v) in [("dt", "0.01"), ("t_final", "0.5"), ("n_traj", "20"), ("threads", "2")] {
        assert_eq!(set(cfg, k, v), NmsseStatus::Ok);
    }
    cfg
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(nmsse_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn config_errors_carry_messages() {
    unsafe {
        let cfg = nmsse_config_new();
        assert_eq!(set(cfg, "dt", "fast"), NmsseStatus::Config);
        assert!(last_error().contains("dt"));
        assert_eq!(set(cfg, "colour", "1"), NmsseStatus::Config);
        assert_eq!(set(cfg, "dt", "-1"), NmsseStatus::Ok);
        assert_eq!(nmsse_config_validate(cfg), NmsseStatus::Config);
        assert_eq!(set(cfg, "dt", "0.001"), NmsseStatus::Ok);
        assert_eq!(nmsse_config_validate(cfg), NmsseStatus::Ok);
        let bad = [0xffu8, 0];
        let k = cstr("dt");
        assert_eq!(nmsse_config_set(cfg, k.as_ptr(), bad.as_ptr().cast()), NmsseStatus::InvalidUtf8);
        nmsse_config_free(cfg);
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        assert_eq!(nmsse_config_validate(ptr::null()), NmsseStatus::NullPointer);
        assert!(last_error().contains("config"));
        let mut out = ptr::null_mut();
        assert_eq!(nmsse_run_ensemble(ptr::null(), &mut out), NmsseStatus::NullPointer);
        let cfg = nmsse_config_new();
        assert_eq!(nmsse_run_ensemble(cfg, ptr::null_mut()), NmsseStatus::NullPointer);
        assert_eq!(set(cfg, "dt", "0.01"), NmsseStatus::Ok);
        let k = cstr("dt");
        assert_eq!(nmsse_config_set(cfg, k.as_ptr(), ptr::null()), NmsseStatus::NullPointer);
        assert_eq!(nmsse_series_len(ptr::null()), 0);
        nmsse_series_free(ptr::null_mut());
        nmsse_config_free(ptr::null_mut());
        nmsse_config_free(cfg);
    }
}

#[test]
fn ensemble_series_access() {
    unsafe {
        let cfg = small_config();
        let mut series = ptr::null_mut();
        assert_eq!(nmsse_run_ensemble(cfg, &mut series), NmsseStatus::Ok);
        assert_eq!(nmsse_series_len(series), 51);
        let mut p = NmssePoint::default();
        assert_eq!(nmsse_series_point(series, 0, &mut p), NmsseStatus::Ok);
        assert_eq!((p.t, p.x, p.y, p.z, p.norm), (0.0, 0.0, 0.0, 1.0, 1.0));
        assert_eq!(nmsse_series_point(series, 50, &mut p), NmsseStatus::Ok);
        assert!((p.t - 0.5).abs() < 1e-12);
        assert!(p.z_se > 0.0);
        assert_eq!(nmsse_series_point(series, 51, &mut p), NmsseStatus::OutOfRange);
        assert!(last_error().contains("51"));
        let mut ev = f64::NAN;
        for i in 0..51 {
            assert_eq!(nmsse_series_min_eigenvalue(series, i, &mut ev), NmsseStatus::Ok);
            assert!(ev >= -1e-12);
        }
        assert_eq!(nmsse_series_min_eigenvalue(series, 99, &mut ev), NmsseStatus::OutOfRange);

        let mut again = ptr::null_mut();
        assert_eq!(set(cfg, "threads", "1"), NmsseStatus::Ok);
        assert_eq!(nmsse_run_ensemble(cfg, &mut again), NmsseStatus::Ok);
        let mut q = NmssePoint::default();
        for i in 0..51 {
            nmsse_series_point(series, i, &mut p);
            nmsse_series_point(again, i, &mut q);
            assert_eq!(p, q);
        }

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ens.csv");
        let cpath = cstr(path.to_str().unwrap());
        assert_eq!(nmsse_series_write_csv(series, cpath.as_ptr()), NmsseStatus::Ok);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,x,y,z,norm,x_se,y_se,z_se\n0,0,0,1,1,0,0,0\n"));
        let missing = cstr(dir.path().join("no/such/dir.csv").to_str().unwrap());
        assert_eq!(nmsse_series_write_csv(series, missing.as_ptr()), NmsseStatus::Io);

        nmsse_series_free(series);
        nmsse_series_free(again);
        nmsse_config_free(cfg);
    }
}

#[test]
fn trajectory_and_reference_series() {
    unsafe {
        let cfg = small_config();
        assert_eq!(set(cfg, "unraveling", "quadrature"), NmsseStatus::Ok);
        let mut traj = ptr::null_mut();
        assert_eq!(nmsse_run_trajectory(cfg, 3, &mut traj), NmsseStatus::Ok);
        let mut p = NmssePoint::default();
        for i in 0..nmsse_series_len(traj) {
            assert_eq!(nmsse_series_point(traj, i, &mut p), NmsseStatus::Ok);
            assert_eq!(p.y, 0.0);
            assert_eq!(p.z_se, 0.0);
        }
        let mut ev = 0.0;
        assert_eq!(nmsse_series_min_eigenvalue(traj, 0, &mut ev), NmsseStatus::Unsupported);

        let mut reference = ptr::null_mut();
        assert_eq!(nmsse_run_reference(cfg, &mut reference), NmsseStatus::Ok);
        assert_eq!(nmsse_series_len(reference), 51);

        assert_eq!(set(cfg, "mode", "master"), NmsseStatus::Ok);
        let mut failed = traj;
        assert_eq!(nmsse_run_reference(cfg, &mut failed), NmsseStatus::Config);
        assert!(failed.is_null());
        assert!(last_error().contains("gamma"));
        assert_eq!(set(cfg, "gamma", "1"), NmsseStatus::Ok);
        let mut master = ptr::null_mut();
        assert_eq!(nmsse_run_reference(cfg, &mut master), NmsseStatus::Ok);
        assert_eq!(nmsse_series_point(master, 50, &mut p), NmsseStatus::Ok);
        assert!((p.z - (2.0 * (-0.5f64).exp() - 1.0)).abs() < 1e-3);

        for s in [traj, reference, master] {
            nmsse_series_free(s);
        }
        nmsse_config_free(cfg);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/nmsse.h")).unwrap();
    for name in [
        "NMSSE_H",
        "NmsseStatus",
        "NMSSE_STATUS_OK",
        "NmssePoint",
        "nmsse_config_new",
        "nmsse_run_ensemble",
        "nmsse_series_write_csv",
        "nmsse_last_error",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
