use std::ffi::{CStr, CString};
use std::ptr;

use darktripod_ffi::*;

fn last_error() -> String {
    let p = dt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn config_handle_round_trip() {
    unsafe {
        let cfg = dt_config_new();
        let key = CString::new("Omega_C").unwrap();
        let mut v = 0.0;
        assert_eq!(dt_config_get(cfg, key.as_ptr(), &mut v), DtStatus::Ok);
        assert_eq!(v, 2.0);
        assert_eq!(dt_config_set(cfg, key.as_ptr(), 3.5), DtStatus::Ok);
        assert_eq!(dt_config_get(cfg, key.as_ptr(), &mut v), DtStatus::Ok);
        assert_eq!(v, 3.5);

        let theta = CString::new("theta").unwrap();
        assert_eq!(dt_config_set(cfg, theta.as_ptr(), 2.0), DtStatus::InvalidArgument);
        assert!(last_error().contains("theta"));
        assert_eq!(dt_config_get(cfg, theta.as_ptr(), &mut v), DtStatus::Ok);
        assert_eq!(v, 0.0);

        let bogus = CString::new("omega_c").unwrap();
        assert_eq!(dt_config_set(cfg, bogus.as_ptr(), 1.0), DtStatus::InvalidArgument);
        assert_eq!(dt_config_get(ptr::null(), key.as_ptr(), &mut v), DtStatus::NullPointer);
        dt_config_free(cfg);
        dt_config_free(ptr::null_mut());
    }
}

#[test]
fn config_from_file() {
    let dir = std::env::temp_dir().join(format!("dt-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gas.cfg");
    std::fs::write(&path, "K = 10\n").unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(dt_config_load(cpath.as_ptr(), &mut cfg), DtStatus::Ok);
        let mut k = 0.0;
        let key = CString::new("K").unwrap();
        assert_eq!(dt_config_get(cfg, key.as_ptr(), &mut k), DtStatus::Ok);
        assert_eq!(k, 10.0);
        dt_config_free(cfg);
        let missing = CString::new(dir.join("missing.cfg").to_str().unwrap()).unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(dt_config_load(missing.as_ptr(), &mut none), DtStatus::Io);
        assert!(none.is_null());
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn closed_form_quantities() {
    assert_eq!(dt_f_theta(0.0), 1.0);
    assert_eq!(dt_g_theta(0.0), 0.0);
    assert!((dt_negative_velocity_threshold() - 4.828_427_124_746_19).abs() < 1e-12);
    unsafe {
        let mut vg = 0.0;
        assert_eq!(dt_group_velocity(0.0, 50.0, &mut vg), DtStatus::Ok);
        assert!((vg - 1.0 / 51.0).abs() < 1e-15);
        let t = dt_negative_velocity_threshold();
        assert_eq!(
            dt_group_velocity(3.0 * std::f64::consts::FRAC_PI_8, t, &mut vg),
            DtStatus::PhysicsDomain
        );
        assert!(last_error().contains("threshold"));

        let cfg = dt_config_new();
        let mut chi = DtComplex::default();
        assert_eq!(dt_chi(cfg, 1.0, DT_CHANNELS_BOTH, &mut chi), DtStatus::Ok);
        assert!((chi.im - 1.0).abs() < 1e-12);
        assert_eq!(dt_chi(cfg, 1.0, 7, &mut chi), DtStatus::InvalidArgument);

        let grid = [-1.0, 0.0, 1.0];
        let mut out = [DtComplex::default(); 3];
        let mut valid = [9u8; 3];
        assert_eq!(
            dt_chi_scan(cfg, grid.as_ptr(), 3, DT_CHANNELS_BOTH, out.as_mut_ptr(), valid.as_mut_ptr()),
            DtStatus::Ok
        );
        assert_eq!(valid, [1, 1, 1]);
        assert_eq!(out[1], DtComplex::default());

        let mut eps = DtComplex::default();
        assert_eq!(dt_local_field(DtComplex::default(), &mut eps), DtStatus::Ok);
        assert_eq!(eps, DtComplex::default());
        assert_eq!(dt_local_field(DtComplex { re: 3.0, im: 0.0 }, &mut eps), DtStatus::PhysicsDomain);

        let mut d = DtDispersion::default();
        assert_eq!(dt_dispersion(cfg, 0.0, 1e-3, DT_CHANNELS_PROBE, &mut d), DtStatus::Ok);
        assert_eq!(d.has_vg, 1);
        assert!((d.n_group - 51.0).abs() < 1e-3);

        let mut c = DtConsistency::default();
        assert_eq!(dt_consistency(cfg, 1e-3, DT_CHANNELS_PROBE, &mut c), DtStatus::Ok);
        assert_eq!(c.tan2phi, 50.0);
        assert!(c.rel_error < 1e-3);
        dt_config_free(cfg);
    }
}

#[test]
fn oracle_routes_agree() {
    unsafe {
        let cfg = dt_config_new();
        let key = CString::new("theta").unwrap();
        assert_eq!(dt_config_set(cfg, key.as_ptr(), 0.3), DtStatus::Ok);
        let (mut a, mut b) = (DtCoherences::default(), DtCoherences::default());
        assert_eq!(dt_steady_state(cfg, 0.01, 0.7, &mut a), DtStatus::Ok);
        assert_eq!(dt_evolve(cfg, 0.01, 0.7, 1e9, &mut b), DtStatus::Ok);
        let scale = a.rho41.re.hypot(a.rho41.im);
        assert!((a.rho41.re - b.rho41.re).abs() < 1e-9 * scale);
        assert!((a.rho42.im - b.rho42.im).abs() < 1e-9 * scale);
        assert_eq!(dt_evolve(cfg, 0.01, 0.7, 1.0, &mut b), DtStatus::NotConverged);
        assert!(last_error().contains("not stationary"));
        dt_config_free(cfg);
    }
}

#[test]
fn pulse_through_slow_medium() {
    unsafe {
        let mut pulse = ptr::null_mut();
        assert_eq!(dt_pulse_gaussian(50.0, 4096, 8.0, 1e-3, 0.0, &mut pulse), DtStatus::Ok);
        assert_eq!(dt_pulse_len(pulse), 4096);
        let (mut t0, mut dt) = (0.0, 0.0);
        assert_eq!(dt_pulse_time_axis(pulse, &mut t0, &mut dt), DtStatus::Ok);
        assert_eq!(t0, -400.0);
        let mut buf = vec![DtComplex::default(); 4096];
        assert_eq!(dt_pulse_samples(pulse, buf.as_mut_ptr(), 10), DtStatus::InvalidArgument);
        assert_eq!(dt_pulse_samples(pulse, buf.as_mut_ptr(), buf.len()), DtStatus::Ok);
        assert_eq!(buf[2048].re, 1e-3);

        let cfg = dt_config_new();
        let mut out = ptr::null_mut();
        assert_eq!(dt_propagate(pulse, cfg, 1.0, 0, DT_CHANNELS_BOTH, &mut out), DtStatus::Ok);
        let (mut delay, mut gain) = (0.0, 0.0);
        assert_eq!(dt_pulse_compare(pulse, out, &mut delay, &mut gain), DtStatus::Ok);
        assert!((delay - 50.0).abs() < 2.5, "{delay}");
        assert!(gain <= 1.0);
        dt_pulse_free(out);
        dt_pulse_free(pulse);
        dt_config_free(cfg);

        let mut bad = ptr::null_mut();
        assert_eq!(dt_pulse_gaussian(-1.0, 16, 8.0, 1.0, 0.0, &mut bad), DtStatus::InvalidArgument);
        assert!(bad.is_null());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(dt_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
