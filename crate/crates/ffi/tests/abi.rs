use std::ffi::{CStr, CString};
use std::ptr;

use crimedyn_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = crimedyn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn preset(name: &str) -> *mut CrimedynParams {
    let mut h = ptr::null_mut();
    let status = unsafe { crimedyn_params_preset(cstr(name).as_ptr(), &mut h) };
    assert_eq!(status, CrimedynStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn r0_and_thresholds_of_table4() {
    let h = preset("table4");
    let mut r0 = 0.0;
    assert_eq!(unsafe { crimedyn_r0(h, &mut r0) }, CrimedynStatus::Ok);
    assert!((r0 - 1.5107601549667).abs() < 1e-12);
    let mut t = CrimedynThresholds::default();
    assert_eq!(unsafe { crimedyn_thresholds(h, &mut t) }, CrimedynStatus::Ok);
    assert_eq!(t.r0, r0);
    assert!((t.lambda - 0.306_844_444_444_444_4).abs() < 1e-15);
    assert!(t.alpha_star > t.alpha_star_consistent);
    unsafe { crimedyn_params_free(h) };
}

#[test]
fn parse_get_set() {
    let text = cstr(
        "pi = 13820\nmu = 0.0133333\ntheta = 0.09\nepsilon = 0.2\nsigma = 0.6\n\
         beta = 1.8e-6\nalpha = 2e-6\ngamma = 0.8\np = 0.2\nq = 0.4\n",
    );
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { crimedyn_params_parse(text.as_ptr(), &mut h) }, CrimedynStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { crimedyn_params_get(h, cstr("gamma").as_ptr(), &mut v) }, CrimedynStatus::Ok);
    assert_eq!(v, 0.8);
    assert_eq!(unsafe { crimedyn_params_set(h, cstr("gamma").as_ptr(), 0.5) }, CrimedynStatus::Ok);
    unsafe { crimedyn_params_get(h, cstr("gamma").as_ptr(), &mut v) };
    assert_eq!(v, 0.5);
    // rejected updates leave the handle untouched
    assert_eq!(unsafe { crimedyn_params_set(h, cstr("p").as_ptr(), 1.5) }, CrimedynStatus::Validation);
    unsafe { crimedyn_params_get(h, cstr("p").as_ptr(), &mut v) };
    assert_eq!(v, 0.2);
    assert_eq!(unsafe { crimedyn_params_get(h, cstr("kappa").as_ptr(), &mut v) }, CrimedynStatus::Validation);
    assert!(last_error().contains("kappa"));
    unsafe { crimedyn_params_free(h) };
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    let missing = cstr("pi = 1\n");
    assert_eq!(unsafe { crimedyn_params_parse(missing.as_ptr(), &mut h) }, CrimedynStatus::Validation);
    assert!(last_error().contains("missing"));
    assert!(h.is_null());

    let text = cstr(
        "pi = 13820\nmu = 0.0133\ntheta = 0.09\nepsilon = 0.2\nsigma = 0.5\n\
         beta = 1e-6\nalpha = 0\ngamma = 0.8\np = 0.2\nq = 5\n",
    );
    assert_eq!(unsafe { crimedyn_params_parse(text.as_ptr(), &mut h) }, CrimedynStatus::Inadmissible);

    assert_eq!(unsafe { crimedyn_params_preset(cstr("nope").as_ptr(), &mut h) }, CrimedynStatus::Validation);
    assert_eq!(unsafe { crimedyn_params_preset(ptr::null(), &mut h) }, CrimedynStatus::NullArgument);
    let mut r0 = 0.0;
    assert_eq!(unsafe { crimedyn_r0(ptr::null(), &mut r0) }, CrimedynStatus::NullArgument);

    let p = preset("table4");
    let y0 = [1e5, 1e5, 1e5, 1e5];
    let opts = CrimedynSolverOptions { max_steps: 3, ..crimedyn_solver_defaults() };
    let mut traj = ptr::null_mut();
    assert_eq!(unsafe { crimedyn_simulate(p, y0.as_ptr(), 100.0, &opts, &mut traj) }, CrimedynStatus::Numerical);
    assert!(traj.is_null());
    assert_eq!(unsafe { crimedyn_simulate(p, y0.as_ptr(), 0.0, ptr::null(), &mut traj) }, CrimedynStatus::Validation);
    unsafe { crimedyn_params_free(p) };
    unsafe { crimedyn_params_free(ptr::null_mut()) };
    unsafe { crimedyn_trajectory_free(ptr::null_mut()) };
}

#[test]
fn sensitivity_layers_agree() {
    let p = preset("table4");
    let (mut d, mut fd) = (0.0, 0.0);
    assert_eq!(unsafe { crimedyn_sensitivity(p, cstr("theta").as_ptr(), &mut d, &mut fd) }, CrimedynStatus::Ok);
    assert!((d - 0.674_519_72).abs() < 1e-6);
    assert!((d - fd).abs() < 1e-6);
    assert_eq!(unsafe { crimedyn_sensitivity(p, cstr("mu").as_ptr(), &mut d, &mut fd) }, CrimedynStatus::Validation);
    unsafe { crimedyn_params_free(p) };
}

#[test]
fn simulation_round_trip() {
    let p = preset("table3");
    let y0 = [2e5, 3e5, 1e4, 5e3];
    let opts = CrimedynSolverOptions { output_interval: 1.0, ..crimedyn_solver_defaults() };
    let mut traj = ptr::null_mut();
    assert_eq!(unsafe { crimedyn_simulate(p, y0.as_ptr(), 10.0, &opts, &mut traj) }, CrimedynStatus::Ok);
    assert_eq!(unsafe { crimedyn_trajectory_len(traj) }, 11);
    let (mut t, mut y) = (0.0, [0.0; 4]);
    assert_eq!(unsafe { crimedyn_trajectory_get(traj, 0, &mut t, y.as_mut_ptr()) }, CrimedynStatus::Ok);
    assert_eq!((t, y), (0.0, y0));
    assert_eq!(unsafe { crimedyn_trajectory_get(traj, 10, &mut t, y.as_mut_ptr()) }, CrimedynStatus::Ok);
    assert_eq!(t, 10.0);
    assert_eq!(unsafe { crimedyn_trajectory_get(traj, 11, &mut t, y.as_mut_ptr()) }, CrimedynStatus::Validation);
    unsafe { crimedyn_trajectory_free(traj) };
    unsafe { crimedyn_params_free(p) };
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(crimedyn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
