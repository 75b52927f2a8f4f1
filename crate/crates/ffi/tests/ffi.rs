use std::ffi::{CStr, CString};
use std::ptr;

use popcode_ffi::*;

fn last_error() -> String {
    let p = pc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn theory_values() {
    assert_eq!(pc_single_variable_failure_rate(20, 0.2), 0.25);
    let mut t = 0.0;
    assert_eq!(unsafe { pc_popcode_failure_threshold(20, 0.1, &mut t) }, PcStatus::Ok);
    assert!((t - 0.835).abs() < 1e-3);
    assert_eq!(unsafe { pc_onehot_failure_threshold(0.0, 0.0, &mut t) }, PcStatus::Ok);
    assert_eq!(t, 1.0);
    assert_eq!(unsafe { pc_onehot_failure_threshold(1.0, 0.0, &mut t) }, PcStatus::Domain);
    assert!(last_error().contains("positive"));
    assert_eq!(unsafe { pc_popcode_failure_threshold(20, 0.1, ptr::null_mut()) }, PcStatus::NullPointer);
}

#[test]
fn gaussian_round_trip() {
    let mut code = [0.0; 20];
    assert_eq!(unsafe { pc_encode_gaussian(0.35, 20, 0.1, code.as_mut_ptr(), 20) }, PcStatus::Ok);
    assert_eq!(code[7], 1.0);
    let mut v = 0.0;
    assert_eq!(unsafe { pc_decode_argmax(code.as_ptr(), 20, &mut v) }, PcStatus::Ok);
    assert_eq!(v, 0.35);
    assert_eq!(unsafe { pc_encode_gaussian(0.35, 20, 0.1, code.as_mut_ptr(), 19) }, PcStatus::BufferSize);
    assert_eq!(unsafe { pc_encode_gaussian(1.0, 20, 0.1, code.as_mut_ptr(), 20) }, PcStatus::Domain);
    // a successful call clears the previous message
    assert_eq!(unsafe { pc_decode_argmax(code.as_ptr(), 20, &mut v) }, PcStatus::Ok);
    assert!(pc_last_error_message().is_null());
}

#[test]
fn model_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.json").to_str().unwrap()).unwrap();
    let mut model = ptr::null_mut();
    unsafe {
        assert_eq!(pc_model_train_task(PC_ONE_HOT, 1, 20, 0.1, 2000, 3, &mut model), PcStatus::Ok);
        assert_eq!(pc_model_input_dim(model), 20);
        assert_eq!(pc_model_output_dim(model), 20);
        let mut x = [0.0; 20];
        x[4] = 1.0;
        let mut y = [0.0; 20];
        assert_eq!(pc_model_predict(model, x.as_ptr(), 20, y.as_mut_ptr(), 20), PcStatus::Ok);
        let best = (0..20).max_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap();
        assert_eq!(best, 4);
        assert_eq!(pc_model_predict(model, x.as_ptr(), 19, y.as_mut_ptr(), 20), PcStatus::Domain);
        assert_eq!(pc_model_save(model, path.as_ptr()), PcStatus::Ok);

        let mut loaded = ptr::null_mut();
        assert_eq!(pc_model_load(path.as_ptr(), &mut loaded), PcStatus::Ok);
        let mut z = [0.0; 20];
        assert_eq!(pc_model_predict(loaded, x.as_ptr(), 20, z.as_mut_ptr(), 20), PcStatus::Ok);
        assert_eq!(y, z);
        pc_model_free(loaded);
        pc_model_free(model);
        pc_model_free(ptr::null_mut());

        let missing = CString::new(dir.path().join("nope.json").to_str().unwrap()).unwrap();
        assert_eq!(pc_model_load(missing.as_ptr(), &mut loaded), PcStatus::Io);
        let bad = CString::new("{\"format_version\": 99}").unwrap();
        assert_eq!(pc_model_from_json(bad.as_ptr(), &mut loaded), PcStatus::Format);
        assert_eq!(pc_model_train_task(7, 1, 20, 0.1, 10, 0, &mut loaded), PcStatus::Domain);
        assert_eq!(pc_model_output_dim(ptr::null()), 0);
    }
}

#[test]
fn so3_codec() {
    let mut codec = ptr::null_mut();
    unsafe {
        assert_eq!(pc_so3_codec_new(400, 24, 0.35, 0, &mut codec), PcStatus::Ok);
        let len = pc_so3_codec_len(codec);
        assert_eq!(len, 400 * 24);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let r = [c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0];
        let half_turn = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0];
        let mut code = vec![0.0; len];
        assert_eq!(pc_so3_encode_pose(codec, r.as_ptr(), half_turn.as_ptr(), 2, code.as_mut_ptr(), len), PcStatus::Ok);
        let mut axis = [0.0; 3];
        let mut angle = 0.0;
        assert_eq!(pc_so3_decode(codec, code.as_ptr(), len, axis.as_mut_ptr(), &mut angle), PcStatus::Ok);
        assert!((axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2] - 1.0).abs() < 1e-12);

        assert_eq!(pc_so3_encode_pose(codec, r.as_ptr(), ptr::null(), 0, code.as_mut_ptr(), len), PcStatus::Ok);
        let not_group = [-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(pc_so3_encode_pose(codec, r.as_ptr(), not_group.as_ptr(), 1, code.as_mut_ptr(), len), PcStatus::Domain);
        assert!(last_error().contains("identity"));
        let skew = [2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(pc_so3_encode_pose(codec, skew.as_ptr(), ptr::null(), 0, code.as_mut_ptr(), len), PcStatus::Domain);
        assert_eq!(pc_so3_encode_axis(codec, [0.0, 0.0, 1.0].as_ptr(), code.as_mut_ptr(), len), PcStatus::Domain);
        pc_so3_codec_free(codec);

        assert_eq!(pc_so3_codec_new(300, 1, 0.3, 1, &mut codec), PcStatus::Ok);
        let mut code = vec![0.0; 300];
        assert_eq!(pc_so3_encode_axis(codec, [0.0, 0.0, 1.0].as_ptr(), code.as_mut_ptr(), 300), PcStatus::Ok);
        assert_eq!(pc_so3_decode(codec, code.as_ptr(), 300, axis.as_mut_ptr(), &mut angle), PcStatus::Ok);
        assert!(axis[2] > 0.99);
        assert_eq!(angle, 0.0);
        pc_so3_codec_free(codec);

        assert_eq!(pc_so3_codec_new(1, 4, 0.3, 0, &mut codec), PcStatus::Domain);
        assert_eq!(pc_so3_codec_len(ptr::null()), 0);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(pc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
