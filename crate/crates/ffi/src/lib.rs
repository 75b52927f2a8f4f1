//! C interface to `popcode`.
//!
//! Every fallible function returns a [`PcStatus`]; on failure a description is available
//! from [`pc_last_error_message`] on the same thread. Models and SO(3) codecs are opaque
//! handles that must be released with their `_free` function. Output buffers are supplied
//! by the caller together with their length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::Vector3;
use popcode::nn::{train, MlpModel, OutputMode, TrainConfig};
use popcode::so3::{RotationMatrix, So3CodeSpec, So3Mode, SymmetrySet};
use popcode::tuning::{decode_argmax, encode_gaussian, PopulationCodeSpec};
use popcode::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside the function's domain.
    Domain = 2,
    /// Non-finite values in a model or its inputs.
    Numerical = 3,
    /// Training produced a non-finite loss.
    Diverged = 4,
    /// File could not be read or written.
    Io = 5,
    /// Malformed JSON or unsupported format version.
    Format = 6,
    /// Caller-supplied buffer has the wrong length.
    BufferSize = 7,
    /// Internal error; the library caught a panic.
    Internal = 8,
}

/// Output representation of a network, numbered as in [`pc_model_train_task`].
pub const PC_SINGLE_VARIABLE: u32 = 0;
pub const PC_ONE_HOT: u32 = 1;
pub const PC_POPULATION_CODE: u32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("NULs removed")));
}

fn fail(status: PcStatus, msg: impl Into<String>) -> PcStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> PcStatus {
    let status = match &e {
        Error::Domain(_) => PcStatus::Domain,
        Error::Numerical { .. } => PcStatus::Numerical,
        Error::Diverged { .. } => PcStatus::Diverged,
        Error::FormatVersion { .. } | Error::Json(_) => PcStatus::Format,
        Error::Io(_) | Error::Csv(_) => PcStatus::Io,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), PcStatus>) -> PcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(PcStatus::Internal, "internal error (panic caught at the C boundary)"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, PcStatus>;
}

impl<T> OrStatus<T> for popcode::Result<T> {
    fn or_status(self) -> Result<T, PcStatus> {
        self.map_err(from_error)
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), PcStatus> {
    if p.is_null() {
        Err(fail(PcStatus::NullPointer, format!("{name} is NULL")))
    } else {
        Ok(())
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], PcStatus> {
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, expected: usize, name: &str) -> Result<&'a mut [f64], PcStatus> {
    non_null(p, name)?;
    if len != expected {
        return Err(fail(PcStatus::BufferSize, format!("{name} has length {len}, expected {expected}")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, PcStatus> {
    non_null(p, name)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(PcStatus::Domain, format!("{name} is not valid UTF-8")))
}

/// Message describing the last failure on this thread, or NULL. The pointer stays valid
/// until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Predicted failure rate of a 1-layer single-output network, `max(0, 1 - 3/(a n))`.
#[no_mangle]
pub extern "C" fn pc_single_variable_failure_rate(n: usize, a: f64) -> f64 {
    popcode::theory::single_variable_failure_rate(n, a)
}

/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn pc_popcode_failure_threshold(n: usize, sigma: f64, out: *mut f64) -> PcStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = popcode::theory::popcode_failure_threshold(n, sigma).or_status()?;
        Ok(())
    })
}

/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn pc_onehot_failure_threshold(b_k: f64, b_i: f64, out: *mut f64) -> PcStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = popcode::theory::onehot_failure_threshold(b_k, b_i).or_status()?;
        Ok(())
    })
}

/// Gaussian population code of `value` in `[0, 1)` over `n` neurons.
///
/// # Safety
/// `out` must point to `out_len` writable doubles; `out_len` must equal `n`.
#[no_mangle]
pub unsafe extern "C" fn pc_encode_gaussian(value: f64, n: usize, sigma: f64, out: *mut f64, out_len: usize) -> PcStatus {
    guard(|| {
        let spec = PopulationCodeSpec::new(n, sigma).or_status()?;
        let out = slice_mut(out, out_len, n, "out")?;
        out.copy_from_slice(&encode_gaussian(value, &spec).or_status()?);
        Ok(())
    })
}

/// Preferred value `j/len` of the most active neuron.
///
/// # Safety
/// `code` must point to `len` readable doubles and `value` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn pc_decode_argmax(code: *const f64, len: usize, value: *mut f64) -> PcStatus {
    guard(|| {
        let code = slice(code, len, "code")?;
        non_null(value, "value")?;
        *value = decode_argmax(code).or_status()?;
        Ok(())
    })
}

/// A feed-forward network.
pub struct PcModel {
    inner: MlpModel,
}

fn boxed_model(inner: MlpModel, out: *mut *mut PcModel) {
    // SAFETY: callers have checked `out`.
    unsafe { *out = Box::into_raw(Box::new(PcModel { inner })) };
}

/// Loads a model saved by the `popcode` tool.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pc_model_load(path: *const c_char, out: *mut *mut PcModel) -> PcStatus {
    guard(|| {
        non_null(out, "out")?;
        let path = c_str(path, "path")?;
        boxed_model(MlpModel::load(path).or_status()?, out);
        Ok(())
    })
}

/// Parses a model from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pc_model_from_json(json: *const c_char, out: *mut *mut PcModel) -> PcStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = c_str(json, "json")?;
        boxed_model(MlpModel::from_json(text).or_status()?, out);
        Ok(())
    })
}

/// Trains a fresh `depth`-layer network on the 1-pixel localisation task with the default
/// optimiser settings. `mode` is one of `PC_SINGLE_VARIABLE`, `PC_ONE_HOT`,
/// `PC_POPULATION_CODE`.
///
/// # Safety
/// `out` must be a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pc_model_train_task(
    mode: u32,
    depth: usize,
    n: usize,
    sigma: f64,
    epochs: usize,
    seed: u64,
    out: *mut *mut PcModel,
) -> PcStatus {
    guard(|| {
        non_null(out, "out")?;
        let mode = match mode {
            PC_SINGLE_VARIABLE => OutputMode::SingleVariable,
            PC_ONE_HOT => OutputMode::OneHot,
            PC_POPULATION_CODE => OutputMode::PopulationCode,
            other => return Err(fail(PcStatus::Domain, format!("unknown output mode {other}"))),
        };
        let spec = PopulationCodeSpec::new(n, sigma).or_status()?;
        let data = popcode::experiments::build_task_dataset(n, mode, &spec).or_status()?;
        let mut model = MlpModel::stacked(n, depth, mode, seed).or_status()?;
        let config = TrainConfig { epochs, loss: mode.default_loss(), seed, ..TrainConfig::default() };
        train(&mut model, &data, &config).or_status()?;
        boxed_model(model, out);
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_model_input_dim(model: *const PcModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.input_dim())
}

/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_model_output_dim(model: *const PcModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.output_dim())
}

/// Network output (after the output activation) for one input.
///
/// # Safety
/// `model` must be a live handle, `input` must hold `input_len` doubles and `output`
/// `output_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_model_predict(
    model: *const PcModel,
    input: *const f64,
    input_len: usize,
    output: *mut f64,
    output_len: usize,
) -> PcStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| fail(PcStatus::NullPointer, "model is NULL"))?;
        let input = slice(input, input_len, "input")?;
        let output = slice_mut(output, output_len, model.inner.output_dim(), "output")?;
        output.copy_from_slice(&model.inner.predict(input).or_status()?);
        Ok(())
    })
}

/// Writes the model's JSON to `path`.
///
/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pc_model_save(model: *const PcModel, path: *const c_char) -> PcStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| fail(PcStatus::NullPointer, "model is NULL"))?;
        model.inner.save(c_str(path, "path")?).or_status()
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_model_free(model: *mut PcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// An SO(3) population code specification.
pub struct PcSo3Codec {
    spec: So3CodeSpec,
}

/// Creates a codec over `n_axes` lattice axes and `n_angles` angles. With `axis_only`
/// non-zero the code has one neuron per axis.
///
/// # Safety
/// `out` must be a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pc_so3_codec_new(
    n_axes: usize,
    n_angles: usize,
    sigma_rad: f64,
    axis_only: i32,
    out: *mut *mut PcSo3Codec,
) -> PcStatus {
    guard(|| {
        non_null(out, "out")?;
        let mode = if axis_only != 0 { So3Mode::AxisOnly } else { So3Mode::AxisAngle };
        let spec = So3CodeSpec::new(n_axes, n_angles, sigma_rad, mode).or_status()?;
        *out = Box::into_raw(Box::new(PcSo3Codec { spec }));
        Ok(())
    })
}

/// Code length, or 0 for NULL.
///
/// # Safety
/// `codec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_so3_codec_len(codec: *const PcSo3Codec) -> usize {
    codec.as_ref().map_or(0, |c| c.spec.len())
}

unsafe fn codec_ref<'a>(codec: *const PcSo3Codec) -> Result<&'a So3CodeSpec, PcStatus> {
    codec.as_ref().map(|c| &c.spec).ok_or_else(|| fail(PcStatus::NullPointer, "codec is NULL"))
}

/// Encodes a row-major rotation matrix. `symmetries` holds `n_symmetries` row-major
/// matrices forming a group that contains the identity; pass `n_symmetries = 0` for an
/// asymmetric object.
///
/// # Safety
/// `rotation` must hold 9 doubles, `symmetries` `9 * n_symmetries` doubles (may be NULL
/// when zero), and `out` `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_so3_encode_pose(
    codec: *const PcSo3Codec,
    rotation: *const f64,
    symmetries: *const f64,
    n_symmetries: usize,
    out: *mut f64,
    out_len: usize,
) -> PcStatus {
    guard(|| {
        let spec = codec_ref(codec)?;
        let r = RotationMatrix::from_row_major(slice(rotation, 9, "rotation")?).or_status()?;
        let sym = if n_symmetries == 0 {
            SymmetrySet::identity()
        } else {
            let flat = slice(symmetries, 9 * n_symmetries, "symmetries")?;
            let rots = flat
                .chunks_exact(9)
                .map(RotationMatrix::from_row_major)
                .collect::<popcode::Result<Vec<_>>>()
                .or_status()?;
            SymmetrySet::discrete(rots).or_status()?
        };
        let out = slice_mut(out, out_len, spec.len(), "out")?;
        out.copy_from_slice(&spec.encode_pose(&r, &sym).or_status()?);
        Ok(())
    })
}

/// Axis-only code of a direction.
///
/// # Safety
/// `axis` must hold 3 doubles and `out` `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_so3_encode_axis(
    codec: *const PcSo3Codec,
    axis: *const f64,
    out: *mut f64,
    out_len: usize,
) -> PcStatus {
    guard(|| {
        let spec = codec_ref(codec)?;
        let axis = Vector3::from_column_slice(slice(axis, 3, "axis")?);
        let out = slice_mut(out, out_len, spec.len(), "out")?;
        out.copy_from_slice(&spec.encode_axis_only(&axis).or_status()?);
        Ok(())
    })
}

/// Preferred axis and angle (radians) of the most active neuron. For axis-only codecs the
/// angle is written as 0.
///
/// # Safety
/// `code` must hold `len` doubles, `axis_out` 3 writable doubles and `angle_out` one.
#[no_mangle]
pub unsafe extern "C" fn pc_so3_decode(
    codec: *const PcSo3Codec,
    code: *const f64,
    len: usize,
    axis_out: *mut f64,
    angle_out: *mut f64,
) -> PcStatus {
    guard(|| {
        let spec = codec_ref(codec)?;
        let code = slice(code, len, "code")?;
        let axis_out = slice_mut(axis_out, 3, 3, "axis_out")?;
        non_null(angle_out, "angle_out")?;
        let (axis, angle) = match spec.mode() {
            So3Mode::AxisAngle => {
                let aa = spec.decode_pose(code).or_status()?;
                (aa.axis, aa.angle)
            }
            So3Mode::AxisOnly => (spec.decode_axis(code).or_status()?, 0.0),
        };
        axis_out.copy_from_slice(axis.as_slice());
        *angle_out = angle;
        Ok(())
    })
}

/// # Safety
/// `codec` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_so3_codec_free(codec: *mut PcSo3Codec) {
    if !codec.is_null() {
        drop(Box::from_raw(codec));
    }
}
