#ifndef POPCODE_H
#define POPCODE_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Output representation of a network, numbered as in [`pc_model_train_task`].
 */
#define PC_SINGLE_VARIABLE 0

#define PC_ONE_HOT 1

#define PC_POPULATION_CODE 2

typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  /**
   * Argument outside the function's domain.
   */
  PC_STATUS_DOMAIN = 2,
  /**
   * Non-finite values in a model or its inputs.
   */
  PC_STATUS_NUMERICAL = 3,
  /**
   * Training produced a non-finite loss.
   */
  PC_STATUS_DIVERGED = 4,
  /**
   * File could not be read or written.
   */
  PC_STATUS_IO = 5,
  /**
   * Malformed JSON or unsupported format version.
   */
  PC_STATUS_FORMAT = 6,
  /**
   * Caller-supplied buffer has the wrong length.
   */
  PC_STATUS_BUFFER_SIZE = 7,
  /**
   * Internal error; the library caught a panic.
   */
  PC_STATUS_INTERNAL = 8,
} PcStatus;

/**
 * A feed-forward network.
 */
typedef struct PcModel PcModel;

/**
 * An SO(3) population code specification.
 */
typedef struct PcSo3Codec PcSo3Codec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. The pointer stays valid
 * until the next library call on the same thread.
 */
const char *pc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pc_version(void);

/**
 * Predicted failure rate of a 1-layer single-output network, `max(0, 1 - 3/(a n))`.
 */
double pc_single_variable_failure_rate(size_t n, double a);

/**
 * # Safety
 * `out` must point to a writable `double`.
 */
enum PcStatus pc_popcode_failure_threshold(size_t n, double sigma, double *out);

/**
 * # Safety
 * `out` must point to a writable `double`.
 */
enum PcStatus pc_onehot_failure_threshold(double b_k, double b_i, double *out);

/**
 * Gaussian population code of `value` in `[0, 1)` over `n` neurons.
 *
 * # Safety
 * `out` must point to `out_len` writable doubles; `out_len` must equal `n`.
 */
enum PcStatus pc_encode_gaussian(double value, size_t n, double sigma, double *out, size_t out_len);

/**
 * Preferred value `j/len` of the most active neuron.
 *
 * # Safety
 * `code` must point to `len` readable doubles and `value` to a writable double.
 */
enum PcStatus pc_decode_argmax(const double *code, size_t len, double *value);

/**
 * Loads a model saved by the `popcode` tool.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer slot.
 */
enum PcStatus pc_model_load(const char *path, struct PcModel **out);

/**
 * Parses a model from its JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer slot.
 */
enum PcStatus pc_model_from_json(const char *json, struct PcModel **out);

/**
 * Trains a fresh `depth`-layer network on the 1-pixel localisation task with the default
 * optimiser settings. `mode` is one of `PC_SINGLE_VARIABLE`, `PC_ONE_HOT`,
 * `PC_POPULATION_CODE`.
 *
 * # Safety
 * `out` must be a writable pointer slot.
 */
enum PcStatus pc_model_train_task(uint32_t mode,
                                  size_t depth,
                                  size_t n,
                                  double sigma,
                                  size_t epochs,
                                  uint64_t seed,
                                  struct PcModel **out);

/**
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t pc_model_input_dim(const struct PcModel *model);

/**
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t pc_model_output_dim(const struct PcModel *model);

/**
 * Network output (after the output activation) for one input.
 *
 * # Safety
 * `model` must be a live handle, `input` must hold `input_len` doubles and `output`
 * `output_len` writable doubles.
 */
enum PcStatus pc_model_predict(const struct PcModel *model,
                               const double *input,
                               size_t input_len,
                               double *output,
                               size_t output_len);

/**
 * Writes the model's JSON to `path`.
 *
 * # Safety
 * `model` must be a live handle and `path` a NUL-terminated string.
 */
enum PcStatus pc_model_save(const struct PcModel *model, const char *path);

/**
 * # Safety
 * `model` must be NULL or a handle not yet freed.
 */
void pc_model_free(struct PcModel *model);

/**
 * Creates a codec over `n_axes` lattice axes and `n_angles` angles. With `axis_only`
 * non-zero the code has one neuron per axis.
 *
 * # Safety
 * `out` must be a writable pointer slot.
 */
enum PcStatus pc_so3_codec_new(size_t n_axes,
                               size_t n_angles,
                               double sigma_rad,
                               int32_t axis_only,
                               struct PcSo3Codec **out);

/**
 * Code length, or 0 for NULL.
 *
 * # Safety
 * `codec` must be NULL or a live handle.
 */
size_t pc_so3_codec_len(const struct PcSo3Codec *codec);

/**
 * Encodes a row-major rotation matrix. `symmetries` holds `n_symmetries` row-major
 * matrices forming a group that contains the identity; pass `n_symmetries = 0` for an
 * asymmetric object.
 *
 * # Safety
 * `rotation` must hold 9 doubles, `symmetries` `9 * n_symmetries` doubles (may be NULL
 * when zero), and `out` `out_len` writable doubles.
 */
enum PcStatus pc_so3_encode_pose(const struct PcSo3Codec *codec,
                                 const double *rotation,
                                 const double *symmetries,
                                 size_t n_symmetries,
                                 double *out,
                                 size_t out_len);

/**
 * Axis-only code of a direction.
 *
 * # Safety
 * `axis` must hold 3 doubles and `out` `out_len` writable doubles.
 */
enum PcStatus pc_so3_encode_axis(const struct PcSo3Codec *codec,
                                 const double *axis,
                                 double *out,
                                 size_t out_len);

/**
 * Preferred axis and angle (radians) of the most active neuron. For axis-only codecs the
 * angle is written as 0.
 *
 * # Safety
 * `code` must hold `len` doubles, `axis_out` 3 writable doubles and `angle_out` one.
 */
enum PcStatus pc_so3_decode(const struct PcSo3Codec *codec,
                            const double *code,
                            size_t len,
                            double *axis_out,
                            double *angle_out);

/**
 * # Safety
 * `codec` must be NULL or a handle not yet freed.
 */
void pc_so3_codec_free(struct PcSo3Codec *codec);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POPCODE_H */
