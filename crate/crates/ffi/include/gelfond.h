#ifndef GELFOND_H
#define GELFOND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes shared by every function of this interface.
 */
typedef enum GelfondStatus {
  GELFOND_STATUS_OK = 0,
  GELFOND_STATUS_INVALID_ARGUMENT = 1,
  GELFOND_STATUS_GUARD_EXCEEDED = 2,
  GELFOND_STATUS_PROPERTY_VIOLATION = 3,
  GELFOND_STATUS_INFEASIBLE = 4,
  GELFOND_STATUS_NULL_POINTER = 5,
  GELFOND_STATUS_PANIC = 6,
} GelfondStatus;

/*
 Integer fields readable through [`gelfond_schedule_get`].
 */
typedef enum GelfondScheduleField {
  GELFOND_SCHEDULE_FIELD_NU = 0,
  GELFOND_SCHEDULE_FIELD_LAMBDA = 1,
  GELFOND_SCHEDULE_FIELD_RHO = 2,
  GELFOND_SCHEDULE_FIELD_U = 3,
  GELFOND_SCHEDULE_FIELD_TAU = 4,
  GELFOND_SCHEDULE_FIELD_ZETA = 5,
  GELFOND_SCHEDULE_FIELD_OMEGA = 6,
  GELFOND_SCHEDULE_FIELD_ETA0 = 7,
  GELFOND_SCHEDULE_FIELD_ETA1 = 8,
  GELFOND_SCHEDULE_FIELD_KAPPA = 9,
  GELFOND_SCHEDULE_FIELD_DELTA = 10,
  GELFOND_SCHEDULE_FIELD_BIG_L = 11,
  GELFOND_SCHEDULE_FIELD_C = 12,
  GELFOND_SCHEDULE_FIELD_MU = 13,
} GelfondScheduleField;

/*
 Opaque parameter schedule; create with [`gelfond_schedule_new`], release with
 [`gelfond_schedule_free`].
 */
typedef struct GelfondSchedule GelfondSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message into `buf` (NUL-terminated, truncated to `len`) and
 returns the full message length without the terminator; 0 when there is none.

 # Safety
 `buf` must be NULL or point to `len` writable bytes.
 */
size_t gelfond_last_error_message(char *buf, size_t len);

/*
 Base-`q` digit sum of `n`.

 # Safety
 `out` must be NULL or valid for writes.
 */
enum GelfondStatus gelfond_digit_sum(uint64_t n, uint64_t q, uint64_t *out);

/*
 `t(n³)`, the Thue–Morse symbol of the cube of `n`.
 */
uint8_t gelfond_thue_morse_cube(uint64_t n);

/*
 `#{n < x : t(n³) = 0}`.

 # Safety
 `out` must be NULL or valid for writes.
 */
enum GelfondStatus gelfond_count_cube_zeros(uint64_t x, uint64_t *out);

/*
 `S₀(ν, ξ)` as real and imaginary parts in `out[0]`, `out[1]`.

 # Safety
 `out` must be NULL or valid for writing two doubles.
 */
enum GelfondStatus gelfond_s0(uint32_t nu, double xi, double (*out)[2]);

/*
 `‖t‖_{U^Q(ℤ/2^ρℤ)}^{2^Q}`.

 # Safety
 `out` must be NULL or valid for writes.
 */
enum GelfondStatus gelfond_gowers_norm(uint32_t rho, uint32_t q, double *out);

/*
 Builds the schedule for driver `nu` and `Ξ = xi_num/xi_den`.

 # Safety
 `out` must be NULL or valid for writes. The handle written there is owned by the
 caller and must be released with [`gelfond_schedule_free`].
 */
enum GelfondStatus gelfond_schedule_new(uint64_t nu,
                                        uint64_t xi_num,
                                        uint64_t xi_den,
                                        struct GelfondSchedule **out);

/*
 Releases a schedule; NULL is ignored.

 # Safety
 `handle` must be NULL or a pointer from [`gelfond_schedule_new`] not yet freed.
 */
void gelfond_schedule_free(struct GelfondSchedule *handle);

/*
 Reads one integer field; `BigL` fails with `GELFOND_STATUS_INFEASIBLE` when undefined.

 # Safety
 `handle` must be a live schedule and `out` NULL or valid for writes.
 */
enum GelfondStatus gelfond_schedule_get(const struct GelfondSchedule *handle,
                                        enum GelfondScheduleField field,
                                        uint64_t *out);

/*
 Number of violated structural constraints; 0 means the audit passes.

 # Safety
 `handle` must be a live schedule and `out` NULL or valid for writes.
 */
enum GelfondStatus gelfond_schedule_violations(const struct GelfondSchedule *handle, size_t *out);

/*
 Least passing driver for the schedule's `Ξ`; 0 when none exists up to `10¹²`.

 # Safety
 `handle` must be a live schedule and `out` NULL or valid for writes.
 */
enum GelfondStatus gelfond_schedule_nu0(const struct GelfondSchedule *handle, uint64_t *out);

/*
 `log₂ E_term` for `term` in `0..=14`; NaN for the data-dependent `E₁₁`.

 # Safety
 `handle` must be a live schedule and `out` NULL or valid for writes.
 */
enum GelfondStatus gelfond_schedule_budget_log2(const struct GelfondSchedule *handle,
                                                uint32_t term,
                                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GELFOND_H */
