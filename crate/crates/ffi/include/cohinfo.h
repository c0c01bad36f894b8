#ifndef COHINFO_H
#define COHINFO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum CohStatus {
  COH_STATUS_OK = 0,
  COH_STATUS_NULL_POINTER = 1,
  COH_STATUS_INVALID_ARGUMENT = 2,
  COH_STATUS_DOMAIN = 3,
  COH_STATUS_NOT_PHYSICAL = 4,
  COH_STATUS_PARSE = 5,
  COH_STATUS_PANIC = 6,
} CohStatus;

// Opaque channel handle.
typedef struct CohChannel CohChannel;

// Opaque density-matrix handle.
typedef struct CohState CohState;

// Physicality audit of a channel.
typedef struct CohCpTpReport {
  bool cp;
  bool tp;
  double min_choi_eig;
  double max_trace_dev;
  double max_hermiticity_dev;
} CohCpTpReport;

// Entropies in bits for a channel acting on an input state.
typedef struct CohReport {
  double s_in;
  double s_out;
  double s_e;
  // Coherent information clamped at zero.
  double i_c;
  // Unclamped `s_out - s_e`.
  double raw_ic;
} CohReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *coh_status_message(enum CohStatus status);

// Message for the most recent call on this thread; empty after success.
// The pointer stays valid until the next call on the same thread.
const char *coh_last_error_message(void);

// Library version as a static string.
const char *coh_version(void);

// Density matrix from `2 * dim * dim` interleaved doubles.
//
// # Safety
// `data` must point to `2 * dim * dim` readable doubles and `out` to a
// writable handle pointer.
enum CohStatus coh_state_new(uintptr_t dim,
                             const double *data,
                             struct CohState **out);

// The maximally mixed state `I / dim`.
//
// # Safety
// `out` must point to a writable handle pointer.
enum CohStatus coh_state_maximally_mixed(uintptr_t dim,
                                         struct CohState **out);

// Dimension of a state, or 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
uintptr_t coh_state_dim(const struct CohState *state);

// Copies the `2 * dim * dim` interleaved entries into `out`.
//
// # Safety
// `state` must be a live handle and `out` must point to `len` writable doubles.
enum CohStatus coh_state_entries(const struct CohState *state,
                                 double *out,
                                 uintptr_t len);

// Von Neumann entropy in bits.
//
// # Safety
// `state` must be a live handle and `out` a writable double.
enum CohStatus coh_state_entropy(const struct CohState *state,
                                 double *out);

// Releases a state. Null is ignored.
//
// # Safety
// `state` must be null or a handle not yet freed.
void coh_state_free(struct CohState *state);

// Channel from `dim_in * dim_in` blocks of `dim_out x dim_out` entries,
// block `(k, l)` at offset `2 * (k * dim_in + l) * dim_out * dim_out`.
// Only shapes are checked; audit with [`coh_channel_check`].
//
// # Safety
// `blocks` must point to `2 * dim_in^2 * dim_out^2` readable doubles and
// `out` to a writable handle pointer.
enum CohStatus coh_channel_from_blocks(uintptr_t dim_in,
                                       uintptr_t dim_out,
                                       const double *blocks,
                                       struct CohChannel **out);

// Parses the text channel format. On a parse error `*error_line` (if not
// null) receives the 1-based line number.
//
// # Safety
// `text` must be a NUL-terminated string, `out` a writable handle pointer
// and `error_line` null or writable.
enum CohStatus coh_channel_parse(const char *text,
                                 struct CohChannel **out,
                                 uintptr_t *error_line);

// Driven two-level atom with pure dephasing rate `gamma` and Rabi frequency `omega`.
//
// # Safety
// `out` must point to a writable handle pointer.
enum CohStatus coh_channel_dephasing(double gamma,
                                     double omega,
                                     double t,
                                     struct CohChannel **out);

// Stark-coupled hydrogen channel with `x = sin(omega_s t)`.
//
// # Safety
// `out` must point to a writable handle pointer.
enum CohStatus coh_channel_hydrogen(double x,
                                    struct CohChannel **out);

// Exchange-coupled atoms at precession angle `theta`, atom 2 in the pure
// state with ground population `rho11`.
//
// # Safety
// `out` must point to a writable handle pointer.
enum CohStatus coh_channel_coupled_exchange(double theta,
                                            double rho11,
                                            struct CohChannel **out);

// Full measurement in the orthonormal basis given by the columns of a
// `dim x dim` interleaved matrix.
//
// # Safety
// `basis` must point to `2 * dim * dim` readable doubles and `out` to a
// writable handle pointer.
enum CohStatus coh_channel_direct_measurement(uintptr_t dim,
                                              const double *basis,
                                              struct CohChannel **out);

// Coherent duplication in the basis given by the columns of `basis`.
//
// # Safety
// As [`coh_channel_direct_measurement`].
enum CohStatus coh_channel_duplication(uintptr_t dim,
                                       const double *basis,
                                       struct CohChannel **out);

// Atom decaying into the vacuum field after dimensionless time `gamma_t`.
//
// # Safety
// `out` must point to a writable handle pointer.
enum CohStatus coh_channel_atom_field(double gamma_t,
                                      struct CohChannel **out);

// Atom 1 to atom 2 through the shared field at distance `phi = k0 R`.
// `dipole_shift = false` switches the dipole-dipole shift off.
//
// # Safety
// `out` must point to a writable handle pointer.
enum CohStatus coh_channel_two_atoms(double phi,
                                     double gamma_t,
                                     bool dipole_shift,
                                     struct CohChannel **out);

// Input and output dimensions; either pointer may be null.
//
// # Safety
// `ch` must be a live handle; non-null outputs must be writable.
enum CohStatus coh_channel_dims(const struct CohChannel *ch,
                                uintptr_t *dim_in,
                                uintptr_t *dim_out);

// Complete-positivity and trace-preservation audit at tolerance `tol`.
//
// # Safety
// `ch` must be a live handle and `out` writable.
enum CohStatus coh_channel_check(const struct CohChannel *ch,
                                 double tol,
                                 struct CohCpTpReport *out);

// Output state of `ch` for input `state`.
//
// # Safety
// `ch` and `state` must be live handles and `out` a writable handle pointer.
enum CohStatus coh_channel_apply(const struct CohChannel *ch,
                                 const struct CohState *state,
                                 struct CohState **out);

// Coherent information of `ch` for input `state`.
//
// # Safety
// `ch` and `state` must be live handles and `out` writable.
enum CohStatus coh_coherent_information(const struct CohChannel *ch,
                                        const struct CohState *state,
                                        struct CohReport *out);

// Releases a channel. Null is ignored.
//
// # Safety
// `ch` must be null or a handle not yet freed.
void coh_channel_free(struct CohChannel *ch);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COHINFO_H */
