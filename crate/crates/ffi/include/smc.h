#ifndef SMC_H
#define SMC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible function.
typedef enum SmcStatus {
  SMC_STATUS_OK = 0,
  SMC_STATUS_NULL_POINTER = 1,
  SMC_STATUS_INVALID_UTF8 = 2,
  // Malformed model text, word or boundary point.
  SMC_STATUS_PARSE = 3,
  // The mathematics refused: non-transience, missing root, bad arguments.
  SMC_STATUS_DOMAIN = 4,
  // A caller-provided buffer is shorter than required.
  SMC_STATUS_BUFFER_TOO_SMALL = 5,
  // A Rust panic was caught at the boundary.
  SMC_STATUS_INTERNAL = 6,
} SmcStatus;

// Opaque model handle.
typedef struct SmcModel SmcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *smc_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a pointer obtained from this library, freed once.
void smc_string_free(char *s);

// Loads a built-in model by name (`eg1` .. `eg5`, `test-harmonic`).
//
// # Safety
// `name` must be a nul-terminated string and `out` writable.
enum SmcStatus smc_model_preset(const char *name, struct SmcModel **out);

// Parses a model from config text.
//
// # Safety
// `config` must be a nul-terminated string and `out` writable.
enum SmcStatus smc_model_parse(const char *config, struct SmcModel **out);

// Destroys a model. Null is ignored.
//
// # Safety
// `model` must be null or a live handle from this library, freed once.
void smc_model_free(struct SmcModel *model);

// Number of letters in the model alphabet, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t smc_model_alphabet_len(const struct SmcModel *model);

// One-step transition probability `P(w, v)` as an exact string.
//
// # Safety
// Pointers must be valid; free `*out` with [`smc_string_free`].
enum SmcStatus smc_transition_prob(const struct SmcModel *model,
                                   const char *w,
                                   const char *v,
                                   char **out);

// Green's function `G(x, y)` as an exact string.
//
// # Safety
// Pointers must be valid; free `*out` with [`smc_string_free`].
enum SmcStatus smc_green(const struct SmcModel *model, const char *x, const char *y, char **out);

// Martin kernel `K(z, x)` relative to the model root, as an exact string.
//
// # Safety
// Pointers must be valid; free `*out` with [`smc_string_free`].
enum SmcStatus smc_kernel(const struct SmcModel *model, const char *z, const char *x, char **out);

// Martin metric between two words with the default weights, as an exact string.
//
// # Safety
// Pointers must be valid; free `*out` with [`smc_string_free`].
enum SmcStatus smc_theta(const struct SmcModel *model, const char *x, const char *y, char **out);

// Perron eigenvalue and normalized letter frequencies. `freqs` must hold
// `len >= smc_model_alphabet_len(model)` doubles.
//
// # Safety
// `freqs` must point to `len` writable doubles and `eigenvalue` be writable.
enum SmcStatus smc_frequencies(const struct SmcModel *model,
                               double *eigenvalue,
                               double *freqs,
                               size_t len);

// Boundary metric of the b/c example between points written `lambda,L,R`.
//
// # Safety
// Strings must be nul-terminated and `out` writable.
enum SmcStatus smc_eg3_rho(const char *xi, const char *eta, double *out);

// Euclidean image `(lambda, y, z)` of a boundary point, written to `out[0..3]`.
//
// # Safety
// `out` must point to three writable doubles.
enum SmcStatus smc_eg3_psi(const char *xi, size_t terms, double *out);

// Deterministic random point cloud as CSV text.
//
// # Safety
// `out` must be writable; free `*out` with [`smc_string_free`].
enum SmcStatus smc_eg3_cloud(size_t samples, size_t terms, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMC_H */
