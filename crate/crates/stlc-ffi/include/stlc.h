#ifndef STLC_H
#define STLC_H

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

typedef enum StlcStatus {
  STLC_STATUS_OK = 0,
  STLC_STATUS_NULL_POINTER = 1,
  STLC_STATUS_INVALID_STRING = 2,
  STLC_STATUS_INVALID_INPUT = 3,
  STLC_STATUS_RANK_DEFICIENT = 4,
  STLC_STATUS_SEARCH_TOO_LARGE = 5,
  STLC_STATUS_INTERNAL = 6,
} StlcStatus;

typedef enum StlcFamily {
  STLC_FAMILY_MULTI_GROUP = 0,
  STLC_FAMILY_CONDITIONAL_MULTI_GROUP = 1,
  STLC_FAMILY_FAST_GROUP = 2,
  STLC_FAMILY_BLOCK_ORTHOGONAL = 3,
  STLC_FAMILY_NONE = 4,
} StlcFamily;

/**
 * Opaque weight-matrix basis.
 */
typedef struct StlcBasis StlcBasis;

/**
 * Summary of a decodability profile. bo_g = 0 when no block-orthogonal structure was attached.
 */
typedef struct StlcProfile {
  enum StlcFamily family;
  uintptr_t k;
  uintptr_t k_prime;
  uintptr_t group_count;
  uintptr_t conditioned_count;
  double reduction_pct;
  bool fast_decodable;
  uintptr_t bo_g;
  uintptr_t bo_k;
  uintptr_t bo_p;
} StlcProfile;

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *stlc_last_error(void);

/**
 * Builds a named code ("alamouti", "golden", …). `relays` = 0 keeps the family default.
 *
 * # Safety
 * `family` must be a NUL-terminated string and `out` a valid pointer.
 */
enum StlcStatus stlc_basis_build(const char *family, uintptr_t relays, struct StlcBasis **out);

/**
 * Parses a basis from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum StlcStatus stlc_basis_from_json(const char *json, struct StlcBasis **out);

/**
 * JSON form of a basis; release with `stlc_string_free`. Null on failure.
 *
 * # Safety
 * `basis` must be a handle from this library or null.
 */
char *stlc_basis_to_json(const struct StlcBasis *basis);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void stlc_string_free(char *s);

/**
 * # Safety
 * `basis` must come from this library and not be freed twice.
 */
void stlc_basis_free(struct StlcBasis *basis);

/**
 * Codeword shape n_t × T and rank k.
 *
 * # Safety
 * All pointers must be valid.
 */
enum StlcStatus stlc_basis_shape(const struct StlcBasis *basis,
                                 uintptr_t *nt,
                                 uintptr_t *t,
                                 uintptr_t *k);

/**
 * Copies weight matrix `index` row-major into `re` and `im`, each of length `len` = n_t·T.
 *
 * # Safety
 * `re` and `im` must hold `len` doubles.
 */
enum StlcStatus stlc_basis_matrix(const struct StlcBasis *basis,
                                  uintptr_t index,
                                  double *re,
                                  double *im,
                                  uintptr_t len);

/**
 * Fast-decodability classification with `trials` random channels for the R-matrix pattern.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum StlcStatus stlc_classify(const struct StlcBasis *basis,
                              uintptr_t trials,
                              uint64_t seed,
                              struct StlcProfile *out);

/**
 * Lattice volume sqrt(det G).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum StlcStatus stlc_lattice_volume(const struct StlcBasis *basis, double *out);

/**
 * min |det X|² over nonzero coefficient vectors with entries in [−bound, bound].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum StlcStatus stlc_min_det(const struct StlcBasis *basis, uint32_t bound, double *out);

/**
 * Exact ML decoding of Y = HX + N. H is nr × n_t and Y is nr × T, both row-major
 * split into real and imaginary arrays. Writes k coefficients and the node count.
 *
 * # Safety
 * Array arguments must hold the stated number of elements; `coeffs` holds k values.
 */
enum StlcStatus stlc_sphere_decode(const struct StlcBasis *basis,
                                   uintptr_t nr,
                                   const double *h_re,
                                   const double *h_im,
                                   const double *y_re,
                                   const double *y_im,
                                   const int64_t *alphabet,
                                   uintptr_t alphabet_len,
                                   int64_t *coeffs,
                                   uint64_t *nodes);

#endif  /* STLC_H */
