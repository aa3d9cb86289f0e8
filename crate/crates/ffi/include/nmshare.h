#ifndef NMSHARE_H
#define NMSHARE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum NmsStatus {
  NMS_STATUS_OK = 0,
  NMS_STATUS_NULL_POINTER = 1,
  NMS_STATUS_INVALID_ARGUMENT = 2,
  NMS_STATUS_NOT_PRIME = 3,
  NMS_STATUS_OUT_OF_RANGE = 4,
  NMS_STATUS_INVALID_FAMILY = 5,
  NMS_STATUS_PARSE = 6,
  NMS_STATUS_DOMAIN = 7,
  NMS_STATUS_BUFFER_TOO_SMALL = 8,
  NMS_STATUS_PANIC = 9,
} NmsStatus;

typedef enum NmsGame {
  NMS_GAME_WEAK = 0,
  NMS_GAME_STRONG = 1,
  NMS_GAME_CIRCULAR_WEAK = 2,
  NMS_GAME_CIRCULAR_STRONG = 3,
} NmsGame;

/**
 * An ordered family of disjoint equal-size subsets of `Z_n`.
 */
typedef struct NmsFamily NmsFamily;

/**
 * A threshold scheme, plain or AMD-composed.
 */
typedef struct NmsScheme NmsScheme;

/**
 * Outcome of a difference-family check. `lambda` is 0 when `valid` is false.
 */
typedef struct NmsReport {
  bool valid;
  uint64_t lambda;
} NmsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message, NUL-terminated, into `buf`.
 * Returns the size needed including the NUL; nothing is written if `cap` is smaller.
 */
size_t nms_last_error(char *buf, size_t cap);

/**
 * Builds a family of `m` sets of size `l` from `elements`, row-major (`m * l` values).
 */
enum NmsStatus nms_family_new(uint64_t n,
                              const uint64_t *elements,
                              size_t m,
                              size_t l,
                              struct NmsFamily **family);

/**
 * Parses `{"n": .., "sets": [[..], ..]}`.
 */
enum NmsStatus nms_family_from_json(const char *json, struct NmsFamily **family);

/**
 * Writes the family as JSON. `needed`, if not null, receives the required size.
 */
enum NmsStatus nms_family_to_json(const struct NmsFamily *family,
                                  char *buf,
                                  size_t cap,
                                  size_t *needed);

/**
 * Shape of a family: group order, number of sets, set size.
 */
enum NmsStatus nms_family_shape(const struct NmsFamily *family, uint64_t *n, size_t *m, size_t *l);

void nms_family_free(struct NmsFamily *family);

enum NmsStatus nms_verify_cedf(const struct NmsFamily *family, size_t c, struct NmsReport *result);

enum NmsStatus nms_verify_sedf(const struct NmsFamily *family,
                               const size_t *shifts,
                               size_t count,
                               struct NmsReport *result);

enum NmsStatus nms_verify_scedf(const struct NmsFamily *family, size_t c, struct NmsReport *result);

/**
 * Cyclotomic family for `q = m l^2 + 1` and primitive root `alpha`.
 */
enum NmsStatus nms_cyclotomic_family(uint64_t q,
                                     size_t m,
                                     size_t l,
                                     uint64_t alpha,
                                     struct NmsFamily **family);

/**
 * Exact advantage as a reduced fraction. `c` is ignored for the non-circular games.
 */
enum NmsStatus nms_advantage(const struct NmsFamily *family,
                             enum NmsGame game,
                             size_t c,
                             uint64_t *num,
                             uint64_t *den);

/**
 * Shamir-shares `secret` in `F_p`; writes the `n` ordinates for `x = 1..n` to `ys`.
 */
enum NmsStatus nms_shamir_deal(uint64_t p,
                               size_t k,
                               size_t n,
                               uint64_t secret,
                               uint64_t seed,
                               uint64_t *ys,
                               size_t ys_len);

/**
 * Interpolates the secret from the first `k` of `count` shares.
 */
enum NmsStatus nms_shamir_reconstruct(uint64_t p,
                                      size_t k,
                                      size_t n,
                                      const uint64_t *xs,
                                      const uint64_t *ys,
                                      size_t count,
                                      uint64_t *secret);

enum NmsStatus nms_scheme_plain(uint64_t p, size_t k, size_t n, struct NmsScheme **scheme);

/**
 * Shamir sharing of secrets `0..m` encoded with the AMD code on `family`; shares live
 * in `F_p` with `p` the family's (prime) group order.
 */
enum NmsStatus nms_scheme_composed(const struct NmsFamily *family,
                                   size_t k,
                                   size_t n,
                                   struct NmsScheme **scheme);

void nms_scheme_free(struct NmsScheme *scheme);

/**
 * Number of secrets; valid secrets are `0..count`.
 */
enum NmsStatus nms_scheme_secret_count(const struct NmsScheme *scheme, uint64_t *count);

/**
 * Shares `secret`; writes the `n` ordinates for `x = 1..n` to `ys`.
 */
enum NmsStatus nms_scheme_share(const struct NmsScheme *scheme,
                                uint64_t secret,
                                uint64_t seed,
                                uint64_t *ys,
                                size_t ys_len);

/**
 * Recovers from the first `k` of `count` shares. On detected tampering `detected` is
 * set and `secret` receives the invalid interpolated value.
 */
enum NmsStatus nms_scheme_recover(const struct NmsScheme *scheme,
                                  const uint64_t *xs,
                                  const uint64_t *ys,
                                  size_t count,
                                  uint64_t *secret,
                                  bool *detected);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NMSHARE_H */
