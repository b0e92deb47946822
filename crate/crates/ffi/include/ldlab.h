#ifndef LDLAB_H
#define LDLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum LdStatus {
  LD_STATUS_OK = 0,
  LD_STATUS_NULL_POINTER = 1,
  LD_STATUS_INVALID_ARGUMENT = 2,
  LD_STATUS_INFEASIBLE = 3,
  LD_STATUS_DEGENERATE = 4,
  LD_STATUS_CONVERGENCE = 5,
  LD_STATUS_BUFFER_TOO_SMALL = 6,
  LD_STATUS_PANIC = 7,
} LdStatus;

/*
 Opaque finite probability measure on [0, 1].
 */
typedef struct LdMeasure LdMeasure;

/*
 Opaque partition of [0, 1] by interior cut points.
 */
typedef struct LdPartition LdPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *ld_last_error_message(void);

/*
 Creates a measure from `len` strictly increasing support points in
 [0, 1] and masses summing to one.

 # Safety
 `support` and `mass` must point to `len` readable doubles; `out_measure`
 must be writable.
 */
enum LdStatus ld_measure_new(const double *support,
                             const double *mass,
                             size_t len,
                             struct LdMeasure **out_measure);

/*
 Creates the `n`-point midpoint grid with equal masses.

 # Safety
 `out_measure` must be writable.
 */
enum LdStatus ld_measure_uniform_grid(size_t n, struct LdMeasure **out_measure);

/*
 Releases a measure; NULL is ignored.

 # Safety
 `m` must come from an `ld_measure_*` constructor and not be used again.
 */
void ld_measure_free(struct LdMeasure *m);

/*
 Number of atoms, or 0 for NULL.

 # Safety
 `m` must be NULL or a live handle.
 */
size_t ld_measure_len(const struct LdMeasure *m);

/*
 Mean of the measure.

 # Safety
 `m` must be a live handle and `out_value` writable.
 */
enum LdStatus ld_measure_mean(const struct LdMeasure *m, double *out_value);

/*
 Creates a partition from `len` increasing interior cut points.

 # Safety
 `cuts` must point to `len` doubles; `out_partition` must be writable.
 */
enum LdStatus ld_partition_new(const double *cuts, size_t len, struct LdPartition **out_partition);

/*
 Releases a partition; NULL is ignored.

 # Safety
 `p` must come from [`ld_partition_new`] and not be used again.
 */
void ld_partition_free(struct LdPartition *p);

/*
 Writes the cell probabilities of `m` on `p` into `out_cells`, which has
 room for `capacity` doubles. `out_len` receives the number of cells,
 also when the buffer is too small.

 # Safety
 Handles must be live; `out_cells` must hold `capacity` doubles.
 */
enum LdStatus ld_project(const struct LdMeasure *m,
                         const struct LdPartition *p,
                         double *out_cells,
                         size_t capacity,
                         size_t *out_len);

/*
 Relative entropy `H(a|b)`; may be `+inf`.

 # Safety
 Handles must be live and `out_value` writable.
 */
enum LdStatus ld_kl(const struct LdMeasure *a, const struct LdMeasure *b, double *out_value);

/*
 J-divergence `-2 log Σ √(a b)`; may be `+inf`.

 # Safety
 Handles must be live and `out_value` writable.
 */
enum LdStatus ld_j_divergence(const struct LdMeasure *a,
                              const struct LdMeasure *b,
                              double *out_value);

/*
 Total variation as the L1 distance `Σ |a - b|`.

 # Safety
 Handles must be live and `out_value` writable.
 */
enum LdStatus ld_tv_distance(const struct LdMeasure *a,
                             const struct LdMeasure *b,
                             double *out_value);

/*
 `F(λ) = e^λ/(e^λ - 1) - 1/λ`.
 */
double ld_big_f(double lambda);

/*
 Inverse of [`ld_big_f`] on (0, 1).

 # Safety
 `out_value` must be writable.
 */
enum LdStatus ld_big_f_inv(double u, double *out_value);

/*
 Closed-form rate `I1(u)` for the uniform base; `+inf` outside (0, 1).
 */
double ld_rate_i1(double u);

/*
 Forward rate `inf { H(μ|base) : mean μ = u }`; `+inf` outside the hull.

 # Safety
 `base` must be live and `out_value` writable.
 */
enum LdStatus ld_rate_i3(double u, const struct LdMeasure *base, double *out_value);

/*
 Reverse projection `μ = base/(λ1 + λ2 x)` minimizing `H(base|μ)` at
 mean `u`. Any of the out-pointers may be NULL.

 # Safety
 `base` must be live; non-NULL out-pointers must be writable.
 */
enum LdStatus ld_reverse_projection(const struct LdMeasure *base,
                                    double u,
                                    double *out_lambda1,
                                    double *out_lambda2,
                                    double *out_value);

/*
 Exact probability that the first cell of the projected flat-Dirichlet
 weighted measure lies within `delta/2` of `target_q`.

 # Safety
 `out_value` must be writable.
 */
enum LdStatus ld_exact_ball_probability_binary(double base_p,
                                               double target_q,
                                               double delta,
                                               size_t n,
                                               double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LDLAB_H */
