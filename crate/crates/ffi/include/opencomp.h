#ifndef OPENCOMP_H
#define OPENCOMP_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OcStatus {
  OC_STATUS_OK = 0,
  OC_STATUS_NULL_POINTER = 1,
  OC_STATUS_INVALID_ARGUMENT = 2,
  OC_STATUS_CONFIG = 3,
  OC_STATUS_PARSE = 4,
  OC_STATUS_CAPACITY = 5,
  OC_STATUS_NOT_AN_ELEMENT = 6,
  OC_STATUS_BUFFER_TOO_SMALL = 7,
  OC_STATUS_PANIC = 8,
} OcStatus;

/**
 * Opaque fixed-point lattice.
 */
typedef struct OcLattice OcLattice;

/**
 * Opaque binary relation.
 */
typedef struct OcRelation OcRelation;

/**
 * Opaque simulation state.
 */
typedef struct OcSim OcSim;

/**
 * Simulation constants. A zero `noise_rate` and zero `noise_onset_step`
 * give constant noise `noise_p0`; anything else selects the ramp.
 */
typedef struct OcSimParams {
  size_t n_molecules;
  double theta_c;
  double theta_dec;
  double noise_p0;
  double noise_rate;
  uint64_t noise_onset_step;
  double theta_a;
  double p_coh;
  bool interplay_enabled;
  /**
   * Pool every cluster of the modal size (true) or use the first one.
   */
  bool pooled_ratio;
  uint64_t max_steps;
  uint64_t seed;
} OcSimParams;

typedef struct OcStepReport {
  uint64_t t;
  size_t cluster_count;
  size_t active_count;
  double noise_p;
} OcStepReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * NUL-terminated) and returns its full length.
 */
size_t oc_last_error(char *buf, size_t cap);

/**
 * Static description of a status code.
 */
const char *oc_status_message(enum OcStatus status);

const char *oc_version(void);

enum OcStatus oc_sim_params_default(struct OcSimParams *params_out);

enum OcStatus oc_sim_new(const struct OcSimParams *params, struct OcSim **sim_out);

void oc_sim_free(struct OcSim *sim);

/**
 * Advances one step. `report_out` may be null.
 */
enum OcStatus oc_sim_step(struct OcSim *sim, struct OcStepReport *report_out);

/**
 * Advances `n_steps` steps, writing per-step counts into the arrays of
 * length `n_steps`. Either array may be null.
 */
enum OcStatus oc_sim_run(struct OcSim *sim,
                         size_t n_steps,
                         size_t *cluster_counts_out,
                         size_t *active_counts_out);

enum OcStatus oc_sim_counts(const struct OcSim *sim,
                            size_t *cluster_count_out,
                            size_t *active_count_out);

/**
 * Number of consistency violations in the current state (0 when sound).
 */
enum OcStatus oc_sim_audit(const struct OcSim *sim, size_t *violations_out);

/**
 * Parses a NUL-terminated relation text of `0`/`1` rows.
 */
enum OcStatus oc_relation_parse(const char *text, struct OcRelation **relation_out);

/**
 * Block-diagonal relation; see the generator documentation of the core crate.
 */
enum OcStatus oc_relation_generate(const size_t *block_sizes,
                                   size_t n_blocks,
                                   const size_t *overlap,
                                   size_t n_overlap,
                                   bool fill_off_blocks,
                                   struct OcRelation **relation_out);

void oc_relation_free(struct OcRelation *relation);

enum OcStatus oc_relation_dims(const struct OcRelation *relation,
                               size_t *rows_out,
                               size_t *cols_out);

/**
 * Columns related to any row in `rows`.
 */
enum OcStatus oc_relation_upper(const struct OcRelation *relation,
                                uint64_t rows,
                                uint64_t *cols_out);

/**
 * Rows whose related columns all lie in `cols`.
 */
enum OcStatus oc_relation_lower(const struct OcRelation *relation,
                                uint64_t cols,
                                uint64_t *rows_out);

enum OcStatus oc_relation_closure(const struct OcRelation *relation,
                                  uint64_t rows,
                                  uint64_t *rows_out);

/**
 * Enumerates every fixed point of the closure (at most 20 rows).
 */
enum OcStatus oc_lattice_enumerate(const struct OcRelation *relation,
                                   struct OcLattice **lattice_out);

void oc_lattice_free(struct OcLattice *lattice);

enum OcStatus oc_lattice_len(const struct OcLattice *lattice, size_t *len_out);

/**
 * Writes the element masks in increasing order. `len_out` always receives
 * the element count; a short buffer yields `BUFFER_TOO_SMALL`.
 */
enum OcStatus oc_lattice_elements(const struct OcLattice *lattice,
                                  uint64_t *masks_out,
                                  size_t cap,
                                  size_t *len_out);

enum OcStatus oc_lattice_meet(const struct OcLattice *lattice,
                              uint64_t x,
                              uint64_t y,
                              uint64_t *meet_out);

enum OcStatus oc_lattice_join(const struct OcLattice *lattice,
                              uint64_t x,
                              uint64_t y,
                              uint64_t *join_out);

/**
 * Law report as JSON (keys `distributive`, `witness`, `blocks`, `shared`,
 * `orthomodular`, ...). Call with a null buffer to learn the length.
 */
enum OcStatus oc_lattice_laws_json(const struct OcLattice *lattice,
                                   char *buf,
                                   size_t cap,
                                   size_t *len_out);

/**
 * Hasse diagram in Graphviz DOT. Call with a null buffer to learn the length.
 */
enum OcStatus oc_lattice_dot(const struct OcLattice *lattice,
                             char *buf,
                             size_t cap,
                             size_t *len_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPENCOMP_H */
