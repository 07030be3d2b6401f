#ifndef CANOPY_H
#define CANOPY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum CanopyStatus {
  CANOPY_STATUS_OK = 0,
  CANOPY_STATUS_NULL_POINTER = 1,
  CANOPY_STATUS_INVALID_ARGUMENT = 2,
  CANOPY_STATUS_UNKNOWN_MODEL = 3,
  /**
   * The data cannot identify the requested parameters.
   */
  CANOPY_STATUS_DEGENERATE_FIT = 4,
  /**
   * Empty or constant samples.
   */
  CANOPY_STATUS_DEGENERATE_STATS = 5,
  CANOPY_STATUS_NO_FINITE_RANGE = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  CANOPY_STATUS_INTERNAL = 7,
} CanopyStatus;

/**
 * Radio range definitions with a closed form.
 */
typedef enum CanopyRange {
  /**
   * Mean path loss at `budget - sensitivity`.
   */
  CANOPY_RANGE_LINK_BUDGET = 0,
  /**
   * Mean path loss at the receiver's decoding boundary.
   */
  CANOPY_RANGE_MEAN_THRESHOLD = 1,
} CanopyRange;

/**
 * A fitted fading distribution.
 */
typedef struct CanopyFadingFit CanopyFadingFit;

/**
 * A log-distance path-loss model.
 */
typedef struct CanopyModel CanopyModel;

/**
 * Link-budget terms and receiver thresholds.
 */
typedef struct CanopyRadio CanopyRadio;

/**
 * Fade-depth statistics in dB, positive values being fades.
 */
typedef struct CanopyFadeDepth {
  double level_50_db;
  double level_99_db;
  double fade_depth_db;
  double max_fade_db;
  size_t sample_count;
  /**
   * Whether enough samples back the 99% level.
   */
  bool reliable;
} CanopyFadeDepth;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *canopy_last_error(void);

/**
 * Number of models in the bundled registry.
 */
size_t canopy_builtin_model_count(void);

/**
 * Looks up a bundled model by name, for example `"mediterranean-forest"`.
 */
enum CanopyStatus canopy_model_builtin(const char *name, struct CanopyModel **model);

enum CanopyStatus canopy_model_new(double pl_intercept_db,
                                   double gamma,
                                   double eta_db_per_m,
                                   double sigma_sf_db,
                                   struct CanopyModel **model);

/**
 * Reads back the four model parameters; any out-pointer may be null.
 */
enum CanopyStatus canopy_model_params(const struct CanopyModel *model,
                                      double *pl_intercept_db,
                                      double *gamma,
                                      double *eta_db_per_m,
                                      double *sigma_sf_db);

void canopy_model_free(struct CanopyModel *model);

/**
 * Mean path loss in dB at slant range `d3d_m` and flying height `h_m`.
 */
enum CanopyStatus canopy_mean_path_loss(const struct CanopyModel *model,
                                        double d3d_m,
                                        double h_m,
                                        double *pl_db);

/**
 * Path-loss correction for RSSI and SNR shifts, dB.
 */
double canopy_corrective_factor(double delta_rssi_db, double snr_db, double delta_snr_db);

enum CanopyStatus canopy_radio_default(struct CanopyRadio **radio);

enum CanopyStatus canopy_radio_new(double p_tx_dbm,
                                   double g_tx_dbi,
                                   double g_rx_dbi,
                                   double chi_db,
                                   double sensitivity_dbm,
                                   double snr_floor_db,
                                   double noise_floor_dbm,
                                   struct CanopyRadio **radio);

void canopy_radio_free(struct CanopyRadio *radio);

/**
 * Instantaneous path loss implied by a logged RSSI/SNR pair.
 */
enum CanopyStatus canopy_experimental_pl(const struct CanopyRadio *radio,
                                         double rssi_dbm,
                                         double snr_db,
                                         double *pl_db);

/**
 * Polarization loss factor in [0, 1] between two complex unit vectors, each
 * given as six doubles `re_x, im_x, re_y, im_y, re_z, im_z`.
 */
enum CanopyStatus canopy_polarization_loss(const double *tx, const double *rx, double *plf);

/**
 * Largest sample guaranteed in at least a fraction `level` of `samples`.
 */
enum CanopyStatus canopy_ccdf_guaranteed_value(const double *samples,
                                               size_t n,
                                               double level,
                                               double *value);

/**
 * Moving-window split of `pl_db` into large- and small-scale parts, written
 * to the caller's arrays of length `n`.
 */
enum CanopyStatus canopy_separate_small_scale(const double *d3d_m,
                                              const double *h_m,
                                              const double *pl_db,
                                              size_t n,
                                              double wavelength_m,
                                              double *large_scale_db,
                                              double *small_scale_db);

/**
 * Least-squares fit of the log-distance model to `n` path-loss values taken
 * as large-scale.
 */
enum CanopyStatus canopy_fit_model(const double *d3d_m,
                                   const double *h_m,
                                   const double *pl_db,
                                   size_t n,
                                   struct CanopyModel **model);

/**
 * Radio range in `d3d` meters at flying height `h_m`.
 */
enum CanopyStatus canopy_radio_range(const struct CanopyModel *model,
                                     const struct CanopyRadio *radio,
                                     double h_m,
                                     enum CanopyRange definition,
                                     double *range_m);

/**
 * Nearest-rank 50% and 99% levels of fade values in dB.
 */
enum CanopyStatus canopy_fade_depth(const double *fades_db,
                                    size_t n,
                                    struct CanopyFadeDepth *report);

/**
 * Maximum-likelihood fit of one family (`"rayleigh"`, `"nakagami"`,
 * `"weibull"`, `"rician"` or `"log-logistic"`) to linear envelope samples.
 */
enum CanopyStatus canopy_fading_fit(const char *family,
                                    const double *envelope,
                                    size_t n,
                                    struct CanopyFadingFit **fit);

/**
 * Fits every family and keeps the highest log-likelihood.
 */
enum CanopyStatus canopy_fading_best_fit(const double *envelope,
                                         size_t n,
                                         struct CanopyFadingFit **fit);

/**
 * Family name of a fit as a static NUL-terminated string; null for a null
 * handle.
 */
const char *canopy_fading_fit_family(const struct CanopyFadingFit *fit);

/**
 * Copies up to `capacity` parameters into `params` and reports the family's
 * parameter count in `count`. Order: rayleigh (sigma), nakagami (mu, omega),
 * weibull (shape, scale), rician (k, omega), log-logistic (scale, shape).
 */
enum CanopyStatus canopy_fading_fit_params(const struct CanopyFadingFit *fit,
                                           double *params,
                                           size_t capacity,
                                           size_t *count);

enum CanopyStatus canopy_fading_fit_log_likelihood(const struct CanopyFadingFit *fit,
                                                   double *log_likelihood);

void canopy_fading_fit_free(struct CanopyFadingFit *fit);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CANOPY_H */
