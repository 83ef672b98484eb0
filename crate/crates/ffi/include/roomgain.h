#ifndef ROOMGAIN_H
#define ROOMGAIN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum RgStatus {
  RG_STATUS_OK = 0,
  // Null pointer, bad UTF-8, or an out-of-range argument.
  RG_STATUS_INVALID_ARGUMENT = 1,
  // Malformed layout document or job request.
  RG_STATUS_SCHEMA = 2,
  // Well-formed layout that fails geometric validation.
  RG_STATUS_INVALID_LAYOUT = 3,
  // Radio parameters out of range.
  RG_STATUS_INVALID_PARAMETERS = 4,
  // No preset or fixture of that name.
  RG_STATUS_UNKNOWN_PRESET = 5,
  // The walls leave some direction from the probe open.
  RG_STATUS_NOT_ENCLOSED = 6,
  // The probe is closer to a wall than the margin allows.
  RG_STATUS_PROBE_TOO_CLOSE = 7,
  // A closed-form evaluation failed.
  RG_STATUS_NUMERICAL = 8,
  RG_STATUS_INTERNAL = 9,
  RG_STATUS_PANIC = 10,
} RgStatus;

// Opaque evaluated heatmap.
typedef struct RgGrid RgGrid;

// Opaque validated floor plan.
typedef struct RgLayout RgLayout;

// Opaque validated radio parameters.
typedef struct RgParams RgParams;

typedef struct RgRadii {
  double r_o;
  double r_l;
  double r_n;
} RgRadii;

// Powers [W] and figures of merit (linear) at one probe point.
typedef struct RgPointResult {
  double p_o;
  double i_o;
  double p_l;
  double i_l;
  double p_n;
  double i_n;
  double g_i;
  double g_p;
  double gamma_o;
  double gamma_b;
} RgPointResult;

typedef struct RgGridInfo {
  double origin_x;
  double origin_y;
  double cell;
  size_t nx;
  size_t ny;
  size_t valid_cells;
} RgGridInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a
// successful call. Valid until the next `rg_*` call on the same thread.
const char *rg_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *rg_version(void);

// Parses a JSON layout document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum RgStatus rg_layout_from_json(const char *json, struct RgLayout **out);

// Loads a shipped layout (`rect-5x10`, `l-shape`, `office-a1`).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a writable pointer.
enum RgStatus rg_layout_from_fixture(const char *name, struct RgLayout **out);

// Number of walls, or 0 for a null handle.
//
// # Safety
// `layout` must be null or a live handle.
size_t rg_layout_wall_count(const struct RgLayout *layout);

// # Safety
// `layout` must be null or a handle not yet freed.
void rg_layout_free(struct RgLayout *layout);

// Parameters from a named preset (built in, or `<name>.toml` in the
// directory named by `ROOMGAIN_PRESET_DIR`).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a writable pointer.
enum RgStatus rg_params_from_preset(const char *name, struct RgParams **out);

// Parameters in preset units: Hz, dBW/m², dBW (`-INFINITY` for no noise), m.
//
// # Safety
// `out` must be a writable pointer.
enum RgStatus rg_params_new(double f_c_hz,
                            double p_t_dbw_m2,
                            double p_th_dbw_m2,
                            double sigma2_dbw,
                            double h_t_m,
                            double h_r_m,
                            double n_l,
                            double n_n,
                            struct RgParams **out);

// # Safety
// `params` must be null or a handle not yet freed.
void rg_params_free(struct RgParams *params);

// Coverage radii [m].
//
// # Safety
// `params` must be a live handle and `out` a writable pointer.
enum RgStatus rg_params_radii(const struct RgParams *params, struct RgRadii *out);

// Powers and figures of merit at `(x, y)`.
//
// # Safety
// `layout` and `params` must be live handles and `out` a writable pointer.
enum RgStatus rg_evaluate_point(const struct RgLayout *layout,
                                const struct RgParams *params,
                                double x,
                                double y,
                                double margin,
                                struct RgPointResult *out);

// Evaluates every cell centre over the layout's bounding box.
//
// # Safety
// `layout` and `params` must be live handles and `out` a writable pointer.
enum RgStatus rg_grid_evaluate(const struct RgLayout *layout,
                               const struct RgParams *params,
                               double resolution,
                               double margin,
                               struct RgGrid **out);

// # Safety
// `grid` must be a live handle and `out` a writable pointer.
enum RgStatus rg_grid_info(const struct RgGrid *grid, struct RgGridInfo *out);

// Linear `g_I` and `g_P` of cell `(ix, iy)`. Cells that could not be
// evaluated return `RG_STATUS_NOT_ENCLOSED` and write NaN.
//
// # Safety
// `grid` must be a live handle; `g_i` and `g_p` writable pointers.
enum RgStatus rg_grid_cell(const struct RgGrid *grid,
                           size_t ix,
                           size_t iy,
                           double *g_i,
                           double *g_p);

// # Safety
// `grid` must be null or a handle not yet freed.
void rg_grid_free(struct RgGrid *grid);

// Runs a JSON job request (the HTTP API's request body) and writes the JSON
// response to `*response`. On failure `*response` holds the JSON error
// body instead. Release it with [`rg_string_free`].
//
// # Safety
// `request` must be a NUL-terminated string and `response` a writable pointer.
enum RgStatus rg_run_job(const char *request, char **response);

// Frees a string returned by this library.
//
// # Safety
// `s` must be null or a string from [`rg_run_job`] not yet freed.
void rg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROOMGAIN_H */
