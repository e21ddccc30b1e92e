#ifndef DLCZ_H
#define DLCZ_H

/* C interface to the photon-pair retrieval simulator.
 *
 * Conventions:
 *  - Every fallible call returns an int status code (DLCZ_OK on success) and
 *    never throws or leaks exceptions across this boundary.
 *  - On failure, dlcz_last_error() returns a thread-local message describing
 *    the most recent failure on the calling thread.
 *  - Strings returned through char** parameters are heap-allocated; release
 *    them with dlcz_string_free(). Handles are opaque; release them with
 *    their matching *_free() function. All *_free functions accept NULL.
 *  - Scalar accessors on valid handles cannot fail; out-of-range indexed
 *    accessors return NaN.
 */

#ifdef __cplusplus
extern "C" {
#endif

#define DLCZ_OK 0
#define DLCZ_ERR_INVALID_INPUT 1
#define DLCZ_ERR_NONCONVERGENCE 2
#define DLCZ_ERR_PARTIAL_SCAN 3
#define DLCZ_ERR_INTERNAL 4

typedef struct dlcz_scenario dlcz_scenario;
typedef struct dlcz_solver dlcz_solver;
typedef struct dlcz_waveform dlcz_waveform;

/* Library version string (static storage; do not free). */
const char* dlcz_version(void);
/* Message for the most recent failure on this thread (static storage). */
const char* dlcz_last_error(void);
void dlcz_string_free(char* s);

/* ----- scenarios ----- */

/* Parse a scenario document (JSON text with explicit units). */
int dlcz_scenario_from_json(const char* json_text, dlcz_scenario** out);
/* Instantiate a bundled reference scenario by id. */
int dlcz_scenario_from_preset(const char* preset_id, dlcz_scenario** out);
void dlcz_scenario_free(dlcz_scenario* s);

/* Canonical serialized form; reparsing it reproduces the scenario exactly. */
int dlcz_scenario_canonical_json(const dlcz_scenario* s, char** out_json);
/* 16-hex-digit digest of the canonical form; out_hash must hold >= 17 bytes. */
int dlcz_scenario_hash(const dlcz_scenario* s, char* out_hash);
/* Physical-regime validation report: JSON array of warnings, each with name,
 * measured value, threshold, severity ("soft"/"hard"), and message. */
int dlcz_scenario_warnings_json(const dlcz_scenario* s, char** out_json);

/* JSON array of bundled preset ids. */
int dlcz_preset_ids_json(char** out_json);
/* The bundled preset document itself (identical to the in-repo copy). */
int dlcz_preset_json(const char* preset_id, char** out_json);

/* ----- retrieval solver ----- */

int dlcz_solver_create(const dlcz_scenario* s, dlcz_solver** out);
void dlcz_solver_free(dlcz_solver* s);

/* Conditional read-photon flux waveform plus efficiency metadata. */
int dlcz_solver_waveform(dlcz_solver* s, dlcz_waveform** out);
void dlcz_waveform_free(dlcz_waveform* w);

int dlcz_waveform_size(const dlcz_waveform* w);
double dlcz_waveform_time(const dlcz_waveform* w, int i);
double dlcz_waveform_flux(const dlcz_waveform* w, int i);
/* Fiber-coupled conditional retrieval efficiency. */
double dlcz_waveform_efficiency(const dlcz_waveform* w);
/* The same before fiber coupling (intrinsic). */
double dlcz_waveform_efficiency_raw(const dlcz_waveform* w);
/* Write-photon emission probability per attempt. */
double dlcz_waveform_write_probability(const dlcz_waveform* w);
/* Relative disagreement between the two efficiency quadrature routes. */
double dlcz_waveform_quad_error(const dlcz_waveform* w);

/* CSV curve ("time_s,flux_per_s") and JSON summary for a computed waveform.
 * The summary needs the scenario the waveform came from (for provenance). */
int dlcz_waveform_csv(const dlcz_waveform* w, char** out_csv);
int dlcz_waveform_summary_json(const dlcz_waveform* w, const dlcz_scenario* s,
                               char** out_json);

/* Full width at half maximum of a sampled curve (t strictly increasing).
 * out_multi_peak (optional) is set to 1 when several half-max lobes exist. */
int dlcz_fwhm(const double* t, const double* y, int n, double* out_fwhm_s,
              int* out_multi_peak);

/* ----- scans and figure runs -----
 * Each emits a CSV curve and a JSON report. Scans record per-point failures
 * and keep going; if any point failed the call still produces output but
 * returns DLCZ_ERR_PARTIAL_SCAN. */

/* One point per read-pulse intensity FWHM (seconds). With reoptimize_power
 * nonzero, the read power is re-optimized at every point; otherwise it is
 * rescaled to hold the base scenario's sweep depth. */
int dlcz_scan_duration(const dlcz_scenario* s, const double* fwhms_s, int n,
                       int reoptimize_power, char** out_csv, char** out_json);

/* One point per write-peak-to-read-peak delay (seconds). */
int dlcz_scan_delay(const dlcz_scenario* s, const double* delays_s, int n,
                    char** out_csv, char** out_json);

/* Coarse log-spaced power scan plus golden-section refinement over barred
 * peak Rabi frequencies [peak_lo_bar, peak_hi_bar] (rad/s). Pass 0 for
 * either bound to derive it from the read pulse (sweep depths 0.01 and 12). */
int dlcz_scan_power(const dlcz_scenario* s, double peak_lo_bar,
                    double peak_hi_bar, char** out_csv, char** out_json);

/* Run a bundled figure-style benchmark: fig2, fig3, fig5-rexp, fig5-timebin,
 * figS1, figS2. out_all_bands_pass (optional) reports whether every
 * acceptance band in the summary passed. */
int dlcz_reproduce_figure(const char* figure_id, char** out_csv,
                          char** out_json, int* out_all_bands_pass);

/* ----- photon-counting statistics -----
 * config_json describes a counting experiment:
 *   {
 *     "preset": "figS1" | "scenario": {...},   // optional parameter source
 *     "pair_probability": 0.01,   // required unless a scenario is given
 *     "modes": 1, "n_max": -1,
 *     "eta_write": 0.086, "eta_read1": 0.086, "eta_read2": 0.086,
 *     "split_ratio": 0.5,
 *     "dark_rate_hz": 130.0, "gate_width_s": 3e-8,
 *     "scan": {"parameter": "gate_width_s", "values": [...]}
 *   }
 * Detection defaults come from the scenario when one is given. The CSV holds
 * one row per scan value (or the single base point). */
int dlcz_g2(const char* config_json, char** out_csv, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* DLCZ_H */
