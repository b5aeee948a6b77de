#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mscbf {

/// Full run description: one experiment, every model and integrator knob,
/// output location and seeding.  Plain key=value text on disk; unknown keys
/// are rejected and values round-trip losslessly through serialize/parse.
struct RunConfig {
    std::string experiment = "exp_monotonicity";

    int k_max = 4;
    int grid = 24;

    double mu = 1.0;
    double beta = 1.0;
    double r = 3.0;
    double epsilon = 0.1;
    double delta = 0.05;
    double zeta_growth = 0.5;

    std::string family = "linear";
    double f_x = 0.0;
    double f_y = 0.0;
    double g_x = 0.0;
    double g_y = 0.0;
    double sigma1_base = 0.0;
    double sigma1_x = 0.0;
    double sigma2_base = 0.0;
    double sigma2_x = 0.0;
    double sigma2_y = 0.0;

    double cov1_scale = 1.0;
    double cov1_exponent = 2.0;
    double cov2_scale = 1.0;
    double cov2_exponent = 2.0;

    double dt = 1e-3;
    double dt_fast = 1e-4;
    std::string scheme = "exp_tamed";  // or semi_implicit
    double taming = 1.0;
    double blowup_threshold = 1e6;

    double ergodic_burn_in = -1.0;
    double ergodic_horizon = 2.0;
    int ergodic_n_rep = 4;
    double ergodic_dt = 1e-3;

    double hmm_cache_tol = 1e-2;
    double hmm_stderr_frac = 1.0;
    double hmm_stderr_floor = 1e-3;
    bool hmm_use_oracle = false;
    bool hmm_log_calls = false;  // dump the realization-0 fbar cost profile

    double t_final = 1.0;
    int n_rep = 200;
    std::uint64_t seed = 12345;
    int workers = 0;
    double x0_scale = 1.0;
    double y0_scale = 0.5;
    std::string out_dir = "out";

    std::vector<double> conv_epsilon_ladder = {0.1, 0.01, 0.001};
    std::vector<int> conv_p_list = {1, 2};
    std::vector<double> holder_delta_ladder = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> aux_delta_ladder = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> moment_epsilon_ladder = {1.0, 0.1, 0.01};
    std::vector<int> moment_p_list = {1};
    std::vector<double> mono_r_list = {3.0, 4.0, 5.0};
    int mono_n_samples = 1000;
    std::vector<double> mixing_x_scales = {0.0, 1.0, 2.0};
    double mixing_horizon = 3.0;
    int mixing_n_rep = 50;
    int record_stride = 10;
};

struct ConfigParse {
    RunConfig config;
    std::vector<std::string> errors;  // every problem, not just the first
    bool ok() const { return errors.empty(); }
};

ConfigParse parse_config_text(const std::string& text);
ConfigParse parse_config_file(const std::string& path);

/// Every key in a fixed order with %.17g doubles; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Semantic validation on top of parsing: coupling admissibility, the (A3)
/// gap, integrator sanity.  Appends to `errors`.
void validate_config(const RunConfig& config, std::vector<std::string>& errors);

/// Runs the configured experiment, writing results.csv, manifest.txt and
/// summary.txt into out_dir.  Returns the process exit status: nonzero iff
/// any summary line is FAIL (or the run could not start).
int run_configured_experiment(const RunConfig& config);

}  // namespace mscbf
