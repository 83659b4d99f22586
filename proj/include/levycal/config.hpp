#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace levycal {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Every experiment constant has a key; defaults reproduce the consistency
/// test (torus [-pi, pi), T = 1, N = 420, N_T = 250, sigma^2 = 0.02,
/// von Mises(0, 400), five hats on (-1, 1)).
struct RunConfig {
    // grid and time
    double omega_a;
    double omega_b;
    std::size_t n_space = 420;
    double t_final = 1.0;
    std::size_t n_time = 250;
    std::size_t bootstrap_substeps = 10;
    double xi = 2.0;
    bool allow_unstable = false;

    // model
    double drift_b = 0.0;
    double sigma2 = 0.02;
    double vm_mu = 0.0;
    double vm_kappa = 400.0;
    double eps = 1e-12;

    // basis
    std::string basis_layout = "interior";  // interior | tiling
    double basis_lo = -1.0;
    double basis_hi = 1.0;
    std::vector<std::size_t> n_theta_list{3, 4, 5, 6, 7};
    std::string aic_penalty = "log";  // log | classical

    // optimizer
    double alpha0 = 0.1;
    double armijo_delta = 0.1;
    double xi_init = 0.5;
    double shrink = 0.3;
    std::size_t max_shrinks = 30;
    double tol = 1e-5;
    std::size_t k_max = 500;
    std::size_t restart_every = 0;

    // data
    std::string samples_file;
    std::string simulate = "none";  // none | compound_poisson | bigamma
    std::vector<double> sim_rates{3.0, 2.0, 1.0, 0.5, 0.25};
    double gamma_shape = 0.5;
    double gamma_rate = 1.0;
    std::size_t sample_count = 100000;
    std::uint64_t seed = 20150305;
    std::size_t chunk_size = 4096;

    // financial preprocessing of raw samples
    std::string preprocess = "none";  // none | financial
    double band_lo = -0.03;
    double band_hi = 0.03;
    double variance_fraction = 0.25;
    std::string out_of_band = "wrap";  // wrap | discard

    // output
    std::size_t hist_bins = 40;
    std::string output_dir = "levycal_out";

    RunConfig();
};

struct ConfigKey {
    std::string name;
    std::string description;
};

/// Documented keys in file order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key from its textual value; throws ConfigError on unknown keys
/// or malformed values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Parses "key = value" lines; '#' starts a comment.
RunConfig parse_config(std::istream& in, RunConfig base = RunConfig{});
RunConfig load_config(const std::string& path, RunConfig base = RunConfig{});

/// Applies "key=value" overrides.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Checks cross-field constraints; throws ConfigError.
void validate_config(const RunConfig& cfg);

/// Writes every key in file syntax.
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace levycal
