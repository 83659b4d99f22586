#include "levycal/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace levycal {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v)
{
    std::string t = trim(v);
    if (t == "pi")
        return std::numbers::pi;
    if (t == "-pi")
        return -std::numbers::pi;
    try {
        std::size_t pos = 0;
        double d = std::stod(t, &pos);
        if (pos != t.size())
            throw std::invalid_argument(t);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v)
{
    std::string t = trim(v);
    std::uint64_t out = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError("config: key '" + key + "' expects a nonnegative integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes")
        return true;
    if (t == "false" || t == "0" || t == "no")
        return false;
    throw ConfigError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

std::string parse_choice(const std::string& key, const std::string& v,
                         std::initializer_list<const char*> choices)
{
    std::string t = trim(v);
    for (const char* c : choices)
        if (t == c)
            return t;
    std::string msg = "config: key '" + key + "' must be one of";
    for (const char* c : choices)
        msg += std::string(" ") + c;
    throw ConfigError(msg + ", got '" + v + "'");
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse)
{
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty())
            continue;
        out.push_back(static_cast<T>(parse(key, item)));
    }
    return out;
}

// shortest text that reads back to the same double
std::string fmt(double d)
{
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, res.ptr);
}

template <class T>
std::string fmt_list(const std::vector<T>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ',';
        if constexpr (std::is_floating_point_v<T>)
            out += fmt(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

struct Entry {
    ConfigKey key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define LC_DOUBLE(field, doc)                                                                      \
    Entry{{#field, doc},                                                                           \
          [](RunConfig& c, const std::string& v) { c.field = parse_double(#field, v); },           \
          [](const RunConfig& c) { return fmt(c.field); }}
#define LC_UINT(field, doc)                                                                        \
    Entry{{#field, doc},                                                                           \
          [](RunConfig& c, const std::string& v) {                                                 \
              c.field = static_cast<decltype(c.field)>(parse_uint(#field, v));                     \
          },                                                                                       \
          [](const RunConfig& c) { return std::to_string(c.field); }}
#define LC_CHOICE(field, doc, ...)                                                                 \
    Entry{{#field, doc},                                                                           \
          [](RunConfig& c, const std::string& v) { c.field = parse_choice(#field, v, {__VA_ARGS__}); }, \
          [](const RunConfig& c) { return c.field; }}

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> table = {
        LC_DOUBLE(omega_a, "lower edge of the torus (accepts 'pi'/'-pi')"),
        LC_DOUBLE(omega_b, "upper edge of the torus"),
        LC_UINT(n_space, "number of grid cells N"),
        LC_DOUBLE(t_final, "final time T"),
        LC_UINT(n_time, "number of time steps N_T"),
        LC_UINT(bootstrap_substeps, "implicit Euler substeps used for the second starting level"),
        LC_DOUBLE(xi, "xi in (1,3) for the BDF2 step bound"),
        Entry{{"allow_unstable", "run even when dt exceeds the positivity bounds"},
              [](RunConfig& c, const std::string& v) { c.allow_unstable = parse_bool("allow_unstable", v); },
              [](const RunConfig& c) { return std::string(c.allow_unstable ? "true" : "false"); }},
        LC_DOUBLE(drift_b, "drift b of the fitted model"),
        LC_DOUBLE(sigma2, "fixed Gaussian variance rate sigma^2 (> 0)"),
        LC_DOUBLE(vm_mu, "von Mises initial density center"),
        LC_DOUBLE(vm_kappa, "von Mises concentration"),
        LC_DOUBLE(eps, "floor inside the log-likelihood"),
        LC_CHOICE(basis_layout, "interior: centers lo + j(hi-lo)/(n+1); tiling: centers cover the torus",
                  "interior", "tiling"),
        LC_DOUBLE(basis_lo, "interior layout lower end"),
        LC_DOUBLE(basis_hi, "interior layout upper end"),
        Entry{{"n_theta_list", "comma-separated basis sizes to fit"},
              [](RunConfig& c, const std::string& v) {
                  c.n_theta_list = parse_list<std::size_t>("n_theta_list", v, parse_uint);
              },
              [](const RunConfig& c) { return fmt_list(c.n_theta_list); }},
        LC_CHOICE(aic_penalty, "log: L*J - log(N_theta); classical: L*J - N_theta", "log", "classical"),
        LC_DOUBLE(alpha0, "initial value of every rate"),
        LC_DOUBLE(armijo_delta, "Armijo sufficient-decrease constant"),
        LC_DOUBLE(xi_init, "initial line-search step"),
        LC_DOUBLE(shrink, "line-search shrink factor"),
        LC_UINT(max_shrinks, "line-search shrink limit"),
        LC_DOUBLE(tol, "projected gradient tolerance"),
        LC_UINT(k_max, "iteration cap"),
        LC_UINT(restart_every, "steepest-descent restart period (0 = 10*N_theta)"),
        Entry{{"samples_file", "CSV of samples (one per line); used when simulate = none"},
              [](RunConfig& c, const std::string& v) { c.samples_file = trim(v); },
              [](const RunConfig& c) { return c.samples_file; }},
        LC_CHOICE(simulate, "generate samples instead of reading a file", "none", "compound_poisson",
                  "bigamma"),
        Entry{{"sim_rates", "comma-separated hat rates for compound_poisson (interior layout on basis_lo..basis_hi)"},
              [](RunConfig& c, const std::string& v) {
                  c.sim_rates = parse_list<double>("sim_rates", v, parse_double);
              },
              [](const RunConfig& c) { return fmt_list(c.sim_rates); }},
        LC_DOUBLE(gamma_shape, "bi-directional gamma shape A"),
        LC_DOUBLE(gamma_rate, "bi-directional gamma rate beta"),
        LC_UINT(sample_count, "number of simulated samples L"),
        LC_UINT(seed, "top-level RNG seed"),
        LC_UINT(chunk_size, "samples per RNG stream"),
        LC_CHOICE(preprocess, "financial: rescale raw log-returns onto [-pi, pi)", "none", "financial"),
        LC_DOUBLE(band_lo, "raw band lower edge"),
        LC_DOUBLE(band_hi, "raw band upper edge"),
        LC_DOUBLE(variance_fraction, "share of the empirical variance kept as fixed diffusion"),
        LC_CHOICE(out_of_band, "what to do with raw values outside the band", "wrap", "discard"),
        LC_UINT(hist_bins, "bins of the emitted empirical histogram"),
        Entry{{"output_dir", "directory for report.json and the CSV files"},
              [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
              [](const RunConfig& c) { return c.output_dir; }},
    };
    return table;
}

#undef LC_DOUBLE
#undef LC_UINT
#undef LC_CHOICE

const Entry& find_entry(const std::string& key)
{
    for (const auto& e : entries())
        if (e.key.name == key)
            return e;
    throw ConfigError("config: unknown key '" + key + "'");
}

}  // namespace

RunConfig::RunConfig() : omega_a(-std::numbers::pi), omega_b(std::numbers::pi) {}

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        for (const auto& e : entries())
            k.push_back(e.key);
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value)
{
    find_entry(trim(key)).set(cfg, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key)
{
    return find_entry(key).get(cfg);
}

RunConfig parse_config(std::istream& in, RunConfig base)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        try {
            set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in, std::move(base));
}

void apply_override(RunConfig& cfg, const std::string& assignment)
{
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not key=value");
    set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void validate_config(const RunConfig& c)
{
    if (!(c.omega_b > c.omega_a))
        throw ConfigError("config: need omega_a < omega_b");
    if (c.n_space < 3)
        throw ConfigError("config: n_space must be at least 3");
    if (c.n_time < 2)
        throw ConfigError("config: n_time must be at least 2");
    if (!(c.t_final > 0.0))
        throw ConfigError("config: t_final must be positive");
    if (!(c.xi > 1.0 && c.xi < 3.0))
        throw ConfigError("config: xi must lie in (1,3)");
    if (!(c.sigma2 > 0.0))
        throw ConfigError("config: sigma2 must be positive");
    if (!(c.vm_kappa > 0.0))
        throw ConfigError("config: vm_kappa must be positive");
    if (!(c.eps > 0.0))
        throw ConfigError("config: eps must be positive");
    if (c.n_theta_list.empty())
        throw ConfigError("config: n_theta_list is empty");
    for (auto n : c.n_theta_list)
        if (n < 1 || (c.basis_layout == "tiling" && n < 2))
            throw ConfigError("config: invalid entry in n_theta_list");
    if (c.basis_layout == "interior" && !(c.basis_hi > c.basis_lo))
        throw ConfigError("config: need basis_lo < basis_hi");
    if (!(c.alpha0 >= 0.0))
        throw ConfigError("config: alpha0 must be nonnegative");
    if (!(c.armijo_delta > 0.0 && c.armijo_delta < 0.5))
        throw ConfigError("config: armijo_delta must lie in (0, 1/2)");
    if (!(c.shrink > 0.0 && c.shrink < 1.0) || !(c.xi_init > 0.0))
        throw ConfigError("config: need xi_init > 0 and shrink in (0,1)");
    if (c.simulate == "none" && c.samples_file.empty())
        throw ConfigError("config: no samples_file given and simulate = none");
    if (c.simulate == "compound_poisson" && c.sim_rates.empty())
        throw ConfigError("config: compound_poisson simulation needs sim_rates");
    if (c.simulate == "bigamma" && (!(c.gamma_shape > 0.0) || !(c.gamma_rate > 0.0)))
        throw ConfigError("config: gamma_shape and gamma_rate must be positive");
    if (c.simulate != "none" && c.sample_count < 1)
        throw ConfigError("config: sample_count must be positive");
    if (c.preprocess == "financial") {
        if (!(c.band_hi > c.band_lo))
            throw ConfigError("config: need band_lo < band_hi");
        if (!(c.variance_fraction > 0.0 && c.variance_fraction <= 1.0))
            throw ConfigError("config: variance_fraction must lie in (0,1]");
    }
    if (c.hist_bins < 1)
        throw ConfigError("config: hist_bins must be positive");
}

void write_config(std::ostream& out, const RunConfig& cfg)
{
    for (const auto& e : entries())
        out << "# " << e.key.description << '\n' << e.key.name << " = " << e.get(cfg) << '\n';
}

}  // namespace levycal
