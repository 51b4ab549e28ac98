// xfpt command line: exact / simulate / compare / diagnose / sweep runs over
// a JSON config, emitting CSV/JSON artifacts with full provenance headers.
// Exit codes: 0 ok, 1 usage or config error, 2 statistical comparison failure.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xfpt.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitComparison = 2;

struct CliError {
    int status;
    std::string message;
};

[[noreturn]] void die(int status, const std::string& message) { throw CliError{status, message}; }

void check(int status) {
    if (status != XFPT_OK)
        die(status, std::string(xfpt_status_name(status)) + ": " + xfpt_last_error());
}

// RAII wrappers over the C handles
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    explicit Handle(T* p) : ptr(p) {}
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    Handle& operator=(Handle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    ~Handle() {
        if (ptr) Free(ptr);
    }
    T* get() const { return ptr; }
    T** out() { return &ptr; }
};

using ModelHandle = Handle<xfpt_model, xfpt_model_free>;
using DistHandle = Handle<xfpt_dist, xfpt_dist_free>;
using ProfileHandle = Handle<xfpt_profile, xfpt_profile_free>;
using McHandle = Handle<xfpt_mc_result, xfpt_mc_result_free>;
using ReportHandle = Handle<xfpt_report, xfpt_report_free>;

std::string take_string(char* s) {
    std::string out = s ? s : "";
    xfpt_string_free(s);
    return out;
}

int env_threads() {
    const char* e = std::getenv("XFPT_THREADS");
    if (!e || !*e) return 0;
    int n = std::atoi(e);
    return n > 0 ? n : 0;
}

// ---- config handling ------------------------------------------------------

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) die(XFPT_E_IO, "cannot open config file: " + path);
    json config = json::parse(in, nullptr, false);
    if (config.is_discarded()) die(XFPT_E_PARSE, "config is not valid JSON: " + path);

    for (const std::string& item : overrides) {
        auto eq = item.find('=');
        if (item.rfind("--", 0) != 0 || eq == std::string::npos)
            die(XFPT_E_INVALID, "overrides must look like --key.path=value, got: " + item);
        std::string path_part = item.substr(2, eq - 2);
        std::string value_part = item.substr(eq + 1);
        json value = json::parse(value_part, nullptr, false);
        if (value.is_discarded()) value = value_part;  // bare strings stay strings

        json* node = &config;
        size_t pos = 0;
        while (true) {
            size_t dot = path_part.find('.', pos);
            std::string key = path_part.substr(pos, dot == std::string::npos ? dot : dot - pos);
            if (key.empty()) die(XFPT_E_INVALID, "empty key in override: " + item);
            if (dot == std::string::npos) {
                (*node)[key] = value;
                break;
            }
            node = &(*node)[key];
            pos = dot + 1;
        }
    }
    return config;
}

json get_or(const json& j, const char* key, json fallback) {
    return j.contains(key) ? j.at(key) : fallback;
}

// ---- output ---------------------------------------------------------------

struct Output {
    std::filesystem::path dir;
    json resolved_config;
    std::string subcommand;
    int precision = 17;
    bool csv_enabled = true;
    bool json_enabled = true;

    std::string fmt(double x) const {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
        return buf;
    }

    std::string header_comment() const {
        return "# xfpt " + std::string(xfpt_version()) + " " + subcommand + "\n# config " +
               resolved_config.dump() + "\n";
    }

    void write_text(const std::string& name, const std::string& body) const {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) die(XFPT_E_IO, "cannot write output file: " + (dir / name).string());
        out << body;
    }

    void write_csv(const std::string& name, const std::string& object_header,
                   const std::string& columns, const std::vector<std::string>& rows) const {
        if (!csv_enabled) return;
        std::string body = header_comment();
        if (!object_header.empty()) body += "# " + object_header + "\n";
        body += columns + "\n";
        for (const auto& row : rows) body += row + "\n";
        write_text(name, body);
    }

    void write_json(const std::string& name, json payload) const {
        if (!json_enabled) return;
        payload["tool"] = {{"name", "xfpt"}, {"version", xfpt_version()}};
        payload["config"] = resolved_config;
        write_text(name, payload.dump(2) + "\n");
    }
};

// ---- shared pieces --------------------------------------------------------

ModelHandle model_from_config(const json& model_block) {
    ModelHandle model;
    check(xfpt_model_from_json(model_block.dump().c_str(), model.out()));
    size_t violations = 0;
    char* violations_json = nullptr;
    check(xfpt_model_validate(model.get(), &violations_json, &violations));
    std::string report = take_string(violations_json);
    if (violations > 0) die(XFPT_E_MODEL, "invalid model: " + report);
    return model;
}

struct Stats {
    int64_t n_walkers;
    double lambda_effective;
    int64_t k_max;
    std::string mean_mode;  // conditional | truncated | unconditional
    int64_t trunc_k;
};

Stats resolve_stats(const json& config, const xfpt_dist* dist) {
    const json block = get_or(config, "statistics", json::object());
    const bool has_lambda = block.contains("lambda");
    const bool has_n = block.contains("n");
    if (has_lambda == has_n)
        die(XFPT_E_INVALID, "statistics block needs exactly one of \"lambda\" and \"n\"");

    Stats stats;
    if (has_n) {
        stats.n_walkers = block.at("n").get<int64_t>();
        if (stats.n_walkers < 1) die(XFPT_E_INVALID, "n must be at least 1");
    } else {
        double lambda = block.at("lambda").get<double>();
        check(xfpt_n_for_lambda(dist, lambda, &stats.n_walkers));
    }
    double mass0 = 0.0;
    check(xfpt_dist_mass(dist, 0, &mass0));
    stats.lambda_effective = static_cast<double>(stats.n_walkers) * mass0;
    stats.k_max = get_or(block, "k_max", 15).get<int64_t>();
    if (stats.k_max < 0) die(XFPT_E_INVALID, "k_max must be nonnegative");
    stats.mean_mode = get_or(block, "mean_mode", "conditional").get<std::string>();
    if (stats.mean_mode != "conditional" && stats.mean_mode != "truncated" &&
        stats.mean_mode != "unconditional")
        die(XFPT_E_INVALID, "mean_mode must be conditional, truncated, or unconditional");
    stats.trunc_k = get_or(block, "trunc_k", xfpt_default_trunc_k(stats.n_walkers)).get<int64_t>();
    return stats;
}

struct McSettings {
    int64_t trials;
    uint64_t seed;
    int64_t t_max;  // 0 = default d + 200
    int sampling;
    std::optional<json> model_override;  // compare-only testing hook
};

McSettings resolve_mc(const json& config) {
    const json block = get_or(config, "mc", json::object());
    McSettings mc;
    mc.trials = get_or(block, "trials", 10000).get<int64_t>();
    mc.seed = get_or(block, "seed", 1).get<uint64_t>();
    mc.t_max = get_or(block, "t_max", 0).get<int64_t>();
    std::string mode = get_or(block, "mode", "direct-walk").get<std::string>();
    if (mode == "direct-walk")
        mc.sampling = XFPT_SAMPLING_DIRECT_WALK;
    else if (mode == "inverse-cdf")
        mc.sampling = XFPT_SAMPLING_INVERSE_CDF;
    else
        die(XFPT_E_INVALID, "mc.mode must be direct-walk or inverse-cdf");
    if (block.contains("model")) mc.model_override = block.at("model");
    return mc;
}

// Distribution wide enough that both the exact and the asymptotic series have
// decayed: extends the horizon until the reported truncation bounds drop
// below 1e-9 (or the hard cap).
DistHandle dist_for_stats(const xfpt_model* model, int64_t n_walkers, int64_t k_min,
                          const std::string& mean_mode) {
    int64_t k = std::max<int64_t>(k_min, 64);
    for (;;) {
        DistHandle dist;
        check(xfpt_fpt_exact(model, k, dist.out()));
        double value = 0.0, bound = 0.0;
        int mode = mean_mode == "unconditional" ? XFPT_MEAN_UNCONDITIONAL : XFPT_MEAN_CONDITIONAL;
        int status = xfpt_mean_exact(dist.get(), n_walkers, mode, &value, &bound);
        if (status == XFPT_OK && bound <= 1e-9) return dist;
        if (status != XFPT_OK && status != XFPT_E_PRECISION) check(status);
        if (k >= (int64_t{1} << 20)) {
            if (status != XFPT_OK) check(status);
            return dist;  // converged as far as we can afford; bound is reported downstream
        }
        k *= 2;
    }
}

struct ExactStats {
    double mean_exact, mean_exact_bound;
    double var_exact;
    double mean_asym;
    double var_asym;
};

ExactStats exact_stats(const xfpt_dist* dist, const xfpt_profile* profile, const Stats& stats) {
    ExactStats out{};
    int exact_mode =
        stats.mean_mode == "unconditional" ? XFPT_MEAN_UNCONDITIONAL : XFPT_MEAN_CONDITIONAL;
    check(xfpt_mean_exact(dist, stats.n_walkers, exact_mode, &out.mean_exact,
                          &out.mean_exact_bound));
    check(xfpt_variance_exact(dist, stats.n_walkers, exact_mode, &out.var_exact));

    int asym_mode = stats.mean_mode == "conditional" ? XFPT_ASYM_CONDITIONAL : XFPT_ASYM_TRUNCATED;
    int64_t trunc = std::min<int64_t>(stats.trunc_k, xfpt_profile_k_max(profile));
    check(xfpt_mean_asymptotic(xfpt_dist_hard_edge(dist), stats.lambda_effective, profile,
                               asym_mode, trunc, &out.mean_asym));
    check(xfpt_variance_asymptotic(stats.lambda_effective, profile, asym_mode, trunc,
                                   &out.var_asym));
    return out;
}

// ---- subcommands ----------------------------------------------------------

int cmd_exact(const json& config, Output& out) {
    ModelHandle model = model_from_config(config.at("model"));

    DistHandle probe;
    check(xfpt_fpt_exact(model.get(), 0, probe.out()));
    Stats stats = resolve_stats(config, probe.get());

    DistHandle dist = dist_for_stats(model.get(), stats.n_walkers, stats.k_max, stats.mean_mode);
    ProfileHandle profile;
    check(xfpt_profile_from_pmf(dist.get(), xfpt_dist_k_max(dist.get()), profile.out()));

    const int64_t d = xfpt_dist_hard_edge(dist.get());

    // distribution.csv: t, p, S
    {
        json object_header = {{"d", d},
                              {"K", stats.k_max},
                              {"defect", xfpt_dist_defect(dist.get())},
                              {"residual_bound", xfpt_dist_residual_bound(dist.get())}};
        std::vector<std::string> rows;
        for (int64_t k = 0; k <= stats.k_max; ++k) {
            double p = 0.0, s = 0.0;
            check(xfpt_dist_mass(dist.get(), k, &p));
            check(xfpt_dist_survival(dist.get(), d + k, &s));
            rows.push_back(std::to_string(d + k) + "," + out.fmt(p) + "," + out.fmt(s));
        }
        out.write_csv("distribution.csv", object_header.dump(), "t,p,S", rows);
    }

    // tail.csv: k, tail_exact, tail_asymptotic
    {
        std::vector<std::string> rows;
        for (int64_t k = 0; k <= stats.k_max; ++k) {
            double exact = 0.0, asym = 0.0;
            check(xfpt_extreme_tail_exact(dist.get(), stats.n_walkers, k, &exact));
            check(xfpt_tail_asymptotic(stats.lambda_effective, profile.get(), k, &asym));
            rows.push_back(std::to_string(k) + "," + out.fmt(exact) + "," + out.fmt(asym));
        }
        out.write_csv("tail.csv", "", "k,tail_exact,tail_asymptotic", rows);
    }

    ExactStats ex = exact_stats(dist.get(), profile.get(), stats);
    double hit = 0.0, p_d = 0.0;
    check(xfpt_extreme_hit_prob(dist.get(), stats.n_walkers, &hit));
    check(xfpt_dist_mass(dist.get(), 0, &p_d));

    json f_table = json::array();
    for (int64_t k = 0; k <= stats.k_max; ++k) {
        double f = 0.0;
        check(xfpt_profile_value(profile.get(), k, &f));
        f_table.push_back(f);
    }

    // requested moment orders of T_N - d, both routes
    json moments_exact = json::object(), moments_asym = json::object();
    const json orders = get_or(get_or(config, "statistics", json::object()), "moments",
                               json::array({1, 2}));
    int exact_mode =
        stats.mean_mode == "unconditional" ? XFPT_MEAN_UNCONDITIONAL : XFPT_MEAN_CONDITIONAL;
    int asym_mode = stats.mean_mode == "conditional" ? XFPT_ASYM_CONDITIONAL : XFPT_ASYM_TRUNCATED;
    for (const auto& order_json : orders) {
        int order = order_json.get<int>();
        double m_exact = 0.0, m_asym = 0.0;
        check(xfpt_moment_exact(dist.get(), stats.n_walkers, order, exact_mode, &m_exact, nullptr));
        check(xfpt_moment_asymptotic(order, stats.lambda_effective, profile.get(), asym_mode,
                                     std::min<int64_t>(stats.trunc_k,
                                                       xfpt_profile_k_max(profile.get())),
                                     &m_asym));
        moments_exact[std::to_string(order)] = m_exact;
        moments_asym[std::to_string(order)] = m_asym;
    }

    out.write_json("summary.json",
                   json{{"d", d},
                        {"n_walkers", stats.n_walkers},
                        {"lambda", stats.lambda_effective},
                        {"p_d", p_d},
                        {"defect", xfpt_dist_defect(dist.get())},
                        {"hit_prob", hit},
                        {"mean_exact", ex.mean_exact},
                        {"mean_exact_tail_bound", ex.mean_exact_bound},
                        {"mean_asymptotic", ex.mean_asym},
                        {"var_exact", ex.var_exact},
                        {"var_asymptotic", ex.var_asym},
                        {"moments_exact", moments_exact},
                        {"moments_asymptotic", moments_asym},
                        {"f_infinity", std::isfinite(xfpt_profile_f_infinity(profile.get()))
                                           ? json(xfpt_profile_f_infinity(profile.get()))
                                           : json()},
                        {"F", f_table},
                        {"mode", stats.mean_mode},
                        {"trunc_k", stats.trunc_k}});
    return kExitOk;
}

McHandle run_mc(const xfpt_model* model, const McSettings& mc, int64_t n_walkers,
                int64_t tail_k_max) {
    McHandle result;
    check(xfpt_mc_run(model, n_walkers, mc.trials, mc.seed, mc.t_max, mc.sampling, env_threads(),
                      tail_k_max, result.out()));
    std::fprintf(stderr, "# mc: trials=%" PRId64 " used=%" PRId64 " wall=%.3fs\n",
                 xfpt_mc_trials(result.get()), xfpt_mc_trials_used(result.get()),
                 xfpt_mc_wall_seconds(result.get()));
    return result;
}

void write_mc_outputs(const McHandle& result, Output& out) {
    json engine = json::parse(take_string(xfpt_mc_result_to_json(result.get())));
    out.write_json("mc_result.json", json{{"result", engine}});

    std::vector<std::string> rows;
    int64_t trials = xfpt_mc_trials(result.get());
    for (int64_t k = 0; k <= xfpt_mc_tail_k_max(result.get()); ++k) {
        double p_hat = 0.0, se = 0.0;
        check(xfpt_mc_tail(result.get(), k, &p_hat, &se));
        rows.push_back(std::to_string(k) + "," + out.fmt(p_hat) + "," + out.fmt(se) + "," +
                       std::to_string(trials));
    }
    out.write_csv("mc_tail.csv", "", "k,p_hat,se,n_trials", rows);
}

int cmd_simulate(const json& config, Output& out) {
    ModelHandle model = model_from_config(config.at("model"));
    DistHandle probe;
    check(xfpt_fpt_exact(model.get(), 0, probe.out()));
    Stats stats = resolve_stats(config, probe.get());
    McSettings mc = resolve_mc(config);

    McHandle result = run_mc(model.get(), mc, stats.n_walkers, stats.k_max);
    write_mc_outputs(result, out);
    return kExitOk;
}

int cmd_compare(const json& config, Output& out) {
    ModelHandle model = model_from_config(config.at("model"));
    DistHandle probe;
    check(xfpt_fpt_exact(model.get(), 0, probe.out()));
    Stats stats = resolve_stats(config, probe.get());
    McSettings mc = resolve_mc(config);

    DistHandle dist = dist_for_stats(model.get(), stats.n_walkers, stats.k_max, stats.mean_mode);
    ProfileHandle profile;
    check(xfpt_profile_from_pmf(dist.get(), xfpt_dist_k_max(dist.get()), profile.out()));

    // the MC leg may run a deliberately different model (detector self-test)
    ModelHandle mc_model =
        mc.model_override ? model_from_config(*mc.model_override) : ModelHandle{};
    const xfpt_model* mc_model_ptr = mc_model.get() ? mc_model.get() : model.get();
    McHandle result = run_mc(mc_model_ptr, mc, stats.n_walkers, stats.k_max);

    const double trials = static_cast<double>(mc.trials);
    double max_abs_z = 0.0, asym_max_dev = 0.0;
    std::vector<std::string> rows;
    int64_t k_hi = std::min<int64_t>(stats.k_max, xfpt_mc_tail_k_max(result.get()));
    for (int64_t k = 0; k <= k_hi; ++k) {
        double exact = 0.0, asym = 0.0, p_hat = 0.0;
        check(xfpt_extreme_tail_exact(dist.get(), stats.n_walkers, k, &exact));
        check(xfpt_tail_asymptotic(stats.lambda_effective, profile.get(), k, &asym));
        check(xfpt_mc_tail(result.get(), k, &p_hat, nullptr));
        double se = std::sqrt(exact * (1.0 - exact) / trials);
        double z = se > 0.0 ? (p_hat - exact) / se : (p_hat == exact ? 0.0 : 1e308);
        max_abs_z = std::max(max_abs_z, std::abs(z));
        asym_max_dev = std::max(asym_max_dev, std::abs(p_hat - asym));
        rows.push_back(std::to_string(k) + "," + out.fmt(exact) + "," + out.fmt(asym) + "," +
                       out.fmt(p_hat) + "," + out.fmt(se) + "," + out.fmt(z));
    }
    out.write_csv("compare.csv", "", "k,tail_exact,tail_asymptotic,tail_mc,se,z_score", rows);

    ExactStats ex = exact_stats(dist.get(), profile.get(), stats);
    double mean_mc = xfpt_mc_cond_mean(result.get());
    double mean_se = xfpt_mc_mean_se(result.get());
    double mean_diff = mean_mc - ex.mean_exact;
    double z_mean = mean_se > 0.0 ? mean_diff / mean_se : (mean_diff == 0.0 ? 0.0 : 1e308);

    const bool tails_ok = max_abs_z <= 3.0;
    const bool mean_ok = std::abs(z_mean) <= 3.0;
    // informational: does the asymptotic body track the simulation?
    double asym_tol = 3.0 / (2.0 * std::sqrt(trials)) + 0.02;
    const bool asym_ok = asym_max_dev <= asym_tol &&
                         std::abs(mean_mc - ex.mean_asym) <= std::max(0.05, 5.0 * mean_se);

    out.write_json("compare_report.json",
                   json{{"max_abs_z", max_abs_z},
                        {"z_mean", z_mean},
                        {"mean_mc", mean_mc},
                        {"mean_mc_se", mean_se},
                        {"mean_exact", ex.mean_exact},
                        {"mean_asymptotic", ex.mean_asym},
                        {"var_mc", xfpt_mc_cond_variance(result.get())},
                        {"var_exact", ex.var_exact},
                        {"asym_max_tail_deviation", asym_max_dev},
                        {"asym_within_tolerance", asym_ok},
                        {"tails_within_3se", tails_ok},
                        {"mean_within_3se", mean_ok},
                        {"pass", tails_ok && mean_ok}});
    return (tails_ok && mean_ok) ? kExitOk : kExitComparison;
}

int cmd_diagnose(const json& config, Output& out) {
    const json block = get_or(config, "diagnose", json::object());
    if (!block.contains("d_list")) die(XFPT_E_INVALID, "diagnose needs diagnose.d_list");
    std::vector<int64_t> d_list = block.at("d_list").get<std::vector<int64_t>>();
    int64_t k_max = get_or(block, "k_max", 8).get<int64_t>();
    double tol = get_or(block, "invariance_tol", 1e-9).get<double>();
    double sigma = get_or(block, "slope_significance", 5.0).get<double>();

    ReportHandle report;
    check(xfpt_diagnose(config.at("model").dump().c_str(), d_list.data(), d_list.size(), k_max,
                        tol, sigma, report.out()));

    json payload = json::parse(take_string(xfpt_report_to_json(report.get())));
    out.write_json("regime_report.json", json{{"report", payload}});

    // f_matrix.csv: one column per d
    std::string columns = "k";
    size_t d_count = xfpt_report_d_count(report.get());
    for (size_t i = 0; i < d_count; ++i)
        columns += ",d=" + std::to_string(xfpt_report_d_value(report.get(), i));
    std::vector<std::string> rows;
    for (int64_t k = 0; k <= xfpt_report_k_max(report.get()); ++k) {
        std::string row = std::to_string(k);
        for (size_t i = 0; i < d_count; ++i) {
            double f = 0.0;
            check(xfpt_report_f(report.get(), i, k, &f));
            row += "," + out.fmt(f);
        }
        rows.push_back(row);
    }
    out.write_csv("f_matrix.csv", "", columns, rows);

    std::fprintf(stderr, "# diagnose: %s\n", xfpt_report_classification(report.get()));
    return kExitOk;
}

int cmd_sweep(const json& config, Output& out) {
    ModelHandle model = model_from_config(config.at("model"));
    const json block = get_or(config, "sweep", json::object());
    const bool has_lambda = block.contains("lambda_grid");
    const bool has_n = block.contains("n_grid");
    if (has_lambda == has_n)
        die(XFPT_E_INVALID, "sweep needs exactly one of sweep.lambda_grid and sweep.n_grid");

    McSettings mc = resolve_mc(config);
    const json stats_block = get_or(config, "statistics", json::object());
    int64_t k_max = get_or(stats_block, "k_max", 15).get<int64_t>();
    std::string mean_mode = get_or(stats_block, "mean_mode", "conditional").get<std::string>();

    std::vector<json> grid;
    if (has_lambda)
        for (const auto& v : block.at("lambda_grid")) grid.push_back(v);
    else
        for (const auto& v : block.at("n_grid")) grid.push_back(v);
    if (grid.empty()) die(XFPT_E_INVALID, "sweep grid is empty");

    DistHandle probe;
    check(xfpt_fpt_exact(model.get(), 0, probe.out()));

    std::vector<std::string> rows;
    json summary = json::array();
    for (size_t i = 0; i < grid.size(); ++i) {
        Stats stats;
        if (has_lambda) {
            check(xfpt_n_for_lambda(probe.get(), grid[i].get<double>(), &stats.n_walkers));
        } else {
            stats.n_walkers = grid[i].get<int64_t>();
        }
        double mass0 = 0.0;
        check(xfpt_dist_mass(probe.get(), 0, &mass0));
        stats.lambda_effective = static_cast<double>(stats.n_walkers) * mass0;
        stats.k_max = k_max;
        stats.mean_mode = mean_mode;
        stats.trunc_k =
            get_or(stats_block, "trunc_k", xfpt_default_trunc_k(stats.n_walkers)).get<int64_t>();

        DistHandle dist = dist_for_stats(model.get(), stats.n_walkers, k_max, mean_mode);
        ProfileHandle profile;
        check(xfpt_profile_from_pmf(dist.get(), xfpt_dist_k_max(dist.get()), profile.out()));
        ExactStats ex = exact_stats(dist.get(), profile.get(), stats);

        McSettings point = mc;
        point.seed = mc.seed + i;  // one independent stream family per grid point
        McHandle result = run_mc(model.get(), point, stats.n_walkers, k_max);

        double mean_mc = xfpt_mc_cond_mean(result.get());
        double var_mc = xfpt_mc_cond_variance(result.get());
        double mean_se = xfpt_mc_mean_se(result.get());

        rows.push_back(out.fmt(stats.lambda_effective) + "," + std::to_string(stats.n_walkers) +
                       "," + out.fmt(ex.mean_exact) + "," + out.fmt(ex.mean_asym) + "," +
                       out.fmt(ex.var_exact) + "," + out.fmt(ex.var_asym) + "," +
                       out.fmt(mean_mc) + "," + out.fmt(mean_se) + "," + out.fmt(var_mc));
        summary.push_back(json{{"lambda", stats.lambda_effective},
                               {"n_walkers", stats.n_walkers},
                               {"mean_exact", ex.mean_exact},
                               {"mean_asymptotic", ex.mean_asym},
                               {"var_exact", ex.var_exact},
                               {"var_asymptotic", ex.var_asym},
                               {"mean_mc", mean_mc},
                               {"mean_mc_se", mean_se},
                               {"var_mc", var_mc},
                               {"seed", point.seed}});
    }
    out.write_csv("sweep.csv", "",
                  "lambda,n_walkers,mean_exact,mean_asymptotic,var_exact,var_asymptotic,"
                  "mean_mc,mean_mc_se,var_mc",
                  rows);
    out.write_json("sweep.json", json{{"points", summary}});
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"extreme first-passage statistics of N random walkers on hierarchical graphs"};
    app.set_version_flag("--version", xfpt_version());
    app.require_subcommand(1);
    app.allow_extras();

    std::string config_path, out_dir = ".";
    for (const char* name : {"exact", "simulate", "compare", "diagnose", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config JSON file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->allow_extras();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::cerr << json{{"error", {{"status", XFPT_E_INVALID}, {"message", e.what()}}}}.dump()
                  << "\n";
        return kExitUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        std::vector<std::string> overrides = app.remaining();
        for (const auto& extra : sub->remaining()) overrides.push_back(extra);
        json config = load_config(config_path, overrides);

        Output out;
        out.dir = out_dir;
        out.subcommand = sub->get_name();
        out.resolved_config = config;
        const json output_block = get_or(config, "output", json::object());
        out.precision = get_or(output_block, "precision", 17).get<int>();
        if (output_block.contains("formats")) {
            out.csv_enabled = false;
            out.json_enabled = false;
            for (const auto& f : output_block.at("formats")) {
                if (f == "csv") out.csv_enabled = true;
                else if (f == "json") out.json_enabled = true;
                else die(XFPT_E_INVALID, "output.formats entries must be \"csv\" or \"json\"");
            }
        }
        std::error_code ec;
        std::filesystem::create_directories(out.dir, ec);
        if (ec) die(XFPT_E_IO, "cannot create output directory: " + out.dir.string());

        if (out.subcommand == "exact") return cmd_exact(config, out);
        if (out.subcommand == "simulate") return cmd_simulate(config, out);
        if (out.subcommand == "compare") return cmd_compare(config, out);
        if (out.subcommand == "diagnose") return cmd_diagnose(config, out);
        return cmd_sweep(config, out);
    } catch (const CliError& e) {
        std::cerr << json{{"error",
                           {{"status", e.status},
                            {"name", xfpt_status_name(e.status)},
                            {"message", e.message}}}}
                         .dump()
                  << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"status", XFPT_E_INTERNAL}, {"message", e.what()}}}}.dump()
                  << "\n";
        return kExitUsage;
    }
}
