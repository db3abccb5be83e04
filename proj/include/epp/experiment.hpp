#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <memory>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "approx.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace epp {

inline constexpr int experiment_schema = 1;

/// Builds a graph of the named family. Parameters come from a JSON object; `seed` is used
/// by the random family only.
inline MultiGraph generate(const std::string& family, const nlohmann::json& p, std::uint64_t seed = 0)
{
    auto get = [&](const char* key) {
        if (!p.contains(key)) throw precondition_error("generate " + family + ": missing parameter '" + key + "'");
        if (!p.at(key).is_number_integer()) throw precondition_error("generate " + family + ": parameter '" + key + "' must be an integer");
        return p.at(key).get<int>();
    };
    if (family == "wall") return wall(get("n"));
    if (family == "fan") return fan(get("n"));
    if (family == "star") return star(get("n"));
    if (family == "npath") return npath(get("n"));
    if (family == "theta") {
        int r = get("r");
        if (r < 1) throw precondition_error("generate theta: r must be positive");
        return theta_graph(r);
    }
    if (family == "theta_double") return theta_double(get("r1"), get("r2"));
    if (family == "triangles") return disjoint_triangles(get("k")).graph;
    if (family == "random") return random_graph(get("n"), get("m"), p.value("max_mult", 1), seed);
    throw precondition_error("generate: unknown family '" + family + "'");
}

struct ExperimentRecord {
    std::string instance_id;
    std::string family;
    std::string params; // compact JSON of the generator parameters
    std::size_t n = 0, m = 0;
    int r = 2;
    Mode mode = Mode::v;
    std::optional<int> oracle_pack, oracle_cover;
    int k0 = 0;
    double approx_value = 0;
    int probes = 0;
    std::string trace; // counts of loop events at the flip point
    // e-pack / e-cover of θ_{r1,r2}-subdivisions, when the instance names a double pattern
    std::optional<std::pair<int, int>> pattern;
    std::optional<int> double_epack, double_ecover;
    double ms_generate = 0, ms_oracle = 0, ms_approx = 0;
    std::string error;

    /// k0 - 1 <= pack and cover <= value, when the oracle ran.
    std::optional<bool> sandwich() const
    {
        if (!oracle_pack || !oracle_cover || !error.empty()) return std::nullopt;
        return k0 - 1 <= *oracle_pack && *oracle_cover <= approx_value;
    }
};

inline std::string trace_summary(const ApproxOutcome& o)
{
    int counts[4] = {0, 0, 0, 0};
    for (auto& e : o.trace) ++counts[static_cast<int>(e.kind)];
    std::ostringstream s;
    s << "progress=" << counts[0] << " reduce=" << counts[1] << " win=" << counts[2] << " fallback=" << counts[3];
    return s.str();
}

/// Runs approximate (and the oracles at small scale) for one graph.
inline ExperimentRecord run_instance(const MultiGraph& g, int r, Mode x, int oracle_cap, const ApproxOptions& opt = {},
                                     std::optional<std::pair<int, int>> pattern = std::nullopt)
{
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double, std::milli>(b - a).count(); };
    ExperimentRecord rec;
    rec.n = g.n();
    rec.m = g.m();
    rec.r = r;
    rec.mode = x;
    rec.pattern = pattern;
    try {
        auto t0 = clock::now();
        if (static_cast<int>(g.n()) <= oracle_cap) {
            auto H = HCollection::theta(r);
            OracleOptions oo;
            oo.oracle_cap = oracle_cap;
            rec.oracle_pack = exact_pack(g, H, x, oo).value;
            rec.oracle_cover = exact_cover(g, H, x, oo).value;
            if (pattern) {
                auto D = HCollection::of({theta_double(pattern->first, pattern->second)});
                rec.double_epack = exact_pack(g, D, Mode::e, oo).value;
                rec.double_ecover = exact_cover(g, D, Mode::e, oo).value;
            }
        }
        auto t1 = clock::now();
        auto res = approximate(g, x, r, opt);
        auto t2 = clock::now();
        rec.k0 = res.k0;
        rec.approx_value = res.value;
        rec.probes = static_cast<int>(res.probes.size());
        rec.trace = trace_summary(res.upper);
        rec.ms_oracle = ms(t0, t1);
        rec.ms_approx = ms(t1, t2);
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

/// Expands a bench config into records. Config:
///   {"seed": u64, "oracle_cap": int, "w": int, "threads": int,
///    "instances": [{"family": ..., "params": {...}, "count": int, "r": int | [int],
///                   "mode": "v" | "e" | "both", "pattern": [r1, r2]}]}
/// "pattern" adds the exact e-pack/e-cover pair for θ_{r1,r2}; theta_double instances
/// default to their own r1, r2.
/// Every random draw comes from the one seed, in config order. Instances run in parallel;
/// records come back in config order whatever the thread count.
inline std::vector<ExperimentRecord> run_experiment(const nlohmann::json& config)
{
    std::mt19937_64 master(config.value("seed", std::uint64_t{1}));
    const int cap = config.value("oracle_cap", 14);
    ApproxOptions opt;
    opt.w = config.value("w", 2);
    unsigned threads = config.value("threads", 0u);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    struct Job {
        std::shared_ptr<const MultiGraph> g;
        std::string gen_error;
        double gen_ms = 0;
    };
    std::vector<ExperimentRecord> out;
    std::vector<Job> jobs;
    int index = 0;
    for (auto& inst : config.value("instances", nlohmann::json::array())) {
        const std::string family = inst.value("family", "");
        const auto params = inst.value("params", nlohmann::json::object());
        std::vector<int> rs;
        if (inst.contains("r") && inst["r"].is_array()) rs = inst["r"].get<std::vector<int>>();
        else rs = {inst.value("r", 2)};
        std::vector<Mode> modes;
        const std::string mode = inst.value("mode", family == "theta_double" ? "e" : "v");
        if (mode == "both") modes = {Mode::v, Mode::e};
        else modes = {parse_mode(mode)};
        std::optional<std::pair<int, int>> pattern;
        if (inst.contains("pattern")) {
            auto pr = inst["pattern"].get<std::vector<int>>();
            if (pr.size() != 2) throw precondition_error("bench: pattern must be [r1, r2]");
            pattern = std::pair{pr[0], pr[1]};
        } else if (family == "theta_double" && params.contains("r1") && params.contains("r2")) {
            pattern = std::pair{params["r1"].get<int>(), params["r2"].get<int>()};
        }
        const int count = inst.value("count", 1);
        for (int c = 0; c < count; ++c) {
            const std::uint64_t seed = master();
            Job job;
            auto t0 = std::chrono::steady_clock::now();
            try {
                job.g = std::make_shared<const MultiGraph>(generate(family, params, seed));
            } catch (const std::exception& e) {
                job.gen_error = e.what();
            }
            job.gen_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            const std::string id = std::to_string(index++);
            for (int r : rs)
                for (Mode x : modes) {
                    ExperimentRecord rec;
                    rec.instance_id = id;
                    rec.family = family;
                    rec.params = params.dump();
                    rec.r = r;
                    rec.mode = x;
                    rec.pattern = pattern;
                    out.push_back(std::move(rec));
                    jobs.push_back(job);
                }
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < out.size();) {
            ExperimentRecord& slot = out[i];
            const Job& job = jobs[i];
            if (job.gen_error.empty()) {
                ExperimentRecord rec = run_instance(*job.g, slot.r, slot.mode, cap, opt, slot.pattern);
                rec.instance_id = std::move(slot.instance_id);
                rec.family = std::move(slot.family);
                rec.params = std::move(slot.params);
                slot = std::move(rec);
            } else {
                slot.error = job.gen_error;
            }
            slot.ms_generate = job.gen_ms;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::min<std::size_t>(threads, out.size()); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

namespace detail {

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline std::string fixed(double v)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

} // namespace detail

/// CSV without timings, so identical configs give identical bytes.
inline std::string to_csv(const std::vector<ExperimentRecord>& recs)
{
    std::ostringstream s;
    s << "schema,instance_id,family,params,n,m,r,mode,oracle_pack,oracle_cover,gap,k0,approx_value,probes,sandwich,pattern,double_epack,double_ecover,trace,error\n";
    for (auto& x : recs) {
        auto opt_int = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
        std::string gap;
        if (x.oracle_pack && x.oracle_cover && *x.oracle_pack > 0) gap = detail::fixed(static_cast<double>(*x.oracle_cover) / *x.oracle_pack);
        auto sw = x.sandwich();
        s << experiment_schema << ',' << x.instance_id << ',' << detail::csv_field(x.family) << ',' << detail::csv_field(x.params) << ','
          << x.n << ',' << x.m << ',' << x.r << ',' << to_string(x.mode) << ',' << opt_int(x.oracle_pack) << ',' << opt_int(x.oracle_cover)
          << ',' << gap << ',' << (x.error.empty() ? std::to_string(x.k0) : "") << ','
          << (x.error.empty() ? detail::fixed(x.approx_value) : "") << ',' << x.probes << ',' << (sw ? (*sw ? "1" : "0") : "") << ','
          << (x.pattern ? std::to_string(x.pattern->first) + "/" + std::to_string(x.pattern->second) : "") << ','
          << opt_int(x.double_epack) << ',' << opt_int(x.double_ecover) << ',' << detail::csv_field(x.trace) << ',' << detail::csv_field(x.error) << '\n';
    }
    return s.str();
}

/// Every CSV column plus the timings.
inline nlohmann::json to_json(const ExperimentRecord& x)
{
    nlohmann::json j{{"schema", experiment_schema},
                     {"instance_id", x.instance_id},
                     {"family", x.family},
                     {"params", nlohmann::json::parse(x.params.empty() ? "{}" : x.params)},
                     {"n", x.n},
                     {"m", x.m},
                     {"r", x.r},
                     {"mode", to_string(x.mode)},
                     {"oracle_pack", x.oracle_pack ? nlohmann::json(*x.oracle_pack) : nlohmann::json()},
                     {"oracle_cover", x.oracle_cover ? nlohmann::json(*x.oracle_cover) : nlohmann::json()},
                     {"k0", x.k0},
                     {"approx_value", x.approx_value},
                     {"probes", x.probes},
                     {"trace", x.trace},
                     {"error", x.error},
                     {"ms", {{"generate", x.ms_generate}, {"oracle", x.ms_oracle}, {"approx", x.ms_approx}}}};
    if (x.oracle_pack && x.oracle_cover && *x.oracle_pack > 0) j["gap"] = static_cast<double>(*x.oracle_cover) / *x.oracle_pack;
    if (auto sw = x.sandwich()) j["sandwich"] = *sw;
    if (x.pattern) {
        j["pattern"] = {x.pattern->first, x.pattern->second};
        j["double_epack"] = x.double_epack ? nlohmann::json(*x.double_epack) : nlohmann::json();
        j["double_ecover"] = x.double_ecover ? nlohmann::json(*x.double_ecover) : nlohmann::json();
    }
    return j;
}

inline nlohmann::json to_json(const std::vector<ExperimentRecord>& recs)
{
    nlohmann::json a = nlohmann::json::array();
    for (auto& r : recs) a.push_back(to_json(r));
    return a;
}

} // namespace epp
