#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <epp/epp.hpp>

using namespace epp;

namespace {

struct Flags {
    std::string input = "-";
    std::string out;
    std::string format = "json";
    std::string mode = "v";
    int r = 2;
    int k = 0;
    std::uint64_t seed = 1;
    int oracle_cap = default_oracle_cap;
    // gen
    std::string family;
    int n = 0, m = 0, max_mult = 1, r1 = 0, r2 = 0;
};

struct bad_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path)
{
    if (path == "-") {
        std::ostringstream s;
        s << std::cin.rdbuf();
        return s.str();
    }
    std::ifstream in(path);
    if (!in) throw bad_input("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void emit(const Flags& f, const std::string& text)
{
    if (f.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream o(f.out);
    if (!o) throw bad_input("cannot write " + f.out);
    o << text;
}

MultiGraph load(const Flags& f)
{
    try {
        return parse_edge_list(slurp(f.input));
    } catch (const std::invalid_argument& e) {
        throw bad_input(std::string("edge list: ") + e.what());
    }
}

std::string csv(const std::vector<std::pair<std::string, std::string>>& row)
{
    std::string head, body;
    for (auto& [k, v] : row) {
        head += (head.empty() ? "" : ",") + k;
        body += (body.empty() ? "" : ",") + v;
    }
    return head + "\n" + body + "\n";
}

int solve(const Flags& f)
{
    MultiGraph g = load(f);
    Mode x = parse_mode(f.mode);
    ApproxOptions opt;
    opt.oracle_cap = f.oracle_cap;
    if (f.k > 0) {
        auto o = pack_or_cover(g, x, f.r, f.k, opt);
        auto j = to_json(o);
        if (f.format == "csv") {
            emit(f, csv({{"n", std::to_string(g.n())},
                         {"m", std::to_string(g.m())},
                         {"r", std::to_string(f.r)},
                         {"mode", f.mode},
                         {"k", std::to_string(f.k)},
                         {"result", j["result"].get<std::string>()},
                         {"size", std::to_string(j["size"].get<int>())},
                         {"budget", std::to_string(o.budget)},
                         {"verified", o.verified ? "1" : "0"}}));
            return 0;
        }
        j["certificate"] = o.packing ? to_json(o.pack) : to_json(o.cover);
        emit(f, j.dump(2) + "\n");
        return 0;
    }
    auto res = approximate(g, x, f.r, opt);
    if (f.format == "csv") {
        emit(f, csv({{"n", std::to_string(g.n())},
                     {"m", std::to_string(g.m())},
                     {"r", std::to_string(f.r)},
                     {"mode", f.mode},
                     {"k0", std::to_string(res.k0)},
                     {"value", std::to_string(res.value)},
                     {"appx", std::to_string(res.appx_r)},
                     {"probes", std::to_string(res.probes.size())},
                     {"packing_size", std::to_string(res.lower ? res.lower->pack.size() : 0)},
                     {"cover_size", std::to_string(res.upper.cover.size())}}));
        return 0;
    }
    nlohmann::json probes = nlohmann::json::array();
    for (auto [k, b] : res.probes) probes.push_back({{"k", k}, {"bit", b}});
    nlohmann::json j{{"n", g.n()},         {"m", g.m()},         {"r", f.r},           {"mode", f.mode},
                     {"k0", res.k0},       {"value", res.value}, {"appx", res.appx_r}, {"probes", probes},
                     {"upper", to_json(res.upper)}, {"cover", to_json(res.upper.cover)}};
    if (res.lower) {
        j["lower"] = to_json(*res.lower);
        if (!res.lower->win_shortcut) j["packing"] = to_json(res.lower->pack);
    }
    emit(f, j.dump(2) + "\n");
    return 0;
}

int oracle(const Flags& f)
{
    MultiGraph g = load(f);
    Mode x = parse_mode(f.mode);
    auto H = HCollection::theta(f.r);
    OracleOptions oo;
    oo.oracle_cap = f.oracle_cap;
    auto p = exact_pack(g, H, x, oo);
    auto c = exact_cover(g, H, x, oo);
    if (f.format == "csv") {
        emit(f, csv({{"n", std::to_string(g.n())},
                     {"m", std::to_string(g.m())},
                     {"r", std::to_string(f.r)},
                     {"mode", f.mode},
                     {"pack", std::to_string(p.value)},
                     {"cover", std::to_string(c.value)}}));
        return 0;
    }
    nlohmann::json j{{"n", g.n()}, {"m", g.m()}, {"r", f.r}, {"mode", f.mode}, {"pack", p.value}, {"cover", c.value},
                     {"packing", to_json(p.cert)}, {"covering", to_json(c.cert)}};
    emit(f, j.dump(2) + "\n");
    return 0;
}

int gen(const Flags& f)
{
    nlohmann::json p{{"n", f.n}, {"m", f.m}, {"max_mult", f.max_mult}, {"r", f.r}, {"r1", f.r1}, {"r2", f.r2}, {"k", f.k}};
    MultiGraph g = generate(f.family, p, f.seed);
    if (f.format == "json") {
        emit(f, graph_to_json(g).dump(2) + "\n");
        return 0;
    }
    std::ostringstream s;
    write_edge_list(s, g);
    emit(f, s.str());
    return 0;
}

int bench(const Flags& f)
{
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(slurp(f.input));
    } catch (const nlohmann::json::exception& e) {
        throw bad_input(std::string("config: ") + e.what());
    }
    if (!config.is_object()) throw bad_input("config must be a JSON object");
    if (!config.contains("oracle_cap")) config["oracle_cap"] = f.oracle_cap;
    if (!config.contains("seed")) config["seed"] = f.seed;
    auto recs = run_experiment(config);
    emit(f, f.format == "csv" ? to_csv(recs) : to_json(recs).dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Packing and covering θ_r-subdivisions: exact oracles and the log-approximation"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* s) {
        s->add_option("--input", f.input, "edge list (u v [mult] per line) or bench config; - for stdin");
        s->add_option("--out", f.out, "output file (default stdout)");
        s->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--seed", f.seed, "64-bit seed");
        s->add_option("--oracle-cap", f.oracle_cap, "largest vertex count for exact search")->check(CLI::Range(1, 64));
    };
    auto problem = [&](CLI::App* s) {
        s->add_option("--r", f.r, "θ_r")->check(CLI::Range(2, 64));
        s->add_option("--mode", f.mode, "v or e")->check(CLI::IsMember({"v", "e"}));
    };

    auto* s_solve = app.add_subcommand("solve", "approximate pack and cover, or run one packing-or-covering round with --k");
    common(s_solve);
    problem(s_solve);
    s_solve->add_option("--k", f.k, "packing size to try")->check(CLI::NonNegativeNumber);

    auto* s_oracle = app.add_subcommand("oracle", "exact pack and cover");
    common(s_oracle);
    problem(s_oracle);

    auto* s_gen = app.add_subcommand("gen", "emit an instance");
    common(s_gen);
    s_gen->add_option("--family", f.family, "wall|fan|star|npath|theta|theta_double|triangles|random")->required();
    s_gen->add_option("--n", f.n);
    s_gen->add_option("--m", f.m);
    s_gen->add_option("--max-mult", f.max_mult);
    s_gen->add_option("--r", f.r);
    s_gen->add_option("--r1", f.r1);
    s_gen->add_option("--r2", f.r2);
    s_gen->add_option("--k", f.k);
    s_gen->callback([&] {
        if (!s_gen->count("--format")) f.format = "edges";
    });

    auto* s_bench = app.add_subcommand("bench", "run an experiment config");
    common(s_bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(s_solve)) return solve(f);
        if (app.got_subcommand(s_oracle)) return oracle(f);
        if (app.got_subcommand(s_gen)) return gen(f);
        return bench(f);
    } catch (const exhausted_error& e) {
        std::cerr << "exhausted: " << e.what() << "\n";
        return 3;
    } catch (const bad_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const precondition_error& e) { // includes the oracle size guard
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
