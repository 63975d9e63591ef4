// salemlab: Frostman flows on dyadic trees, corridor-coupled walk ladders,
// Fourier transforms of image measures, and dimension estimates, behind one
// seeded, reproducible CLI.  Every artifact embeds its config; identical
// (command, flags, seed) produce identical bytes at any --threads value.
#include <CLI11.hpp>

#include "salem/dimension.hpp"
#include "salem/io.hpp"
#include "salem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace salem;

namespace {

// Exit 2 is reserved for "the quantitative claim failed", distinct from crashes
// and usage errors, so CI can treat empirical regressions specially.
struct BoundViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Emitter {
    std::string command;
    std::uint64_t seed = 0;
    Json config;  // canonical run config (seed included; threads/out-dir excluded)
    std::string out_dir = ".";
    std::vector<std::string> formats;

    bool wants(const std::string& fmt) const {
        return std::find(formats.begin(), formats.end(), fmt) != formats.end();
    }
    std::string stem() const {
        return command + "-" + std::to_string(seed) + "-" + hex16(fnv1a64(config.dump()));
    }
    void write(const std::string& ext, const std::string& content) const {
        const std::string p =
            (std::filesystem::path(out_dir) / (stem() + "." + ext)).string();
        std::ofstream out(p, std::ios::binary);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + p);
        std::cout << p << "\n";
    }
    void json(const Json& result) const {
        if (!wants("json")) return;
        const Json doc{{"schema", 1},
                       {"build", build_stamp()},
                       {"config", config},
                       {"result", result}};
        write("json", doc.dump(2) + "\n");
    }
    void csv(const std::string& body) const {
        if (!wants("csv")) return;
        write("csv", "# config: " + config.dump() + "\n" + body);
    }
    void svg(std::string body) const {
        if (!wants("svg")) return;
        body.insert(body.find('\n') + 1, "<!-- config: " + config.dump() + " -->\n");
        write("svg", body);
    }
    void reject(const std::string& fmt) const {
        if (wants(fmt))
            throw InvalidSpec(fmt + " output not available for '" + command + "'");
    }
};

CantorSpec make_spec(const std::string& xi, int depth) {
    CantorSpec spec{parse_rational(xi), depth};
    spec.validate();
    return spec;
}

double resolve_alpha(double alpha, const std::string& xi) {
    if (alpha > 0.0) return alpha;
    if (xi.empty()) return 0.5;  // uniform measure: walk regime exponent
    return make_spec(xi, 1).beta();
}

AtomicMeasure level_measure(const std::string& xi, int n) {
    const TreeFlowMeasure flow = xi.empty() ? lebesgue_flow(n) : cantor_flow(make_spec(xi, n));
    return n_approximation(flow, n);
}

// Seeded atomic probability measure with 2..33 atoms, weights summing to 1.
AtomicMeasure random_measure(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t ctr = 0;
    const int m = 2 + int(philox_words(seed, stream, ctr++)[0] % 32);
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(std::size_t(m));
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        const double t = philox_unit(seed, stream, ctr++);
        const double w = 0.05 + philox_unit(seed, stream, ctr++);
        atoms.emplace_back(t, w);
        total += w;
    }
    for (auto& [t, w] : atoms) w /= total;
    return make_atomic(atoms);
}

struct LemmaSuite {
    int measures = 0;
    int evaluations = 0;
    double max_rel_err = 0.0;
    bool passed = false;
};

// Integration-by-parts identity on seeded step functions x polynomial/sin family.
LemmaSuite run_lemma_suite(std::uint64_t seed, int measures) {
    struct TestFn {
        std::function<double(double)> f, fp;
    };
    std::vector<TestFn> fns;
    for (int k = 0; k <= 5; ++k)
        fns.push_back({[k](double t) { return std::pow(t, k); },
                       [k](double t) { return k == 0 ? 0.0 : k * std::pow(t, k - 1); }});
    fns.push_back({[](double t) { return std::sin(7.0 * t); },
                   [](double t) { return 7.0 * std::cos(7.0 * t); }});

    LemmaSuite suite;
    suite.measures = measures;
    for (int i = 0; i < measures; ++i) {
        const AtomicMeasure mu = random_measure(seed, std::uint64_t(i) + 1);
        for (const auto& fn : fns) {
            const PartsLemmaResult r = parts_lemma_eval(mu, fn.f, fn.fp, 1e-4);
            const double denom = std::max({std::abs(r.lhs), std::abs(r.rhs), 1.0});
            suite.max_rel_err =
                std::max(suite.max_rel_err, std::abs(r.lhs - r.rhs) / denom);
            ++suite.evaluations;
        }
    }
    suite.passed = suite.max_rel_err <= 1e-9;
    return suite;
}

// Exhaustive 2^h average of cos(u * S_h / sqrt(N)) over all sign words.
double char_enumerated(double u, int n_steps, int h) {
    const double inv_sqrt = 1.0 / std::sqrt(double(n_steps));
    double sum = 0.0;
    const std::uint64_t total = std::uint64_t(1) << h;
    for (std::uint64_t w = 0; w < total; ++w) {
        const int ones = __builtin_popcountll(w);
        sum += std::cos(u * double(2 * ones - h) * inv_sqrt);
    }
    return sum / double(total);
}

int run_cantor(Emitter& em, const std::string& xi, int n, double alpha, int samples) {
    const CantorSpec spec = make_spec(xi, n);
    const TreeFlowMeasure flow = cantor_flow(spec);
    const FlowCheckReport check = flow_check(flow);
    const double a = alpha > 0.0 ? alpha : spec.beta();
    const FrostmanReport fr = frostman_check(flow, a, 1.0, samples, em.seed);
    em.json(Json{{"beta", spec.beta()},
                 {"gamma", spec.gamma()},
                 {"flow_check", json_flow_check(check)},
                 {"frostman", json_frostman(fr)}});
    em.csv(csv_atoms(n_approximation(flow, n)));
    em.reject("svg");
    if (!check.passed) throw BoundViolated("tree flow conservation failed");
    if (!fr.passed) throw BoundViolated("Frostman inequality failed");
    return 0;
}

int run_walk(Emitter& em, int n) {
    const int n_min = std::min(8, n);
    const RefinementLadder ladder = build_ladder(em.seed, n_min, n);
    const DeficiencyReport defic = deficiency_proxy(ladder.finest().word());

    // coupling bound ||x_{n+1} - x_n||_inf <= 4 sqrt(n / 2^n) on the audited band
    bool coupling_ok = true;
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < ladder.distances.size(); ++k) {
        const int lvl = ladder.n_min + int(k);
        if (lvl < 8 || lvl > 18) continue;
        const double budget = 4.0 * std::sqrt(double(lvl) / std::exp2(double(lvl)));
        worst_ratio = std::max(worst_ratio, ladder.distances[k] / budget);
        if (ladder.distances[k] > budget) coupling_ok = false;
    }
    em.json(Json{{"ladder", json_ladder_manifest(ladder)},
                 {"deficiency", json_deficiency(defic)},
                 {"coupling_worst_ratio", worst_ratio},
                 {"coupling_ok", coupling_ok}});

    if (em.wants("csv")) {
        const WalkPath& path = ladder.finest();
        const std::uint64_t N = path.length();
        const std::uint64_t stride = std::max<std::uint64_t>(1, N / 4096);
        std::string body = "t,value\n";
        for (std::uint64_t j = 0; j <= N; j += stride)
            body += format_sig17(double(j) / double(N)) + "," +
                    format_sig17(path.grid_value(j)) + "\n";
        em.csv(body);
    }
    em.reject("svg");
    if (!coupling_ok) throw BoundViolated("ladder coupling distance above 4 sqrt(n/2^n)");
    return 0;
}

int run_spectrum(Emitter& em, const std::string& xi, int n, int depth,
                 const std::string& grid, double u_lo, double u_max, int ppo,
                 bool conservative) {
    const RefinementLadder ladder = build_ladder(em.seed, std::min(8, n), n);
    const TreeFlowMeasure flow = cantor_flow(make_spec(xi, depth));
    if (grid == "thm42") {
        // resonance band [n, n+1] sampled at n+1 points; too narrow for a fit
        const int m = std::min(ladder.n_max, flow.max_depth());
        const AtomicMeasure nu =
            pushout_measure(ladder.finest(), n_approximation(flow, m));
        const SpectrumSample sample = transform_grid(nu, band_grid(n));
        em.json(Json{{"sidecar", json_spectrum_sidecar(sample)}});
        em.csv(csv_spectrum(sample));
        em.reject("svg");
        return 0;
    }
    const double valid = 2.0 * M_PI * std::exp2(double(n) / 2.0);
    const double cap = u_max > 0.0 ? u_max : std::min(2000.0, 0.95 * valid);
    const DecayResult res = decay_pipeline(ladder, flow, cap, conservative, u_lo, ppo);
    em.json(Json{{"sidecar", json_spectrum_sidecar(res.spectrum)},
                 {"fit", json_decay(res.fit)}});
    em.csv(csv_spectrum(res.spectrum));
    em.svg(svg_decay_plot(res.spectrum, res.fit));
    return 0;
}

int run_moments(Emitter& em, const std::string& xi, int n, int q, double u, double alpha,
                int trials) {
    const AtomicMeasure theta = level_measure(xi, n);
    const MomentEstimate est =
        moment_mc(n, q, u, theta, resolve_alpha(alpha, xi), trials, em.seed);
    em.json(json_moment(est));
    em.reject("csv");
    em.reject("svg");
    if (est.mean - 3.0 * est.std_error > est.bound)
        throw BoundViolated("moment mean - 3se exceeds (22qu^-2a)^q");
    return 0;
}

int run_tail(Emitter& em, const std::string& xi, int n, double u, double epsilon, int q,
             double alpha, int trials) {
    const AtomicMeasure theta = level_measure(xi, n);
    const TailReport rep =
        tail_mc(n, u, epsilon, q, theta, resolve_alpha(alpha, xi), trials, em.seed);
    em.json(json_tail(rep));
    em.reject("csv");
    em.reject("svg");
    if (!rep.passed) throw BoundViolated("tail frequency exceeds Chebyshev chain");
    return 0;
}

int run_lemma(Emitter& em, int measures) {
    const LemmaSuite suite = run_lemma_suite(em.seed, measures);
    em.json(Json{{"measures", suite.measures},
                 {"evaluations", suite.evaluations},
                 {"max_rel_err", suite.max_rel_err},
                 {"tolerance", 1e-9},
                 {"passed", suite.passed}});
    em.reject("csv");
    em.reject("svg");
    if (!suite.passed) throw BoundViolated("integration-by-parts identity above tolerance");
    return 0;
}

int run_dims(Emitter& em, const std::string& xi, int n, int k_lo, int k_hi) {
    const CantorSpec spec = make_spec(xi, n);
    if (k_lo < 1 || k_hi < k_lo) throw InvalidSpec("dims: need 1 <= k-lo <= k-hi");

    std::vector<double> points;
    for (const RatInterval& iv : cantor_intervals(spec))
        points.push_back(to_double((iv.lo + iv.hi) / 2));
    std::vector<double> scales;
    for (int k = k_lo; k <= k_hi; ++k) scales.push_back(std::exp2(double(-k)));
    const BoxCountResult box = box_count(points, scales);

    const int flow_depth = std::min(n, 14);
    const TreeFlowMeasure flow = cantor_flow(make_spec(xi, flow_depth));
    const int d_hi = std::min(14, flow_depth);
    std::vector<int> depths;
    for (int d = std::max(3, d_hi - 8); d <= d_hi; d += 2) depths.push_back(d);
    std::vector<double> alphas;
    for (int i = 2; i <= 18; ++i) alphas.push_back(0.05 * i);
    const CapacityResult cap = capacity_dim(flow, depths, alphas);

    em.json(Json{{"beta", spec.beta()},
                 {"gamma", spec.gamma()},
                 {"box",
                  Json{{"scales", box.scales},
                       {"counts", box.counts},
                       {"dimension", box.dimension},
                       {"r_squared", box.r_squared},
                       {"degenerate", box.degenerate}}},
                 {"capacity",
                  Json{{"alphas", cap.alphas},
                       {"growth", cap.growth},
                       {"crossover", cap.crossover},
                       {"threshold", cap.threshold},
                       {"flagged", cap.flagged}}}});
    if (em.wants("csv")) {
        std::string body = "scale,count\n";
        for (std::size_t i = 0; i < box.scales.size(); ++i)
            body += format_sig17(box.scales[i]) + "," + std::to_string(box.counts[i]) + "\n";
        em.csv(body);
    }
    em.reject("svg");
    return 0;
}

int run_salem_report(Emitter& em, const std::string& xi, int n, double u_max) {
    const CantorSpec spec = make_spec(xi, n);
    const double valid = 2.0 * M_PI * std::exp2(double(n) / 2.0);
    const double cap = u_max > 0.0 ? u_max : std::min(2000.0, 0.95 * valid);
    const DimensionReport rep = salem_report(spec, em.seed, n, cap);
    em.json(json_dimension_report(rep));
    em.svg(svg_dimension_plot(rep));
    em.reject("csv");
    if (!rep.flow_report.passed) throw BoundViolated("tree flow conservation failed");
    if (!rep.frostman.passed) throw BoundViolated("Frostman inequality failed");
    return 0;
}

int run_verify(Emitter& em, int measures) {
    struct Suite {
        std::string name;
        bool passed;
        Json detail;
    };
    std::vector<Suite> suites;

    {
        const LemmaSuite s = run_lemma_suite(em.seed, measures);
        suites.push_back({"parts-identity", s.passed,
                          Json{{"max_rel_err", s.max_rel_err}, {"evaluations", s.evaluations}}});
    }
    {
        double worst = 0.0;
        for (const int h : {1, 2, 3, 8, 12, 16})
            for (const double u : {0.5, 1.0, 2.0, 5.0})
                for (const int N : {4, 16, 64}) {
                    if (h > N) continue;
                    worst = std::max(
                        worst, std::abs(char_exact(u, N, h) - char_enumerated(u, N, h)));
                }
        suites.push_back(
            {"char-enumeration", worst <= 1e-12, Json{{"max_abs_err", worst}}});
    }
    {
        bool all = true;
        Json detail = Json::array();
        for (const char* xi : {"1/3", "1/4", "1/16"}) {
            const CantorSpec spec = make_spec(xi, 10);
            const TreeFlowMeasure flow = cantor_flow(spec);
            const FlowCheckReport check = flow_check(flow);
            const FrostmanReport fr =
                frostman_check(flow, spec.beta(), 1.0, 2000, em.seed);
            all = all && check.passed && fr.passed;
            detail.push_back(Json{{"xi", xi},
                                  {"flow_passed", check.passed},
                                  {"frostman_passed", fr.passed}});
        }
        suites.push_back({"cantor-flows", all, detail});
    }

    bool all = true;
    Json out = Json::array();
    for (const Suite& s : suites) {
        all = all && s.passed;
        std::cout << (s.passed ? "ok   " : "FAIL ") << s.name << "\n";
        out.push_back(Json{{"name", s.name}, {"passed", s.passed}, {"detail", s.detail}});
    }
    em.json(Json{{"suites", out}, {"passed", all}});
    em.reject("csv");
    em.reject("svg");
    if (!all) throw BoundViolated("verify suite failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"effective Frostman measures, coupled walk ladders, and Fourier decay on [0,1]"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir = ".";
    std::vector<std::string> formats;
    app.add_option("--seed", seed, "seed for every stochastic stage")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (0 = auto, also SALEM_LAB_THREADS)")
        ->capture_default_str();
    app.add_option("--out-dir", out_dir, "artifact directory")->capture_default_str();
    auto* fmt_opt = app.add_option("--formats", formats, "subset of csv,json,svg")
                        ->delimiter(',')
                        ->check(CLI::IsMember({"csv", "json", "svg"}));

    std::string xi;
    int n = 0, q = 1, k_lo = 3, k_hi = 8, trials = 100000, depth = 0, ppo = 64, samples = 10000;
    double u = 0.0, epsilon = 1.0, alpha = 0.0, u_lo = 8.0, u_max = 0.0;
    std::string grid;
    bool conservative = false;
    int measures = 50;

    auto* c_cantor = app.add_subcommand("cantor", "Cantor flow + Frostman audit");
    c_cantor->add_option("--xi", xi, "dissection ratio p/q in (0,1/2)")->required();
    c_cantor->add_option("--n", n, "tree depth")->default_val(10)->check(CLI::Range(1, 26));
    c_cantor->add_option("--alpha", alpha, "Frostman exponent (default: beta(xi))");
    c_cantor->add_option("--trials", samples, "general-interval samples")
        ->default_val(10000)
        ->check(CLI::Range(100, 100000000));

    auto* c_walk = app.add_subcommand("walk", "corridor-coupled refinement ladder");
    c_walk->add_option("--n", n, "finest level (2^n steps)")
        ->default_val(16)
        ->check(CLI::Range(1, 28));

    auto* c_spectrum = app.add_subcommand("spectrum", "transform of the image measure");
    c_spectrum->add_option("--xi", xi, "dissection ratio p/q")->required();
    c_spectrum->add_option("--n", n, "walk level")->default_val(16)->check(CLI::Range(9, 28));
    c_spectrum->add_option("--depth", depth, "flow depth (default min(n,12))")
        ->check(CLI::Range(1, 26));
    c_spectrum->add_option("--grid", grid, "preset grid (thm42 = resonance band [n,n+1])")
        ->check(CLI::IsMember({"thm42"}));
    c_spectrum->add_option("--u-lo", u_lo, "fit lower cutoff")->capture_default_str();
    c_spectrum->add_option("--u-max", u_max, "top frequency (default min(2000, 0.95*2pi*2^(n/2)))");
    c_spectrum->add_option("--ppo", ppo, "grid points per octave")
        ->default_val(64)
        ->check(CLI::Range(4, 512));
    c_spectrum->add_flag("--conservative", conservative,
                         "fit envelope minus a-priori uncertainty");

    auto* c_moments = app.add_subcommand("moments", "2q-th transform moment vs bound");
    c_moments->add_option("--n", n, "word length exponent (N = 2^n atoms)")
        ->required()
        ->check(CLI::Range(1, 20));
    c_moments->add_option("--q", q, "half moment order")->default_val(1)->check(CLI::Range(1, 8));
    c_moments->add_option("--u", u, "frequency")->required();
    c_moments->add_option("--xi", xi, "optional Cantor ratio (default: uniform measure)");
    c_moments->add_option("--alpha", alpha, "decay exponent (default: beta(xi) or 0.5)");
    c_moments->add_option("--trials", trials, "Monte Carlo trials")
        ->default_val(100000)
        ->check(CLI::Range(100, 100000000));

    auto* c_tail = app.add_subcommand("tail", "Chebyshev tail chain check");
    c_tail->add_option("--n", n, "word length exponent")->required()->check(CLI::Range(1, 20));
    c_tail->add_option("--u", u, "frequency")->required();
    c_tail->add_option("--epsilon", epsilon, "tail slack exponent")->capture_default_str();
    c_tail->add_option("--q", q, "moment order (default ceil(6/epsilon))")->default_val(0);
    c_tail->add_option("--xi", xi, "optional Cantor ratio (default: uniform measure)");
    c_tail->add_option("--alpha", alpha, "decay exponent (default: beta(xi) or 0.5)");
    c_tail->add_option("--trials", trials, "Monte Carlo trials")
        ->default_val(100000)
        ->check(CLI::Range(100, 100000000));

    auto* c_lemma = app.add_subcommand("lemma", "integration-by-parts identity suite");
    c_lemma->add_option("--trials", measures, "seeded step measures")
        ->default_val(50)
        ->check(CLI::Range(1, 100000));

    auto* c_dims = app.add_subcommand("dims", "box/capacity dimensions of C_xi");
    c_dims->add_option("--xi", xi, "dissection ratio p/q")->required();
    c_dims->add_option("--n", n, "stage depth")->default_val(12)->check(CLI::Range(1, 18));
    c_dims->add_option("--k-lo", k_lo, "coarsest box scale 2^-k")->capture_default_str();
    c_dims->add_option("--k-hi", k_hi, "finest box scale 2^-k")->capture_default_str();

    auto* c_report = app.add_subcommand("salem-report", "end-to-end dimension report");
    c_report->add_option("--xi", xi, "dissection ratio p/q")->required();
    c_report->add_option("--n", n, "walk level")->default_val(18)->check(CLI::Range(9, 28));
    c_report->add_option("--u-max", u_max, "top frequency (default min(2000, 0.95*2pi*2^(n/2)))");

    auto* c_verify = app.add_subcommand("verify", "identity + flow verification suites");
    c_verify->add_option("--trials", measures, "seeded step measures for the parts suite")
        ->default_val(50)
        ->check(CLI::Range(1, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    set_thread_count(threads);

    Emitter em;
    em.seed = seed;
    em.out_dir = out_dir;

    try {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);

        if (app.got_subcommand(c_cantor)) {
            em.command = "cantor";
            const double a = alpha > 0.0 ? alpha : make_spec(xi, 1).beta();
            em.config = Json{{"command", em.command}, {"seed", seed},     {"xi", xi},
                             {"n", n},                {"alpha", a},       {"trials", samples}};
            em.formats = fmt_opt->count() ? formats : std::vector<std::string>{"json", "csv"};
            return run_cantor(em, xi, n, alpha, samples);
        }
        if (app.got_subcommand(c_walk)) {
            em.command = "walk";
            em.config = Json{{"command", em.command}, {"seed", seed}, {"n", n}};
            em.formats = fmt_opt->count() ? formats : std::vector<std::string>{"json", "csv"};
            return run_walk(em, n);
        }
        if (app.got_subcommand(c_spectrum)) {
            em.command = "spectrum";
            if (depth == 0) depth = std::min(n, 12);
            em.config = Json{{"command", em.command},
                             {"seed", seed},
                             {"xi", xi},
                             {"n", n},
                             {"depth", depth},
                             {"grid", grid},
                             {"u_lo", u_lo},
                             {"u_max", u_max},
                             {"ppo", ppo},
                             {"conservative", conservative}};
            em.formats = fmt_opt->count() ? formats
                                          : (grid == "thm42"
                                                 ? std::vector<std::string>{"json", "csv"}
                                                 : std::vector<std::string>{"json", "csv", "svg"});
            return run_spectrum(em, xi, n, depth, grid, u_lo, u_max, ppo, conservative);
        }
        if (app.got_subcommand(c_moments)) {
            em.command = "moments";
            em.config = Json{{"command", em.command}, {"seed", seed},
                             {"n", n},                {"q", q},
                             {"u", u},                {"xi", xi},
                             {"alpha", resolve_alpha(alpha, xi)}, {"trials", trials}};
            em.formats = fmt_opt->count() ? formats : std::vector<std::string>{"json"};
            return run_moments(em, xi, n, q, u, alpha, trials);
        }
        if (app.got_subcommand(c_tail)) {
            em.command = "tail";
            em.config = Json{{"command", em.command}, {"seed", seed},
                             {"n", n},                {"u", u},
                             {"epsilon", epsilon},    {"q", q},
                             {"xi", xi},              {"alpha", resolve_alpha(alpha, xi)},
                             {"trials", trials}};
            em.formats = fmt_opt->count() ? formats : std::vector<std::string>{"json"};
            return run_tail(em, xi, n, u, epsilon, q, alpha, trials);
        }
        if (app.got_subcommand(c_lemma)) {
            em.command = "lemma";
            em.config = Json{{"command", em.command}, {"seed", seed}, {"trials", measures}};
            em.formats = fmt_opt->count() ? formats : std::vector<std::string>{"json"};
            return run_lemma(em, measures);
        }
        if (app.got_subcommand(c_dims)) {
            em.command = "dims";
            em.config = Json{{"command", em.command}, {"seed", seed},  {"xi", xi},
                             {"n", n},                {"k_lo", k_lo},  {"k_hi", k_hi}};
            em.formats = fmt_opt->count() ? formats : std::vector<std::string>{"json", "csv"};
            return run_dims(em, xi, n, k_lo, k_hi);
        }
        if (app.got_subcommand(c_report)) {
            em.command = "salem-report";
            em.config = Json{{"command", em.command}, {"seed", seed},  {"xi", xi},
                             {"n", n},                {"u_max", u_max}};
            em.formats = fmt_opt->count() ? formats : std::vector<std::string>{"json", "svg"};
            return run_salem_report(em, xi, n, u_max);
        }
        if (app.got_subcommand(c_verify)) {
            em.command = "verify";
            em.config = Json{{"command", em.command}, {"seed", seed}, {"trials", measures}};
            em.formats = fmt_opt->count() ? formats : std::vector<std::string>{"json"};
            return run_verify(em, measures);
        }
        std::cerr << "usage error: no subcommand\n";
        return 1;
    } catch (const BoundViolated& e) {
        std::cerr << "bound violated: " << e.what() << "\n";
        return 2;
    } catch (const OutOfRegime& e) {
        std::cerr << "usage error (out of regime): " << e.what() << "\n";
        return 1;
    } catch (const ResourceLimit& e) {
        std::cerr << "usage error (resource limit): " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
