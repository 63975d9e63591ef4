#include "salem/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#ifndef SALEMLAB_BUILD_STAMP
#define SALEMLAB_BUILD_STAMP "unknown"
#endif

namespace salem {

std::string format_sig17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {
std::string format_sig6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
} // namespace

std::string flow_to_text(const TreeFlowMeasure& flow) {
    std::string out = "# flow alpha=" + format_sig17(flow.frostman_exponent()) +
                      " C=" + format_sig17(flow.frostman_constant()) +
                      " depth=" + std::to_string(flow.max_depth()) + "\n";
    for (int n = 0; n <= flow.max_depth(); ++n)
        for (const auto& [j, m] : flow.level(n))
            out += std::to_string(n) + " " + std::to_string(j) + " " + format_rational(m) + "\n";
    return out;
}

TreeFlowMeasure flow_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidSpec("flow text: empty input");
    double alpha = 0.0, c = 0.0;
    int depth = -1;
    if (std::sscanf(line.c_str(), "# flow alpha=%lf C=%lf depth=%d", &alpha, &c, &depth) != 3)
        throw InvalidSpec("flow text: bad header '" + line + "'");
    if (depth < 0 || depth > 62) throw InvalidSpec("flow text: bad depth");
    std::vector<TreeFlowMeasure::Level> levels(std::size_t(depth) + 1);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        int n;
        std::uint64_t j;
        std::string mass;
        if (!(row >> n >> j >> mass)) throw InvalidSpec("flow text: bad row '" + line + "'");
        if (n < 0 || n > depth) throw InvalidSpec("flow text: level outside depth");
        levels[std::size_t(n)].emplace_back(j, parse_rational(mass));
    }
    for (auto& lvl : levels)
        std::sort(lvl.begin(), lvl.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
    return TreeFlowMeasure(alpha, c, std::move(levels));
}

std::string word_to_text(const PackedBits& word) {
    static const char* digits = "0123456789abcdef";
    std::string out = "len=" + std::to_string(word.n) + "\n";
    const std::uint64_t bytes = (word.n + 7) / 8;
    out.reserve(out.size() + 2 * bytes + 1);
    for (std::uint64_t b = 0; b < bytes; ++b) {
        const std::uint64_t w = word.words[b >> 3];
        const unsigned byte = unsigned(w >> ((b & 7) * 8)) & 0xFFu;
        out += digits[byte >> 4];
        out += digits[byte & 0xF];
    }
    out += '\n';
    return out;
}

PackedBits word_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string header, hex;
    if (!std::getline(in, header) || header.rfind("len=", 0) != 0)
        throw InvalidSpec("word text: missing len= header");
    const std::uint64_t n = std::stoull(header.substr(4));
    if (!std::getline(in, hex)) throw InvalidSpec("word text: missing hex payload");
    const std::uint64_t bytes = (n + 7) / 8;
    if (hex.size() != 2 * bytes) throw InvalidSpec("word text: payload length mismatch");
    PackedBits out = PackedBits::zeros(n);
    auto nibble = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return unsigned(c - '0');
        if (c >= 'a' && c <= 'f') return unsigned(c - 'a' + 10);
        throw InvalidSpec("word text: bad hex digit");
    };
    for (std::uint64_t b = 0; b < bytes; ++b) {
        const unsigned byte = (nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]);
        out.words[b >> 3] |= std::uint64_t(byte) << ((b & 7) * 8);
    }
    if (n % 64 != 0) out.words[out.words.size() - 1] &= (std::uint64_t(1) << (n % 64)) - 1;
    return out;
}

std::string csv_atoms(const AtomicMeasure& measure) {
    std::string out = "t,weight\n";
    for (std::size_t i = 0; i < measure.size(); ++i)
        out += format_sig17(measure.t[i]) + "," + format_sig17(measure.w[i]) + "\n";
    return out;
}

std::string csv_spectrum(const SpectrumSample& sample) {
    std::string out = "u,re,im,abs\n";
    for (std::size_t i = 0; i < sample.grid.size(); ++i) {
        const auto v = sample.values[i];
        out += format_sig17(sample.grid[i]) + "," + format_sig17(v.real()) + "," +
               format_sig17(v.imag()) + "," + format_sig17(std::abs(v)) + "\n";
    }
    return out;
}

Json json_flow_check(const FlowCheckReport& rep) {
    return Json{{"max_violation", rep.max_violation},
                {"worst_level", rep.worst_level},
                {"worst_j", rep.worst_j},
                {"root_mass", rep.root_mass},
                {"negative_mass", rep.negative_mass},
                {"tolerance", FlowCheckReport::kTolerance},
                {"passed", rep.passed}};
}

Json json_frostman(const FrostmanReport& rep) {
    return Json{{"alpha", rep.alpha},
                {"constant", rep.constant},
                {"worst_dyadic_ratio", rep.worst_dyadic_ratio},
                {"worst_dyadic_level", rep.worst_dyadic.level},
                {"worst_dyadic_j", rep.worst_dyadic.j},
                {"worst_general_ratio", rep.worst_general_ratio},
                {"worst_general_lo", rep.worst_general_lo},
                {"worst_general_hi", rep.worst_general_hi},
                {"samples", rep.samples},
                {"passed_dyadic", rep.passed_dyadic},
                {"passed_general", rep.passed_general},
                {"passed", rep.passed}};
}

Json json_spectrum_sidecar(const SpectrumSample& sample) {
    Json blocks = Json::array();
    for (const auto& b : sample.envelope)
        blocks.push_back(Json{{"u_lo", b.u_lo},
                              {"u_hi", b.u_hi},
                              {"sup_abs", b.sup_abs},
                              {"uncertainty", b.uncertainty}});
    return Json{{"envelope", blocks},
                {"valid_u_max", sample.valid_u_max},
                {"total_mass", sample.total_mass},
                {"points", sample.grid.size()}};
}

Json json_decay(const DecayFit& fit) {
    return Json{{"exponent", fit.exponent},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"u_lo", fit.u_lo},
                {"u_hi", fit.u_hi},
                {"blocks_used", fit.blocks_used},
                {"blocks_dropped", fit.blocks_dropped},
                {"method", fit.method}};
}

Json json_moment(const MomentEstimate& est) {
    Json j{{"n", est.n},         {"q", est.q},
           {"u", est.u},         {"alpha", est.alpha},
           {"trials", est.trials}, {"seed", est.seed},
           {"mean", est.mean},   {"std_error", est.std_error},
           {"bound", est.bound}};
    if (est.exact) j["exact"] = *est.exact;
    return j;
}

Json json_tail(const TailReport& rep) {
    return Json{{"n", rep.n},
                {"u", rep.u},
                {"epsilon", rep.epsilon},
                {"q", rep.q},
                {"alpha", rep.alpha},
                {"trials", rep.trials},
                {"seed", rep.seed},
                {"threshold", rep.threshold},
                {"p_hat", rep.p_hat},
                {"chain", rep.chain},
                {"mc_error", rep.mc_error},
                {"passed", rep.passed}};
}

Json json_deficiency(const DeficiencyReport& rep) {
    return Json{{"n_bits", rep.n_bits},
                {"compressed_bits", rep.compressed_bits},
                {"deficiency", rep.deficiency},
                {"slack", rep.slack},
                {"best_method", rep.best_method},
                {"incompressible_like", rep.incompressible_like}};
}

Json json_ladder_manifest(const RefinementLadder& ladder) {
    return Json{{"seed", ladder.seed},
                {"n_min", ladder.n_min},
                {"n_max", ladder.n_max},
                {"rule", ladder.rule},
                {"distances", ladder.distances}};
}

Json json_dimension_report(const DimensionReport& rep) {
    return Json{{"ratio", rep.ratio},
                {"depth", rep.depth},
                {"stage", rep.stage},
                {"seed", rep.seed},
                {"u_max", rep.u_max},
                {"target_beta", rep.target_beta},
                {"target_gamma", rep.target_gamma},
                {"box_dimension", rep.box.dimension},
                {"box_r_squared", rep.box.r_squared},
                {"box_scales", rep.box.scales},
                {"box_counts", rep.box.counts},
                {"box_degenerate", rep.box.degenerate},
                {"capacity_crossover", rep.capacity.crossover},
                {"capacity_flagged", rep.capacity.flagged},
                {"capacity_alphas", rep.capacity.alphas},
                {"capacity_growth", rep.capacity.growth},
                {"fourier_exponent", rep.fourier_exponent},
                {"fourier_dim_estimate", rep.fourier_dim_estimate},
                {"salem_gap", rep.salem_gap},
                {"decay", json_decay(rep.decay)},
                {"flow_check", json_flow_check(rep.flow_report)},
                {"frostman", json_frostman(rep.frostman)},
                {"ladder_distances", rep.ladder_distances},
                {"fourier_below_box", rep.fourier_below_box},
                {"consistent", rep.consistent}};
}

namespace {

struct SvgCanvas {
    std::string body;
    double x0, x1, y0, y1;          // data ranges
    double px0, px1, py0, py1;      // pixel box (py0 is the TOP)

    double px(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
    double py(double y) const { return py1 - (y - y0) / (y1 - y0) * (py1 - py0); }

    void line(double xa, double ya, double xb, double yb, const char* stroke,
              double width) {
        body += "<line x1=\"" + format_sig6(xa) + "\" y1=\"" + format_sig6(ya) +
                "\" x2=\"" + format_sig6(xb) + "\" y2=\"" + format_sig6(yb) +
                "\" stroke=\"" + stroke + "\" stroke-width=\"" + format_sig6(width) +
                "\"/>\n";
    }
    void circle(double cx, double cy, double r, const char* fill) {
        body += "<circle cx=\"" + format_sig6(cx) + "\" cy=\"" + format_sig6(cy) +
                "\" r=\"" + format_sig6(r) + "\" fill=\"" + fill + "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const char* anchor = "start") {
        body += "<text x=\"" + format_sig6(x) + "\" y=\"" + format_sig6(y) +
                "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"" + anchor +
                "\">" + s + "</text>\n";
    }
    void frame() {
        body += "<rect x=\"" + format_sig6(px0) + "\" y=\"" + format_sig6(py0) +
                "\" width=\"" + format_sig6(px1 - px0) + "\" height=\"" +
                format_sig6(py1 - py0) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    }
};

std::string svg_wrap(const std::string& body, int w, int h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + std::to_string(w) +
           " " + std::to_string(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body + "</svg>\n";
}

} // namespace

std::string svg_decay_plot(const SpectrumSample& sample, const DecayFit& fit) {
    SvgCanvas c;
    c.px0 = 60;
    c.px1 = 600;
    c.py0 = 30;
    c.py1 = 420;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    std::vector<std::pair<double, double>> pts; // (log u, log env)
    for (const auto& b : sample.envelope) {
        if (b.u_lo <= 0.0 || b.sup_abs <= 0.0) continue;
        const double x = std::log(std::sqrt(b.u_lo * b.u_hi));
        const double y = std::log(b.sup_abs);
        pts.emplace_back(x, y);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (pts.empty()) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    const double pad_x = 0.05 * (xmax - xmin + 1e-9), pad_y = 0.1 * (ymax - ymin + 1e-9);
    c.x0 = xmin - pad_x;
    c.x1 = xmax + pad_x;
    c.y0 = ymin - pad_y;
    c.y1 = ymax + pad_y;
    c.frame();

    for (const auto& [x, y] : pts) c.circle(c.px(x), c.py(y), 3.5, "#1f77b4");
    if (fit.u_lo > 0.0 && fit.u_hi > fit.u_lo) {
        const double xa = std::log(fit.u_lo), xb = std::log(fit.u_hi);
        const double ya = fit.intercept - fit.exponent * xa;
        const double yb = fit.intercept - fit.exponent * xb;
        c.line(c.px(xa), c.py(ya), c.px(xb), c.py(yb), "#d62728", 1.5);
    }
    c.text(c.px0, 20, "log-log envelope of |transform|, fitted u^-" +
                          format_sig6(fit.exponent) + "  (r2=" + format_sig6(fit.r_squared) +
                          ")");
    c.text(c.px1, c.py1 + 20, "log u", "end");
    return svg_wrap(c.body, 640, 460);
}

std::string svg_dimension_plot(const DimensionReport& rep) {
    std::string body;
    // left panel: box-count regression
    {
        SvgCanvas c;
        c.px0 = 60;
        c.px1 = 450;
        c.py0 = 40;
        c.py1 = 400;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < rep.box.scales.size(); ++i) {
            const double x = std::log(1.0 / rep.box.scales[i]);
            const double y = std::log(double(rep.box.counts[i]));
            pts.emplace_back(x, y);
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        c.x0 = xmin - 0.3;
        c.x1 = xmax + 0.3;
        c.y0 = ymin - 0.3;
        c.y1 = ymax + 0.3;
        c.frame();
        for (const auto& [x, y] : pts) c.circle(c.px(x), c.py(y), 3.5, "#1f77b4");
        // fitted slope through the mean point
        double mx = 0, my = 0;
        for (const auto& [x, y] : pts) {
            mx += x;
            my += y;
        }
        if (!pts.empty()) {
            mx /= double(pts.size());
            my /= double(pts.size());
            const double ya = my + rep.box.dimension * (c.x0 - mx);
            const double yb = my + rep.box.dimension * (c.x1 - mx);
            c.line(c.px(c.x0), c.py(ya), c.px(c.x1), c.py(yb), "#d62728", 1.5);
        }
        c.text(c.px0, 25, "box counts: dim=" + format_sig6(rep.box.dimension) +
                              " (r2=" + format_sig6(rep.box.r_squared) + ")");
        body += c.body;
    }
    // right panel: energy growth vs alpha with the crossover
    {
        SvgCanvas c;
        c.px0 = 520;
        c.px1 = 920;
        c.py0 = 40;
        c.py1 = 400;
        double ymin = 1e300, ymax = -1e300;
        for (const double g : rep.capacity.growth) {
            ymin = std::min(ymin, g);
            ymax = std::max(ymax, g);
        }
        c.x0 = 0.0;
        c.x1 = 1.0;
        c.y0 = std::min(ymin, -0.01) - 0.02;
        c.y1 = std::max(ymax, rep.capacity.threshold) + 0.02;
        c.frame();
        for (std::size_t i = 0; i < rep.capacity.alphas.size(); ++i)
            c.circle(c.px(rep.capacity.alphas[i]), c.py(rep.capacity.growth[i]), 3.0,
                     "#2ca02c");
        c.line(c.px(0), c.py(rep.capacity.threshold), c.px(1), c.py(rep.capacity.threshold),
               "#888", 1.0);
        c.line(c.px(rep.capacity.crossover), c.py1, c.px(rep.capacity.crossover), c.py0,
               "#d62728", 1.0);
        c.text(c.px0, 25, "energy growth: crossover=" + format_sig6(rep.capacity.crossover));
        body += c.body;
    }
    return svg_wrap(body, 960, 440);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char ch : data) {
        h ^= std::uint64_t(static_cast<unsigned char>(ch));
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string build_stamp() { return SALEMLAB_BUILD_STAMP; }

} // namespace salem
