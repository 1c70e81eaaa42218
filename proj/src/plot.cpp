#include "soak/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

namespace soak {

namespace {

std::string xml_escape(const std::string& text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c; break;
        }
    }
    return out;
}

std::string num(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::string fixed1(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    return buf;
}

struct Scale {
    double lo = 0.0;
    double hi = 1.0;
    double x0 = 0.0;
    double width = 1.0;

    double at(double v) const {
        if (hi == lo) return x0 + width / 2.0;
        return x0 + (v - lo) / (hi - lo) * width;
    }
};

Scale make_scale(double lo, double hi, double x0, double width) {
    if (lo > hi) std::swap(lo, hi);
    const double pad = (hi - lo) * 0.05 + 1e-9;
    return Scale{lo - pad, hi + pad, x0, width};
}

void segment_row(std::string& svg, const Scale& scale, double y, double lo, double hi,
                 double mean, const char* color) {
    svg += "<line x1=\"" + num(scale.at(lo)) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(scale.at(hi)) + "\" y2=\"" + num(y) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    for (const double v : {lo, hi}) {
        svg += "<line x1=\"" + num(scale.at(v)) + "\" y1=\"" + num(y - 4) + "\" x2=\"" +
               num(scale.at(v)) + "\" y2=\"" + num(y + 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
    }
    svg += "<circle cx=\"" + num(scale.at(mean)) + "\" cy=\"" + num(y) +
           "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
}

void vline(std::string& svg, double x, double y0, double y1, const char* color,
           bool dashed) {
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x) +
           "\" y2=\"" + num(y1) + "\" stroke=\"" + color + "\" stroke-width=\"1\"";
    if (dashed) svg += " stroke-dasharray=\"4 3\"";
    svg += "/>\n";
}

void text(std::string& svg, double x, double y, const std::string& content,
          const char* anchor = "start", const char* fill = "#222") {
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
           "\" fill=\"" + std::string(fill) + "\">" + xml_escape(content) + "</text>\n";
}

std::string svg_open(double width, double height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
           num(height) +
           "\" font-family=\"monospace\" font-size=\"11\">\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string render_comparison_svg(const std::vector<SubsetComparison>& rows) {
    if (rows.empty()) throw std::invalid_argument("nothing to plot: no comparison rows");

    struct Group {
        double diff_lo = 0.0, diff_hi = 0.0, diff_mean = 0.0;
        double lp_lo = 0.0, lp_hi = 0.0, lp_mean = 0.0;
    };
    // (dataset, learner, kind) -> aggregate over subsets
    std::map<std::tuple<std::string, std::string, int>, std::vector<const SubsetComparison*>>
        grouped;
    for (const SubsetComparison& row : rows) {
        grouped[{row.dataset, row.learner, static_cast<int>(row.kind)}].push_back(&row);
    }

    std::vector<std::pair<std::string, Group>> panels;
    double diff_min = 0.0;  // always include the zero line
    double diff_max = 0.0;
    double lp_min = std::log10(0.05);  // always include the reference line
    double lp_max = std::log10(0.05);
    for (const auto& [key, members] : grouped) {
        Group g;
        g.diff_lo = g.diff_hi = members.front()->mean_diff;
        g.lp_lo = g.lp_hi = log10_clamped(members.front()->p_value);
        double diff_sum = 0.0;
        double lp_sum = 0.0;
        for (const SubsetComparison* c : members) {
            const double lp = log10_clamped(c->p_value);
            g.diff_lo = std::min(g.diff_lo, c->mean_diff);
            g.diff_hi = std::max(g.diff_hi, c->mean_diff);
            g.lp_lo = std::min(g.lp_lo, lp);
            g.lp_hi = std::max(g.lp_hi, lp);
            diff_sum += c->mean_diff;
            lp_sum += lp;
        }
        g.diff_mean = diff_sum / static_cast<double>(members.size());
        g.lp_mean = lp_sum / static_cast<double>(members.size());
        diff_min = std::min(diff_min, g.diff_lo);
        diff_max = std::max(diff_max, g.diff_hi);
        lp_min = std::min(lp_min, g.lp_lo);
        lp_max = std::max(lp_max, g.lp_hi);

        const std::string label = std::get<0>(key) + " \xc2\xb7 " + std::get<1>(key) +
                                  " \xc2\xb7 " +
                                  std::string(to_string(static_cast<ComparisonKind>(
                                      std::get<2>(key))));
        panels.emplace_back(label, g);
    }

    const double label_w = 300.0;
    const double panel_w = 230.0;
    const double gap = 60.0;
    const double row_h = 26.0;
    const double top = 44.0;
    const double width = label_w + panel_w + gap + panel_w + 20.0;
    const double height = top + row_h * static_cast<double>(panels.size()) + 40.0;

    const Scale lp_scale = make_scale(lp_min, lp_max, label_w, panel_w);
    const Scale diff_scale = make_scale(diff_min, diff_max, label_w + panel_w + gap, panel_w);

    std::string svg = svg_open(width, height);
    text(svg, label_w + panel_w / 2, 18, "log10(p)", "middle");
    text(svg, label_w + panel_w + gap + panel_w / 2, 18,
         "error difference vs Same (points)", "middle");

    const double rows_bottom = top + row_h * static_cast<double>(panels.size());
    vline(svg, lp_scale.at(std::log10(0.05)), top - 8, rows_bottom + 4, "#999", true);
    vline(svg, diff_scale.at(0.0), top - 8, rows_bottom + 4, "#999", false);

    for (std::size_t i = 0; i < panels.size(); ++i) {
        const double y = top + row_h * static_cast<double>(i) + row_h / 2.0;
        text(svg, 8, y + 4, panels[i].first);
        const Group& g = panels[i].second;
        segment_row(svg, lp_scale, y, g.lp_lo, g.lp_hi, g.lp_mean, "#1f5fa6");
        segment_row(svg, diff_scale, y, g.diff_lo, g.diff_hi, g.diff_mean, "#a63b1f");
        text(svg, width - 14, y + 4,
             fixed1(g.diff_lo) + " .. " + fixed1(g.diff_hi), "end", "#555");
    }

    text(svg, label_w, rows_bottom + 24, fixed1(lp_scale.lo), "middle", "#555");
    text(svg, label_w + panel_w, rows_bottom + 24, fixed1(lp_scale.hi), "middle", "#555");
    text(svg, label_w + panel_w + gap, rows_bottom + 24, fixed1(diff_scale.lo), "middle",
         "#555");
    text(svg, label_w + panel_w + gap + panel_w, rows_bottom + 24, fixed1(diff_scale.hi),
         "middle", "#555");
    svg += "</svg>\n";
    return svg;
}

std::string render_error_stats_svg(const std::vector<ErrorStats>& rows) {
    if (rows.empty()) throw std::invalid_argument("nothing to plot: no error stats");

    // (dataset, subset) panel -> (learner, policy) rows, percent scale
    std::map<std::pair<std::string, std::string>,
             std::map<std::pair<std::string, int>, const ErrorStats*>>
        panels;
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const ErrorStats& row : rows) {
        panels[{row.dataset, row.subset}][{row.learner, static_cast<int>(row.policy)}] = &row;
        const double a = (row.mean_error - row.sd_error) * 100.0;
        const double b = (row.mean_error + row.sd_error) * 100.0;
        if (first) {
            lo = a;
            hi = b;
            first = false;
        } else {
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
    }

    const double label_w = 300.0;
    const double panel_w = 420.0;
    const double row_h = 22.0;
    const double panel_header = 24.0;
    const double panel_pad = 14.0;
    const double top = 40.0;
    const double width = label_w + panel_w + 20.0;

    double height = top + 30.0;
    for (const auto& [key, members] : panels) {
        (void)key;
        height += panel_header + row_h * static_cast<double>(members.size()) + panel_pad;
    }

    const Scale scale = make_scale(lo, hi, label_w, panel_w);

    std::string svg = svg_open(width, height);
    text(svg, label_w + panel_w / 2, 18, "test error over folds, mean \xc2\xb1 SD (%)",
         "middle");

    double y = top;
    for (const auto& [key, members] : panels) {
        text(svg, 8, y + 14, key.first + " \xc2\xb7 subset " + key.second, "start", "#000");
        y += panel_header;
        for (const auto& [row_key, stats] : members) {
            const double cy = y + row_h / 2.0;
            const std::string policy_name(to_string(static_cast<TrainPolicy>(row_key.second)));
            text(svg, 24, cy + 4, policy_name + " \xc2\xb7 " + row_key.first, "start", "#333");
            const double mean = stats->mean_error * 100.0;
            const double sd = stats->sd_error * 100.0;
            segment_row(svg, scale, cy, mean - sd, mean + sd, mean, "#2a7a2a");
            y += row_h;
        }
        y += panel_pad;
    }

    text(svg, label_w, y + 14, fixed1(scale.lo), "middle", "#555");
    text(svg, label_w + panel_w, y + 14, fixed1(scale.hi), "middle", "#555");
    svg += "</svg>\n";
    return svg;
}

}  // namespace soak
