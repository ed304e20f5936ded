#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "torwalk/experiment.hpp"
#include "torwalk/version.hpp"

namespace torwalk {

RunManifest make_manifest(const WalkConfig& cfg, std::vector<std::string> outputs) {
    RunManifest m;
    m.version = kVersion;
    m.config_hash = config_hash(cfg);
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.timestamp = buf;
    m.outputs = std::move(outputs);
    return m;
}

std::string csv_header() { return "target,detector,k,samples,positives,p_hat,ci_lo,ci_hi"; }

std::string csv_row(const CellStats& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%ld,%ld,%.9g,%.9g,%.9g", c.target.c_str(),
                  c.detector.c_str(), c.k, c.samples, c.positives, c.p_hat, c.ci_lo, c.ci_hi);
    return buf;
}

void write_report_csv(const DecayReport& rep, std::ostream& out) {
    out << csv_header() << "\n";
    for (const CellStats& c : rep.cells) out << csv_row(c) << "\n";
}

std::vector<CellStats> read_csv_report(std::istream& in) {
    std::vector<CellStats> out;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV report");
    if (line != csv_header()) throw std::runtime_error("unexpected CSV header: " + line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) parts.push_back(field);
        if (parts.size() != 8) throw std::runtime_error("bad CSV row: " + line);
        CellStats c;
        c.target = parts[0];
        c.detector = parts[1];
        c.k = std::stoi(parts[2]);
        c.samples = std::stol(parts[3]);
        c.positives = std::stol(parts[4]);
        c.p_hat = std::stod(parts[5]);
        c.ci_lo = std::stod(parts[6]);
        c.ci_hi = std::stod(parts[7]);
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["version"] = m.version;
    j["config_hash"] = m.config_hash;
    j["timestamp"] = m.timestamp;
    j["outputs"] = m.outputs;
    return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(const DecayReport& rep, const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["schema"] = "torwalk.report/1";
    j["manifest"] = manifest_to_json(manifest);
    j["config"] = config_to_json(rep.config);
    nlohmann::ordered_json fits = nlohmann::ordered_json::array();
    for (const DetectorFit& f : rep.fits) {
        nlohmann::ordered_json jf;
        jf["detector"] = f.detector;
        jf["alpha_hat"] = f.alpha_hat;
        jf["intercept"] = f.intercept;
        jf["r2"] = f.r2;
        jf["cells_used"] = f.cells_used;
        jf["rule_of_three_cells"] = f.rule_of_three_cells;
        jf["rule_of_three_bound"] = f.rule_of_three_bound;
        fits.push_back(std::move(jf));
    }
    j["fits"] = std::move(fits);
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const CellStats& c : rep.cells) {
        nlohmann::ordered_json jc;
        jc["detector"] = c.detector;
        jc["k"] = c.k;
        jc["samples"] = c.samples;
        jc["positives"] = c.positives;
        jc["p_hat"] = c.p_hat;
        jc["ci_lo"] = c.ci_lo;
        jc["ci_hi"] = c.ci_hi;
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    j["containment_violations"] = rep.containment_violations;
    return j;
}

namespace {

const char* series_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    return palette[i % (sizeof palette / sizeof palette[0])];
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string report_to_svg(const DecayReport& rep, const RunManifest& manifest) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 30, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<!-- torwalk " << manifest.version << " config " << manifest.config_hash << " -->\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    int kmin = rep.config.k_grid.front(), kmax = rep.config.k_grid.back();
    double ymin = 0;
    bool any = false;
    for (const CellStats& c : rep.cells)
        if (c.positives > 0) {
            ymin = std::min(ymin, std::log(c.p_hat));
            any = true;
        }
    if (!any) {
        svg << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no positive cells</text>\n"
            << "</svg>\n";
        return svg.str();
    }
    ymin = std::floor(ymin) - 0.5;
    const double ymax = 0.5;
    auto sx = [&](double k) {
        return kmax > kmin ? ml + (k - kmin) / (kmax - kmin) * pw : ml + pw / 2;
    };
    auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    for (int k : rep.config.k_grid) {
        svg << "<text x=\"" << sx(k) << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << k
            << "</text>\n";
    }
    for (double y = 0; y >= ymin; y -= 2) {
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << sy(y) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(y)
            << "</text>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << sy(y) << "\" x2=\"" << ml + pw << "\" y2=\""
            << sy(y) << "\" stroke=\"#dddddd\"/>\n";
    }
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">walk length k"
           "</text>\n";
    svg << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">log p</text>\n";

    const auto& dets = rep.config.detectors;
    for (std::size_t d = 0; d < dets.size(); ++d) {
        const char* color = series_color(d);
        std::string pts;
        for (const CellStats& c : rep.cells) {
            if (c.detector != dets[d] || c.positives == 0) continue;
            const double x = sx(c.k), y = sy(std::log(c.p_hat));
            pts += std::to_string(x) + "," + std::to_string(y) + " ";
            svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        }
        if (!pts.empty())
            svg << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"/>\n";
        for (const DetectorFit& f : rep.fits) {
            if (f.detector != dets[d] || f.cells_used < 2) continue;
            const double y1 = f.intercept - f.alpha_hat * kmin;
            const double y2 = f.intercept - f.alpha_hat * kmax;
            svg << "<line x1=\"" << sx(kmin) << "\" y1=\"" << sy(y1) << "\" x2=\"" << sx(kmax)
                << "\" y2=\"" << sy(y2) << "\" stroke=\"" << color
                << "\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
        }
        svg << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 16 + 16 * d
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\""
            << color << "\">" << dets[d] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace torwalk
