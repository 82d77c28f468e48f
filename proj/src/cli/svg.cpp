#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace swipt::cli {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series, bool log_y) {
    const double width = 800, height = 560;
    const double ml = 80, mr = 160, mt = 50, mb = 60;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (log_y && !(y > 0.0)) continue;
            if (log_y) y = std::log10(y);
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmax > xmin)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymax > ymin)) { ymin -= 0.5; ymax += 0.5; }

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) {
        if (log_y) y = std::log10(y);
        return mt + ph - (y - ymin) / (ymax - ymin) * ph;
    };

    std::string tmp = path + ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
           "font-size=\"16\">" << title << "</text>\n";

    // axes + ticks
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int nticks = 5;
    for (int i = 0; i <= nticks; ++i) {
        double fx = xmin + (xmax - xmin) * i / nticks;
        double X = px(fx);
        out << "<line x1=\"" << X << "\" y1=\"" << mt + ph << "\" x2=\"" << X
            << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << X << "\" y=\"" << mt + ph + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(fx)
            << "</text>\n";
        double fy = ymin + (ymax - ymin) * i / nticks;
        double Y = mt + ph - ph * i / nticks;
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y << "\" x2=\"" << ml
            << "\" y2=\"" << Y << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << Y + 4
            << "\" text-anchor=\"end\" font-size=\"11\">"
            << (log_y ? "1e" + fmt(fy) : fmt(fy)) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 16
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label
        << "</text>\n"
        << "<text x=\"20\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 "
           "20 " << mt + ph / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && !(s.y[i] > 0.0)) continue;
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        out << "\"/>\n";
        double ly = mt + 16 + 18 * static_cast<double>(si);
        out << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly << "\" x2=\""
            << ml + pw + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + pw + 40 << "\" y=\"" << ly + 4
            << "\" font-size=\"11\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
    out.close();
    if (!out.good()) throw std::runtime_error("I/O error writing " + tmp);
    std::filesystem::rename(tmp, path);
}

} // namespace swipt::cli
