#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "racim/cocycle.hpp"
#include "racim/fourier.hpp"
#include "racim/ulam.hpp"

namespace racim::io {

/// 17 significant digits: doubles survive a round trip, so CSV artifacts are
/// byte-exact across runs.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

/// Density CSV: header "x,value", x at bin midpoints.
inline std::string density_csv(const BinnedDensity& d) {
    std::ostringstream s;
    s << "x,value\n";
    for (int j = 0; j < d.k; ++j)
        s << fmt((j + 0.5) / static_cast<double>(d.k)) << ','
          << fmt(d.values[static_cast<std::size_t>(j)]) << '\n';
    return s.str();
}

/// Density CSV from Fourier coefficients sampled at n midpoints.
inline std::string density_csv(const FourierDensity& f, int n) {
    std::vector<double> samples = evaluate_density(f, n);
    std::ostringstream s;
    s << "x,value\n";
    for (int l = 0; l < n; ++l)
        s << fmt((l + 0.5) / static_cast<double>(n)) << ','
          << fmt(samples[static_cast<std::size_t>(l)]) << '\n';
    return s.str();
}

/// Fourier coefficients as CSV rows (m, real, imag).
inline std::string fourier_csv(const FourierDensity& f) {
    std::ostringstream s;
    s << "m,real,imag\n";
    for (int m = -f.K; m <= f.K; ++m)
        s << m << ',' << fmt(f.c(m).real()) << ',' << fmt(f.c(m).imag()) << '\n';
    return s.str();
}

/// Dense CSV of an Ulam matrix.
inline std::string matrix_csv(const UlamMatrix& M) {
    std::ostringstream s;
    for (int i = 0; i < M.k(); ++i) {
        for (int j = 0; j < M.k(); ++j) {
            if (j) s << ',';
            s << fmt(M.entry(i, j));
        }
        s << '\n';
    }
    return s.str();
}

/// Coordinate-triplet text (i j value per line) for sparse export.
inline std::string matrix_triplets(const UlamMatrix& M) {
    std::ostringstream s;
    for (const auto& [i, j, w] : M.triplets())
        s << i << ' ' << j << ' ' << fmt(w) << '\n';
    return s.str();
}

/// Galerkin matrix as CSV of interleaved real/imag parts.
inline std::string galerkin_csv(const GalerkinMatrix& A) {
    std::ostringstream s;
    const int n = 2 * A.K + 1;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (c) s << ',';
            Complex v = A.entries[static_cast<std::size_t>(r) * n + c];
            s << fmt(v.real()) << ',' << fmt(v.imag());
        }
        s << '\n';
    }
    return s.str();
}

/// Study table CSV: parameter, distance.
inline std::string table_csv(const RunSummaryTable& t) {
    std::ostringstream s;
    s << "parameter,distance\n";
    for (const auto& row : t.rows)
        s << fmt(row.parameter) << ',' << fmt(row.distance) << '\n';
    return s.str();
}

// ---------------------------------------------------------------------------
// Self-contained SVG line charts (no plotting dependency)
// ---------------------------------------------------------------------------

struct Series {
    std::string label;
    std::string color = "#1f77b4";
    double stroke_width = 1.5;
    std::vector<double> xs, ys;
};

struct PlotPanel {
    std::string title;
    std::vector<Series> series;
};

/// Renders a row-major grid of line-chart panels as a standalone SVG string.
inline std::string svg_panels(const std::vector<PlotPanel>& panels, int columns,
                              int panel_w = 320, int panel_h = 240) {
    int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
    int W = columns * panel_w, H = rows * panel_h;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    s << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    const int ml = 42, mr = 12, mt = 28, mb = 30;  // margins inside each panel
    for (std::size_t p = 0; p < panels.size(); ++p) {
        int px = (static_cast<int>(p) % columns) * panel_w;
        int py = (static_cast<int>(p) / columns) * panel_h;
        const PlotPanel& panel = panels[p];
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const Series& se : panel.series)
            for (std::size_t i = 0; i < se.xs.size(); ++i) {
                xmin = std::min(xmin, se.xs[i]);
                xmax = std::max(xmax, se.xs[i]);
                ymin = std::min(ymin, se.ys[i]);
                ymax = std::max(ymax, se.ys[i]);
            }
        if (xmin >= xmax) (xmin = 0.0), (xmax = 1.0);
        if (ymin >= ymax) (ymin -= 0.5), (ymax += 0.5);
        double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
        double iw = panel_w - ml - mr, ih = panel_h - mt - mb;
        auto X = [&](double x) { return px + ml + (x - xmin) / (xmax - xmin) * iw; };
        auto Y = [&](double y) { return py + mt + ih - (y - ymin) / (ymax - ymin) * ih; };

        s << "<rect x=\"" << px + ml << "\" y=\"" << py + mt << "\" width=\"" << iw
          << "\" height=\"" << ih << "\" fill=\"none\" stroke=\"#444\"/>\n";
        s << "<text x=\"" << px + panel_w / 2 << "\" y=\"" << py + 18
          << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
          << panel.title << "</text>\n";
        // axis ticks at the extremes
        for (double tx : {xmin, xmax})
            s << "<text x=\"" << X(tx) << "\" y=\"" << py + panel_h - 10
              << "\" font-size=\"9\" text-anchor=\"middle\" font-family=\"sans-serif\">"
              << fmt(tx).substr(0, 6) << "</text>\n";
        for (double ty : {ymin + pad, ymax - pad})
            s << "<text x=\"" << px + ml - 4 << "\" y=\"" << Y(ty) + 3
              << "\" font-size=\"9\" text-anchor=\"end\" font-family=\"sans-serif\">"
              << fmt(ty).substr(0, 6) << "</text>\n";
        for (const Series& se : panel.series) {
            s << "<polyline fill=\"none\" stroke=\"" << se.color << "\" stroke-width=\""
              << se.stroke_width << "\" points=\"";
            for (std::size_t i = 0; i < se.xs.size(); ++i) {
                if (i) s << ' ';
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.2f,%.2f", X(se.xs[i]), Y(se.ys[i]));
                s << buf;
            }
            s << "\"/>\n";
        }
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace racim::io
