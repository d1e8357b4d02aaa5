//===-- report.hpp - JSON and SVG report emission --------------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Writes analysis tables as JSON plus hand-emitted static SVG charts: bar
// charts for distributions, a grid heatmap for the duplication matrix, and
// log-count bar histograms for feature distributions. All output bytes are
// deterministic for fixed input.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/features.hpp"
#include "irforge/passtrace.hpp"
#include "irforge/stats.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace irforge {
namespace svg_detail {

inline std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const char *palette(std::size_t i) {
  static const char *colors[] = {"#4878a8", "#e49444", "#d1605e",
                                 "#85b6b2", "#6a9f58", "#e7cb60"};
  return colors[i % 6];
}

struct BarSeries {
  std::string name;
  std::vector<double> values; // one per group label
};

/// Grouped vertical bar chart. With log_counts set, bar heights scale as
/// log10(1 + v), which keeps heavy-tailed distributions readable.
inline std::string grouped_bar_chart(const std::string &title,
                                     const std::vector<std::string> &groups,
                                     const std::vector<BarSeries> &series,
                                     bool log_counts) {
  const double width = 960, height = 480;
  const double left = 60, right = 20, top = 56, bottom = 110;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double max_v = 0;
  for (const BarSeries &s : series)
    for (double v : s.values)
      max_v = std::max(max_v, v);
  if (max_v <= 0)
    max_v = 1;
  auto scaled = [&](double v) {
    if (v <= 0)
      return 0.0;
    if (log_counts)
      return std::log10(1.0 + v) / std::log10(1.0 + max_v);
    return v / max_v;
  };

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" "
                "height=\"%g\" viewBox=\"0 0 %g %g\" "
                "font-family=\"sans-serif\">\n",
                width, height, width, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(width / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         escape(title) + "</text>\n";

  // Legend.
  double lx = left;
  for (std::size_t s = 0; s < series.size(); ++s) {
    svg += "<rect x=\"" + fmt(lx) + "\" y=\"34\" width=\"12\" height=\"12\" "
           "fill=\"" + std::string(palette(s)) + "\"/>\n";
    svg += "<text x=\"" + fmt(lx + 16) + "\" y=\"45\" font-size=\"12\">" +
           escape(series[s].name) + "</text>\n";
    lx += 26 + 7.5 * static_cast<double>(series[s].name.size());
  }

  // Axis.
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + plot_h) +
         "\" x2=\"" + fmt(left + plot_w) + "\" y2=\"" + fmt(top + plot_h) +
         "\" stroke=\"#333\"/>\n";

  std::size_t n_groups = groups.empty() ? 1 : groups.size();
  std::size_t n_series = series.empty() ? 1 : series.size();
  double group_w = plot_w / static_cast<double>(n_groups);
  double bar_w = group_w * 0.8 / static_cast<double>(n_series);

  for (std::size_t g = 0; g < groups.size(); ++g) {
    double gx = left + group_w * static_cast<double>(g) + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      double v = g < series[s].values.size() ? series[s].values[g] : 0;
      double h = plot_h * scaled(v);
      double x = gx + bar_w * static_cast<double>(s);
      double y = top + plot_h - h;
      svg += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
             fmt(bar_w) + "\" height=\"" + fmt(h) + "\" fill=\"" +
             std::string(palette(s)) + "\"/>\n";
      if (v > 0 && series.size() == 1)
        svg += "<text x=\"" + fmt(x + bar_w / 2) + "\" y=\"" + fmt(y - 4) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + fmt(v) +
               "</text>\n";
    }
    double label_x = left + group_w * (static_cast<double>(g) + 0.5);
    double label_y = top + plot_h + 14;
    svg += "<text font-size=\"11\" text-anchor=\"end\" transform=\"rotate(-45 " +
           fmt(label_x) + " " + fmt(label_y) + ")\" x=\"" + fmt(label_x) +
           "\" y=\"" + fmt(label_y) + "\">" + escape(groups[g]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string bar_chart(const std::string &title,
                             const std::vector<std::string> &labels,
                             const std::vector<double> &values,
                             bool log_counts = false) {
  BarSeries s;
  s.name = "count";
  s.values = values;
  return grouped_bar_chart(title, labels, {s}, log_counts);
}

/// Grid heatmap with printed cell values; absent cells render gray "n/a".
inline std::string heatmap(const std::string &title,
                           const std::vector<std::string> &labels,
                           const std::vector<std::vector<std::optional<double>>>
                               &cells) {
  const double cell = 64, label_w = 86, label_h = 28, top = 40;
  std::size_t n = labels.size();
  double width = label_w + cell * static_cast<double>(n) + 20;
  double height = top + label_h + cell * static_cast<double>(n) + 20;

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" "
                "height=\"%g\" viewBox=\"0 0 %g %g\" "
                "font-family=\"sans-serif\">\n",
                width, height, width, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(width / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(title) + "</text>\n";

  for (std::size_t j = 0; j < n; ++j)
    svg += "<text x=\"" + fmt(label_w + cell * (static_cast<double>(j) + 0.5)) +
           "\" y=\"" + fmt(top + label_h - 8) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + escape(labels[j]) +
           "</text>\n";

  for (std::size_t i = 0; i < n; ++i) {
    double y = top + label_h + cell * static_cast<double>(i);
    svg += "<text x=\"" + fmt(label_w - 8) + "\" y=\"" + fmt(y + cell / 2 + 4) +
           "\" text-anchor=\"end\" font-size=\"12\">" + escape(labels[i]) +
           "</text>\n";
    for (std::size_t j = 0; j < n; ++j) {
      double x = label_w + cell * static_cast<double>(j);
      std::string fill = "#eeeeee";
      std::string text = "n/a";
      std::string text_color = "#666666";
      if (i < cells.size() && j < cells[i].size() && cells[i][j]) {
        double v = std::min(1.0, std::max(0.0, *cells[i][j]));
        // Linear blend from near-white to a deep blue.
        int r = static_cast<int>(247 + (8 - 247) * v);
        int g = static_cast<int>(251 + (81 - 251) * v);
        int b = static_cast<int>(255 + (156 - 255) * v);
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        fill = buf;
        std::snprintf(buf, sizeof buf, "%.2f", *cells[i][j]);
        text = buf;
        text_color = v > 0.55 ? "#ffffff" : "#222222";
      }
      svg += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
             fmt(cell) + "\" height=\"" + fmt(cell) + "\" fill=\"" + fill +
             "\" stroke=\"#cccccc\"/>\n";
      svg += "<text x=\"" + fmt(x + cell / 2) + "\" y=\"" +
             fmt(y + cell / 2 + 4) +
             "\" text-anchor=\"middle\" font-size=\"12\" fill=\"" +
             text_color + "\">" + text + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

} // namespace svg_detail

struct ReportInputs {
  std::optional<OpcodeTable> opcodes;
  std::optional<DuplicationMatrix> heatmap;
  std::vector<Histogram> histograms;
  std::optional<MutationTable> passes;
};

struct ReportOutput {
  std::vector<std::string> files;
  std::vector<std::string> notices;
};

inline nlohmann::json histogram_to_json(const Histogram &h) {
  nlohmann::json j;
  j["property"] = h.property;
  j["edges"] = h.edges;
  j["log_scale"] = h.log_scale;
  j["series"] = nlohmann::json::array();
  for (const Histogram::Series &s : h.series) {
    nlohmann::json sj;
    sj["language"] = to_string(s.language);
    sj["counts"] = s.counts;
    sj["out_of_range"] = s.out_of_range;
    sj["sample_size"] = s.sample_size;
    j["series"].push_back(sj);
  }
  return j;
}

namespace detail {

inline std::string histogram_svg(const Histogram &h) {
  std::vector<std::string> groups;
  for (std::size_t i = 0; i + 1 < h.edges.size(); ++i)
    groups.push_back("[" + svg_detail::fmt(h.edges[i]) + ", " +
                     svg_detail::fmt(h.edges[i + 1]) + ")");
  bool any_overflow = false;
  for (const Histogram::Series &s : h.series)
    any_overflow = any_overflow || s.out_of_range > 0;
  if (any_overflow)
    groups.push_back(">= " + svg_detail::fmt(h.edges.back()));

  std::vector<svg_detail::BarSeries> series;
  for (const Histogram::Series &s : h.series) {
    svg_detail::BarSeries bars;
    bars.name = to_string(s.language);
    for (std::uint64_t c : s.counts)
      bars.values.push_back(static_cast<double>(c));
    if (any_overflow)
      bars.values.push_back(static_cast<double>(s.out_of_range));
    series.push_back(std::move(bars));
  }
  return svg_detail::grouped_bar_chart(h.property, groups, series, true);
}

inline std::string sanitize_filename(std::string_view name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_')
               ? c
               : '_';
  return out.empty() ? std::string("table") : out;
}

} // namespace detail

/// Writes every provided table under out_dir as JSON plus an SVG chart and
/// returns the file list. Charts that would be empty are skipped with a
/// notice instead of producing degenerate output.
inline ReportOutput render_report(const ReportInputs &inputs,
                                  const std::filesystem::path &out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  ReportOutput out;
  auto emit = [&](const fs::path &path, const std::string &bytes) {
    write_file(path, bytes);
    out.files.push_back(path.string());
  };

  if (inputs.opcodes) {
    const OpcodeTable &t = *inputs.opcodes;
    emit(out_dir / "opcodes.json", opcode_table_to_json(t).dump(2) + "\n");
    if (t.aggregate.top.empty()) {
      out.notices.push_back("opcode chart skipped: no instructions counted");
    } else {
      std::vector<std::string> labels;
      std::vector<double> values;
      for (const OpcodeTable::Entry &e : t.aggregate.top) {
        labels.push_back(e.opcode);
        values.push_back(static_cast<double>(e.count));
      }
      if (t.aggregate.other > 0) {
        labels.push_back("(other)");
        values.push_back(static_cast<double>(t.aggregate.other));
      }
      emit(out_dir / "opcodes.svg",
           svg_detail::bar_chart("Instruction counts (all languages)", labels,
                                 values, false));
    }
  }

  if (inputs.heatmap) {
    const DuplicationMatrix &m = *inputs.heatmap;
    emit(out_dir / "dup_heatmap.json",
         duplication_matrix_to_json(m).dump(2) + "\n");
    if (m.languages.empty()) {
      out.notices.push_back("duplication heatmap skipped: empty matrix");
    } else {
      std::vector<std::string> labels;
      for (LanguageTag lang : m.languages)
        labels.push_back(to_string(lang));
      emit(out_dir / "dup_heatmap.svg",
           svg_detail::heatmap("Cross-language function duplication", labels,
                               m.cells));
    }
  }

  for (const Histogram &h : inputs.histograms) {
    std::string stem = "hist_" + detail::sanitize_filename(h.property);
    emit(out_dir / (stem + ".json"), histogram_to_json(h).dump(2) + "\n");
    if (h.series.empty())
      out.notices.push_back("histogram '" + h.property +
                            "' chart skipped: no series");
    else
      emit(out_dir / (stem + ".svg"), detail::histogram_svg(h));
  }

  if (inputs.passes) {
    const MutationTable &t = *inputs.passes;
    emit(out_dir / "passes.json", mutation_table_to_json(t).dump(2) + "\n");
    if (t.rows.empty()) {
      out.notices.push_back("pass chart skipped: no rows");
    } else {
      std::vector<std::string> labels;
      std::vector<double> values;
      std::size_t limit = std::min<std::size_t>(t.rows.size(), 20);
      for (std::size_t i = 0; i < limit; ++i) {
        labels.push_back(t.rows[i].pass_name);
        values.push_back(t.rows[i].max_frequency);
      }
      emit(out_dir / "passes.svg",
           svg_detail::bar_chart("Pass mutation frequency (max over languages)",
                                 labels, values, false));
    }
  }
  return out;
}

} // namespace irforge
