// Copyright 2026 The convduel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "convduel/cli/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace convduel::cli {

std::string format_double(double value) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return buf.data();
}

std::string runs_csv(const RegretTrace& trace) {
  std::string out = "t,seed,instant_regret,cum_regret\n";
  for (const auto& run : trace.runs) {
    const std::string label = std::to_string(run.label);
    for (std::size_t i = 0; i < run.instant.size(); ++i) {
      out += std::to_string(i + 1);
      out += ',';
      out += label;
      out += ',';
      out += format_double(run.instant[i]);
      out += ',';
      out += format_double(run.cumulative[i]);
      out += '\n';
    }
  }
  return out;
}

std::string aggregate_csv(const RegretTrace& trace) {
  std::string out = "t,mean_cum,stderr_cum\n";
  for (std::size_t i = 0; i < trace.mean_cum.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_double(trace.mean_cum[i]) + ',' +
           format_double(trace.stderr_cum[i]) + '\n';
  }
  return out;
}

CurveSeries read_aggregate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,mean_cum,stderr_cum") {
    throw FormatError(path + ":1: expected header t,mean_cum,stderr_cum");
  }
  CurveSeries s;
  s.label = std::filesystem::path(path).stem().string();
  const std::string suffix = "_aggregate";
  if (s.label.size() > suffix.size() && s.label.ends_with(suffix)) {
    s.label.resize(s.label.size() - suffix.size());
  }
  for (int number = 2; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 3> v{};
    std::istringstream fields(line);
    std::string field;
    int count = 0;
    bool ok = true;
    while (std::getline(fields, field, ',')) {
      if (count >= 3) {
        ok = false;
        break;
      }
      try {
        std::size_t used = 0;
        v[static_cast<std::size_t>(count)] = std::stod(field, &used);
        ok = ok && used == field.size() && std::isfinite(v[static_cast<std::size_t>(count)]);
      } catch (const std::exception&) {
        ok = false;
      }
      ++count;
    }
    if (!ok || count != 3) throw FormatError(path + ":" + std::to_string(number) + ": malformed row");
    if (!s.t.empty() && v[0] <= s.t.back()) {
      throw FormatError(path + ":" + std::to_string(number) + ": t must increase");
    }
    s.t.push_back(v[0]);
    s.mean.push_back(v[1]);
    s.stderr_.push_back(v[2]);
  }
  if (s.t.empty()) throw FormatError(path + ": no data rows");
  return s;
}

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

std::string tick_label(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%g", v);
  return buf.data();
}

// Round step of about range / 5.
double nice_step(double range) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<CurveSeries>& series, const std::string& title) {
  if (series.empty()) throw FormatError("nothing to plot");
  for (const auto& s : series) {
    if (s.t != series.front().t) {
      throw FormatError("series '" + s.label + "' does not share t values with '" + series.front().label + "'");
    }
  }
  constexpr double kWidth = 720, kHeight = 480, kLeft = 80, kRight = 180, kTop = 50, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto& t = series.front().t;
  const double x_lo = t.front();
  const double x_hi = t.size() > 1 ? t.back() : t.front() + 1.0;
  double y_hi = 0.0;
  double y_lo = 0.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      y_hi = std::max(y_hi, s.mean[i] + s.stderr_[i]);
      y_lo = std::min(y_lo, s.mean[i] - s.stderr_[i]);
    }
  }
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  const auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";

  // Axes and ticks.
  svg << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop + plot_h)
      << "\" x2=\"" << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(kTop + plot_h) << "\"/><line x1=\""
      << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft) << "\" y2=\"" << fmt(kTop + plot_h)
      << "\"/></g>\n";
  svg << "<g class=\"ticks\">\n";
  const double xs = nice_step(x_hi - x_lo);
  for (double x = std::ceil(x_lo / xs) * xs; x <= x_hi + 1e-9 * xs; x += xs) {
    svg << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  const double ys = nice_step(y_hi - y_lo);
  for (double y = std::ceil(y_lo / ys) * ys; y <= y_hi + 1e-9 * ys; y += ys) {
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(y) + 4) << "\" text-anchor=\"end\">"
        << tick_label(y) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 15)
      << "\" text-anchor=\"middle\">round t</text>\n";
  svg << "<text transform=\"translate(20," << fmt(kTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">cumulative regret</text>\n";

  // Thin long series to at most ~600 points per curve.
  const std::size_t stride = std::max<std::size_t>(1, t.size() / 600);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); i += stride) idx.push_back(i);
  if (idx.back() != t.size() - 1) idx.push_back(t.size() - 1);

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i : idx) svg << fmt(px(t[i])) << ',' << fmt(py(s.mean[i] + s.stderr_[i])) << ' ';
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
      svg << fmt(px(t[*it])) << ',' << fmt(py(s.mean[*it] - s.stderr_[*it])) << ' ';
    }
    svg << "\"/>\n";
    svg << "<polyline class=\"mean\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i : idx) svg << fmt(px(t[i])) << ',' << fmt(py(s.mean[i])) << ' ';
    svg << "\"/>\n";
  }

  svg << "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(k);
    const double x = kLeft + plot_w + 20;
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x + 24) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"" << kPalette[k % kPalette.size()] << "\" stroke-width=\"2\"/><text x=\"" << fmt(x + 30)
        << "\" y=\"" << fmt(y + 4) << "\">" << escape(series[k].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FormatError("failed writing '" + path + "'");
}

}  // namespace convduel::cli
