#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "crs/errors.hpp"
#include "crs/harness.hpp"

namespace crs::harness {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError(fmt::format("cannot open {} for writing", path.string()));
  out << content;
  out.close();
  if (!out) throw OutputError(fmt::format("failed writing {}", path.string()));
}

void require_rows(const ExperimentReport& report) {
  if (report.rows.empty() || report.aggregates.empty()) throw OutputError("report is empty; nothing to emit");
}

}  // namespace

void write_csv(std::ostream& os, const ExperimentReport& report) {
  os << kCsvHeader << '\n';
  for (const auto& r : report.rows) {
    os << fmt::format("{:g},{},{},{},{:.6f},{:.6f},{},", r.sweep, to_string(r.strategy), to_string(r.protocol), r.trial,
                      r.rate, r.theta, r.iterations);
    if (r.ms) os << fmt::format("{:.3f}", *r.ms);
    os << '\n';
  }
}

void emit_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  require_rows(report);
  std::ostringstream os;
  write_csv(os, report);
  write_file(path, os.str());
}

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

std::vector<Series> plot_series(const ExperimentReport& report) {
  // Strategies without relaying repeat across protocols; draw them once.
  std::vector<Series> out;
  std::map<std::string, std::size_t> index;
  std::map<int, Protocol> first_protocol;
  for (const auto& a : report.aggregates) {
    if (a.count == 0) continue;
    const Strategy st{a.strategy, 0.1};
    std::string label;
    if (st.uses_relays()) {
      label = fmt::format("{} ({})", to_string(a.strategy), to_string(a.protocol));
    } else {
      auto [it, _] = first_protocol.try_emplace(static_cast<int>(a.strategy), a.protocol);
      if (it->second != a.protocol) continue;
      label = std::string(to_string(a.strategy));
    }
    auto [it, inserted] = index.try_emplace(label, out.size());
    if (inserted) out.push_back({label, {}});
    out[it->second].points.emplace_back(a.sweep, a.mean_rate);
  }
  for (auto& s : out) std::sort(s.points.begin(), s.points.end());
  return out;
}

std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 ? 0.0 : v);
  return t;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

void write_svg(std::ostream& os, const ExperimentReport& report) {
  const auto series = plot_series(report);
  constexpr double width = 760, height = 480, left = 70, right = 210, top = 40, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymax = 0.0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  if (!(xmax > xmin)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + ph - y / ymax * ph; };

  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const char* xlabel = report.sweep_kind == SweepKind::snr_db     ? "SNR (dB)"
                       : report.sweep_kind == SweepKind::num_users ? "Number of users K"
                                                                   : "Relay power (dB)";

  os << fmt::format(R"svg(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">)svg",
                    width, height, width, height)
     << '\n';
  os << fmt::format(R"svg(<rect width="{}" height="{}" fill="white"/>)svg", width, height) << '\n';
  os << fmt::format(R"svg(<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>)svg", left + pw / 2,
                    escape(report.name))
     << '\n';
  for (double t : ticks(xmin, xmax)) {
    os << fmt::format(R"svg(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#ddd"/>)svg", sx(t), top, top + ph) << '\n';
    os << fmt::format(R"svg(<text x="{:.2f}" y="{:.2f}" text-anchor="middle">{:g}</text>)svg", sx(t), top + ph + 18, t) << '\n';
  }
  for (double t : ticks(0.0, ymax)) {
    os << fmt::format(R"svg(<line x1="{1:.2f}" y1="{0:.2f}" x2="{2:.2f}" y2="{0:.2f}" stroke="#ddd"/>)svg", sy(t), left, left + pw) << '\n';
    os << fmt::format(R"svg(<text x="{:.2f}" y="{:.2f}" text-anchor="end">{:g}</text>)svg", left - 6, sy(t) + 4, t) << '\n';
  }
  os << fmt::format(R"svg(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)svg", left, top, pw, ph) << '\n';
  os << fmt::format(R"svg(<text x="{:.2f}" y="{:.2f}" text-anchor="middle">{}</text>)svg", left + pw / 2, height - 18, xlabel) << '\n';
  os << fmt::format(R"svg(<text transform="translate(18 {:.2f}) rotate(-90)" text-anchor="middle">Mean max-min rate (bit/s/Hz)</text>)svg",
                    top + ph / 2)
     << '\n';

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    std::string pts;
    for (const auto& [x, y] : series[i].points) pts += fmt::format("{:.2f},{:.2f} ", sx(x), sy(y));
    os << fmt::format(R"svg(<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>)svg", color, pts) << '\n';
    for (const auto& [x, y] : series[i].points)
      os << fmt::format(R"svg(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}"/>)svg", sx(x), sy(y), color) << '\n';
    const double ly = top + 10 + 18.0 * static_cast<double>(i);
    os << fmt::format(R"svg(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="{3}" stroke-width="2"/>)svg",
                      left + pw + 12, ly, left + pw + 36, color)
       << '\n';
    os << fmt::format(R"svg(<text x="{:.2f}" y="{:.2f}">{}</text>)svg", left + pw + 42, ly + 4, escape(series[i].label)) << '\n';
  }
  os << "</svg>\n";
}

void emit_plot(const ExperimentReport& report, const std::filesystem::path& path) {
  require_rows(report);
  std::ostringstream os;
  write_svg(os, report);
  write_file(path, os.str());
}

void write_summary(std::ostream& os, const ExperimentReport& report) {
  os << "scenario " << report.name << '\n';
  os << "sweep " << to_string(report.sweep_kind) << '\n';
  os << "rows " << report.rows.size() << " failures " << report.failures.size() << '\n';
  for (const auto& a : report.aggregates)
    os << fmt::format("mean sweep={:g} strategy={} protocol={} rate={:.6f} count={} failures={}\n", a.sweep,
                      to_string(a.strategy), to_string(a.protocol), a.mean_rate, a.count, a.failures);
  for (const auto& a : report.aggregates) {
    if (a.strategy == StrategyKind::nrs || a.count == 0) continue;
    const auto base = std::find_if(report.aggregates.begin(), report.aggregates.end(), [&](const Aggregate& b) {
      return b.strategy == StrategyKind::nrs && b.sweep == a.sweep && b.protocol == a.protocol && b.count > 0;
    });
    if (base == report.aggregates.end() || base->mean_rate == 0.0) continue;
    os << fmt::format("gain sweep={:g} strategy={} protocol={} vs=NRS percent={:.2f}\n", a.sweep, to_string(a.strategy),
                      to_string(a.protocol), relative_gain_percent(a.mean_rate, base->mean_rate));
  }
  for (const auto& line : report.overhead_lines) os << line << '\n';
  for (const auto& f : report.failures)
    os << fmt::format("failure sweep={:g} strategy={} protocol={} trial={} message={}\n", f.sweep,
                      to_string(f.strategy), to_string(f.protocol), f.trial, f.message);
}

void emit_summary(const ExperimentReport& report, const std::filesystem::path& path) {
  require_rows(report);
  std::ostringstream os;
  write_summary(os, report);
  write_file(path, os.str());
}

void emit_selection_logs(const ExperimentReport& report, const std::filesystem::path& path) {
  require_rows(report);
  std::ostringstream os;
  for (const auto& r : report.rows) {
    if (r.grouping.group1.empty()) continue;
    os << fmt::format("# sweep={:g} trial={} strategy={} protocol={}\n", r.sweep, r.trial, to_string(r.strategy),
                      to_string(r.protocol));
    write_selection_log(os, r.grouping);
  }
  write_file(path, os.str());
}

}  // namespace crs::harness
