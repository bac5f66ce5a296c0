#include "storyeval/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "storyeval/hash.hpp"

namespace storyeval {

namespace {

using GroupKey = std::tuple<std::string, std::string, std::optional<std::uint64_t>>;

std::string k_label(const std::optional<std::uint64_t>& k) {
  return k ? std::to_string(*k) : std::string("human");
}

std::string group_label(const GroupKey& g) {
  return std::get<0>(g) + "/" + std::get<1>(g) + "/k=" + k_label(std::get<2>(g));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_number(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number in report: '" + s + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad integer in report: '" + s + "'");
  }
  return v;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back == v) break;
  }
  return buf;
}

MetricReport aggregate(std::span<const MetricValue> values, const std::string& fingerprint) {
  std::map<GroupKey, std::vector<double>> groups;
  std::map<GroupKey, std::size_t> absent;
  for (const auto& v : values) {
    GroupKey key{v.metric, v.model, v.k};
    auto& bucket = groups[key];
    if (v.value) {
      bucket.push_back(*v.value);
    } else {
      ++absent[key];
    }
  }

  MetricReport report;
  for (const auto& [key, xs] : groups) {
    if (auto it = absent.find(key); it != absent.end()) {
      report.excluded[group_label(key)] = it->second;
    }
    if (xs.empty()) {
      report.warnings.push_back("no values for " + group_label(key) + "; row dropped");
      continue;
    }
    const auto n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    ReportRow row;
    std::tie(row.metric, row.model, row.k) = key;
    row.mean = mean;
    row.std_err = sd / std::sqrt(n);
    row.n = xs.size();
    row.fingerprint = fingerprint;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_csv(const MetricReport& report) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.metric) + ',' + csv_field(r.model) + ',' + k_label(r.k) + ',' +
           format_double(r.mean) + ',' + format_double(r.std_err) + ',' +
           std::to_string(r.n) + ',' + csv_field(r.fingerprint) + '\n';
  }
  return out;
}

MetricReport parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("report CSV header mismatch");
  }
  MetricReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 7) throw std::runtime_error("report CSV row needs 7 fields");
    ReportRow r;
    r.metric = f[0];
    r.model = f[1];
    if (f[2] != "human") r.k = parse_count(f[2]);
    r.mean = parse_number(f[3]);
    r.std_err = parse_number(f[4]);
    r.n = parse_count(f[5]);
    r.fingerprint = f[6];
    report.rows.push_back(std::move(r));
  }
  return report;
}

void emit_csv(const MetricReport& report, const std::string& path) {
  write_file(path, to_csv(report));
}

MetricReport load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string render_svg(const MetricReport& report, const std::string& metric) {
  std::vector<const ReportRow*> rows;
  for (const auto& r : report.rows) {
    if (r.metric == metric) rows.push_back(&r);
  }
  if (rows.empty()) throw std::invalid_argument("unknown metric: " + metric);

  constexpr double kWidth = 720, kHeight = 440;
  constexpr double kLeft = 80, kRight = 560, kTop = 50, kBottom = 380;
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

  std::map<std::string, std::vector<const ReportRow*>> series;
  std::vector<const ReportRow*> baselines;
  double lo = rows.front()->mean, hi = lo;
  double kmin = 0, kmax = 0;
  bool any_k = false;
  for (const auto* r : rows) {
    lo = std::min(lo, r->mean);
    hi = std::max(hi, r->mean);
    if (r->k) {
      series[r->model].push_back(r);
      const double lk = std::log10(static_cast<double>(std::max<std::uint64_t>(*r->k, 1)));
      kmin = any_k ? std::min(kmin, lk) : lk;
      kmax = any_k ? std::max(kmax, lk) : lk;
      any_k = true;
    } else {
      baselines.push_back(r);
    }
  }
  if (!any_k || kmax - kmin < 1e-9) {
    kmin -= 0.5;
    kmax += 0.5;
  }
  if (hi - lo < 1e-12) {
    const double pad = std::abs(hi) > 0 ? std::abs(hi) * 0.1 : 0.5;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
  auto x_of = [&](std::uint64_t k) {
    const double lk = std::log10(static_cast<double>(std::max<std::uint64_t>(k, 1)));
    return kLeft + (lk - kmin) / (kmax - kmin) * (kRight - kLeft);
  };
  auto y_of = [&](double v) { return kBottom - (v - lo) / (hi - lo) * (kBottom - kTop); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  std::set<std::string> fingerprints;
  for (const auto* r : rows) fingerprints.insert(r->fingerprint);
  s << "<desc>fingerprint";
  for (const auto& f : fingerprints) s << ' ' << xml_escape(f);
  s << "</desc>\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << fixed((kLeft + kRight) / 2) << "\" y=\"28\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(metric) << "</text>\n";
  s << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
    << kBottom << "\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kBottom << "\"/>\n</g>\n";

  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int e = static_cast<int>(std::ceil(kmin - 1e-9)); e <= static_cast<int>(std::floor(kmax + 1e-9)); ++e) {
    const double x = kLeft + (e - kmin) / (kmax - kmin) * (kRight - kLeft);
    s << "<line x1=\"" << fixed(x) << "\" y1=\"" << kBottom << "\" x2=\"" << fixed(x)
      << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>"
      << "<text x=\"" << fixed(x) << "\" y=\"" << kBottom + 18
      << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    char label[32];
    std::snprintf(label, sizeof label, "%.4g", v);
    s << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed(y) << "\" x2=\"" << kLeft
      << "\" y2=\"" << fixed(y) << "\" stroke=\"black\"/>"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(y + 4)
      << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  s << "<text x=\"" << fixed((kLeft + kRight) / 2) << "\" y=\"" << kBottom + 40
    << "\" text-anchor=\"middle\">k (log scale)</text>\n</g>\n";

  std::size_t color = 0;
  double legend_y = kTop + 10;
  for (auto& [model, pts] : series) {
    std::sort(pts.begin(), pts.end(),
              [](const ReportRow* a, const ReportRow* b) { return *a->k < *b->k; });
    const char* c = kPalette[color++ % std::size(kPalette)];
    s << "<g class=\"series\" data-model=\"" << xml_escape(model) << "\">\n<polyline fill=\"none\" stroke=\""
      << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      s << (i ? " " : "") << fixed(x_of(*pts[i]->k)) << ',' << fixed(y_of(pts[i]->mean));
    }
    s << "\"/>\n";
    for (const auto* p : pts) {
      s << "<circle cx=\"" << fixed(x_of(*p->k)) << "\" cy=\"" << fixed(y_of(p->mean))
        << "\" r=\"3\" fill=\"" << c << "\" data-k=\"" << *p->k << "\" data-mean=\""
        << format_double(p->mean) << "\"/>\n";
    }
    s << "</g>\n";
    s << "<line x1=\"" << kRight + 20 << "\" y1=\"" << fixed(legend_y) << "\" x2=\"" << kRight + 45
      << "\" y2=\"" << fixed(legend_y) << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>"
      << "<text x=\"" << kRight + 50 << "\" y=\"" << fixed(legend_y + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(model) << "</text>\n";
    legend_y += 20;
  }
  for (const auto* b : baselines) {
    const double y = y_of(b->mean);
    s << "<line class=\"baseline\" x1=\"" << kLeft << "\" y1=\"" << fixed(y) << "\" x2=\"" << kRight
      << "\" y2=\"" << fixed(y) << "\" stroke=\"gray\" stroke-width=\"1.5\" "
      << "stroke-dasharray=\"6,4\" data-model=\"" << xml_escape(b->model) << "\" data-mean=\""
      << format_double(b->mean) << "\"/>\n";
    s << "<line x1=\"" << kRight + 20 << "\" y1=\"" << fixed(legend_y) << "\" x2=\"" << kRight + 45
      << "\" y2=\"" << fixed(legend_y) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>"
      << "<text x=\"" << kRight + 50 << "\" y=\"" << fixed(legend_y + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(b->model) << "</text>\n";
    legend_y += 20;
  }
  s << "</svg>\n";
  return s.str();
}

void emit_svg(const MetricReport& report, const std::string& metric, const std::string& path) {
  write_file(path, render_svg(report, metric));
}

std::string config_fingerprint(const std::map<std::string, std::string>& config) {
  std::string canon;
  for (const auto& [k, v] : config) canon += k + '=' + v + '\n';
  return hex64(fnv1a(canon));
}

}  // namespace storyeval
