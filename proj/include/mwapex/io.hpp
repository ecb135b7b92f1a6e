#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mwapex/driver.hpp"
#include "mwapex/errors.hpp"

namespace mwapex {

enum class OutputFormat { Csv, JsonLines };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Elastic: return "Elastic";
    case Mode::SmoothReturn: return "SmoothReturn";
    case Mode::ApexReturn: return "ApexReturn";
  }
  return "Elastic";
}

inline Mode mode_from_name(std::string_view s) {
  if (s == "Elastic") return Mode::Elastic;
  if (s == "SmoothReturn") return Mode::SmoothReturn;
  if (s == "ApexReturn") return Mode::ApexReturn;
  throw IoError("unknown mode name '" + std::string(s) + "'");
}

inline constexpr const char* kCsvHeader =
    "step,eps11,eps22,eps33,gam12,gam13,gam23,"
    "sig11,sig22,sig33,sig12,sig13,sig23,xi,rho,theta,kappa,qh,qs,xia,mode,iters";

inline constexpr const char* kUnitsNote = "stress MPa, strain dimensionless, theta rad";

namespace detail {

inline std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void numeric_fields(const StepRecord& r, double (&v)[19]) {
  for (int i = 0; i < 6; ++i) v[i] = r.eps[static_cast<std::size_t>(i)];
  for (int i = 0; i < 6; ++i) v[6 + i] = r.sigma[static_cast<std::size_t>(i)];
  v[12] = r.xi;
  v[13] = r.rho;
  v[14] = r.theta;
  v[15] = r.kappa;
  v[16] = r.qh;
  v[17] = r.qs;
  v[18] = r.xi_a;
}

inline constexpr const char* kJsonKeys[19] = {
    "eps11", "eps22", "eps33", "gam12", "gam13", "gam23", "sig11", "sig22", "sig33", "sig12",
    "sig13", "sig23", "xi",    "rho",   "theta", "kappa", "qh",    "qs",    "xia"};

}  // namespace detail

/// Serializes records with 9 significant digits. The CSV variant carries the
/// units convention as a leading # comment, the JSON-lines variant as a
/// leading units object.
inline void write_records(std::ostream& os, const std::vector<StepRecord>& records,
                          OutputFormat format) {
  if (format == OutputFormat::Csv) {
    os << "# units: " << kUnitsNote << "\n" << kCsvHeader << "\n";
    for (const StepRecord& r : records) {
      double v[19];
      detail::numeric_fields(r, v);
      os << r.step;
      for (double x : v) os << ',' << detail::fmt9(x);
      os << ',' << mode_name(r.mode) << ',' << r.iterations << "\n";
    }
  } else {
    os << "{\"units\":\"" << kUnitsNote << "\"}\n";
    for (const StepRecord& r : records) {
      double v[19];
      detail::numeric_fields(r, v);
      os << "{\"step\":" << r.step;
      for (int i = 0; i < 19; ++i)
        os << ",\"" << detail::kJsonKeys[i] << "\":" << detail::fmt9(v[i]);
      os << ",\"mode\":\"" << mode_name(r.mode) << "\",\"iters\":" << r.iterations << "}\n";
    }
  }
}

inline void write_records_file(const std::string& path, const std::vector<StepRecord>& records,
                               OutputFormat format) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_records(os, records, format);
  os.flush();
  if (!os) throw IoError("write failed on '" + path + "'");
}

/// Reads back the CSV form (round-trip checks, external tooling).
inline std::vector<StepRecord> read_records_csv(std::istream& is) {
  std::vector<StepRecord> out;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw IoError("unexpected CSV header: '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t c = line.find(',', start);
      cells.push_back(line.substr(start, c == std::string::npos ? std::string::npos : c - start));
      if (c == std::string::npos) break;
      start = c + 1;
    }
    if (cells.size() != 22)
      throw IoError("line " + std::to_string(line_no) + ": expected 22 columns, got " +
                    std::to_string(cells.size()));
    StepRecord r;
    r.step = std::stoi(cells[0]);
    double v[19];
    for (int i = 0; i < 19; ++i) v[i] = std::stod(cells[static_cast<std::size_t>(i) + 1]);
    for (int i = 0; i < 6; ++i) r.eps[static_cast<std::size_t>(i)] = v[i];
    for (int i = 0; i < 6; ++i) r.sigma[static_cast<std::size_t>(i)] = v[6 + i];
    r.xi = v[12];
    r.rho = v[13];
    r.theta = v[14];
    r.kappa = v[15];
    r.qh = v[16];
    r.qs = v[17];
    r.xi_a = v[18];
    r.mode = mode_from_name(cells[20]);
    r.iterations = std::stoi(cells[21]);
    out.push_back(r);
  }
  if (!header_seen) throw IoError("CSV input has no header line");
  return out;
}

}  // namespace mwapex
