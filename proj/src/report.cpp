#include "mimolab/report.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <ostream>
#include <sstream>

namespace mimolab {

using nlohmann::json;

void SinrReport::append(const SinrReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

double SinrReport::mean_rate() const {
  if (entries.empty()) return 0.0;
  double sum = 0.0;
  for (const SinrEntry& e : entries) sum += e.rate;
  return sum / double(entries.size());
}

double SinrReport::mean_rate(int cell) const {
  double sum = 0.0;
  int count = 0;
  for (const SinrEntry& e : entries) {
    if (e.cell == cell) {
      sum += e.rate;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / count;
}

void SinrReport::write_csv(std::ostream& os) const {
  os << "cell,ue,scheme,direction,provenance,sinr_db,rate,signal,noise,"
        "noncoh,coh,stderr\n";
  os << std::setprecision(12);
  for (const SinrEntry& e : entries) {
    os << e.cell << ',' << e.ue << ',' << e.scheme << ',' << e.direction
       << ',' << e.provenance << ',' << 10.0 * std::log10(e.sinr) << ','
       << e.rate << ',' << e.signal << ',' << e.noise << ',' << e.noncoh
       << ',' << e.coh << ',';
    if (!std::isnan(e.stderr_rate)) os << e.stderr_rate;
    os << '\n';
  }
}

std::string SinrReport::to_json_text() const {
  json arr = json::array();
  for (const SinrEntry& e : entries) {
    json row = {{"cell", e.cell},
                {"ue", e.ue},
                {"scheme", e.scheme},
                {"direction", e.direction},
                {"provenance", e.provenance},
                {"sinr", e.sinr},
                {"sinr_db", 10.0 * std::log10(e.sinr)},
                {"rate", e.rate},
                {"signal", e.signal},
                {"noise", e.noise},
                {"noncoh", e.noncoh},
                {"coh", e.coh}};
    if (!std::isnan(e.stderr_rate)) row["stderr"] = e.stderr_rate;
    arr.push_back(row);
  }
  json doc = {{"entries", arr}, {"mean_rate", mean_rate()}};
  return doc.dump(2);
}

void SinrReport::save(const std::string& path,
                      const std::string& format) const {
  if (format != "csv" && format != "json")
    throw io_error("report: format must be csv or json, got '" + format +
                   "'");
  std::ostringstream body;
  if (format == "csv") {
    write_csv(body);
  } else {
    body << to_json_text() << '\n';
  }
  if (path == "-") {
    std::cout << body.str();
    return;
  }
  std::ofstream out(path);
  if (!out) throw io_error("report: cannot open '" + path + "' for writing");
  out << body.str();
  if (!out) throw io_error("report: failed while writing '" + path + "'");
}

}  // namespace mimolab
