#include "doctest.h"

#include "mimolab/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using namespace mimolab;

namespace {

SinrEntry make_entry(int cell, int ue, double sinr, bool with_stderr) {
  SinrEntry e;
  e.cell = cell;
  e.ue = ue;
  e.scheme = "mrc";
  e.direction = "ul";
  e.provenance = with_stderr ? "montecarlo" : "deteq";
  e.sinr = sinr;
  e.rate = std::log2(1.0 + sinr);
  e.signal = sinr;
  e.noise = 0.5;
  e.noncoh = 0.3;
  e.coh = 0.2;
  if (with_stderr) e.stderr_rate = 0.01;
  return e;
}

SinrReport sample_report() {
  SinrReport rep;
  rep.entries.push_back(make_entry(0, 0, 3.0, false));
  rep.entries.push_back(make_entry(0, 1, 7.0, false));
  rep.entries.push_back(make_entry(1, 0, 15.0, true));
  return rep;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("aggregation helpers") {
  SinrReport rep = sample_report();
  CHECK(rep.mean_rate() ==
        doctest::Approx((rep.entries[0].rate + rep.entries[1].rate +
                         rep.entries[2].rate) /
                        3.0));
  CHECK(rep.mean_rate(0) ==
        doctest::Approx((rep.entries[0].rate + rep.entries[1].rate) / 2.0));
  CHECK(rep.mean_rate(1) == doctest::Approx(rep.entries[2].rate));

  SinrReport other = sample_report();
  rep.append(other);
  CHECK(rep.entries.size() == 6);
}

TEST_CASE("csv layout") {
  const SinrReport rep = sample_report();
  std::ostringstream os;
  rep.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line ==
        "cell,ue,scheme,direction,provenance,sinr_db,rate,signal,noise,"
        "noncoh,coh,stderr");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    const std::size_t commas = std::count(line.begin(), line.end(), ',');
    CHECK(commas == 11);
    if (rows <= 2) {
      // deterministic rows leave the stderr column empty
      CHECK(line.back() == ',');
    } else {
      CHECK(line.back() != ',');
    }
  }
  CHECK(rows == 3);
  // sinr_db column carries 10 log10(sinr): first row has sinr 3.0
  std::istringstream first(os.str());
  std::getline(first, line);
  std::getline(first, line);
  std::istringstream fields(line);
  std::string tok;
  for (int i = 0; i < 6; ++i) std::getline(fields, tok, ',');
  CHECK(std::stod(tok) ==
        doctest::Approx(10.0 * std::log10(3.0)).epsilon(1e-9));
}

TEST_CASE("json layout") {
  const SinrReport rep = sample_report();
  const nlohmann::json j = nlohmann::json::parse(rep.to_json_text());
  REQUIRE(j.contains("entries"));
  REQUIRE(j["entries"].size() == 3);
  const auto& e0 = j["entries"][0];
  for (const char* key : {"cell", "ue", "scheme", "direction", "provenance",
                          "sinr", "rate", "signal", "noise", "noncoh", "coh"})
    CHECK(e0.contains(key));
  CHECK_FALSE(e0.contains("stderr"));     // deterministic row
  CHECK(j["entries"][2].contains("stderr"));
  CHECK(j["entries"][2]["stderr"].get<double>() == doctest::Approx(0.01));
  CHECK(j["mean_rate"].get<double>() == doctest::Approx(rep.mean_rate()));
  CHECK(e0["sinr"].get<double>() == doctest::Approx(3.0));
}

TEST_CASE("save round trip and failure modes") {
  const SinrReport rep = sample_report();
  const std::string csv_path = "/tmp/mimolab_test_report.csv";
  const std::string json_path = "/tmp/mimolab_test_report.json";
  rep.save(csv_path, "csv");
  rep.save(json_path, "json");
  CHECK(slurp(csv_path).rfind("cell,ue,", 0) == 0);
  CHECK(nlohmann::json::parse(slurp(json_path))["entries"].size() == 3);
  std::remove(csv_path.c_str());
  std::remove(json_path.c_str());

  CHECK_THROWS_AS(rep.save("/no/such/dir/report.csv", "csv"), io_error);
  CHECK_THROWS_AS(rep.save("/tmp/mimolab_x.yaml", "yaml"), io_error);
}

}
