#include "CLI11.hpp"

#include "mimolab/channel.hpp"
#include "mimolab/closedform.hpp"
#include "mimolab/common.hpp"
#include "mimolab/deteq.hpp"
#include "mimolab/estimation.hpp"
#include "mimolab/montecarlo.hpp"
#include "mimolab/report.hpp"
#include "mimolab/rng.hpp"
#include "mimolab/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mimolab;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  int samples = 2000;
  std::string out = "-";
  std::string format = "csv";
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--config", c.config_path, "Scenario JSON file");
  c.seed_opt = cmd->add_option("--seed", c.seed, "Base RNG seed");
  cmd->add_option("--samples", c.samples,
                  "Monte Carlo realizations (0 skips MC where optional)");
  cmd->add_option("--out", c.out, "Output path, '-' for stdout");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

ScenarioConfig base_config(Mode mode) {
  ScenarioConfig cfg;
  cfg.rho_tr = db_to_linear(6.0);
  cfg.rho_ul = db_to_linear(10.0);
  cfg.rho_dl = db_to_linear(10.0);
  cfg.mode = mode;
  return cfg;
}

ScenarioConfig load_config(const CommonOpts& c, Mode default_mode) {
  ScenarioConfig cfg = c.config_path.empty()
                           ? base_config(default_mode)
                           : ScenarioConfig::from_json_file(c.config_path);
  if (c.seed_opt != nullptr && c.seed_opt->count() > 0) cfg.rng_seed = c.seed;
  cfg.validate();
  return cfg;
}

double parse_number(const std::string& tok) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("grid: cannot parse '" + tok + "'");
  }
}

// "a,b,c" explicit list; "a:b" doubling grid (N axes) or unit-step grid
// (kappa axes); "a:b:s" linear grid with step s; single token = one value.
std::vector<double> parse_axis(const std::string& text, bool doubling) {
  std::vector<double> vals;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(parse_number(tok));
  } else if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 2 && parts.size() != 3)
      throw std::invalid_argument("grid: expected a:b or a:b:step in '" +
                                  text + "'");
    const double a = parse_number(parts[0]);
    const double b = parse_number(parts[1]);
    if (parts.size() == 3) {
      const double s = parse_number(parts[2]);
      if (!(s > 0)) throw std::invalid_argument("grid: step must be positive");
      for (double x = a; x <= b + 1e-9 * (1.0 + std::abs(b)); x += s)
        vals.push_back(x);
    } else if (doubling) {
      if (!(a > 0))
        throw std::invalid_argument("grid: doubling grid needs start > 0");
      for (double x = a; x <= b * (1.0 + 1e-12); x *= 2.0) vals.push_back(x);
    } else {
      for (double x = a; x <= b + 1e-9 * (1.0 + std::abs(b)); x += 1.0)
        vals.push_back(x);
    }
  } else {
    vals.push_back(parse_number(text));
  }
  if (vals.empty()) throw std::invalid_argument("grid: empty axis '" + text +
                                                "'");
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (!(vals[i] > vals[i - 1]))
      throw std::invalid_argument("grid: values must be strictly increasing");
  return vals;
}

std::vector<int> parse_int_axis(const std::string& text, bool doubling) {
  std::vector<int> out;
  for (double v : parse_axis(text, doubling)) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
      throw std::invalid_argument("grid: expected integers in '" + text + "'");
    out.push_back(static_cast<int>(r));
  }
  return out;
}

std::vector<std::string> parse_schemes(const std::string& text,
                                       const std::set<std::string>& allowed) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (allowed.count(tok) == 0) {
      std::string msg = "unknown scheme '" + tok + "' (expected one of";
      for (const std::string& a : allowed) msg += " " + a;
      throw std::invalid_argument(msg + ")");
    }
    out.push_back(tok);
  }
  if (out.empty()) throw std::invalid_argument("scheme list is empty");
  return out;
}

struct RowTable {
  std::vector<std::string> cols;
  std::vector<std::vector<json>> rows;

  void write(const std::string& path, const std::string& format) const {
    std::ostringstream body;
    if (format == "csv") {
      for (std::size_t i = 0; i < cols.size(); ++i)
        body << cols[i] << (i + 1 < cols.size() ? "," : "\n");
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (row[i].is_string())
            body << row[i].get<std::string>();
          else if (!row[i].is_null())
            body << row[i].dump();
          body << (i + 1 < row.size() ? "," : "\n");
        }
      }
    } else {
      json arr = json::array();
      for (const auto& row : rows) {
        json obj;
        for (std::size_t i = 0; i < cols.size(); ++i) obj[cols[i]] = row[i];
        arr.push_back(obj);
      }
      body << arr.dump(2) << '\n';
    }
    if (path == "-") {
      std::cout << body.str();
      return;
    }
    std::ofstream f(path);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    f << body.str();
    if (!f) throw io_error("failed while writing '" + path + "'");
  }
};

// Standard error of the report-wide mean rate, treating UEs as independent.
double aggregate_stderr(const SinrReport& rep) {
  double ss = 0.0;
  int n = 0;
  for (const SinrEntry& e : rep.entries) {
    if (std::isnan(e.stderr_rate)) continue;
    ss += e.stderr_rate * e.stderr_rate;
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN()
                : std::sqrt(ss) / n;
}

void print_summary(const std::map<std::string, std::pair<double, int>>& acc) {
  for (const auto& [scheme, v] : acc)
    std::cerr << "  " << scheme << ": mean SE " << v.first / v.second
              << " bit/s/Hz\n";
}

int run_fig1(const CommonOpts& c, const std::string& kappa_text,
             const std::string& n_text) {
  const ScenarioConfig cfg = load_config(c, Mode::simplified);
  if (cfg.mode != Mode::simplified)
    throw std::invalid_argument("fig1 requires a simplified-mode scenario");
  const std::vector<double> kappas = parse_axis(kappa_text, false);
  const std::vector<int> ns = parse_int_axis(n_text, true);

  RowTable t;
  t.cols = {"N", "kappa", "scheme", "rate_closedform", "rate_mc", "stderr"};
  std::map<std::string, std::pair<double, int>> summary;
  const std::vector<std::pair<std::string, std::string>> schemes = {
      {"mr", "mrc"}, {"smmse", "smmse"}};
  for (int n : ns) {
    for (double kap : kappas) {
      const SimplifiedParams p =
          SimplifiedParams::make(cfg.L, cfg.K, n, cfg.simp.alpha, kap,
                                 cfg.rho_tr, cfg.rho_ul, cfg.phi_design);
      std::map<std::string, double> closed = {
          {"mr", rate_from_sinr(sinr_mr_simplified(p))},
          {"smmse", rate_from_sinr(sinr_mmse_rzf_simplified(p))}};
      std::map<std::string, SinrReport> mc;
      if (c.samples > 0) {
        ScenarioConfig cfg2 = cfg;
        cfg2.N = n;
        cfg2.simp.kappa = kap;
        const LargeScaleTable tab = sample_large_scale(cfg2);
        const LoSSet los = build_los(tab);
        McOptions mo;
        mo.samples = c.samples;
        mo.seed = cfg.rng_seed;
        for (const auto& [name, mc_name] : schemes)
          mc[name] = mc_uplink(tab, los, mc_name, mo);
      }
      for (const auto& [name, mc_name] : schemes) {
        (void)mc_name;
        std::vector<json> row = {n, kap, name, closed[name], nullptr,
                                 nullptr};
        if (mc.count(name)) {
          row[4] = mc[name].mean_rate();
          row[5] = aggregate_stderr(mc[name]);
        }
        t.rows.push_back(row);
        summary[name].first += closed[name];
        summary[name].second += 1;
      }
    }
  }
  t.write(c.out, c.format);
  std::cerr << "fig1: " << t.rows.size() << " rows (closed-form averages)\n";
  print_summary(summary);
  return 0;
}

int run_dimension(const CommonOpts& c, const std::string& kappa_text,
                  double target_rate, const std::string& scheme_text) {
  const ScenarioConfig cfg = load_config(c, Mode::simplified);
  if (cfg.mode != Mode::simplified)
    throw std::invalid_argument("dimension requires a simplified-mode "
                                "scenario");
  const std::vector<double> kappas = parse_axis(kappa_text, false);
  const std::vector<std::string> schemes =
      parse_schemes(scheme_text, {"mr", "smmse"});

  RowTable t;
  t.cols = {"kappa", "scheme", "n_needed"};
  for (double kap : kappas) {
    for (const std::string& s : schemes) {
      const int n = antennas_needed(s, cfg.L, cfg.K, cfg.simp.alpha, kap,
                                    cfg.rho_tr, cfg.rho_dl, target_rate,
                                    cfg.phi_design);
      t.rows.push_back({kap, s, n});
    }
  }
  t.write(c.out, c.format);
  std::cerr << "dimension: target " << target_rate << " bit/s/Hz, "
            << t.rows.size() << " rows\n";
  return 0;
}

SinrReport deteq_report(const std::string& scheme, const LargeScaleTable& tab,
                        const LoSSet& los,
                        const std::vector<DetEqState>& states) {
  if (scheme == "mrc") return sinr_mrc(tab, los, states);
  if (scheme == "mrt") return sinr_mrt(tab, los, states);
  if (scheme == "smmse") return sinr_smmse(tab, los, states);
  return sinr_rzf(tab, los, states);
}

int run_sweep(const CommonOpts& c, const std::string& n_text,
              const std::string& kappa_text, int drops,
              const std::string& scheme_text) {
  const ScenarioConfig cfg = load_config(c, Mode::geometric);
  const std::vector<int> ns = parse_int_axis(n_text, true);
  const std::vector<double> kappas = parse_axis(kappa_text, false);
  const std::vector<std::string> schemes =
      parse_schemes(scheme_text, {"mrc", "mrt", "smmse", "rzf"});
  if (drops < 1) throw std::invalid_argument("sweep: drops must be >= 1");

  RowTable t;
  t.cols = {"N",      "kappa", "scheme", "rate", "sinr_db",
            "signal", "noise", "noncoh", "coh"};
  std::map<std::string, std::pair<double, int>> summary;
  for (int n : ns) {
    for (double kap : kappas) {
      std::map<std::string, std::vector<double>> acc;
      for (const std::string& s : schemes)
        acc[s] = std::vector<double>(6, 0.0);
      for (int dr = 0; dr < drops; ++dr) {
        ScenarioConfig cfg2 = cfg;
        cfg2.N = n;
        cfg2.simp.kappa = kap;
        cfg2.rng_seed = derive_seed(cfg.rng_seed, dr);
        const LargeScaleTable tab = sample_large_scale(cfg2);
        const LoSSet los = build_los(tab);
        const std::vector<DetEqState> states = solve_all(tab, los);
        for (const std::string& s : schemes) {
          const SinrReport rep = deteq_report(s, tab, los, states);
          for (const SinrEntry& e : rep.entries) {
            acc[s][0] += e.rate;
            acc[s][1] += e.sinr;
            acc[s][2] += e.signal;
            acc[s][3] += e.noise;
            acc[s][4] += e.noncoh;
            acc[s][5] += e.coh;
          }
        }
      }
      const double cnt = double(drops) * cfg.L * cfg.K;
      for (const std::string& s : schemes) {
        t.rows.push_back({n, kap, s, acc[s][0] / cnt,
                          10.0 * std::log10(acc[s][1] / cnt),
                          acc[s][2] / cnt, acc[s][3] / cnt, acc[s][4] / cnt,
                          acc[s][5] / cnt});
        summary[s].first += acc[s][0] / cnt;
        summary[s].second += 1;
      }
    }
  }
  t.write(c.out, c.format);
  std::cerr << "sweep: " << drops << " drops per point\n";
  print_summary(summary);
  return 0;
}

int run_compare(const CommonOpts& c, int n_override, int k_override) {
  ScenarioConfig cfg = load_config(c, Mode::simplified);
  if (n_override > 0) cfg.N = n_override;
  if (k_override > 0) cfg.K = k_override;
  cfg.validate();
  if (c.samples <= 0)
    throw std::invalid_argument("compare needs --samples > 0");

  const LargeScaleTable tab = sample_large_scale(cfg);
  const LoSSet los = build_los(tab);
  const std::vector<DetEqState> states = solve_all(tab, los);
  McOptions mo;
  mo.samples = c.samples;
  mo.seed = cfg.rng_seed;

  RowTable t;
  t.cols = {"scheme", "direction", "rate_deteq", "rate_mc", "stderr",
            "rel_gap"};
  for (const std::string& s : {"mrc", "smmse", "mrt", "rzf"}) {
    const bool ul = s == "mrc" || s == "smmse";
    const SinrReport det = deteq_report(s, tab, los, states);
    const SinrReport mc = ul ? mc_uplink(tab, los, s, mo)
                             : mc_downlink(tab, los, s, mo);
    const double rd = det.mean_rate();
    const double rm = mc.mean_rate();
    t.rows.push_back({s, ul ? "ul" : "dl", rd, rm, aggregate_stderr(mc),
                      (rd - rm) / rm});
    std::cerr << "  " << s << ": deteq " << rd << ", mc " << rm
              << " bit/s/Hz (gap " << 100.0 * (rd - rm) / rm << "%)\n";
  }
  t.write(c.out, c.format);
  return 0;
}

int run_point(const CommonOpts& c, const std::string& scheme_text, bool mc) {
  const ScenarioConfig cfg = load_config(c, Mode::simplified);
  const std::vector<std::string> schemes =
      parse_schemes(scheme_text, {"mrc", "mrt", "smmse", "rzf"});

  const LargeScaleTable tab = sample_large_scale(cfg);
  const LoSSet los = build_los(tab);
  const std::vector<DetEqState> states = solve_all(tab, los);
  SinrReport rep;
  std::map<std::string, std::pair<double, int>> summary;
  for (const std::string& s : schemes) {
    const SinrReport r = deteq_report(s, tab, los, states);
    summary[s] = {r.mean_rate() * r.entries.size(),
                  static_cast<int>(r.entries.size())};
    rep.append(r);
  }
  if (mc) {
    if (c.samples <= 0)
      throw std::invalid_argument("point --mc needs --samples > 0");
    McOptions mo;
    mo.samples = c.samples;
    mo.seed = cfg.rng_seed;
    for (const std::string& s : schemes) {
      const bool ul = s == "mrc" || s == "smmse";
      rep.append(ul ? mc_uplink(tab, los, s, mo)
                    : mc_downlink(tab, los, s, mo));
    }
  }
  rep.save(c.out, c.format);
  print_summary(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multicell massive MIMO performance laboratory"};
  app.require_subcommand(1);

  CommonOpts c_fig1, c_dim, c_sweep, c_cmp, c_point;

  CLI::App* fig1 = app.add_subcommand(
      "fig1", "Closed forms vs Monte Carlo on the symmetric model");
  add_common(fig1, c_fig1);
  std::string fig1_kappa = "0,4", fig1_n = "32:512";
  fig1->add_option("--kappa", fig1_kappa, "Rician factor axis");
  fig1->add_option("--n", fig1_n, "Antenna axis (a:b doubles)");

  CLI::App* dim = app.add_subcommand(
      "dimension", "Antennas needed to reach a target rate");
  add_common(dim, c_dim);
  std::string dim_kappa = "0:10", dim_schemes = "mr,smmse";
  double dim_target = 2.0;
  dim->add_option("--kappa-grid", dim_kappa, "Rician factor axis");
  dim->add_option("--target-rate", dim_target, "Target rate in bit/s/Hz");
  dim->add_option("--scheme", dim_schemes, "mr,smmse subset");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Deterministic-equivalent rates over an antenna sweep");
  add_common(sweep, c_sweep);
  std::string sweep_n = "32:256", sweep_kappa = "0.5,4",
              sweep_schemes = "mrt,rzf";
  int sweep_drops = 10;
  sweep->add_option("--n", sweep_n, "Antenna axis (a:b doubles)");
  sweep->add_option("--kappa", sweep_kappa, "Rician factor axis");
  sweep->add_option("--drops", sweep_drops, "Independent UE drops per point");
  sweep->add_option("--scheme", sweep_schemes, "mrc,mrt,smmse,rzf subset");

  CLI::App* cmp = app.add_subcommand(
      "compare", "Deterministic equivalents vs Monte Carlo, all schemes");
  add_common(cmp, c_cmp);
  int cmp_n = 0, cmp_k = 0;
  cmp->add_option("--N", cmp_n, "Override antenna count");
  cmp->add_option("--K", cmp_k, "Override UEs per cell");

  CLI::App* point = app.add_subcommand(
      "point", "Per-UE SINR report for one scenario");
  add_common(point, c_point);
  std::string point_schemes = "mrc,mrt,smmse,rzf";
  bool point_mc = false;
  point->add_option("--scheme", point_schemes, "mrc,mrt,smmse,rzf subset");
  point->add_flag("--mc", point_mc, "Append Monte Carlo rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (fig1->parsed()) return run_fig1(c_fig1, fig1_kappa, fig1_n);
    if (dim->parsed())
      return run_dimension(c_dim, dim_kappa, dim_target, dim_schemes);
    if (sweep->parsed())
      return run_sweep(c_sweep, sweep_n, sweep_kappa, sweep_drops,
                       sweep_schemes);
    if (cmp->parsed()) return run_compare(c_cmp, cmp_n, cmp_k);
    if (point->parsed()) return run_point(c_point, point_schemes, point_mc);
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
