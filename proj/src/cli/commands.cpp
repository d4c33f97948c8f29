// Copyright 2026 The biqap Authors
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

#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <locale>
#include <sstream>

#include "biqap/protocols.hpp"
#include "biqap/reading.hpp"
#include "cli/json_io.hpp"

namespace biqap::cli {

namespace {

bool optimal(const measures::BoundReport& r) { return r.status == conic::Status::optimal; }

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Json header(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  return j;
}

std::string finish(const Json& j) { return j.dump(2) + "\n"; }

ChannelSpec load_channel(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  return channel_from_json(load_json_file(cfg.input));
}

std::optional<channels::BicovariantReps> load_reps(const RunConfig& cfg, const ChannelSpec& ch) {
  if (!cfg.reps.empty()) return reps_from_json(load_json_file(cfg.reps), ch);
  if (ch.reps) return reps_from_json(*ch.reps, ch);
  return std::nullopt;
}

Json bicovariance_json(const channels::BicovarianceCheck& c) {
  Json j;
  j["bicovariant"] = c.bicovariant;
  j["one_designs"] = c.one_designs;
  j["max_residual"] = c.max_residual;
  return j;
}

/** Γ pair, E_max lower estimate and optional resource-state bounds. */
Json bidirectional_bounds(const RunConfig& cfg, const channels::BidirectionalChannel& n,
                          const std::optional<channels::BicovariantReps>& reps, bool& solver_ok) {
  Json j;
  j["dims"] = {{"S_A", n.d_ap}, {"A", n.d_a}, {"B", n.d_b}, {"S_B", n.d_bp}};
  measures::GammaOptions go;
  go.tol = cfg.tol;
  const auto pair = measures::gamma_bidirectional_both(n, go);
  solver_ok = solver_ok && optimal(pair.primal) && optimal(pair.dual);
  j["register_symmetry"] = measures::has_register_symmetry(n.J, n.d_ap, n.d_a);
  j["gamma"] = {{"primal", to_json(pair.primal)},
                {"dual", to_json(pair.dual)},
                {"relative_difference", pair.relative_difference}};
  j["R2to2_max"] = pair.dual.value_bits;
  if (cfg.restarts > 0) {
    measures::EmaxConfig ec;
    ec.restarts = cfg.restarts;
    ec.seed = cfg.seed;
    ec.sdp_tol = std::max(cfg.tol, 1e-10);
    j["E2to2_max_lower"] = to_json(measures::e_max_bidirectional_lower(n, ec));
  } else {
    j["E2to2_max_lower"] = nullptr;
  }
  if (!reps) {
    j["resource_state"] = {{"skipped", "no bicovariant representation supplied"}};
    return j;
  }
  const auto check = channels::verify_bicovariance(n, *reps);
  Json rs;
  rs["bicovariance"] = bicovariance_json(check);
  if (!check.bicovariant || !check.one_designs) {
    rs["skipped"] = "channel is not bicovariant for the supplied representations";
  } else {
    measures::FwConfig fw;
    fw.sdp_tol = std::max(cfg.tol, 1e-10);
    const auto b = protocols::resource_state_bounds(n, *reps, fw);
    rs["rains"] = to_json(b.rains);
    rs["ree_ppt"] = to_json(b.ree_ppt);
  }
  j["resource_state"] = rs;
  return j;
}

double povm_residual(const channels::GroupRep& g) {
  const auto povm = protocols::teleport_povm(g);
  CMat s = CMat::Zero(povm.front().rows(), povm.front().cols());
  for (const auto& m : povm) s += m;
  return max_abs(CMat(s - CMat::Identity(s.rows(), s.cols())));
}

Json suite_json(const std::string& name, int trials, int failed, double worst) {
  Json j;
  j["suite"] = name;
  j["trials"] = trials;
  j["failed"] = failed;
  j["worst_excess"] = worst;
  j["pass"] = failed == 0;
  return j;
}

Json amortization_suite(const RunConfig& cfg, const std::string& name, const CMat& u) {
  const auto n = channels::bidirectional_from_unitary(u, 2, 2);
  const auto rep = measures::amortization_check_rains(n, cfg.trials, cfg.seed);
  const int failed = rep.violated + rep.skipped;
  Json j = suite_json("amortization/" + name, cfg.trials, failed,
                      cfg.trials > 0 ? rep.worst_slack : 0.0);
  j["R2to2_max"] = rep.r_bidirectional;
  j["skipped"] = rep.skipped;
  return j;
}

Json divergence_suite(const RunConfig& cfg) {
  random::Rng rng(random::derive_seed(cfg.seed, 101));
  divergences::Options opt;
  opt.dmax_sdp_tol = cfg.tol;
  const std::vector<double> alphas{0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  int failed = 0;
  double worst = 0.0;
  auto note = [&](double excess, double allowed) {
    worst = std::max(worst, excess);
    if (excess > allowed) ++failed;
  };
  auto renyi = [&](const CMat& r, const CMat& s, double a) {
    return a == 1.0 ? divergences::relative_entropy(r, s, opt).value
                    : divergences::sandwiched_renyi(r, s, a, opt).value;
  };
  for (int t = 0; t < cfg.trials; ++t) {
    const int d = 2 + t % 2;
    const CMat rho = random::random_density(d, rng);
    const CMat sigma = random::random_density(d, rng);
    // D_max by eigenvalues and by SDP
    const auto dm = divergences::max_relative_entropy(rho, sigma, opt);
    note(dm.status == conic::Status::optimal ? dm.residual : 1.0, 1e-6);
    // monotone in alpha, capped by D_max
    double prev = -std::numeric_limits<double>::infinity();
    for (double a : alphas) {
      const double v = renyi(rho, sigma, a);
      note(prev - v, 1e-9);
      prev = v;
    }
    note(prev - dm.value, 1e-9);
    // data processing under a random channel
    const int dout = 2 + (t / 2) % 2;
    const auto k = random::random_channel_kraus(d, dout, 2 + t % 3, rng);
    const CMat nr = channels::apply_kraus(k, rho), ns = channels::apply_kraus(k, sigma);
    for (double a : {0.5, 1.0, 2.0}) note(renyi(nr, ns, a) - renyi(rho, sigma, a), 1e-9);
    note(divergences::max_relative_entropy_eigen(nr, ns, opt).value - dm.value, 1e-9);
  }
  return suite_json("divergences", cfg.trials, failed, worst);
}

Json privacy_suite(const RunConfig& cfg) {
  random::Rng rng(random::derive_seed(cfg.seed, 202));
  int failed = 0;
  double worst = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    const int k = 2 + t % 2;
    std::vector<CMat> twists;
    for (int i = 0; i < k * k; ++i) twists.push_back(random::haar_unitary(4, rng));
    const auto g = protocols::build_private_state(k, twists, random::random_density(4, rng), 2, 2);
    const auto pt = protocols::privacy_test(g);
    const double own = std::abs(pt.pass_probability(g.gamma) - 1.0);
    worst = std::max(worst, own);
    if (own > 1e-10) ++failed;
    for (int s = 0; s < 10; ++s) {
      const CMat sep = protocols::random_separable_state(g.dims(), g.cut(), rng);
      const double excess = pt.pass_probability(sep) - 1.0 / k;
      worst = std::max(worst, excess);
      if (excess > 1e-9) ++failed;
    }
  }
  return suite_json("privacy", cfg.trials, failed, worst);
}

Json afw_suite(const RunConfig& cfg) {
  random::Rng rng(random::derive_seed(cfg.seed, 303));
  int failed = 0;
  double worst = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    const Dims dims{2, 2 + t % 2};
    const long n = static_cast<long>(dims[0]) * dims[1];
    const CMat a = random::random_density(n, rng);
    // a nearby state so that ε stays in the informative range
    const double mix = random::uniform(rng);
    const CMat b = (1.0 - mix) * a + mix * random::random_density(n, rng);
    const auto c = qcore::afw_bound_check(DensityOperator(a, dims), DensityOperator(b, dims), {0}, {1});
    worst = std::max(worst, c.lhs - c.rhs);
    if (!c.holds) ++failed;
  }
  return suite_json("afw_continuity", cfg.trials, failed, worst);
}

}  // namespace

void RunConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("--tol must be positive");
  if (restarts < 0) throw ConfigError("--restarts must be non-negative");
  if (trials < 0) throw ConfigError("--trials must be non-negative");
  if (format != "json" && format != "csv") throw ConfigError("--format must be json or csv");
  if (format == "csv" && command != "erasure-scan") {
    throw ConfigError("--format csv is only available for erasure-scan");
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> v;
  std::istringstream is(spec);
  is.imbue(std::locale::classic());
  double a = 0.0, b = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof()) {
    throw ConfigError("--q-grid: expected \"a:b:step\", got \"" + spec + "\"");
  }
  if (!(step > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError("--q-grid: step must be positive");
  }
  if (a > b) return v;
  const long count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  for (long k = 0; k < count; ++k) v.push_back(std::min(b, a + static_cast<double>(k) * step));
  return v;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(12) << x;
  return os.str();
}

CommandResult cmd_bounds(const RunConfig& cfg) {
  const ChannelSpec ch = load_channel(cfg);
  Json j = header(cfg);
  j["input"] = ch.name;
  bool solver_ok = true;
  if (ch.kind == ChannelSpec::Kind::point_to_point) {
    measures::GammaOptions go;
    go.tol = cfg.tol;
    const auto p = measures::gamma_channel(*ch.channel, measures::GammaForm::primal, go);
    const auto d = measures::gamma_channel(*ch.channel, measures::GammaForm::dual, go);
    solver_ok = optimal(p) && optimal(d);
    j["type"] = "channel";
    j["dims"] = {{"in", ch.channel->d_in}, {"out", ch.channel->d_out}};
    j["gamma"] = {{"primal", to_json(p)}, {"dual", to_json(d)}};
    j["R_max"] = d.value_bits;
  } else if (ch.kind == ChannelSpec::Kind::bidirectional) {
    j["type"] = "bidirectional";
    j["bounds"] = bidirectional_bounds(cfg, *ch.bidirectional, load_reps(cfg, ch), solver_ok);
  } else {
    const auto cc = channels::controlled_bidirectional(*ch.cell);
    j["type"] = "cell";
    j["alphabet"] = ch.cell->size();
    j["bounds"] = bidirectional_bounds(cfg, cc.channel, std::nullopt, solver_ok);
    reading::OptimizeConfig oc;
    oc.restarts = std::max(cfg.restarts, 1);
    oc.seed = cfg.seed;
    const auto r = reading::optimize_rate(*ch.cell, oc);
    Json rr;
    rr["label"] = r.label;
    rr["rate_bits"] = r.rate_bits;
    rr["i_x_lbb"] = r.i_x_lbb;
    rr["i_x_e"] = r.i_x_e;
    rr["trace"] = r.trace;
    rr["dominated_by_R2to2_max"] = r.rate_bits <= j["bounds"]["R2to2_max"].get<double>() + 1e-3;
    j["reading"] = rr;
  }
  j["solver_ok"] = solver_ok;
  CommandResult res;
  res.output = finish(j);
  res.exit_code = solver_ok ? kOk : kSolverFailure;
  return res;
}

CommandResult cmd_erasure_scan(const RunConfig& cfg) {
  if (cfg.d != 2 && cfg.d != 3) throw ConfigError("--d must be 2 or 3");
  const auto grid = parse_grid(cfg.q_grid);
  for (double q : grid) {
    if (q < 0.0 || q > 1.0) throw ConfigError("--q-grid: q must lie in [0,1]");
  }
  struct Row {
    double q, analytic, computed, leak, upper;
    std::string status;
  };
  std::vector<Row> rows;
  bool solver_ok = true;
  for (double q : grid) {
    const auto cell = channels::erasure_wiretap_cell(cfg.d, q);
    const auto r = reading::nonadaptive_rate(cell, reading::uniform_max_entangled(cell));
    Row row{q, reading::erasure_private_capacity(cfg.d, q), r.rate_bits, r.i_x_e,
            std::numeric_limits<double>::quiet_NaN(), "skipped"};
    const long dim = static_cast<long>(cell.size()) * cell.size() * cell.d_b() * cell.d_in();
    if (dim <= cfg.bound_max_dim) {
      reading::CellBoundConfig bc;
      bc.gamma.tol = cfg.tol;
      const auto b = reading::bidirectional_upper_bound_for_cell(cell, bc);
      row.status = conic::to_string(b.r_max.status);
      if (optimal(b.r_max)) {
        row.upper = b.r_max.value_bits;
      } else {
        solver_ok = false;
      }
    }
    rows.push_back(row);
  }
  CommandResult res;
  if (cfg.format == "csv") {
    std::string out = "q,analytic,computed_rate,upper_bound\n";
    for (const auto& r : rows) {
      out += format_number(r.q) + "," + format_number(r.analytic) + "," +
             format_number(r.computed) + "," + format_number(r.upper) + "\n";
    }
    res.output = out;
  } else {
    Json j = header(cfg);
    j["d"] = cfg.d;
    j["q_grid"] = cfg.q_grid;
    j["label"] = "n=1 lower bound";
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json o;
      o["q"] = r.q;
      o["analytic"] = r.analytic;
      o["computed_rate"] = r.computed;
      o["i_x_e"] = r.leak;
      o["upper_bound"] = std::isnan(r.upper) ? Json(nullptr) : Json(r.upper);
      o["upper_bound_status"] = r.status;
      arr.push_back(o);
    }
    j["rows"] = arr;
    res.output = finish(j);
  }
  if (grid.empty()) res.warnings.push_back("empty q grid");
  if (std::any_of(rows.begin(), rows.end(), [](const Row& r) { return r.status == "skipped"; })) {
    res.warnings.push_back("upper bound skipped above --bound-max-dim");
  }
  res.exit_code = solver_ok ? kOk : kSolverFailure;
  return res;
}

CommandResult cmd_simulate_teleport(const RunConfig& cfg) {
  const ChannelSpec ch = load_channel(cfg);
  if (ch.kind != ChannelSpec::Kind::bidirectional) {
    throw ConfigError("simulate-teleport needs a bidirectional channel");
  }
  const auto reps = load_reps(cfg, ch);
  if (!reps) throw ConfigError("simulate-teleport needs --reps or an inline \"reps\" object");
  const auto& n = *ch.bidirectional;
  channels::BicovarianceCheck check;
  try {
    check = channels::verify_bicovariance(n, *reps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("reps: ") + e.what());
  }
  Json j = header(cfg);
  j["input"] = ch.name;
  j["bicovariance"] = bicovariance_json(check);
  CommandResult res;
  if (!check.bicovariant || !check.one_designs) {
    j["refused"] = true;
    j["reason"] = check.bicovariant ? "input representations are not one-designs"
                                    : "channel is not bicovariant for the supplied representations";
    res.output = finish(j);
    res.exit_code = kConfigError;
    res.warnings.push_back("refused: bicovariance residual " + format_number(check.max_residual));
    return res;
  }
  j["refused"] = false;
  j["povm_residual"] = {{"A", povm_residual(reps->in_a)}, {"B", povm_residual(reps->in_b)}};
  const auto sim = protocols::teleport_simulate(n, *reps);
  j["choi_max_abs_difference"] = max_abs(CMat(sim.J - n.J));
  j["simulated_cp_defect"] = sim.cp_defect();
  j["simulated_tp_defect"] = sim.tp_defect();
  try {
    const auto dd = protocols::diamond_distance(n, sim, cfg.tol);
    j["diamond_distance"] = {{"value", dd.value}, {"gap", dd.gap}, {"status", conic::to_string(dd.status)}};
    res.exit_code = kOk;
  } catch (const std::runtime_error& e) {
    j["diamond_distance"] = {{"status", "failed"}, {"message", e.what()}};
    res.exit_code = kSolverFailure;
  }
  res.output = finish(j);
  return res;
}

CommandResult cmd_property_suite(const RunConfig& cfg) {
  Json j = header(cfg);
  j["trials"] = cfg.trials;
  CommandResult res;
  if (cfg.trials == 0) res.warnings.push_back("trials=0: every suite passes vacuously");
  Json suites = Json::array();
  suites.push_back(amortization_suite(cfg, "cnot", channels::cnot_matrix()));
  suites.push_back(amortization_suite(cfg, "swap", channels::swap_matrix(2)));
  suites.push_back(divergence_suite(cfg));
  suites.push_back(privacy_suite(cfg));
  suites.push_back(afw_suite(cfg));
  bool all = true;
  for (const auto& s : suites) all = all && s["pass"].get<bool>();
  j["suites"] = suites;
  j["vacuous"] = cfg.trials == 0;
  j["pass"] = all;
  res.output = finish(j);
  res.exit_code = all ? kOk : kPropertyFailure;
  return res;
}

CommandResult run(const RunConfig& cfg) {
  cfg.validate();
  if (!cfg.dump_sdp.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.dump_sdp, ec);
    if (ec) throw ConfigError("--dump-sdp: cannot create " + cfg.dump_sdp);
    conic::dump_directory() = cfg.dump_sdp;
  }
  if (cfg.command == "bounds") return cmd_bounds(cfg);
  if (cfg.command == "erasure-scan") return cmd_erasure_scan(cfg);
  if (cfg.command == "simulate-teleport") return cmd_simulate_teleport(cfg);
  if (cfg.command == "property-suite") return cmd_property_suite(cfg);
  throw ConfigError("unknown command \"" + cfg.command + "\"");
}

}  // namespace biqap::cli
