// Batch front end: build scenarios, run the quantifiers, emit CSV/JSON.
//
// Exit codes: 0 success, 2 a claimed bound was violated beyond tolerance,
// 3 solver failure, 4 invalid input.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qi/bell.hpp"
#include "qi/incompat.hpp"
#include "qi/mub.hpp"
#include "qi/structures.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBoundViolation = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitInputError = 4;

std::string sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream f(out_path);
    if (!f) throw qi::InputError("cannot open output path: " + out_path);
    f << text;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw qi::InputError("cannot open input file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Options {
  double tol = 1e-6;
  std::uint64_t seed = 1234;
  std::string out;
  std::string config;

  int d = 2;
  int m = 3;
  double eta = 1.0;
  double eta_start = 0.5;
  double eta_stop = 1.0;
  int eta_steps = 26;
  std::vector<int> subset;
  std::string file;
  int restarts = 20;
  bool single_pair = false;
  bool with_gain = false;
  bool emit_assemblage = false;
};

// Values from --config fill in flags the user did not pass explicitly.
void apply_config(Options& o, CLI::App* sub) {
  if (o.config.empty()) return;
  json cfg;
  try {
    cfg = json::parse(read_file(o.config));
  } catch (const json::parse_error& e) {
    throw qi::InputError(std::string("config parse error: ") + e.what());
  }
  auto take = [&](const char* flag, const char* key, auto& dst) {
    CLI::Option* opt = sub->get_option_no_throw(flag);
    if (cfg.contains(key) && (!opt || opt->count() == 0)) {
      cfg.at(key).get_to(dst);
    }
  };
  take("--dim", "d", o.d);
  take("--settings", "m", o.m);
  take("--eta", "eta", o.eta);
  take("--eta-start", "eta_start", o.eta_start);
  take("--eta-stop", "eta_stop", o.eta_stop);
  take("--eta-steps", "eta_steps", o.eta_steps);
  take("--subset", "subset", o.subset);
  take("--file", "file", o.file);
  take("--restarts", "restarts", o.restarts);
}

qi::WeightedAssemblage scenario_assemblage(const Options& o) {
  if (!o.file.empty()) return qi::assemblage_from_json(read_file(o.file));
  return qi::mub_assemblage(qi::build_mub(o.d, o.m), o.eta);
}

json certificate_summary(const qi::IncompatReport& rep,
                         const qi::WeightedAssemblage& a) {
  return json{{"value", rep.certificate.value},
              {"feasibility_defect", rep.certificate.feasibility_defect(a)}};
}

int cmd_mub(const Options& o) {
  qi::MubFamily fam = qi::build_mub(o.d, o.m);
  qi::RobustnessData r = qi::white_noise_robustness(fam);
  json out{{"d", r.d},           {"m", r.m},
           {"T", r.T},           {"eta_star", r.eta_star},
           {"closed_form", r.closed_form}, {"eta", o.eta}};
  if (r.closed_form) out["analytic_value"] = qi::analytic_incompatibility(fam, o.eta);
  if (o.emit_assemblage) {
    out["assemblage"] = json::parse(qi::assemblage_to_json(qi::mub_assemblage(fam, o.eta)));
  }
  emit(out.dump(2), o.out);
  return kExitOk;
}

int cmd_incompat(const Options& o) {
  qi::WeightedAssemblage a = scenario_assemblage(o);
  qi::IncompatReport rep = qi::incompatibility(a);
  json out{{"value", rep.value},
           {"primal_value", rep.primal_value},
           {"dual_value", rep.dual_value},
           {"gap", rep.gap},
           {"iterations", rep.iterations},
           {"jointly_measurable", qi::is_jointly_measurable(a)},
           {"certificate", certificate_summary(rep, a)}};
  int code = kExitOk;
  if (rep.gap > o.tol) code = kExitBoundViolation;
  if (o.file.empty()) {
    qi::MubFamily fam = qi::build_mub(o.d, o.m);
    if (qi::white_noise_robustness(fam).closed_form) {
      const double analytic = qi::analytic_incompatibility(fam, o.eta);
      out["analytic_value"] = analytic;
      out["analytic_deviation"] = rep.value - analytic;
      if (std::abs(rep.value - analytic) > o.tol) code = kExitBoundViolation;
    }
  }
  out["exit_code"] = code;
  emit(out.dump(2), o.out);
  return code;
}

int cmd_gain(const Options& o) {
  qi::WeightedAssemblage a = scenario_assemblage(o);
  if (a.settings() < 2) throw qi::InputError("gain: need at least two settings");
  std::vector<int> base_idx;
  for (int x = 0; x + 1 < a.settings(); ++x) base_idx.push_back(x);
  qi::GainReport rep = qi::incompatibility_gain(a.restrict(base_idx),
                                                a.measurement(a.settings() - 1));
  json out{{"i_before", rep.i_before}, {"i_after", rep.i_after},
           {"delta", rep.delta},       {"i_n", rep.i_n},
           {"i_g", rep.i_g},           {"hypothesis_holds", rep.hypothesis_holds},
           {"slack_n", rep.slack_n},   {"slack_g", rep.slack_g}};
  const int code = (rep.slack_n < -o.tol || rep.slack_g < -o.tol)
                       ? kExitBoundViolation
                       : kExitOk;
  out["exit_code"] = code;
  emit(out.dump(2), o.out);
  return code;
}

int cmd_bounds(const Options& o) {
  qi::WeightedAssemblage a = scenario_assemblage(o);
  std::vector<int> subset = o.subset;
  if (subset.empty()) subset = {0, 1};
  qi::SubsetBoundsReport rep = qi::check_subset_bounds(a, subset);
  json out{{"i_total", rep.i_total},       {"i_subset", rep.i_subset},
           {"i_spliced", rep.i_spliced},   {"lower_slack", rep.lower_slack},
           {"upper_slack", rep.upper_slack}};
  double worst = std::min(rep.lower_slack, rep.upper_slack);
  if (rep.has_pair_sandwich) {
    out["pair_average"] = rep.pair_average;
    out["i_n"] = rep.i_n;
    out["avg_lower_slack"] = rep.avg_lower_slack;
    out["avg_upper_slack"] = rep.avg_upper_slack;
    worst = std::min({worst, rep.avg_lower_slack, rep.avg_upper_slack});
  }
  const int code = worst < -o.tol ? kExitBoundViolation : kExitOk;
  out["exit_code"] = code;
  emit(out.dump(2), o.out);
  return code;
}

int cmd_decompose(const Options& o) {
  Options local = o;
  if (local.file.empty()) local.m = 3;
  qi::DecompositionReport rep = qi::decompose(scenario_assemblage(local));
  json out{{"i_total", rep.i_total},   {"i_gen", rep.i_gen},
           {"i_pair", rep.i_pair},     {"i_hollow", rep.i_hollow},
           {"sum", rep.i_gen + rep.i_pair + rep.i_hollow},
           {"slack", rep.slack}};
  const int code = rep.slack < -o.tol ? kExitBoundViolation : kExitOk;
  out["exit_code"] = code;
  emit(out.dump(2), o.out);
  return code;
}

int cmd_steering(const Options& o) {
  qi::WeightedAssemblage a = scenario_assemblage(o);
  const int d = a.dim();
  qi::CVec phi = qi::CVec::Zero(d * d);
  for (int i = 0; i < d; ++i) phi[i * d + i] = 1.0 / std::sqrt(double(d));
  qi::HermitianOperator state((phi * phi.adjoint()).eval());
  qi::SteeringReport sr = qi::steering_distance(qi::steer_from_state(state, a));
  const double incompat = qi::incompatibility(a).value;
  json out{{"steering_distance", sr.value},
           {"incompatibility", incompat},
           {"slack", incompat - sr.value},
           {"gap", sr.gap}};
  const int code = incompat - sr.value < -o.tol ? kExitBoundViolation : kExitOk;
  out["exit_code"] = code;
  emit(out.dump(2), o.out);
  return code;
}

qi::BehaviorTable behavior_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw qi::InputError(std::string("behavior JSON parse error: ") + e.what());
  }
  try {
    std::vector<std::vector<qi::RMat>> q;
    for (const auto& row : j.at("tables")) {
      std::vector<qi::RMat> r;
      for (const auto& tab : row) {
        const auto vals = tab.get<std::vector<std::vector<double>>>();
        qi::RMat t(static_cast<int>(vals.size()), static_cast<int>(vals.at(0).size()));
        for (int i = 0; i < t.rows(); ++i)
          for (int k = 0; k < t.cols(); ++k)
            t(i, k) = vals.at(static_cast<size_t>(i)).at(static_cast<size_t>(k));
        r.push_back(std::move(t));
      }
      q.push_back(std::move(r));
    }
    return qi::BehaviorTable(std::move(q));
  } catch (const json::exception& e) {
    throw qi::InputError(std::string("behavior JSON structure error: ") + e.what());
  }
}

qi::WeightedAssemblage dichotomic_povms(const std::vector<qi::CMat>& obs) {
  std::vector<qi::Povm> ms;
  for (const auto& ob : obs) {
    const int d = static_cast<int>(ob.rows());
    ms.emplace_back(d, std::vector<qi::HermitianOperator>{
                           qi::HermitianOperator(((qi::CMat::Identity(d, d) + ob) / 2).eval()),
                           qi::HermitianOperator(((qi::CMat::Identity(d, d) - ob) / 2).eval())});
  }
  return qi::WeightedAssemblage::uniform(std::move(ms));
}

int cmd_nonlocality(const Options& o) {
  qi::BehaviorTable q = [&] {
    if (!o.file.empty()) return behavior_from_json_text(read_file(o.file));
    qi::ChshSearchResult best = qi::maximize_avg_chsh(o.seed, o.restarts);
    return qi::behavior_from_quantum(qi::HermitianOperator(best.state),
                                     dichotomic_povms(best.alice_obs),
                                     dichotomic_povms(best.bob_obs));
  }();
  qi::NonlocalityReport rep = qi::nonlocality_distance(q);
  json out{{"value", rep.value}, {"gap", rep.gap}, {"exit_code", kExitOk}};
  emit(out.dump(2), o.out);
  return kExitOk;
}

int cmd_chsh(const Options& o) {
  const double bound = o.single_pair ? 2.0 * std::sqrt(2.0)
                                     : (4.0 * std::sqrt(2.0) + 2.0) / 3.0;
  qi::ChshSearchResult res = o.single_pair
                                 ? qi::maximize_single_chsh(o.seed, o.restarts)
                                 : qi::maximize_avg_chsh(o.seed, o.restarts);
  json out{{"best", res.best_average},
           {"bound", bound},
           {"shortfall", bound - res.best_average},
           {"chsh_12", res.values.chsh_12},
           {"chsh_13", res.values.chsh_13},
           {"chsh_23", res.values.chsh_23},
           {"average", res.values.average},
           {"ns_bound", qi::ns_correlator_bound([&] {
             qi::RMat c(3, 2);
             if (o.single_pair) c << 1, 1, 1, -1, 0, 0;
             else c << 2.0 / 3, 2.0 / 3, 2.0 / 3, 0, 2.0 / 3, -2.0 / 3;
             return c;
           }())}};
  const int code = res.best_average > bound + 1e-6 ? kExitBoundViolation : kExitOk;
  out["exit_code"] = code;
  emit(out.dump(2), o.out);
  return code;
}

struct SweepRow {
  double eta = 0;
  double i_full = 0;
  std::optional<double> analytic;
  std::optional<double> i_base, delta, i_n, slack;
};

int cmd_sweep(const Options& o) {
  if (o.eta_steps < 1) throw qi::InputError("sweep: need at least one grid point");
  qi::MubFamily fam = qi::build_mub(o.d, o.m);
  const bool closed = qi::white_noise_robustness(fam).closed_form;
  if (o.with_gain && o.m < 3) {
    throw qi::InputError("sweep: gain columns need at least three settings");
  }

  auto run_point = [&](int i) {
    SweepRow row;
    row.eta = o.eta_steps == 1
                  ? o.eta_start
                  : o.eta_start + (o.eta_stop - o.eta_start) * i / (o.eta_steps - 1);
    qi::WeightedAssemblage a = qi::mub_assemblage(fam, row.eta);
    row.i_full = qi::incompatibility(a).value;
    if (closed) row.analytic = qi::analytic_incompatibility(fam, row.eta);
    if (o.with_gain) {
      std::vector<int> base_idx;
      for (int x = 0; x + 1 < o.m; ++x) base_idx.push_back(x);
      qi::GainReport g = qi::incompatibility_gain(a.restrict(base_idx),
                                                  a.measurement(o.m - 1));
      row.i_base = g.i_before;
      row.delta = g.delta;
      row.i_n = g.i_n;
      row.slack = g.slack_n;
    }
    return row;
  };

  std::vector<std::future<SweepRow>> futures;
  for (int i = 0; i < o.eta_steps; ++i) {
    futures.push_back(std::async(std::launch::async | std::launch::deferred,
                                 run_point, i));
  }
  std::ostringstream csv;
  csv << "eta,i_full";
  if (closed) csv << ",analytic,deviation";
  if (o.with_gain) csv << ",i_base,delta,i_n,slack_n";
  csv << "\n";
  int code = kExitOk;
  for (auto& f : futures) {
    SweepRow row = f.get();
    csv << sig12(row.eta) << ',' << sig12(row.i_full);
    if (closed) {
      const double dev = row.i_full - *row.analytic;
      csv << ',' << sig12(*row.analytic) << ',' << sig12(dev);
      if (std::abs(dev) > o.tol) code = kExitBoundViolation;
    }
    if (o.with_gain) {
      csv << ',' << sig12(*row.i_base) << ',' << sig12(*row.delta) << ','
          << sig12(*row.i_n) << ',' << sig12(*row.slack);
      if (*row.slack < -o.tol) code = kExitBoundViolation;
    }
    csv << "\n";
  }
  emit(csv.str(), o.out);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement incompatibility quantifiers and bounds"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--tol", o.tol, "Check tolerance");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--out", o.out, "Output path (default: stdout)");
  app.add_option("--config", o.config, "JSON config supplying unset flags");

  auto add_scenario = [&](CLI::App* sub, bool with_file = true) {
    sub->add_option("-d,--dim", o.d, "Hilbert space dimension (prime)");
    sub->add_option("-m,--settings", o.m, "Number of measurements");
    sub->add_option("--eta", o.eta, "Depolarizing visibility");
    if (with_file) sub->add_option("--file", o.file, "Assemblage JSON instead of a built-in scenario");
  };

  CLI::App* mub = app.add_subcommand("mub", "Mutually unbiased bases facts");
  add_scenario(mub, false);
  mub->add_flag("--emit-assemblage", o.emit_assemblage, "Embed the assemblage JSON");

  CLI::App* incompat = app.add_subcommand("incompat", "Incompatibility of an assemblage");
  add_scenario(incompat);

  CLI::App* gain = app.add_subcommand("gain", "Gain from the last measurement");
  add_scenario(gain);

  CLI::App* bounds = app.add_subcommand("bounds", "Subset sandwich bounds");
  add_scenario(bounds);
  bounds->add_option("--subset", o.subset, "Setting indices forming the subset");

  CLI::App* decompose = app.add_subcommand("decompose", "Genuine/pairwise/hollow decomposition");
  add_scenario(decompose);

  CLI::App* steering = app.add_subcommand("steering", "Steering distance on the maximally entangled state");
  add_scenario(steering);

  CLI::App* nonlocality = app.add_subcommand("nonlocality", "Local distance of a behavior");
  nonlocality->add_option("--file", o.file, "Behavior JSON (default: optimizer output)");
  nonlocality->add_option("--restarts", o.restarts, "Optimizer restarts");

  CLI::App* chsh = app.add_subcommand("chsh", "Averaged CHSH optimization");
  chsh->add_option("--restarts", o.restarts, "Optimizer restarts");
  chsh->add_flag("--single-pair", o.single_pair, "Optimize one CHSH functional only");

  CLI::App* sweep = app.add_subcommand("sweep", "Visibility sweep to CSV");
  add_scenario(sweep, false);
  sweep->add_option("--eta-start", o.eta_start, "Grid start");
  sweep->add_option("--eta-stop", o.eta_stop, "Grid stop");
  sweep->add_option("--eta-steps", o.eta_steps, "Grid points");
  sweep->add_flag("--gain", o.with_gain, "Add gain columns (qubit scale)");

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(o, sub);
    if (sub == mub) return cmd_mub(o);
    if (sub == incompat) return cmd_incompat(o);
    if (sub == gain) return cmd_gain(o);
    if (sub == bounds) return cmd_bounds(o);
    if (sub == decompose) return cmd_decompose(o);
    if (sub == steering) return cmd_steering(o);
    if (sub == nonlocality) return cmd_nonlocality(o);
    if (sub == chsh) return cmd_chsh(o);
    if (sub == sweep) return cmd_sweep(o);
    return kExitInputError;
  } catch (const qi::InputError& e) {
    std::cerr << json{{"error", e.what()}, {"exit_code", kExitInputError}}.dump() << "\n";
    return kExitInputError;
  } catch (const qi::SolverError& e) {
    std::cerr << json{{"error", e.what()}, {"exit_code", kExitSolverFailure}}.dump() << "\n";
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"exit_code", kExitSolverFailure}}.dump() << "\n";
    return kExitSolverFailure;
  }
}
