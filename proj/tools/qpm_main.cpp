#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "qpm/conjectures.hpp"
#include "qpm/errors.hpp"
#include "qpm/serialize.hpp"
#include "qpm/sinkhorn.hpp"
#include "qpm/version.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    qpm::write_text_file(out_path, content);
}

json base_doc(const std::string& command, const json& config) {
  json doc;
  doc["command"] = command;
  doc["version"] = qpm::kVersion;
  doc["config"] = config;
  return doc;
}

std::string render_series(const std::string& command, const json& config,
                          const qpm::MomentSeries& series, const std::string& format) {
  if (format == "csv") return qpm::series_csv(series);
  json doc = base_doc(command, config);
  doc["series"] = qpm::series_to_json(series);
  return doc.dump(2) + "\n";
}

struct CommonOpts {
  long samples = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& c, bool with_format = true) {
  cmd->add_option("--samples", c.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "RNG seed")->required();
  cmd->add_option("--threads", c.threads, "worker threads (never changes results)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output file (default stdout)");
  if (with_format)
    cmd->add_option("--format", c.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flat magic-unitary models: moment laws, flattening, inequality harnesses"};
  app.require_subcommand(1);

  // --- weyl-moments ---------------------------------------------------------
  auto* wm = app.add_subcommand(
      "weyl-moments", "moments of the unitary-conjugated group-frame model");
  std::string wm_group = "Z2";
  int wm_r = 1, wm_pmax = 4;
  CommonOpts wm_c;
  wm->add_option("--group", wm_group, "finite abelian group, e.g. Z2 or Z2xZ4");
  wm->add_option("--r", wm_r, "number of independent unitaries")->check(CLI::PositiveNumber);
  wm->add_option("--pmax", wm_pmax, "largest moment order")->check(CLI::PositiveNumber);
  add_common(wm, wm_c);

  // --- universal ------------------------------------------------------------
  auto* un = app.add_subcommand(
      "universal", "truncated moments over random magic bases, with Catalan column");
  int un_n = 4, un_pmax = 3, un_rmax = 6;
  CommonOpts un_c;
  un->add_option("--N", un_n, "grid size")->check(CLI::PositiveNumber);
  un->add_option("--pmax", un_pmax, "largest moment order")->check(CLI::PositiveNumber);
  un->add_option("--rmax", un_rmax, "largest truncation power")->check(CLI::PositiveNumber);
  add_common(un, un_c);

  // --- sinkhorn -------------------------------------------------------------
  auto* sk = app.add_subcommand("sinkhorn", "flattening runs from Haar tuple grids");
  int sk_n = 3;
  long sk_trials = 10;
  double sk_tol = 1e-10;
  int sk_iters = 10000;
  std::uint64_t sk_seed = 0;
  std::string sk_out, sk_csv;
  bool sk_f3 = false;
  sk->add_option("--N", sk_n, "grid size")->check(CLI::PositiveNumber);
  sk->add_option("--trials", sk_trials, "number of runs")->check(CLI::PositiveNumber);
  sk->add_option("--tol", sk_tol, "convergence tolerance")->check(CLI::PositiveNumber);
  sk->add_option("--max-iters", sk_iters, "iteration cap")->check(CLI::NonNegativeNumber);
  sk->add_option("--seed", sk_seed, "RNG seed")->required();
  sk->add_option("--out", sk_out, "JSON summary file (default stdout)");
  sk->add_option("--csv", sk_csv, "per-iteration trace CSV file");
  sk->add_flag("--f3", sk_f3, "also record the order-3 flatness column");

  // --- conjectures ----------------------------------------------------------
  auto* cj = app.add_subcommand("conjectures", "randomized falsification harnesses");
  std::string cj_which = "trace-inequality";
  std::string cj_mode = "full";
  long cj_trials = 1000;
  int cj_k = 8, cj_n = 3, cj_p = 2;
  std::uint64_t cj_seed = 0;
  std::string cj_out;
  cj->add_option("--which", cj_which, "trace-inequality, volume-monotone, or flatness-monotone")
      ->check(CLI::IsMember({"trace-inequality", "volume-monotone", "flatness-monotone"}));
  cj->add_option("--mode", cj_mode, "trace-inequality constraint mode")
      ->check(CLI::IsMember({"full", "s-zero-relaxed"}));
  cj->add_option("--trials", cj_trials, "number of random instances")->check(CLI::PositiveNumber);
  cj->add_option("--K", cj_k, "largest projection dimension")->check(CLI::PositiveNumber);
  cj->add_option("--N", cj_n, "grid size for the flattening claims")->check(CLI::PositiveNumber);
  cj->add_option("--p", cj_p, "flatness order")->check(CLI::PositiveNumber);
  cj->add_option("--seed", cj_seed, "RNG seed")->required();
  cj->add_option("--out", cj_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (wm->parsed()) {
      const qpm::FiniteAbelianGroup h = qpm::parse_group(wm_group);
      qpm::McPolicy policy;
      policy.threads = wm_c.threads;
      qpm::MomentSeries series =
          qpm::weyl_lambda_moments(h, wm_r, wm_pmax, wm_c.samples, wm_c.seed, policy);
      for (auto& e : series.entries) e.reference = double(qpm::lis_moment(int(h.order()), e.p));
      json config;
      config["group"] = wm_group;
      config["r"] = wm_r;
      config["pmax"] = wm_pmax;
      config["samples"] = wm_c.samples;
      config["seed"] = wm_c.seed;
      emit(wm_c.out, render_series("weyl-moments", config, series, wm_c.format));
      return 0;
    }

    if (un->parsed()) {
      qpm::McPolicy policy;
      policy.threads = un_c.threads;
      const qpm::MomentSeries series =
          qpm::universal_moments(un_n, un_pmax, un_rmax, un_c.samples, un_c.seed, policy);
      json config;
      config["N"] = un_n;
      config["pmax"] = un_pmax;
      config["rmax"] = un_rmax;
      config["samples"] = un_c.samples;
      config["seed"] = un_c.seed;
      emit(un_c.out, render_series("universal", config, series, un_c.format));
      return 0;
    }

    if (sk->parsed()) {
      qpm::FlattenOptions opts;
      opts.tol = sk_tol;
      opts.max_iters = sk_iters;
      opts.record_f3 = sk_f3;
      std::vector<qpm::FlatteningTrace> runs;
      runs.reserve(std::size_t(sk_trials));
      json run_rows = json::array();
      for (long t = 0; t < sk_trials; ++t) {
        qpm::RngStream st = qpm::RngStream::derive(sk_seed, std::uint64_t(t));
        runs.push_back(qpm::flatten(qpm::tuple_grid(qpm::haar_tuple(sk_n, st)), opts));
        json row = qpm::trace_summary_json(runs.back());
        row["run"] = t;
        run_rows.push_back(row);
      }
      json config;
      config["N"] = sk_n;
      config["trials"] = sk_trials;
      config["tol"] = sk_tol;
      config["max_iters"] = sk_iters;
      config["seed"] = sk_seed;
      json doc = base_doc("sinkhorn", config);
      doc["runs"] = run_rows;
      emit(sk_out, doc.dump(2) + "\n");
      if (!sk_csv.empty()) qpm::write_text_file(sk_csv, qpm::traces_csv(runs, sk_f3));
      return 0;
    }

    if (cj->parsed()) {
      qpm::TrialReport rep;
      json config;
      config["which"] = cj_which;
      config["trials"] = cj_trials;
      config["seed"] = cj_seed;
      if (cj_which == "trace-inequality") {
        const qpm::InequalityMode mode = cj_mode == "full"
                                             ? qpm::InequalityMode::full_constraints
                                             : qpm::InequalityMode::s_zero_relaxed;
        rep = qpm::test_trace_inequality(cj_trials, cj_k, cj_seed, mode);
        config["mode"] = cj_mode;
        config["K"] = cj_k;
      } else if (cj_which == "volume-monotone") {
        rep = qpm::test_volume_monotone(cj_n, cj_trials, cj_seed);
        config["N"] = cj_n;
      } else {
        rep = qpm::test_fp_monotone(cj_n, cj_p, cj_trials, cj_seed);
        config["N"] = cj_n;
        config["p"] = cj_p;
      }
      json doc = base_doc("conjectures", config);
      doc["report"] = qpm::report_to_json(rep);
      emit(cj_out, doc.dump(2) + "\n");
      return 0;
    }
  } catch (const qpm::resource_limit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const qpm::sampling_failure& e) {
    std::cerr << "sampling failure: " << e.what() << "\n";
    return 4;
  } catch (const qpm::invalid_input& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
