#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "pdmcausal/harness.hpp"

namespace pdmcausal {

namespace {

QuantumState named_state(const std::string& id) {
  const double h = std::numbers::sqrt2 / 2.0;
  if (id == "zero") return QuantumState::basis(0, {2});
  if (id == "one") return QuantumState::basis(1, {2});
  if (id == "plus") return QuantumState::pure(ComplexVector{h, h}, {2});
  if (id == "mixed") return QuantumState::maximally_mixed({2});
  if (id == "bell") return QuantumState::pure(ComplexVector{h, 0.0, 0.0, h}, {2, 2});
  if (id.rfind("basis:", 0) == 0) {
    const std::string bits = id.substr(6);
    if (bits.empty() || bits.find_first_not_of("01") != std::string::npos)
      throw std::invalid_argument("basis state needs a bit string, got '" + bits + "'");
    return QuantumState::basis(std::stoull(bits, nullptr, 2), std::vector<std::size_t>(bits.size(), 2));
  }
  if (id.rfind("mixed:", 0) == 0) {
    const std::size_t n = std::stoul(id.substr(6));
    return QuantumState::maximally_mixed(std::vector<std::size_t>(n, 2));
  }
  throw std::invalid_argument("unknown state '" + id + "'");
}

bool is_file(const std::string& s) { return std::filesystem::is_regular_file(s); }

QuantumState load_state(const std::string& s) { return is_file(s) ? state_from_json(read_json_file(s)) : named_state(s); }

QuantumChannel load_channel(const std::string& s) {
  return is_file(s) ? channel_from_json(read_json_file(s)) : named_channel(s);
}

/// Writes to `path`, or to `out` when the path is empty.
template <class Writer>
void emit(const std::string& path, std::ostream& out, Writer&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write '" + path + "'");
  write(f);
  if (!f) throw std::invalid_argument("failed writing '" + path + "'");
}

void emit_json(const std::string& path, std::ostream& out, const json& j) {
  emit(path, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

void emit_table(const std::string& path, std::ostream& out, OutputFormat fmt, const std::string& scenario,
                const Table& t) {
  if (fmt == OutputFormat::Csv) {
    emit(path, out, [&](std::ostream& o) { write_csv(t, o); });
  } else {
    json j = table_to_json(t);
    j["scenario"] = scenario;
    emit_json(path, out, j);
  }
}

const std::map<std::string, OutputFormat> kFormats{{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}};

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo-density matrices and causal structure inference", "pdmcausal"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // pdm
  auto* pdm = app.add_subcommand("pdm", "Build and inspect pseudo-density matrices");
  pdm->require_subcommand(1);

  std::string state_arg, method = "auto", out_path, in_path;
  std::vector<std::string> channel_args;
  auto* build = pdm->add_subcommand("build", "PDM of a state evolved through channels between slots");
  build->add_option("--state", state_arg, "state JSON file or name (zero, one, plus, mixed, bell, basis:<bits>, mixed:<n>)")
      ->required();
  build->add_option("--channel", channel_args, "channel JSON file or name, one per step")->required();
  build->add_option("--method", method, "closed, iterative, measurements or auto")
      ->check(CLI::IsMember({"auto", "closed", "iterative", "measurements"}));
  build->add_option("--out", out_path, "output file (default stdout)");

  auto* neg = pdm->add_subcommand("negativity", "Print f(R) = ||R||_1 - 1");
  neg->add_option("--in", in_path, "PDM JSON")->required();

  auto* rev = pdm->add_subcommand("reverse", "Swap the two time slots");
  rev->add_option("--in", in_path, "PDM JSON")->required();
  rev->add_option("--out", out_path, "output file (default stdout)");

  // infer
  auto* infer = app.add_subcommand("infer", "Causal inference on two-time PDMs");
  infer->require_subcommand(1);
  Thresholds th;
  bool both = false;
  auto* cls = infer->add_subcommand("classify", "Compatible causal structures of a two-slot PDM");
  cls->add_option("--in", in_path, "PDM JSON")->required();
  cls->add_option("--eps-neg", th.eps_neg, "negativity threshold")->capture_default_str();
  cls->add_option("--eps-pos", th.eps_pos, "positivity threshold")->capture_default_str();
  cls->add_option("--rank-tol", th.rank_tol, "marginal rank tolerance")->capture_default_str();
  cls->add_flag("--both-orientations", both, "also classify the slot-swapped PDM");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "Worked examples with built-in checks");
  std::string scenario;
  std::vector<double> lambdas, thetas, thetas_deg;
  OutputFormat format = OutputFormat::Json;
  repro->add_option("scenario", scenario, "measure-prepare, common-cause or swap-influence")
      ->required()
      ->check(CLI::IsMember({"measure-prepare", "common-cause", "swap-influence"}));
  repro->add_option("--lambda", lambdas, "lambda values (measure-prepare)");
  repro->add_option("--theta", thetas, "angles in radians");
  repro->add_option("--theta-deg", thetas_deg, "angles in degrees");
  repro->add_option("--format", format, "json or csv")->transform(CLI::CheckedTransformer(kFormats));
  repro->add_option("--out", out_path, "output file (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweeps");
  sweep->require_subcommand(1);
  auto* haar = sweep->add_subcommand("haar", "Negativity over Haar-random circuits or inputs");
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  OutputFormat sweep_format = OutputFormat::Csv;
  std::string summary_path;
  haar->add_option("--scenario", scenario, "fig3 or fig4")->required()->check(CLI::IsMember({"fig3", "fig4"}));
  haar->add_option("--n", samples, "number of samples")->capture_default_str();
  haar->add_option("--seed", seed, "random seed")->required();
  haar->add_option("--theta-deg", thetas_deg, "fig4 angles in degrees (default 30 60)");
  haar->add_option("--format", sweep_format, "csv or json")->transform(CLI::CheckedTransformer(kFormats));
  haar->add_option("--out", out_path, "output file (default stdout)");
  haar->add_option("--summary", summary_path, "write the per-group summary JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*build) {
      const QuantumState rho = load_state(state_arg);
      std::vector<QuantumChannel> chans;
      for (const auto& c : channel_args) chans.push_back(load_channel(c));
      if (method == "auto") method = chans.size() == 1 ? "closed" : "iterative";
      if (method == "closed" && chans.size() != 1)
        throw std::invalid_argument("--method closed takes exactly one channel");
      const Pdm r = method == "closed"      ? pdm_closed_form(rho, chans[0])
                    : method == "iterative" ? pdm_iterative(rho, chans)
                                            : pdm_from_measurements(rho, chans);
      emit_json(out_path, out, pdm_to_json(r));
    } else if (*neg) {
      out << json(negativity(pdm_from_json(read_json_file(in_path)))).dump() << '\n';
    } else if (*rev) {
      emit_json(out_path, out, pdm_to_json(time_reverse(pdm_from_json(read_json_file(in_path)))));
    } else if (*cls) {
      const Pdm r = pdm_from_json(read_json_file(in_path));
      if (both) {
        const auto v = classify_both_orientations(r, th);
        out << json{{"as_given", verdict_to_json(v.as_given)}, {"reversed", verdict_to_json(v.reversed)}}.dump(2)
            << '\n';
      } else {
        out << verdict_to_json(classify(r, th)).dump(2) << '\n';
      }
    } else if (*repro) {
      ScenarioConfig cfg = ScenarioConfig::defaults(scenario);
      cfg.format = format;
      cfg.output_path = out_path;
      if (!lambdas.empty()) cfg.lambdas = lambdas;
      if (!thetas.empty() || !thetas_deg.empty()) {
        cfg.thetas = thetas;
        for (double d : thetas_deg) cfg.thetas.push_back(d * std::numbers::pi / 180.0);
      }
      const Table t = scenario == "measure-prepare" ? run_measure_prepare(cfg)
                      : scenario == "common-cause"  ? run_common_cause_mixture(cfg)
                                                    : run_swap_influence(cfg);
      emit_table(cfg.output_path, out, cfg.format, scenario, t);
    } else if (*haar) {
      ScenarioConfig cfg = ScenarioConfig::defaults(scenario);
      cfg.samples = samples;
      cfg.seed = seed;
      cfg.format = sweep_format;
      cfg.output_path = out_path;
      if (!thetas_deg.empty()) {
        cfg.thetas.clear();
        for (double d : thetas_deg) cfg.thetas.push_back(d * std::numbers::pi / 180.0);
      }
      const SweepResult res = run_haar_sweep(cfg);
      emit_table(cfg.output_path, out, cfg.format, scenario, res.table);
      const json summary = summary_to_json(res.summary);
      if (!summary_path.empty()) emit_json(summary_path, out, summary);
      for (const auto& g : res.summary)
        err << scenario << ' ' << g.group << ": " << g.negative << '/' << g.count << " samples with f > "
            << kSweepNegativityTol << '\n';
    }
  } catch (const InconsistencyError& e) {
    err << "inconsistency: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pdmcausal
