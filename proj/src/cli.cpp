#include "fundlim/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fundlim/bounds.hpp"
#include "fundlim/errors.hpp"
#include "fundlim/io.hpp"
#include "fundlim/simulation.hpp"

namespace fundlim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json orders_json(const std::vector<NormOrder>& orders) {
  json out = json::array();
  for (auto p : orders) out.push_back(io::to_json(p));
  return out;
}

json make_manifest(const std::string& command, json inputs, json parameters, const GlobalOptions& opts) {
  return {{"command", command},
          {"inputs", std::move(inputs)},
          {"parameters", std::move(parameters)},
          {"tool_version", kToolVersion},
          {"timestamp", opts.clock ? opts.clock() : utc_timestamp()}};
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<NormOrder> orders_or_default(const GlobalOptions& opts) {
  return opts.orders.empty() ? std::vector<NormOrder>{NormOrder(2.0)} : opts.orders;
}

std::vector<NormOrder> parse_order_list(const std::vector<std::string>& items) {
  std::vector<NormOrder> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) out.push_back(NormOrder::parse(token));
    }
  }
  return out;
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CommandOutput cmd_analyze(const fs::path& plant_file, const GlobalOptions& opts) {
  const json plant_json = io::read_json_file(plant_file);
  const auto model = io::plant_from_json(plant_json);
  const auto chars = analyze_plant(model);
  CommandOutput out;
  out.report = {{"manifest", make_manifest("analyze", {{"plant", plant_file.string()}}, json::object(), opts)},
                {"characteristics", io::to_json(chars)}};
  return out;
}

CommandOutput cmd_bound(const std::optional<fs::path>& plant_file, const fs::path& dist_file,
                        const std::string& theorem, const GlobalOptions& opts) {
  const auto dist = io::disturbance_from_json(io::read_json_file(dist_file));
  const auto ent = entropy_summary(dist);
  const auto orders = orders_or_default(opts);
  const std::size_t grid = opts.grid.value_or(kDefaultSpectrumGrid);

  std::optional<PlantCharacteristics> chars;
  if (plant_file) chars = analyze_plant(io::plant_from_json(io::read_json_file(*plant_file)));

  const BoundKind kind = theorem == "auto" ? (chars ? BoundKind::kErrorLti : BoundKind::kErrorGeneric)
                                           : bound_kind_from_string(theorem);
  if (kind != BoundKind::kErrorGeneric && !chars) {
    throw InputError("theorem " + to_string(kind) + " needs a plant file (--plant)");
  }

  json reports = json::array();
  auto push = [&](const BoundReport& r) { reports.push_back(io::to_json(r)); };
  switch (kind) {
    case BoundKind::kErrorLti:
      for (auto p : orders) push(error_bound_lti(p, *chars, ent));
      break;
    case BoundKind::kOutput:
      for (auto p : orders) push(output_bound(p, *chars, ent));
      break;
    case BoundKind::kErrorGeneric:
      for (auto p : orders) push(error_bound_generic(p, ent));
      break;
    case BoundKind::kVariance:
      push(error_bound_p2(*chars, ent));
      break;
    case BoundKind::kMaxDeviation:
      push(error_bound_pinf(*chars, ent));
      break;
    case BoundKind::kSpectral:
    case BoundKind::kKolmogorovSzego: {
      const auto spectrum = power_spectrum(dist, grid);
      const double j = negentropy_rate(dist);
      if (kind == BoundKind::kKolmogorovSzego) {
        push(error_bound_spectral(NormOrder(2.0), *chars, spectrum, j));
      } else {
        for (auto p : orders) push(error_bound_spectral(p, *chars, spectrum, j));
      }
      break;
    }
  }

  json inputs = {{"disturbance", dist_file.string()}};
  if (plant_file) inputs["plant"] = plant_file->string();
  json params = {{"theorem", theorem}, {"p", orders_json(orders)}, {"grid", grid},
                 {"disturbance", io::to_json(dist)}};
  CommandOutput out;
  out.report = {{"manifest", make_manifest("bound", inputs, params, opts)},
                {"entropy",
                 {{"conditional_entropy_rate", ent.conditional_entropy_rate},
                  {"negentropy_rate", ent.negentropy_rate}}},
                {"reports", reports}};
  if (chars) {
    out.report["characteristics"] = io::to_json(*chars);
    if (kind == BoundKind::kOutput && chars->relative_degree == 0) {
      out.report["warnings"] = json::array({"relative degree nu = 0; output bound reported as-is"});
    }
  }
  return out;
}

CommandOutput cmd_verify(const fs::path& plant_file, const fs::path& dist_file, const std::string& controller_spec,
                         const std::optional<fs::path>& config_file, const GlobalOptions& opts) {
  const auto model = io::plant_from_json(io::read_json_file(plant_file));
  const auto dist = io::disturbance_from_json(io::read_json_file(dist_file));
  const auto controller = parse_controller(controller_spec);
  SimulationConfig cfg = config_file ? io::config_from_json(io::read_json_file(*config_file)) : SimulationConfig{};
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.orders.empty()) cfg.orders = opts.orders;
  cfg.validate();

  const auto chars = analyze_plant(model);
  const auto ent = entropy_summary(dist);
  const auto result = run_closed_loop(model, *controller, dist, cfg);

  json inputs = {{"plant", plant_file.string()}, {"disturbance", dist_file.string()}};
  if (config_file) inputs["config"] = config_file->string();
  json params = {{"controller", controller->describe()},
                 {"simulation", io::to_json(cfg)},
                 {"disturbance", io::to_json(dist)}};

  CommandOutput out;
  out.report = {{"manifest", make_manifest("verify", inputs, params, opts)},
                {"stable", result.stable},
                {"diverged_trajectories", result.diverged_trajectories},
                {"tail_window", {{"begin", result.tail_begin}, {"end", result.horizon}}},
                {"tail_statistic", "max over the tail window of per-step empirical norms (heuristic limsup)"}};
  out.files.emplace_back("simulation.csv", io::simulation_to_csv(result));

  if (!result.stable) {
    out.report["error"] = "closed loop is not mean-square stable; certification refused";
    out.exit_code = kUnstableLoop;
    return out;
  }

  bool all_ok = true;
  json results = json::array();
  for (std::size_t i = 0; i < cfg.orders.size(); ++i) {
    const NormOrder p = cfg.orders[i];
    const auto err_report = error_bound_lti(p, chars, ent);
    const auto err_cert = verify_bound(result, err_report, Signal::kError, cfg.seed + 2 * i);
    const auto out_report = output_bound(p, chars, ent);
    const auto out_cert = verify_bound(result, out_report, Signal::kOutput, cfg.seed + 2 * i + 1);
    all_ok = all_ok && err_cert.satisfied && out_cert.satisfied;
    results.push_back({{"p", io::to_json(p)},
                       {"error", {{"report", io::to_json(err_report)}, {"certification", io::to_json(err_cert)}}},
                       {"output", {{"report", io::to_json(out_report)}, {"certification", io::to_json(out_cert)}}}});
  }
  out.report["results"] = results;
  out.report["all_satisfied"] = all_ok;
  out.exit_code = all_ok ? kSuccess : kCertificationFailed;
  return out;
}

CommandOutput cmd_szego(const std::optional<fs::path>& dist_file, const std::optional<fs::path>& spectrum_csv,
                        double negentropy, const GlobalOptions& opts) {
  if (dist_file.has_value() == spectrum_csv.has_value()) {
    throw InputError("szego needs exactly one of --dist or --spectrum");
  }
  const std::size_t grid = opts.grid.value_or(kDefaultSpectrumGrid);
  json inputs = json::object();
  json params = json::object();
  CommandOutput out;

  std::optional<SpectralDensity> spectrum;
  double j = negentropy;
  if (dist_file) {
    const auto dist = io::disturbance_from_json(io::read_json_file(*dist_file));
    try {
      spectrum = power_spectrum(dist, grid);
    } catch (const InvalidModel& e) {
      throw InputError(e.what());
    }
    j = negentropy_rate(dist);
    inputs["disturbance"] = dist_file->string();
    params = {{"grid", grid}, {"disturbance", io::to_json(dist)}};
    out.files.emplace_back("spectrum.csv", io::spectrum_to_csv(*spectrum));
  } else {
    spectrum = io::spectrum_from_csv(read_text_file(*spectrum_csv));
    inputs["spectrum"] = spectrum_csv->string();
    params = {{"grid", spectrum->grid_size()}, {"negentropy", negentropy}};
  }

  const double log_integral = szego_log_integral(*spectrum);
  const double rate = szego_entropy_rate(*spectrum, j);
  out.report = {{"manifest", make_manifest("szego", inputs, params, opts)},
                {"szego_log_integral_bits", log_integral},
                {"prediction_error_variance", std::exp2(log_integral)},
                {"negentropy_rate", j},
                {"entropy_rate", rate}};
  return out;
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information-theoretic L_p performance limits for stochastic feedback loops"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> p_items;
  std::optional<std::size_t> grid;
  app.add_option("--seed", seed, "Master seed (overrides the config file)");
  app.add_option("--out", out_dir, "Directory for report files");
  app.add_option("--p", p_items, "Norm orders, e.g. 2 or 1,2,inf")->delimiter(',');
  app.add_option("--grid", grid, "Spectrum quadrature grid size (even, >= 16)");

  std::string plant, dist, controller = "zero", config, theorem = "auto", spectrum;
  double negentropy = 0.0;

  auto* analyze = app.add_subcommand("analyze", "Poles, zeros, relative degree and gain of a plant");
  analyze->add_option("plant", plant, "Plant JSON file")->required();

  auto* bound = app.add_subcommand("bound", "Evaluate a lower bound");
  bound->add_option("--plant", plant, "Plant JSON file (omit for the generic-plant bound)");
  bound->add_option("--dist", dist, "Disturbance JSON file")->required();
  bound->add_option("--theorem", theorem, "auto, T1, T2, T3, C2, C3, C4 or KS");

  auto* verify = app.add_subcommand("verify", "Simulate the closed loop and certify the bounds");
  verify->add_option("--plant", plant, "Plant JSON file")->required();
  verify->add_option("--dist", dist, "Disturbance JSON file")->required();
  verify->add_option("--controller", controller, "zero | gain:<c> | arma:<b0,b1,...;a1,...>");
  verify->add_option("--config", config, "Simulation config JSON file");

  auto* szego = app.add_subcommand("szego", "Entropy rate from a power spectrum");
  szego->add_option("--dist", dist, "Disturbance JSON file");
  szego->add_option("--spectrum", spectrum, "Spectrum CSV (omega,S)");
  szego->add_option("--negentropy", negentropy, "Negentropy rate in bits for a CSV spectrum");

  for (auto* sub : {analyze, bound, verify, szego}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    GlobalOptions opts;
    opts.seed = seed;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    opts.orders = parse_order_list(p_items);
    opts.grid = grid;

    CommandOutput result;
    std::string name;
    if (*analyze) {
      name = "analyze";
      result = cmd_analyze(plant, opts);
    } else if (*bound) {
      name = "bound";
      result = cmd_bound(plant.empty() ? std::nullopt : std::optional<fs::path>(plant), dist, theorem, opts);
    } else if (*verify) {
      name = "verify";
      result = cmd_verify(plant, dist, controller,
                          config.empty() ? std::nullopt : std::optional<fs::path>(config), opts);
    } else {
      name = "szego";
      result = cmd_szego(dist.empty() ? std::nullopt : std::optional<fs::path>(dist),
                         spectrum.empty() ? std::nullopt : std::optional<fs::path>(spectrum), negentropy, opts);
    }

    const std::string text = result.report.dump(2);
    out << text << "\n";
    if (opts.out_dir) {
      fs::create_directories(*opts.out_dir);
      std::ofstream(*opts.out_dir / (name + ".json")) << text << "\n";
      for (const auto& [file, contents] : result.files) std::ofstream(*opts.out_dir / file) << contents;
    }
    if (result.exit_code == kUnstableLoop) err << "error: closed loop is unstable\n";
    if (result.exit_code == kCertificationFailed) err << "error: at least one bound was not certified\n";
    return result.exit_code;
  } catch (const UnstableLoop& e) {
    err << "error: " << e.what() << "\n";
    return kUnstableLoop;
  } catch (const Error& e) {
    // every remaining library error stems from the inputs
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace fundlim::cli
