#include "fundlim/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fundlim/errors.hpp"
#include "fundlim/format.hpp"

namespace fundlim::io {

namespace {

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError(std::string("field '") + key + "' must be finite");
  return d;
}

std::vector<double> number_list(const json& v, const std::string& name) {
  if (!v.is_array()) throw InputError("field '" + name + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw InputError("field '" + name + "[" + std::to_string(i) + "]' must be a number");
    }
    const double d = v[i].get<double>();
    if (!std::isfinite(d)) throw InputError("field '" + name + "[" + std::to_string(i) + "]' must be finite");
    out.push_back(d);
  }
  return out;
}

template <class T>
T unsigned_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InputError(std::string("field '") + key + "' must be a non-negative integer");
  }
  return static_cast<T>(v.get<unsigned long long>());
}

json complex_list(const std::vector<std::complex<double>>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back({{"re", v.real()}, {"im", v.imag()}});
  return out;
}

}  // namespace

StateSpaceModel plant_from_json(const json& j) {
  if (!j.is_object()) throw InputError("plant description must be a JSON object");
  for (const char* key : {"A", "B", "C"}) {
    if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  }
  const auto& ja = j.at("A");
  if (!ja.is_array() || ja.empty()) throw InputError("field 'A' must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(ja.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = number_list(ja[static_cast<std::size_t>(r)], "A[" + std::to_string(r) + "]");
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw InputError("field 'A[" + std::to_string(r) + "]' has " + std::to_string(row.size()) +
                       " entries, expected " + std::to_string(n));
    }
    for (Eigen::Index c = 0; c < n; ++c) a(r, c) = row[static_cast<std::size_t>(c)];
  }
  const auto b = number_list(j.at("B"), "B");
  const auto c = number_list(j.at("C"), "C");
  if (static_cast<Eigen::Index>(b.size()) != n) {
    throw InputError("field 'B' has " + std::to_string(b.size()) + " entries, expected " + std::to_string(n));
  }
  if (static_cast<Eigen::Index>(c.size()) != n) {
    throw InputError("field 'C' has " + std::to_string(c.size()) + " entries, expected " + std::to_string(n));
  }
  try {
    return StateSpaceModel(a, Eigen::Map<const Eigen::VectorXd>(b.data(), n),
                           Eigen::Map<const Eigen::RowVectorXd>(c.data(), n));
  } catch (const InvalidModel& e) {
    throw InputError(e.what());
  }
}

DisturbanceModel disturbance_from_json(const json& j) {
  if (!j.is_object()) throw InputError("disturbance description must be a JSON object");
  if (!j.contains("type") || !j.at("type").is_string()) throw InputError("missing string field 'type'");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "iid_gaussian") return DisturbanceModel(IIDGaussian{number_field(j, "sigma")});
    if (type == "iid_uniform") return DisturbanceModel(IIDUniform{number_field(j, "a")});
    if (type == "iid_gengauss") {
      return DisturbanceModel(IIDGeneralizedGaussian{number_field(j, "p"), number_field(j, "mu")});
    }
    if (type == "gauss_ar") {
      if (!j.contains("coeffs")) throw InputError("missing field 'coeffs'");
      return DisturbanceModel(GaussAR{number_list(j.at("coeffs"), "coeffs"), number_field(j, "sigma_w")});
    }
  } catch (const InvalidModel& e) {
    throw InputError(e.what());
  }
  throw InputError("field 'type' has unknown value '" + type + "'");
}

NormOrder norm_order_from_json(const json& j) {
  try {
    if (j.is_string()) return NormOrder::parse(j.get<std::string>());
    if (j.is_number()) return NormOrder(j.get<double>());
  } catch (const InvalidOrder& e) {
    throw InputError(std::string("field 'p': ") + e.what());
  }
  throw InputError("field 'p' must be a number >= 1 or \"inf\"");
}

SimulationConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("simulation config must be a JSON object");
  static const char* const known[] = {"horizon", "trajectories", "burn_in", "tail_window", "seed",
                                      "threads", "p", "divergence_threshold", "initial_state_std"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw InputError("unknown field '" + key + "' in simulation config");
    }
  }
  SimulationConfig cfg;
  cfg.horizon = unsigned_field(j, "horizon", cfg.horizon);
  cfg.trajectories = unsigned_field(j, "trajectories", cfg.trajectories);
  cfg.burn_in = unsigned_field(j, "burn_in", cfg.burn_in);
  cfg.tail_window = unsigned_field(j, "tail_window", cfg.tail_window);
  cfg.seed = unsigned_field<std::uint64_t>(j, "seed", cfg.seed);
  cfg.threads = unsigned_field(j, "threads", cfg.threads);
  if (j.contains("p")) {
    cfg.orders.clear();
    const auto& p = j.at("p");
    if (p.is_array()) {
      for (const auto& item : p) cfg.orders.push_back(norm_order_from_json(item));
    } else {
      cfg.orders.push_back(norm_order_from_json(p));
    }
  }
  if (j.contains("divergence_threshold")) cfg.divergence_threshold = number_field(j, "divergence_threshold");
  if (j.contains("initial_state_std")) cfg.initial_state_std = number_field(j, "initial_state_std");
  cfg.validate();
  return cfg;
}

json to_json(NormOrder p) {
  if (p.is_infinite()) return "inf";
  return p.value();
}

json to_json(const DisturbanceModel& model) {
  json out = {{"type", model.type_name()}};
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IIDGaussian>) {
          out["sigma"] = v.sigma;
        } else if constexpr (std::is_same_v<T, IIDUniform>) {
          out["a"] = v.half_width;
        } else if constexpr (std::is_same_v<T, IIDGeneralizedGaussian>) {
          out["p"] = v.shape;
          out["mu"] = v.lp_norm;
        } else {
          out["coeffs"] = v.coeffs;
          out["sigma_w"] = v.innovation_sigma;
        }
      },
      model.variant());
  return out;
}

json to_json(const SimulationConfig& cfg) {
  json orders = json::array();
  for (auto p : cfg.orders) orders.push_back(to_json(p));
  return {{"horizon", cfg.horizon},
          {"trajectories", cfg.trajectories},
          {"burn_in", cfg.burn_in},
          {"tail_window", cfg.effective_tail_window()},
          {"seed", cfg.seed},
          {"p", orders},
          {"divergence_threshold", cfg.divergence_threshold},
          {"initial_state_std", cfg.initial_state_std}};
}

json to_json(const PlantCharacteristics& chars) {
  return {{"poles", complex_list(chars.poles)},
          {"unstable_pole_product", chars.unstable_pole_product},
          {"finite_zeros", complex_list(chars.finite_zeros)},
          {"nmp_zero_product", chars.nmp_zero_product},
          {"relative_degree", chars.relative_degree},
          {"markov_gain", chars.markov_gain},
          {"warnings", chars.warnings}};
}

json to_json(const BoundReport& report) {
  json factors = {{"cp", report.factors().cp},
                  {"plant_factor", report.factors().plant_factor},
                  {"entropy_factor", report.factors().entropy_factor}};
  if (report.gain()) factors["gain"] = *report.gain();
  json out = {{"p", to_json(report.p())},
              {"theorem", to_string(report.kind())},
              {"bound", report.bound()},
              {"factors", factors}};
  if (auto v = report.variance_floor()) out["variance_floor"] = *v;
  return out;
}

json to_json(const Certification& cert) {
  return {{"empirical", cert.empirical},
          {"bound", cert.bound},
          {"ratio", cert.ratio},
          {"margin_stderr", cert.margin_stderr},
          {"satisfied", cert.satisfied}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

SpectralDensity spectrum_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> omegas, values;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("spectrum CSV line " + std::to_string(line_no) + " has no comma");
    double w = 0.0, s = 0.0;
    try {
      std::size_t u1 = 0, u2 = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      w = std::stod(a, &u1);
      s = std::stod(b, &u2);
    } catch (const std::exception&) {
      if (omegas.empty() && line_no == 1) continue;  // header
      throw InputError("spectrum CSV line " + std::to_string(line_no) + " is not numeric");
    }
    omegas.push_back(w);
    values.push_back(s);
  }
  const std::size_t n = values.size();
  if (n < 16 || n % 2 != 0) throw InputError("spectrum CSV needs an even number (>= 16) of grid points");
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = -std::numbers::pi + h * static_cast<double>(i);
    if (std::abs(omegas[i] - expected) > 1e-6 * h) {
      throw InputError("spectrum CSV row " + std::to_string(i) +
                       " is off the uniform grid omega_i = -pi + 2 pi i / N");
    }
  }
  return SpectralDensity::from_samples(std::move(values));
}

std::string spectrum_to_csv(const SpectralDensity& spectrum) {
  std::string out = "omega,S\n";
  for (std::size_t i = 0; i < spectrum.grid_size(); ++i) {
    out += format_double(spectrum.grid_point(i)) + "," + format_double(spectrum.values()[i]) + "\n";
  }
  return out;
}

std::string simulation_to_csv(const SimulationResult& result) {
  std::string out = "k";
  for (const auto& n : result.error) out += ",e_p" + n.p.to_string();
  for (const auto& n : result.output) out += ",y_p" + n.p.to_string();
  out += "\n";
  for (std::size_t k = 0; k < result.horizon; ++k) {
    out += std::to_string(k);
    for (const auto& n : result.error) out += "," + format_double(n.per_time[k]);
    for (const auto& n : result.output) out += "," + format_double(n.per_time[k]);
    out += "\n";
  }
  return out;
}

}  // namespace fundlim::io
