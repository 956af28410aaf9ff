#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fundlim/cli.hpp"
#include "fundlim/errors.hpp"
#include "fundlim/io.hpp"

using namespace fundlim;
using doctest::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("fundlim_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fundlim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

cli::GlobalOptions fixed_clock() {
  cli::GlobalOptions opts;
  opts.clock = [] { return std::string("2000-01-01T00:00:00Z"); };
  return opts;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("plant JSON parsing") {
  const auto m = io::plant_from_json(json::parse(R"({"A": [[0, 1], [-0.5, 1]], "B": [0, 1], "C": [1, 0]})"));
  CHECK(m.order() == 2);
  CHECK(m.a()(1, 0) == -0.5);
  CHECK(m.c()(0) == 1.0);

  CHECK(message_of([] { io::plant_from_json(json::parse(R"({"B": [1], "C": [1]})")); }).find("A") !=
        std::string::npos);
  CHECK(message_of([] { io::plant_from_json(json::parse(R"({"A": [[1]], "B": ["x"], "C": [1]})")); }).find("B") !=
        std::string::npos);
  CHECK(message_of([] { io::plant_from_json(json::parse(R"({"A": [[1, 2]], "B": [1], "C": [1]})")); }) != "");
  CHECK(message_of([] { io::plant_from_json(json::parse(R"({"A": [[1]], "B": [1], "C": [1, 2]})")); }) != "");
  CHECK(message_of([] { io::plant_from_json(json::parse("[1]")); }) != "");
}

TEST_CASE("disturbance JSON parsing") {
  CHECK(io::disturbance_from_json(json::parse(R"({"type": "iid_gaussian", "sigma": 2})")).variance() == Approx(4));
  CHECK(io::disturbance_from_json(json::parse(R"({"type": "iid_uniform", "a": 1})")).variance() == Approx(1.0 / 3));
  CHECK(io::disturbance_from_json(json::parse(R"({"type": "iid_gengauss", "p": 2, "mu": 1})")).variance() ==
        Approx(1.0));
  CHECK(io::disturbance_from_json(json::parse(R"({"type": "gauss_ar", "coeffs": [0.5], "sigma_w": 1})"))
            .variance() == Approx(4.0 / 3));

  CHECK(message_of([] { io::disturbance_from_json(json::parse(R"({"type": "cauchy"})")); }).find("type") !=
        std::string::npos);
  CHECK(message_of([] { io::disturbance_from_json(json::parse(R"({"type": "iid_gaussian"})")); }).find("sigma") !=
        std::string::npos);
  CHECK(message_of([] { io::disturbance_from_json(json::parse(R"({"type": "iid_gaussian", "sigma": -1})")); }) !=
        "");
  CHECK(message_of([] {
          io::disturbance_from_json(json::parse(R"({"type": "gauss_ar", "coeffs": [1.5], "sigma_w": 1})"));
        }) != "");
}

TEST_CASE("config JSON parsing") {
  const auto cfg = io::config_from_json(
      json::parse(R"({"horizon": 50, "trajectories": 7, "seed": 9, "p": [1, "inf"], "threads": 2})"));
  CHECK(cfg.horizon == 50);
  CHECK(cfg.trajectories == 7);
  CHECK(cfg.seed == 9);
  REQUIRE(cfg.orders.size() == 2);
  CHECK(cfg.orders[1].is_infinite());
  CHECK(io::config_from_json(json::parse(R"({"p": 3})")).orders.at(0).value() == 3.0);
  CHECK(message_of([] { io::config_from_json(json::parse(R"({"horizon": -1})")); }).find("horizon") !=
        std::string::npos);
  CHECK(message_of([] { io::config_from_json(json::parse(R"({"horizn": 10})")); }).find("horizn") !=
        std::string::npos);
  CHECK_THROWS_AS(io::norm_order_from_json(json("huge")), InputError);
  CHECK(message_of([] { io::norm_order_from_json(json(0.5)); }).find("got 0.5") != std::string::npos);
}

TEST_CASE("spectrum CSV round trip") {
  const DisturbanceModel d(GaussAR{{0.7}, 1.0});
  const auto s = power_spectrum(d, 64);
  const auto back = io::spectrum_from_csv(io::spectrum_to_csv(s));
  REQUIRE(back.grid_size() == 64);
  for (std::size_t i = 0; i < 64; ++i) CHECK(back.values()[i] == s.values()[i]);
  CHECK_THROWS_AS(io::spectrum_from_csv("omega,S\n0,1\n1,1\n"), InputError);
  CHECK_THROWS_AS(io::spectrum_from_csv("omega,S\nfoo,bar\n"), InputError);
}

TEST_CASE("report serialization") {
  const auto r = error_bound_pinf(analyze_plant(StateSpaceModel(Eigen::MatrixXd::Constant(1, 1, 2.0),
                                                                Eigen::VectorXd::Ones(1), Eigen::RowVectorXd::Ones(1))),
                                  entropy_summary(DisturbanceModel(IIDUniform{1.0})));
  const json j = io::to_json(r);
  CHECK(j["p"] == "inf");
  CHECK(j["theorem"] == "C3");
  CHECK(j["bound"].get<double>() == Approx(2.0));
  CHECK_FALSE(j.contains("variance_floor"));
}

TEST_CASE("CLI bound examples") {
  TempDir dir;
  const auto stable = dir.write("stable.json", R"({"A": [[0.5]], "B": [1], "C": [1]})");
  const auto unstable = dir.write("unstable.json", R"({"A": [[2.0]], "B": [1], "C": [1]})");
  const auto gauss = dir.write("gauss.json", R"({"type": "iid_gaussian", "sigma": 1})");
  const auto uniform = dir.write("uniform.json", R"({"type": "iid_uniform", "a": 1})");

  auto bound_of = [](const RunResult& r) { return json::parse(r.out)["reports"][0]["bound"].get<double>(); };

  auto r = run_cli({"bound", "--plant", stable.string(), "--dist", gauss.string(), "--p", "2"});
  REQUIRE(r.code == 0);
  CHECK(bound_of(r) == Approx(1.0).epsilon(1e-12));

  r = run_cli({"bound", "--plant", unstable.string(), "--dist", gauss.string(), "--p", "2"});
  REQUIRE(r.code == 0);
  CHECK(bound_of(r) == Approx(2.0).epsilon(1e-12));

  r = run_cli({"bound", "--plant", stable.string(), "--dist", uniform.string(), "--p", "inf"});
  REQUIRE(r.code == 0);
  CHECK(bound_of(r) == Approx(1.0).epsilon(1e-12));

  r = run_cli({"--p", "1,2,inf", "bound", "--dist", gauss.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["reports"].size() == 3);
  CHECK(j["reports"][0]["theorem"] == "T3");

  r = run_cli({"bound", "--plant", unstable.string(), "--dist", gauss.string(), "--theorem", "KS"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["reports"][0]["variance_floor"].get<double>() == Approx(4.0).epsilon(1e-9));

  r = run_cli({"bound", "--dist", gauss.string(), "--theorem", "T1"});
  CHECK(r.code == 2);
}

TEST_CASE("CLI analyze and file artifacts") {
  TempDir dir;
  const auto plant = dir.write("nmp.json", R"({"A": [[0, 1], [0, 0]], "B": [0, 1], "C": [-2, 1]})");
  const auto out = dir.path / "out";
  const auto r = run_cli({"--out", out.string(), "analyze", plant.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["characteristics"]["nmp_zero_product"].get<double>() == Approx(2.0));
  CHECK(j["manifest"]["command"] == "analyze");
  CHECK(j["manifest"]["tool_version"] == cli::kToolVersion);
  CHECK(fs::exists(out / "analyze.json"));
}

TEST_CASE("CLI exit codes") {
  TempDir dir;
  const auto broken = dir.write("broken.json", R"({"A": [[0.5]], "B": [1], )");
  const auto unstable = dir.write("unstable.json", R"({"A": [[2.0]], "B": [1], "C": [1]})");
  const auto gauss = dir.write("gauss.json", R"({"type": "iid_gaussian", "sigma": 1})");
  const auto small = dir.write("cfg.json", R"({"horizon": 100, "trajectories": 200})");
  const auto zero_spec = dir.write("spec.csv", [] {
    std::ostringstream s;
    s << "omega,S\n";
    for (int i = 0; i < 16; ++i) s << (-M_PI + 2 * M_PI * i / 16) << "," << (i == 5 ? 0.0 : 1.0) << "\n";
    return s.str();
  }());

  CHECK(run_cli({"analyze", broken.string()}).code == 2);
  CHECK(run_cli({"analyze", (dir.path / "missing.json").string()}).code == 2);
  CHECK(run_cli({"--p", "0.5", "bound", "--dist", gauss.string()}).code == 2);
  CHECK(run_cli({"--p", "abc", "bound", "--dist", gauss.string()}).code == 2);
  CHECK(run_cli({"bound", "--dist", gauss.string(), "--theorem", "T9"}).code == 2);
  CHECK(run_cli({"szego", "--spectrum", zero_spec.string()}).code == 2);
  CHECK(run_cli({"szego"}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"verify", "--plant", unstable.string(), "--dist", gauss.string(), "--controller", "pid"}).code == 2);

  const auto r = run_cli({"verify", "--plant", unstable.string(), "--dist", gauss.string(), "--controller", "zero",
                          "--config", small.string()});
  CHECK(r.code == 4);
  CHECK(json::parse(r.out)["stable"] == false);
}

TEST_CASE("verify reports certify both bounds and are reproducible") {
  TempDir dir;
  const auto plant = dir.write("p.json", R"({"A": [[2.0]], "B": [1], "C": [1]})");
  const auto gauss = dir.write("g.json", R"({"type": "iid_gaussian", "sigma": 1})");
  const auto cfg = dir.write("c.json", R"({"horizon": 200, "trajectories": 3000, "seed": 3, "p": [2, 4]})");

  const auto a = cli::cmd_verify(plant, gauss, "gain:1.5", cfg, fixed_clock());
  CHECK(a.exit_code == 0);
  CHECK(a.report["all_satisfied"] == true);
  REQUIRE(a.report["results"].size() == 2);
  CHECK(a.report["results"][0]["error"]["report"]["theorem"] == "T1");
  CHECK(a.report["results"][0]["output"]["report"]["theorem"] == "T2");
  REQUIRE(a.files.size() == 1);
  CHECK(a.files[0].first == "simulation.csv");
  CHECK(a.files[0].second.rfind("k,e_p2,e_p4,y_p2,y_p4\n", 0) == 0);

  auto opts = fixed_clock();
  const auto b = cli::cmd_verify(plant, gauss, "gain:1.5", cfg, fixed_clock());
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.files == b.files);

  opts.seed = 4;
  const auto c = cli::cmd_verify(plant, gauss, "gain:1.5", cfg, opts);
  CHECK(c.report["manifest"]["parameters"]["simulation"]["seed"] == 4);
  CHECK(c.report.dump() != a.report.dump());
}

TEST_CASE("CLI szego on an AR spectrum") {
  TempDir dir;
  const auto ar = dir.write("ar.json", R"({"type": "gauss_ar", "coeffs": [0.9], "sigma_w": 1})");
  const auto out = dir.path / "out";
  const auto r = run_cli({"--grid", "8192", "--out", out.string(), "szego", "--dist", ar.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["szego_log_integral_bits"].get<double>()) < 1e-3);
  CHECK(j["prediction_error_variance"].get<double>() == Approx(1.0).epsilon(1e-3));
  CHECK(fs::exists(out / "spectrum.csv"));

  // the exported spectrum reads back into the same answer
  const auto again = run_cli({"szego", "--spectrum", (out / "spectrum.csv").string()});
  REQUIRE(again.code == 0);
  CHECK(json::parse(again.out)["szego_log_integral_bits"].get<double>() ==
        Approx(j["szego_log_integral_bits"].get<double>()).epsilon(1e-9));
}
