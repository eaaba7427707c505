#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

#include "crkbs/bridge.hpp"
#include "crkbs/errors.hpp"
#include "crkbs/io.hpp"
#include "crkbs/kernel.hpp"
#include "crkbs/rng.hpp"

#include "test_util.hpp"

using namespace crkbs;
using nlohmann::json;

namespace {

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

std::string pointer_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SchemaError& e) {
    return e.pointer();
  }
  return "<no error>";
}

json minimal_measure_json() {
  return json::parse(R"({
    "functions": {
      "base": {"depth": 1, "activation": ["relu"], "weighting": ["unit"],
               "atoms": [{"v": [1.0, 0.0], "b": 0.25}], "coeffs": [2.0]},
      "top": {"depth": 2, "activation": ["relu", "tanh"],
              "weighting": ["unit", "unit"],
              "atoms": [{"f": "base", "b": -0.5}], "coeffs": [1.5]}
    },
    "root": "top"
  })");
}

}  // namespace

TEST_CASE("doubles format to the shortest string that parses back exactly") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "-0");
  for (double x : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 1e20,
                   std::numeric_limits<double>::max(),
                   std::numeric_limits<double>::denorm_min(), 3.141592653589793,
                   -2.2250738585072014e-308}) {
    std::string s = format_double(x);
    CHECK(same_bits(std::strtod(s.c_str(), nullptr), x));
  }
}

TEST_CASE("sha256 matches the published test vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("content ids depend only on structure") {
  auto build = [](double coeff, double bias) {
    auto registry = std::make_shared<Registry>();
    AtomicMeasure m;
    m.atoms.push_back(Layer1Atom{Eigen::Vector2d(0.5, -1.0), bias});
    m.coeffs.push_back(coeff);
    FunctionId id = registry->intern(1, m, {{Activation::softplus}},
                                     {{Weighting::inverse_affine}});
    return std::make_pair(registry, id);
  };
  auto [r1, id1] = build(2.0, 0.25);
  auto [r2, id2] = build(2.0, 0.25);
  CHECK(id1 == id2);  // separate registries, same structure
  CHECK(id1.size() == 64);
  CHECK(id1.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(content_id(r1->at(id1)) == id1);

  auto [r3, id3] = build(std::nextafter(2.0, 3.0), 0.25);
  CHECK(id3 != id1);
  auto [r4, id4] = build(2.0, std::nextafter(0.25, 1.0));
  CHECK(id4 != id1);
}

TEST_CASE("network files round trip bit-exactly") {
  RandomEngine engine(41);
  NetworkFile nf;
  nf.network = testutil::random_network(
      engine, 3, 2, 4,
      {{Activation::relu}, {Activation::sigmoid}});
  nf.weightings = {{Weighting::inverse_affine}, {Weighting::unit}};

  json j = network_to_json(nf);
  std::string text = dump_json(j);
  NetworkFile back = network_from_json(json::parse(text));

  REQUIRE(back.network.depth() == 2);
  for (int l = 0; l < 2; ++l) {
    CHECK((back.network.hidden_W[l].array() ==
           nf.network.hidden_W[l].array()).all());
    CHECK((back.network.biases[l].array() ==
           nf.network.biases[l].array()).all());
    CHECK(back.network.activations[l] == nf.network.activations[l]);
    CHECK(back.weightings[l] == nf.weightings[l]);
  }
  CHECK((back.network.final_W.array() == nf.network.final_W.array()).all());
  CHECK(dump_json(network_to_json(back)) == text);

  json broken = j;
  broken.erase("widths");
  CHECK(pointer_of([&] { network_from_json(broken); }) == "/widths");
  broken = j;
  broken["layers"][0].erase("W");
  CHECK(pointer_of([&] { network_from_json(broken); }) == "/layers/0/W");
  broken = j;
  broken["layers"][1]["activation"] = "swish";
  CHECK(pointer_of([&] { network_from_json(broken); }) ==
        "/layers/1/activation");
}

TEST_CASE("measure files reproduce the function closure") {
  RandomEngine engine(42);
  auto registry = std::make_shared<Registry>();
  DeepNetwork net = testutil::random_network(
      engine, 2, 2, 3,
      {{Activation::relu}, {Activation::tanh}, {Activation::sigmoid}});
  std::vector<ChainFunction> roots = embed_network(
      net,
      {{Weighting::unit}, {Weighting::inverse_affine}, {Weighting::unit}},
      registry);

  json j = measure_to_json(roots);
  REQUIRE(j["root"].is_array());
  // File keys are the content ids themselves.
  for (const auto& rk : j["root"]) {
    CHECK(j["functions"].contains(rk.get<std::string>()));
  }

  auto fresh = std::make_shared<Registry>();
  std::vector<ChainFunction> back = measure_from_json(j, fresh);
  REQUIRE(back.size() == roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    CHECK(back[i].id == roots[i].id);
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd x = testutil::random_vector(engine, 2);
      CHECK(eval_chain(back[i], x) == eval_chain(roots[i], x));
    }
  }

  // Re-serialization is stable.
  CHECK(dump_json(measure_to_json(back)) == dump_json(j));

  // Single root serializes as a plain string.
  json single = measure_to_json(std::vector<ChainFunction>{roots[0]});
  CHECK(single["root"].is_string());
  std::vector<ChainFunction> one = measure_from_json(single, nullptr);
  CHECK(one[0].id == roots[0].id);
}

TEST_CASE("measure files are validated with precise locations") {
  json ok = minimal_measure_json();
  CHECK_NOTHROW(measure_from_json(ok, nullptr));

  json j = minimal_measure_json();
  j["functions"]["top"]["atoms"][0]["f"] = "ghost";
  CHECK(pointer_of([&] { measure_from_json(j, nullptr); }) == "/functions/top");

  j = minimal_measure_json();
  j["functions"]["a"] =
      json::parse(R"({"depth": 2, "activation": ["relu", "relu"],
                      "weighting": ["unit", "unit"],
                      "atoms": [{"f": "b", "b": 0.0}], "coeffs": [1.0]})");
  j["functions"]["b"] =
      json::parse(R"({"depth": 2, "activation": ["relu", "relu"],
                      "weighting": ["unit", "unit"],
                      "atoms": [{"f": "a", "b": 0.0}], "coeffs": [1.0]})");
  CHECK(pointer_of([&] { measure_from_json(j, nullptr); }) == "/functions");

  j = minimal_measure_json();
  j["root"] = "ghost";
  CHECK(pointer_of([&] { measure_from_json(j, nullptr); }) == "/root");

  j = minimal_measure_json();
  j["root"] = 5;
  CHECK(pointer_of([&] { measure_from_json(j, nullptr); }) == "/root");

  j = minimal_measure_json();
  j["functions"]["base"]["atoms"][0]["f"] = "top";  // both v and f
  CHECK(pointer_of([&] { measure_from_json(j, nullptr); }) ==
        "/functions/base/atoms/0");

  j = minimal_measure_json();
  j["functions"]["base"]["depth"] = 0;
  CHECK(pointer_of([&] { measure_from_json(j, nullptr); }) ==
        "/functions/base/depth");

  // Depth disagreement between parent and child surfaces as an intern
  // failure located at the parent entry.
  j = minimal_measure_json();
  j["functions"]["top"]["depth"] = 3;
  j["functions"]["top"]["activation"] = {"relu", "relu", "relu"};
  j["functions"]["top"]["weighting"] = {"unit", "unit", "unit"};
  CHECK(pointer_of([&] { measure_from_json(j, nullptr); }) == "/functions/top");
}

TEST_CASE("csv datasets parse headers, blank lines and carriage returns") {
  std::istringstream in(
      "x_1,x_2,y_1\r\n"
      "1.0,2.0,3.0\r\n"
      "\r\n"
      "4.5,-1,0.25\n"
      "\n"
      "0.125,1e3,-7\n");
  Dataset d = dataset_from_csv(in);
  CHECK(d.X.rows() == 3);
  CHECK(d.X.cols() == 2);
  REQUIRE(d.Y.has_value());
  CHECK(d.X(1, 0) == 4.5);
  CHECK(d.X(2, 1) == 1000.0);
  CHECK((*d.Y)(2, 0) == -7.0);

  std::istringstream no_y("x_1\n0.5\n1.5\n");
  Dataset dx = dataset_from_csv(no_y);
  CHECK(!dx.Y.has_value());
  CHECK(dx.X(1, 0) == 1.5);
}

TEST_CASE("csv errors carry line and column positions") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return dataset_from_csv(in);
  };
  CHECK(pointer_of([&] { parse(""); }) == "header");
  CHECK(pointer_of([&] { parse("a,b\n1,2\n"); }) == "header");
  CHECK(pointer_of([&] { parse("x_1,z\n1,2\n"); }) == "header");
  CHECK(pointer_of([&] { parse("x_1,y_1\n1,2\n3\n"); }) == "line 3");
  CHECK(pointer_of([&] { parse("x_1,y_1\n1,2\n3,oops\n"); }) ==
        "line 3 column 2");
  CHECK(pointer_of([&] { parse("x_1\n1\nnan\n"); }) == "line 3 column 1");
  CHECK(pointer_of([&] { parse("x_1\n"); }) == "dataset");
  CHECK(pointer_of([&] { parse("x_1,y_1\n1,2\n1,5\n"); }) == "dataset");
}

TEST_CASE("json datasets accept inputs with optional targets") {
  Dataset d = dataset_from_json(json::parse(
      R"({"X": [[1.0, 2.0], [3.0, 4.0]], "Y": [[0.5], [-0.5]]})"));
  CHECK(d.X(1, 1) == 4.0);
  REQUIRE(d.Y.has_value());
  CHECK((*d.Y)(0, 0) == 0.5);

  Dataset dx = dataset_from_json(json::parse(R"({"X": [[1.0], [2.0]]})"));
  CHECK(!dx.Y.has_value());

  CHECK(pointer_of([&] {
          dataset_from_json(json::parse(R"({"X": [[1.0], [2.0, 3.0]]})"));
        }) == "/X/1");
  CHECK(pointer_of([&] {
          dataset_from_json(json::parse(R"({"X": [[1.0], ["x"]]})"));
        }) == "/X/1/0");
  CHECK(pointer_of([&] {
          dataset_from_json(json::parse(R"({"Y": [[1.0]]})"));
        }) == "/X");
  CHECK(pointer_of([&] {
          dataset_from_json(json::parse(R"({"X": [[1.0], [1.0]]})"));
        }) == "/X");  // duplicate rows
}

TEST_CASE("fit configurations parse with defaults and validation") {
  json full = json::parse(R"({
    "depth": 2, "lambda": 0.25, "pool_sizes": [32, 8],
    "activation": ["relu", "tanh"], "weighting": ["unit", "inverse_affine"],
    "seed": 7, "pivot_threshold": 1e-8, "objective_tol": 1e-12,
    "max_sweeps": 500
  })");
  FitConfig cfg = fit_config_from_json(full);
  CHECK(cfg.depth == 2);
  CHECK(cfg.lambda == 0.25);
  CHECK(cfg.pool_sizes == std::vector<int>{32, 8});
  CHECK(cfg.activations[1].kind == Activation::tanh);
  CHECK(cfg.weightings[1].kind == Weighting::inverse_affine);
  CHECK(cfg.seed == 7);
  CHECK(cfg.pivot_threshold == 1e-8);
  CHECK(cfg.objective_tol == 1e-12);
  CHECK(cfg.max_sweeps == 500);

  json minimal = json::parse(R"({
    "depth": 1, "lambda": 1.0, "pool_sizes": [16],
    "activation": ["relu"], "weighting": ["unit"]
  })");
  FitConfig defaults = fit_config_from_json(minimal);
  CHECK(defaults.seed == 0);
  CHECK(defaults.pivot_threshold == 1e-10);
  CHECK(defaults.objective_tol == 1e-10);
  CHECK(defaults.max_sweeps == 10000);

  json bad = minimal;
  bad["seed"] = -1;
  CHECK(pointer_of([&] { fit_config_from_json(bad); }) == "/seed");
  bad = minimal;
  bad.erase("lambda");
  CHECK(pointer_of([&] { fit_config_from_json(bad); }) == "/lambda");
  bad = minimal;
  bad["weighting"] = {"heavy"};
  CHECK(pointer_of([&] { fit_config_from_json(bad); }) == "/weighting/0");
  bad = minimal;
  bad["lambda"] = 0.0;  // fails semantic validation, not schema shape
  CHECK(pointer_of([&] { fit_config_from_json(bad); }) == "");
}

TEST_CASE("feature matrices dump at full precision") {
  GramMatrix G;
  G.values.resize(2, 2);
  G.values << 1.0, 0.1, 0.5, -2.0;
  CHECK(gram_to_csv(G) == "1,0.10000000000000001\n0.5,-2\n");
}

TEST_CASE("json artifacts are dumped with a stable layout") {
  json j;
  j["a"] = 1;
  CHECK(dump_json(j) == "{\n  \"a\": 1\n}\n");
}

TEST_CASE("file helpers report unreadable or malformed files") {
  CHECK_THROWS_AS(load_json_file("definitely/not/there.json"), SchemaError);
  CHECK_THROWS_AS(load_dataset_file("data.parquet"), SchemaError);
  CHECK_THROWS_AS(read_text_file("definitely/not/there.txt"), Error);

  std::string dir = "scratch_io";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/note.txt", "hello\n");
  CHECK(read_text_file(dir + "/note.txt") == "hello\n");
  write_text_file(dir + "/bad.json", "{not json");
  CHECK_THROWS_AS(load_json_file(dir + "/bad.json"), SchemaError);
  write_text_file(dir + "/d.csv", "x_1,y_1\n1,2\n2,4\n");
  Dataset d = load_dataset_file(dir + "/d.csv");
  CHECK(d.X.rows() == 2);
  write_text_file(dir + "/d.json", R"({"X": [[1.0], [2.0]]})");
  Dataset dj = load_dataset_file(dir + "/d.json");
  CHECK(dj.X(1, 0) == 2.0);
}
