#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "crkbs/analysis.hpp"
#include "crkbs/bridge.hpp"
#include "crkbs/errors.hpp"
#include "crkbs/io.hpp"
#include "crkbs/kernel.hpp"
#include "crkbs/rng.hpp"
#include "crkbs/solver.hpp"

namespace {

using namespace crkbs;

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool seed_given = false;
  double pivot_threshold = 1e-10;
  bool pivot_given = false;
  std::string out;
};

void add_global_opts(CLI::App* cmd, GlobalOpts& g) {
  cmd->add_option("--seed", g.seed, "Random seed")
      ->each([&g](const std::string&) { g.seed_given = true; });
  cmd->add_option("--pivot-threshold", g.pivot_threshold,
                  "Relative pivot cutoff for basis selection")
      ->each([&g](const std::string&) { g.pivot_given = true; });
  cmd->add_option("--out", g.out, "Output path");
}

bool looks_like_measure(const nlohmann::json& j) {
  return j.is_object() && j.contains("functions");
}

// Loads either file kind; exactly one of the results is set.
struct Model {
  std::optional<NetworkFile> network;
  std::vector<ChainFunction> roots;
  RegistryPtr registry;
};

Model load_model(const std::string& path) {
  Model m;
  nlohmann::json j = load_json_file(path);
  if (looks_like_measure(j)) {
    m.registry = std::make_shared<Registry>();
    m.roots = measure_from_json(j, m.registry);
  } else {
    m.network = network_from_json(j);
  }
  return m;
}

std::string require_out(const GlobalOpts& g, const char* what) {
  if (g.out.empty()) {
    throw ContractError(std::string("--out is required for ") + what);
  }
  return g.out;
}

// Evaluations of the model on every row of X, one column per output.
Eigen::MatrixXd model_values(const Model& m, const Eigen::MatrixXd& X) {
  if (m.network.has_value()) {
    return m.network->network.forward_batch(X);
  }
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(m.roots.size()));
  for (std::size_t r = 0; r < m.roots.size(); ++r) {
    out.col(static_cast<Eigen::Index>(r)) = eval_chain_batch(m.roots[r], X);
  }
  return out;
}

std::string matrix_to_csv(const Eigen::MatrixXd& M, const std::string& prefix) {
  std::string csv;
  for (Eigen::Index c = 0; c < M.cols(); ++c) {
    if (c > 0) csv += ",";
    csv += prefix + "_" + std::to_string(c + 1);
  }
  csv += "\n";
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (c > 0) csv += ",";
      csv += format_double(M(r, c));
    }
    csv += "\n";
  }
  return csv;
}

int cmd_embed(const std::string& network_path, const GlobalOpts& g) {
  NetworkFile nf = network_from_json(load_json_file(network_path));
  auto registry = std::make_shared<Registry>();
  std::vector<ChainFunction> roots =
      embed_network(nf.network, nf.weightings, registry);
  write_text_file(require_out(g, "embed"),
                  dump_json(measure_to_json(roots)));
  for (const auto& r : roots) {
    std::cout << format_double(norm_upper_bound(r)) << "\n";
  }
  return 0;
}

int cmd_extract(const std::string& measure_path, const std::string& data_path,
                const GlobalOpts& g) {
  auto registry = std::make_shared<Registry>();
  std::vector<ChainFunction> roots =
      measure_from_json(load_json_file(measure_path), registry);
  Dataset data = load_dataset_file(data_path);

  ExtractionResult ex = extract_network(
      std::span<const ChainFunction>(roots), data.X, g.pivot_threshold);

  NetworkFile nf{ex.network, roots[0].data().weightings};
  std::string out = require_out(g, "extract");
  write_text_file(out, dump_json(network_to_json(nf)));

  // Agreement on the sample, reported relative to max(1, |value|).
  Eigen::MatrixXd want(data.X.rows(), static_cast<Eigen::Index>(roots.size()));
  for (std::size_t r = 0; r < roots.size(); ++r) {
    want.col(static_cast<Eigen::Index>(r)) = eval_chain_batch(roots[r], data.X);
  }
  Eigen::MatrixXd got = ex.network.forward_batch(data.X);
  double max_dev = 0.0;
  for (Eigen::Index i = 0; i < want.rows(); ++i) {
    for (Eigen::Index c = 0; c < want.cols(); ++c) {
      double scale = std::max({1.0, std::abs(want(i, c)), std::abs(got(i, c))});
      max_dev = std::max(max_dev, std::abs(want(i, c) - got(i, c)) / scale);
    }
  }

  nlohmann::json metrics;
  metrics["widths"] = ex.network.widths();
  metrics["norm"] = ex.output_norms;
  metrics["max_relative_deviation_on_data"] = max_dev;
  write_text_file(out + ".metrics.json", dump_json(metrics));

  std::cout << "widths:";
  for (int w : ex.network.widths()) {
    std::cout << " " << w;
  }
  std::cout << "\n";
  for (double n : ex.output_norms) {
    std::cout << "norm: " << format_double(n) << "\n";
  }
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& config_path,
            const GlobalOpts& g) {
  Dataset data = load_dataset_file(data_path);
  FitConfig cfg = fit_config_from_json(load_json_file(config_path));
  if (g.seed_given) {
    cfg.seed = g.seed;
  }
  if (g.pivot_given) {
    cfg.pivot_threshold = g.pivot_threshold;
  }
  FitResult fit = fit_erm(data, cfg);

  std::string prefix = require_out(g, "fit");
  std::vector<ChainFunction> roots{fit.function};
  write_text_file(prefix + ".measure.json",
                  dump_json(measure_to_json(roots)));
  NetworkFile nf{fit.network, cfg.weightings};
  write_text_file(prefix + ".network.json", dump_json(network_to_json(nf)));

  nlohmann::json metrics;
  metrics["converged"] = fit.converged;
  metrics["lambda"] = cfg.lambda;
  metrics["norm"] = fit.norm;
  metrics["objective"] = fit.objective_trace.back();
  metrics["objective_trace"] = fit.objective_trace;
  metrics["penalty"] = cfg.lambda * fit.norm;
  metrics["seed"] = fit.seed;
  metrics["support"] = fit.support_size;
  metrics["train_residual_l2"] = fit.train_residual;
  metrics["widths"] = fit.widths;
  write_text_file(prefix + ".metrics.json", dump_json(metrics));
  std::cout << "support: " << fit.support_size << "\n"
            << "objective: " << format_double(fit.objective_trace.back())
            << "\n";
  return 0;
}

int cmd_analyze(const std::string& model_path,
                const std::string& data_path, bool want_path_norm,
                bool want_complexity, bool want_eliminate_bias,
                int draws, int pool_size, const std::string& noise,
                bool exhaustive, const std::string& draws_csv,
                const std::string& bias_free_out, const GlobalOpts& g) {
  Model model = load_model(model_path);
  nlohmann::json metrics;

  if (want_path_norm) {
    if (!model.network.has_value()) {
      throw ContractError("--path-norm needs a network file");
    }
    metrics["path_norm"] = path_norm(model.network->network);
  }

  if (want_complexity) {
    if (data_path.empty()) {
      throw ContractError("--complexity needs a dataset");
    }
    Dataset data = load_dataset_file(data_path);
    ActivationSpec act;
    WeightingSpec wgt;
    if (model.network.has_value()) {
      act = model.network->network.activations[0];
      wgt = model.network->weightings[0];
    } else {
      act = model.roots[0].data().activations[0];
      wgt = model.roots[0].data().weightings[0];
    }
    RandomEngine engine(g.seed);
    std::vector<Atom> pool = layer1_candidates(pool_size, data.X, engine);
    Registry scratch;
    ComplexityEstimate est;
    if (exhaustive) {
      est = exhaustive_rademacher_complexity(data.X, pool, 1, act, wgt,
                                             scratch);
    } else {
      NoiseKind kind;
      if (noise == "rademacher") {
        kind = NoiseKind::rademacher;
      } else if (noise == "gaussian") {
        kind = NoiseKind::gaussian;
      } else {
        throw ContractError("--noise must be rademacher or gaussian");
      }
      est = sampled_complexity(data.X, pool, 1, act, wgt, scratch, draws,
                               kind, g.seed);
      if (!draws_csv.empty()) {
        // One row per draw: the per-draw supremum re-derived from the same
        // seeds, so the CSV ties out with the estimate.
        GramMatrix G = gram_matrix(data.X, pool, 1, act, wgt, scratch);
        std::string csv = "draw,sup\n";
        Eigen::VectorXd xi(data.X.rows());
        for (int t = 0; t < draws; ++t) {
          RandomEngine e(derive_seed(g.seed, static_cast<std::uint64_t>(t)));
          for (Eigen::Index i = 0; i < xi.size(); ++i) {
            xi[i] = kind == NoiseKind::rademacher ? e.sign() : e.normal();
          }
          double sup = (G.values.transpose() * xi).cwiseAbs().maxCoeff();
          csv += std::to_string(t) + "," +
                 format_double(sup / static_cast<double>(data.X.rows())) + "\n";
        }
        write_text_file(draws_csv, csv);
      }
    }
    nlohmann::json jc;
    jc["value"] = est.value;
    jc["standard_error"] = est.standard_error;
    jc["kind"] = est.kind == NoiseKind::rademacher ? "rademacher" : "gaussian";
    jc["num_draws"] = est.num_draws;
    jc["pool_size"] = est.pool_size;
    jc["exhaustive"] = est.exhaustive;
    jc["lower_bound"] = est.lower_bound;
    metrics["complexity"] = std::move(jc);
  }

  if (want_eliminate_bias) {
    if (model.network.has_value()) {
      throw ContractError("--eliminate-bias needs a measure file");
    }
    if (model.roots.size() != 1) {
      throw ContractError("--eliminate-bias needs a single root");
    }
    const ChainFunction& f = model.roots[0];
    const ChainFunctionData& fd = f.data();
    if (fd.depth < 2) {
      throw ContractError("--eliminate-bias needs depth at least 2");
    }
    int dim = chain_input_dim(*model.registry, f.id);
    if (dim < 1) {
      dim = 1;
    }
    std::vector<ActivationSpec> sub_acts(fd.activations.begin(),
                                         fd.activations.end() - 1);
    std::vector<WeightingSpec> sub_wgts(fd.weightings.begin(),
                                        fd.weightings.end() - 1);
    ChainFunction const_fn =
        make_const_one(fd.depth - 1, dim, sub_acts, sub_wgts, model.registry);
    BiasEliminationResult res =
        eliminate_bias(f, fd.weightings.back(), const_fn);

    // Deviation over seeded probe points.
    RandomEngine engine(derive_seed(g.seed, 0x62696173ULL));
    double max_dev = 0.0;
    Evaluator ev(*model.registry);
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd x(dim);
      for (int i = 0; i < dim; ++i) {
        x[i] = engine.normal();
      }
      double a = ev.eval(f.id, x);
      double b = ev.eval(res.function.id, x);
      max_dev = std::max(max_dev, std::abs(a - b));
    }
    nlohmann::json jb;
    jb["tv_in"] = res.tv_in;
    jb["tv_out"] = res.tv_out;
    jb["sup_ratio"] = res.sup_ratio;
    jb["max_probe_deviation"] = max_dev;
    metrics["bias_elimination"] = std::move(jb);
    if (!bias_free_out.empty()) {
      std::vector<ChainFunction> out_roots{res.function};
      write_text_file(bias_free_out, dump_json(measure_to_json(out_roots)));
    }
  }

  std::string text = dump_json(metrics);
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(g.out, text);
  }
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const GlobalOpts& g) {
  Model model = load_model(model_path);
  Dataset data = load_dataset_file(data_path);
  Eigen::MatrixXd vals = model_values(model, data.X);
  std::string csv = matrix_to_csv(vals, "y");
  if (g.out.empty()) {
    std::cout << csv;
  } else {
    write_text_file(g.out, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain-kernel Banach space toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::string network_path, measure_path, model_path, data_path, config_path;

  CLI::App* embed = app.add_subcommand("embed", "Network file to measure file");
  embed->add_option("network", network_path, "Network JSON")->required();
  add_global_opts(embed, g);

  CLI::App* extract =
      app.add_subcommand("extract", "Measure file + dataset to network file");
  extract->add_option("measure", measure_path, "Measure JSON")->required();
  extract->add_option("dataset", data_path, "Dataset CSV or JSON")->required();
  add_global_opts(extract, g);

  CLI::App* fit = app.add_subcommand("fit", "Regularized regression fit");
  fit->add_option("dataset", data_path, "Dataset CSV or JSON")->required();
  fit->add_option("config", config_path, "Fit configuration JSON")->required();
  add_global_opts(fit, g);

  bool want_path_norm = false, want_complexity = false, want_bias = false;
  bool exhaustive = false;
  int draws = 200, pool_size = 256;
  std::string noise = "rademacher", draws_csv, bias_free_out;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Path norm, complexity, bias elimination");
  analyze->add_option("model", model_path, "Network or measure JSON")
      ->required();
  analyze->add_option("dataset", data_path, "Dataset CSV or JSON");
  analyze->add_flag("--path-norm", want_path_norm, "Report the path norm");
  analyze->add_flag("--complexity", want_complexity,
                    "Estimate dictionary complexity on the dataset");
  analyze->add_flag("--eliminate-bias", want_bias,
                    "Rewrite top-layer biases into the measure");
  analyze->add_option("--draws", draws, "Noise draws for --complexity");
  analyze->add_option("--pool-size", pool_size,
                      "Random candidate pool size for --complexity");
  analyze->add_option("--noise", noise, "rademacher or gaussian");
  analyze->add_flag("--exhaustive", exhaustive,
                    "Average over all sign vectors (N <= 20)");
  analyze->add_option("--draws-csv", draws_csv, "Write per-draw sups to CSV");
  analyze->add_option("--bias-free-out", bias_free_out,
                      "Write the bias-free measure here");
  add_global_opts(analyze, g);

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate a model on a dataset, CSV out");
  eval_cmd->add_option("model", model_path, "Network or measure JSON")
      ->required();
  eval_cmd->add_option("dataset", data_path, "Dataset CSV or JSON")->required();
  add_global_opts(eval_cmd, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (embed->parsed()) {
      return cmd_embed(network_path, g);
    }
    if (extract->parsed()) {
      return cmd_extract(measure_path, data_path, g);
    }
    if (fit->parsed()) {
      return cmd_fit(data_path, config_path, g);
    }
    if (analyze->parsed()) {
      return cmd_analyze(model_path, data_path, want_path_norm,
                         want_complexity, want_bias, draws, pool_size, noise,
                         exhaustive, draws_csv, bias_free_out, g);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(model_path, data_path, g);
    }
    std::cerr << "error: no command\n";
    return 2;
  } catch (const crkbs::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const crkbs::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const crkbs::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const crkbs::RegistryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
