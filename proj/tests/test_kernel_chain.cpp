#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "crkbs/bridge.hpp"
#include "crkbs/errors.hpp"
#include "crkbs/kernel.hpp"
#include "crkbs/registry.hpp"
#include "crkbs/rng.hpp"

#include "test_util.hpp"

using namespace crkbs;
using testutil::close_rel;

namespace {

double atom_feature(Evaluator& ev, const Eigen::VectorXd& x, const Atom& atom,
                    const ActivationSpec& act, const WeightingSpec& wgt) {
  if (const auto* l1 = std::get_if<Layer1Atom>(&atom)) {
    return kernel_layer1(x, *l1, act, wgt);
  }
  return kernel_chain(ev, x, std::get<ChainAtom>(atom), act, wgt);
}

}  // namespace

TEST_CASE("first-layer kernel matches the closed form") {
  Eigen::Vector2d x(1.0, 0.0);
  Layer1Atom a{Eigen::Vector2d(2.0, 0.0), -1.0};
  CHECK(kernel_layer1(x, a, {Activation::relu}, {Weighting::unit}) == 1.0);
  CHECK(kernel_layer1(x, a, {Activation::identity}, {Weighting::unit}) == 1.0);
  // |v|_2 = 2, |b| = 1 so inverse_affine divides by 4.
  CHECK(kernel_layer1(x, a, {Activation::relu}, {Weighting::inverse_affine}) ==
        0.25);
  Layer1Atom zero{Eigen::Vector2d::Zero(), 0.0};
  CHECK(kernel_layer1(x, zero, {Activation::softplus}, {Weighting::unit}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));

  Eigen::Vector3d wrong_dim(1.0, 2.0, 3.0);
  CHECK_THROWS_AS(
      kernel_layer1(wrong_dim, a, {Activation::relu}, {Weighting::unit}),
      ContractError);
  Eigen::Vector2d bad(std::nan(""), 0.0);
  CHECK_THROWS_AS(kernel_layer1(bad, a, {Activation::relu}, {Weighting::unit}),
                  DomainError);
}

TEST_CASE("feature matrix of first-layer atoms matches hand evaluation") {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, 2.0;
  std::vector<Atom> atoms{
      Layer1Atom{Eigen::VectorXd::Constant(1, 1.0), 0.0},
      Layer1Atom{Eigen::VectorXd::Constant(1, -1.0), 2.0}};
  Registry reg;
  GramMatrix G = gram_matrix(X, atoms, 1, {Activation::relu},
                             {Weighting::unit}, reg);
  REQUIRE(G.values.rows() == 2);
  REQUIRE(G.values.cols() == 2);
  CHECK(G.values(0, 0) == 1.0);
  CHECK(G.values(0, 1) == 1.0);
  CHECK(G.values(1, 0) == 2.0);
  CHECK(G.values(1, 1) == 0.0);
  CHECK(G.layer == 1);
}

TEST_CASE("chain kernel composes the sub-function, bias, and weighting") {
  auto reg = std::make_shared<Registry>();
  AtomicMeasure m;
  m.atoms.push_back(Layer1Atom{Eigen::VectorXd::Constant(1, 1.0), 0.0});
  m.coeffs = {2.0};  // f(x) = 2 relu(x), total variation 2
  FunctionId f = reg->intern(1, m, {{Activation::relu}}, {{Weighting::unit}});
  ChainAtom atom{2, f, 0.5};

  Evaluator ev(*reg);
  for (double xv : {-1.0, 0.0, 0.75, 3.0}) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, xv);
    double fx = 2.0 * std::max(xv, 0.0);
    double expect_unit = std::tanh(fx + 0.5);
    CHECK(close_rel(kernel_chain(ev, x, atom, {Activation::tanh},
                                 {Weighting::unit}),
                    expect_unit, 1e-15));
    // nu(f) = 2, |b| = 0.5: inverse_affine divides by 3.5.
    CHECK(close_rel(kernel_chain(ev, x, atom, {Activation::tanh},
                                 {Weighting::inverse_affine}),
                    expect_unit / 3.5, 1e-15));
    CHECK(close_rel(kernel_chain(ev, x, atom, {Activation::tanh},
                                 {Weighting::inverse_norm_bias}),
                    expect_unit / 2.5, 1e-15));
  }
}

TEST_CASE("evaluation is exactly the coefficient-weighted feature sum") {
  RandomEngine engine(2024);
  for (int depth = 1; depth <= 3; ++depth) {
    std::vector<ActivationSpec> acts;
    std::vector<WeightingSpec> wgts;
    auto act_choices = testutil::all_activations();
    auto wgt_choices = testutil::all_weightings();
    for (int l = 0; l < depth; ++l) {
      acts.push_back(act_choices[(depth + l) % act_choices.size()]);
      wgts.push_back(wgt_choices[l % wgt_choices.size()]);
    }
    DeepNetwork net = testutil::random_network(engine, 3, 1, 4, acts);
    auto reg = std::make_shared<Registry>();
    ChainFunction root = embed_network(net, wgts, reg)[0];
    const ChainFunctionData& fn = root.data();

    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd x = testutil::random_vector(engine, 3);
      Evaluator ev(*reg);
      double total = ev.eval(root.id, x);
      double acc = 0.0;
      for (std::size_t j = 0; j < fn.measure.size(); ++j) {
        acc += fn.measure.coeffs[j] *
               atom_feature(ev, x, fn.measure.atoms[j], fn.activations.back(),
                            fn.weightings.back());
      }
      CHECK(total == acc);  // same accumulation order, bit-identical
    }
  }
}

TEST_CASE("relu chain functions without biases are positively homogeneous") {
  RandomEngine engine(5);
  std::vector<ActivationSpec> acts(2, {Activation::relu});
  std::vector<WeightingSpec> wgts(2, {Weighting::unit});
  DeepNetwork net = testutil::random_network(engine, 2, 1, 3, acts,
                                             /*zero_bias=*/true);
  ChainFunction f = embed_network(net, wgts, nullptr)[0];
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd x = testutil::random_vector(engine, 2);
    double base = eval_chain(f, x);
    for (double scale : {0.5, 2.0, 7.25}) {
      CHECK(close_rel(eval_chain(f, scale * x), scale * base, 1e-12));
    }
  }
}

TEST_CASE("softplus features with inverse_affine weighting are bounded") {
  RandomEngine engine(99);
  for (int t = 0; t < 1000; ++t) {
    int d = 1 + static_cast<int>(engine.next_u64() % 3);
    Eigen::VectorXd x = 3.0 * testutil::random_vector(engine, d);
    Layer1Atom a{5.0 * testutil::random_vector(engine, d),
                 engine.uniform(-5.0, 5.0)};
    double phi = kernel_layer1(x, a, {Activation::softplus},
                               {Weighting::inverse_affine});
    CHECK(std::abs(phi) <= std::max(x.norm(), 1.0) + 1e-12);
  }
}

TEST_CASE("evaluator caches per point and resets on a new point") {
  auto reg = std::make_shared<Registry>();
  AtomicMeasure m;
  m.atoms.push_back(Layer1Atom{Eigen::VectorXd::Constant(1, 1.0), 0.0});
  m.coeffs = {1.0};
  FunctionId f = reg->intern(1, m, {{Activation::relu}}, {{Weighting::unit}});
  Evaluator ev(*reg);
  Eigen::VectorXd x1 = Eigen::VectorXd::Constant(1, 2.0);
  Eigen::VectorXd x2 = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(ev.eval(f, x1) == 2.0);
  CHECK(ev.eval(f, x1) == 2.0);
  CHECK(ev.eval(f, x2) == 3.0);
  CHECK(ev.eval(f, x1) == 2.0);
}

TEST_CASE("batch evaluation matches pointwise evaluation") {
  RandomEngine engine(17);
  std::vector<ActivationSpec> acts{{Activation::tanh}, {Activation::softplus}};
  std::vector<WeightingSpec> wgts{{Weighting::inverse_affine},
                                  {Weighting::inverse_affine}};
  DeepNetwork net = testutil::random_network(engine, 2, 1, 3, acts);
  ChainFunction f = embed_network(net, wgts, nullptr)[0];
  Eigen::MatrixXd X = testutil::random_matrix(engine, 6, 2);
  Eigen::VectorXd batch = eval_chain_batch(f, X);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    CHECK(batch[i] == eval_chain(f, X.row(i).transpose()));
  }
}

TEST_CASE("feature matrices for chain layers agree with the chain kernel") {
  RandomEngine engine(31);
  std::vector<ActivationSpec> acts{{Activation::relu}, {Activation::sigmoid}};
  std::vector<WeightingSpec> wgts{{Weighting::unit},
                                  {Weighting::inverse_affine}};
  DeepNetwork net = testutil::random_network(engine, 2, 1, 3, acts);
  auto reg = std::make_shared<Registry>();
  ChainFunction root = embed_network(net, wgts, reg)[0];
  const std::vector<Atom>& atoms = root.data().measure.atoms;
  Eigen::MatrixXd X = testutil::random_matrix(engine, 5, 2);
  GramMatrix G = gram_matrix(X, atoms, 2, acts[1], wgts[1], *reg);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Evaluator ev(*reg);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      CHECK(G.values(i, static_cast<Eigen::Index>(j)) ==
            kernel_chain(ev, X.row(i).transpose(), std::get<ChainAtom>(atoms[j]),
                         acts[1], wgts[1]));
    }
  }
}

TEST_CASE("feature matrix rejects atoms at the wrong layer") {
  Registry reg;
  Eigen::MatrixXd X(1, 1);
  X << 1.0;
  std::vector<Atom> l1{Layer1Atom{Eigen::VectorXd::Constant(1, 1.0), 0.0}};
  std::vector<Atom> ch{ChainAtom{2, "f", 0.0}};
  CHECK_THROWS_AS(
      gram_matrix(X, ch, 1, {Activation::relu}, {Weighting::unit}, reg),
      ContractError);
  CHECK_THROWS_AS(
      gram_matrix(X, l1, 2, {Activation::relu}, {Weighting::unit}, reg),
      ContractError);
  CHECK_THROWS_AS(
      gram_matrix(X, l1, 0, {Activation::relu}, {Weighting::unit}, reg),
      ContractError);
}

TEST_CASE("the norm bound is the measure's total variation") {
  auto reg = std::make_shared<Registry>();
  AtomicMeasure m;
  m.atoms.push_back(Layer1Atom{Eigen::VectorXd::Constant(1, 1.0), 0.0});
  m.atoms.push_back(Layer1Atom{Eigen::VectorXd::Constant(1, -2.0), 1.0});
  m.coeffs = {3.0, -1.25};
  FunctionId id = reg->intern(1, m, {{Activation::relu}}, {{Weighting::unit}});
  ChainFunction f{reg, id};
  CHECK(norm_upper_bound(f) == 4.25);
}
