#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "riskavi/quantile_net.hpp"
#include "riskavi/random.hpp"

using namespace riskavi;

namespace {

NetworkShape small_shape() {
  NetworkShape s;
  s.obs_dim = 4;
  s.hidden = {6, 5};
  s.n_actions = 3;
  s.n_tau = 4;
  return s;
}

std::vector<double> random_obs(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("network shape and parameter layout") {
  NetworkShape s;
  CHECK(s.output_dim() == 160);
  CHECK(s.layer_dims() == std::vector<std::size_t>{52, 120, 84, 160});
  CHECK(s.parameter_count() == 120 * 53 + 84 * 121 + 160 * 85);

  NetworkParams p(s);
  CHECK(p.data().size() == s.parameter_count());
  CHECK(p.num_layers() == 3);
  CHECK(p.weights(0).rows() == 120);
  CHECK(p.weights(0).cols() == 52);
  CHECK(p.bias(2).size() == 160);
  // Layer 0 weight block starts the buffer; its bias follows immediately.
  p.weights(0)(1, 2) = 3.0;
  CHECK(p.data()[1 * 52 + 2] == 3.0);
  p.bias(0)(0) = 7.0;
  CHECK(p.data()[120 * 52] == 7.0);

  NetworkShape bad = s;
  bad.n_tau = 0;
  CHECK_THROWS_AS(NetworkParams{bad}, std::invalid_argument);
}

TEST_CASE("init respects fan-in bounds and seeds") {
  const auto s = small_shape();
  const auto a = init_network(s, 3);
  const auto b = init_network(s, 3);
  const auto c = init_network(s, 4);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (std::size_t l = 0; l < a.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(a.weights(l).cols()));
    CHECK(a.weights(l).cwiseAbs().maxCoeff() <= bound);
    CHECK(a.bias(l).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("forward matches naive loop implementation") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    NetworkShape s = small_shape();
    s.hidden = {1 + rng.below(9), 1 + rng.below(9)};
    auto p = init_network(s, trial);
    for (auto& b : p.data()) b += rng.uniform(-0.1, 0.1);
    const auto obs = random_obs(s.obs_dim, rng);
    const auto q = forward(p, obs);
    const auto ref = oracle::naive_forward(p, obs);
    REQUIRE(q.rows() == static_cast<Eigen::Index>(s.n_actions));
    REQUIRE(q.cols() == static_cast<Eigen::Index>(s.n_tau));
    for (std::size_t a = 0; a < s.n_actions; ++a) {
      for (std::size_t n = 0; n < s.n_tau; ++n) {
        CHECK(q(a, n) == doctest::Approx(ref[a * s.n_tau + n]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("forward rejects bad observations") {
  const auto p = init_network(small_shape(), 0);
  CHECK_THROWS_AS(forward(p, std::vector<double>(3, 0.0)), std::invalid_argument);
  std::vector<double> obs(4, 0.0);
  obs[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(forward(p, obs), std::invalid_argument);
}

TEST_CASE("backward matches finite differences") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = small_shape();
    const auto p = init_network(s, 100 + trial);
    const auto obs = random_obs(s.obs_dim, rng);
    RowMajorMatrix w(s.n_actions, s.n_tau);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-1.0, 1.0);

    // Scalar objective sum(w .* forward(params)).
    auto objective = [&](const std::vector<double>& flat) {
      NetworkParams q(s);
      std::copy(flat.begin(), flat.end(), q.data().begin());
      return forward(q, obs).cwiseProduct(w).sum();
    };
    const auto grads = backward(p, obs, w);
    const std::vector<double> flat(p.data().begin(), p.data().end());
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const double fd = oracle::central_difference(objective, flat, i, 1e-6);
      const double an = grads.data()[i];
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("batched backward is the sum of per-sample gradients") {
  Rng rng(8);
  const auto s = small_shape();
  const auto p = init_network(s, 9);
  const int batch = 5;
  Eigen::MatrixXd obs(s.obs_dim, batch);
  Eigen::MatrixXd g(s.output_dim(), batch);
  for (Eigen::Index i = 0; i < obs.size(); ++i) obs.data()[i] = rng.uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.uniform(-1.0, 1.0);

  const auto batched = backward_batch(p, forward_batch(p, obs), g);
  std::vector<double> sum(s.parameter_count(), 0.0);
  for (int b = 0; b < batch; ++b) {
    std::vector<double> o(obs.col(b).data(), obs.col(b).data() + s.obs_dim);
    RowMajorMatrix lg(s.n_actions, s.n_tau);
    for (std::size_t a = 0; a < s.n_actions; ++a) {
      for (std::size_t n = 0; n < s.n_tau; ++n) lg(a, n) = g(a * s.n_tau + n, b);
    }
    const auto single = backward(p, o, lg);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += single.data()[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) CHECK(batched.data()[i] == doctest::Approx(sum[i]).epsilon(1e-12));
}

TEST_CASE("sgd and adam steps") {
  const auto s = small_shape();
  auto p = init_network(s, 1);
  const auto before = p;
  ParamGrads g(s);
  for (std::size_t i = 0; i < g.data().size(); ++i) g.data()[i] = (i % 3 == 0) ? 1.0 : -2.0;

  SUBCASE("sgd") {
    OptimizerState opt;
    opt.kind = OptimizerKind::sgd;
    opt.lr = 0.1;
    REQUIRE(step(p, g, opt));
    for (std::size_t i = 0; i < g.data().size(); ++i) {
      CHECK(p.data()[i] == doctest::Approx(before.data()[i] - 0.1 * g.data()[i]));
    }
    CHECK(opt.t == 1);
  }
  SUBCASE("adam first step moves each coordinate by about lr") {
    OptimizerState opt;
    opt.lr = 1e-3;
    REQUIRE(step(p, g, opt));
    for (std::size_t i = 0; i < g.data().size(); ++i) {
      const double expected = before.data()[i] - 1e-3 * (g.data()[i] > 0 ? 1.0 : -1.0);
      CHECK(p.data()[i] == doctest::Approx(expected).epsilon(1e-6));
    }
  }
  SUBCASE("diminishing step size") {
    OptimizerState opt;
    opt.kind = OptimizerKind::sgd;
    opt.diminishing = true;
    opt.k_alpha = 0.5;
    CHECK(opt.effective_lr() == 0.5);
    REQUIRE(step(p, g, opt));
    CHECK(opt.effective_lr() == 0.25);
  }
  SUBCASE("non-finite gradient leaves state untouched") {
    OptimizerState opt;
    g.data()[3] = std::numeric_limits<double>::infinity();
    CHECK_FALSE(step(p, g, opt));
    CHECK(p == before);
    CHECK(opt.t == 0);
    CHECK(opt.m.empty());
  }
}

TEST_CASE("adam minimizes a quadratic") {
  NetworkShape s;
  s.obs_dim = 1;
  s.hidden = {};
  s.n_actions = 1;
  s.n_tau = 1;
  NetworkParams p(s);
  p.data()[0] = 3.0;
  p.data()[1] = -2.0;
  OptimizerState opt;
  opt.lr = 0.05;
  for (int it = 0; it < 2000; ++it) {
    ParamGrads g(s);
    for (std::size_t i = 0; i < 2; ++i) g.data()[i] = 2.0 * p.data()[i];
    REQUIRE(step(p, g, opt));
  }
  CHECK(std::abs(p.data()[0]) < 1e-2);
  CHECK(std::abs(p.data()[1]) < 1e-2);
}

TEST_CASE("soft update blends parameters") {
  const auto s = small_shape();
  const auto online = init_network(s, 1);
  auto target = init_network(s, 2);
  const auto old = target;
  soft_update(target, online, 0.25);
  for (std::size_t i = 0; i < online.data().size(); ++i) {
    CHECK(target.data()[i] == doctest::Approx(0.25 * online.data()[i] + 0.75 * old.data()[i]));
  }
  soft_update(target, online, 1.0);
  CHECK(target == online);
  CHECK_THROWS_AS(soft_update(target, online, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(soft_update(target, online, 1.5), std::invalid_argument);
}

TEST_CASE("action means and lowest-index argmin") {
  RowMajorMatrix q(3, 2);
  q << 1.0, 3.0,  //
      0.0, 4.0,   //
      5.0, -1.0;
  const auto m = action_means(q);
  CHECK(m(0) == 2.0);
  CHECK(m(1) == 2.0);
  CHECK(m(2) == 2.0);
  CHECK(argmin_index(m) == 0);
  Eigen::VectorXd v(4);
  v << 3.0, 1.0, 1.0, 2.0;
  CHECK(argmin_index(v) == 1);
}
