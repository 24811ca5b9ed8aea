#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "cloudscat/bayes.hpp"
#include "doctest.h"

using namespace cloudscat;
using namespace cloudscat::bayes;

namespace {

const double kScale = 0.1;

Grid2D inference_grid() { return Grid2D::centered(0.4, 0.02); }
Grid2D synthesis_grid() { return Grid2D::centered(0.4, 0.01); }

ObservationDesign kite_design(double zeta = 0.0) {
  const auto box = bounding_box(sample_curve(kite_curve(kScale), 10000));
  return ObservationDesign::standard(default_observation_points(inference_grid(), box), zeta, 0.012, 0.012);
}

std::vector<Point2> octagon(double r, Point2 c = {0, 0}) {
  std::vector<Point2> pts;
  for (int i = 0; i < 8; ++i) {
    const double t = std::numbers::pi / 4 * i + 0.1;
    pts.push_back(c + Point2{r * std::cos(t), r * std::sin(t)});
  }
  return pts;
}

// Brute force: independent real and imaginary Gaussian log-densities.
double brute_log_lik(const std::vector<cplx>& pred, const Observations& obs, const ObservationDesign& d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < obs.directions; ++i) {
    const double s = d.sigma(i);
    for (std::size_t j = 0; j < obs.points; ++j) {
      const cplx r = obs.value(i, j) - pred[i * obs.points + j];
      for (double x : {r.real(), r.imag()}) {
        sum += -0.5 * std::log(2 * std::numbers::pi * s * s) - 0.5 * x * x / (s * s);
      }
    }
  }
  return sum;
}

Observations toy_observations(const ObservationDesign& d, std::uint64_t seed) {
  Observations obs;
  obs.directions = d.direction_count();
  obs.points = d.point_count();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.3);
  for (std::size_t i = 0; i < obs.directions * obs.points; ++i) obs.data.emplace_back(n(rng), n(rng));
  return obs;
}

}  // namespace

TEST_SUITE("bayes") {
  TEST_CASE("standard design") {
    const auto d = ObservationDesign::standard({{0.4, 0.4}}, std::numbers::pi / 6, 0.01, 0.02);
    REQUIRE(d.direction_count() == 8);
    for (int i = 1; i <= 8; ++i) {
      const double t = 2 * std::numbers::pi * i / 8 + std::numbers::pi / 6;
      CHECK(d.directions[i - 1].x == doctest::Approx(std::cos(t)).epsilon(1e-15));
      CHECK(d.directions[i - 1].y == doctest::Approx(std::sin(t)).epsilon(1e-15));
      CHECK(d.wavenumbers[i - 1] == (i % 2 == 0 ? kHighWavenumber : kLowWavenumber));
      CHECK(d.sigma(i - 1) == (i % 2 == 0 ? 0.02 : 0.01));
    }
    auto bad = d;
    bad.wavenumbers[0] = 2.0;
    CHECK_THROWS_AS(bad.check(), ContractError);
  }

  TEST_CASE("default observation points") {
    const auto d = kite_design();
    CHECK(d.point_count() == 112);
    const auto box = bounding_box(sample_curve(kite_curve(kScale), 10000));
    for (auto p : d.points) {
      CHECK_FALSE(box.contains(p));
      CHECK(inference_grid().find_node(p) >= 0);
      CHECK(synthesis_grid().find_node(p) >= 0);
    }
  }

  TEST_CASE("log-likelihood values") {
    const std::vector<Point2> pts{{0.0, 0.4}, {0.4, 0.0}, {-0.4, 0.0}};
    const auto d = ObservationDesign::standard(pts, 0.0, 0.012, 0.03);
    const auto obs = toy_observations(d, 1);
    CHECK(log_likelihood(obs.data, obs, d) ==
          doctest::Approx(-(8.0 * 3) * (std::log(2 * std::numbers::pi * 0.012 * 0.012) +
                                        std::log(2 * std::numbers::pi * 0.03 * 0.03)) /
                          2.0));
    auto shifted = obs.data;
    shifted[5] += cplx(0.0, d.sigma(1));  // direction index 1 holds points 3..5
    CHECK(log_likelihood(obs.data, obs, d) - log_likelihood(shifted, obs, d) == doctest::Approx(0.5).epsilon(1e-9));

    std::vector<cplx> pred = toy_observations(d, 2).data;
    CHECK(log_likelihood(pred, obs, d) == doctest::Approx(brute_log_lik(pred, obs, d)).epsilon(1e-13));
  }

  TEST_CASE("log-likelihood ignores point order") {
    const std::vector<Point2> pts{{0.0, 0.4}, {0.4, 0.0}, {-0.4, 0.0}, {0.2, 0.2}};
    const auto d = ObservationDesign::standard(pts, 0.0, 0.012, 0.012);
    const auto obs = toy_observations(d, 3);
    const auto pred = toy_observations(d, 4).data;
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    Observations pobs = obs;
    std::vector<cplx> ppred = pred;
    for (std::size_t i = 0; i < obs.directions; ++i) {
      for (std::size_t j = 0; j < obs.points; ++j) {
        pobs.value(i, j) = obs.value(i, perm[j]);
        ppred[i * obs.points + j] = pred[i * obs.points + perm[j]];
      }
    }
    CHECK(log_likelihood(ppred, pobs, d) == doctest::Approx(log_likelihood(pred, obs, d)).epsilon(1e-14));
    std::vector<cplx> short_pred(pred.begin(), pred.end() - 1);
    CHECK_THROWS_AS(log_likelihood(short_pred, obs, d), ContractError);
  }

  TEST_CASE("gamma prior") {
    CHECK(gamma_log_pdf(-1.0, 2.0, 0.05) == kImpossible);
    CHECK(gamma_log_pdf(0.0, 2.0, 0.05) == kImpossible);
    CHECK(gamma_log_pdf(25.0, 2.0, 0.05) ==
          doctest::Approx(std::log(25.0) - 0.05 * 25.0 + 2 * std::log(0.05) - std::lgamma(2.0)));
    // Normalization by the trapezoidal rule.
    double mass = 0.0;
    const double step = 0.01;
    for (int i = 1; i < 200000; ++i) mass += step * std::exp(gamma_log_pdf(i * step, 2.0, 0.05));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("log prior support and factorization") {
    const PriorSpec prior;
    Theta t{{octagon(0.1), 0.2}, 25.0};
    CHECK(log_prior(t, prior) == doctest::Approx(gamma_log_pdf(25.0, 2.0, 0.05)));
    auto neg = t;
    neg.b = -1.0;
    CHECK(log_prior(neg, prior) == kImpossible);
    auto out = t;
    out.cloud.points[0] = {0.45, 0.0};
    CHECK(log_prior(out, prior) == kImpossible);
    auto big_alpha = t;
    big_alpha.cloud.alpha = prior.alpha_upper() * 1.01;
    CHECK(log_prior(big_alpha, prior) == kImpossible);
    auto moved = t;
    moved.cloud.points[3] = moved.cloud.points[3] + Point2{0.01, -0.02};
    moved.cloud.alpha = 0.25;
    CHECK(log_prior(moved, prior) == log_prior(t, prior));
    auto other_b = t;
    other_b.b = 30.0;
    CHECK(log_prior(other_b, prior) - log_prior(t, prior) ==
          doctest::Approx(gamma_log_pdf(30.0, 2.0, 0.05) - gamma_log_pdf(25.0, 2.0, 0.05)));
  }

  TEST_CASE("forward map limits") {
    const auto d = kite_design();
    const ForwardModel model(inference_grid(), d);
    const auto shape = geometry::build_shape({octagon(0.1), 0.2});
    REQUIRE(shape.valid());
    const auto weak = forward_map(shape, 1e-9, model);
    for (const auto& v : weak) CHECK(std::abs(v) < 1e-8);
    const auto out = forward_map(shape, 25.0, model);
    CHECK(out.size() == 8 * d.point_count());

    auto reversed = d;
    std::reverse(reversed.points.begin(), reversed.points.end());
    const ForwardModel rmodel(inference_grid(), reversed);
    const auto rout = forward_map(shape, 25.0, rmodel);
    const std::size_t m = d.point_count();
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = 0; j < m; ++j) CHECK(rout[i * m + j] == out[i * m + (m - 1 - j)]);
    }
  }

  TEST_CASE("forward map rejects invalid hulls and off-grid points") {
    const ForwardModel model(inference_grid(), kite_design());
    Theta bad{{{{0, 0}, {0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}}, 0.5}, 25.0};
    CHECK_THROWS_AS(forward_map(bad, model), InvalidState);
    auto d = kite_design();
    d.points[0] = {0.011, 0.3};
    CHECK_THROWS_AS(ForwardModel(inference_grid(), d), ContractError);
  }

  TEST_CASE("synthesis, noise and the inverse-crime guard") {
    const auto d = kite_design();
    SynthesisOptions clean;
    clean.noise_free = true;
    const auto exact = synthesize(kite_curve(kScale), d, synthesis_grid(), clean);
    SynthesisOptions noisy;
    noisy.seed = 99;
    const auto data = synthesize(kite_curve(kScale), d, synthesis_grid(), noisy);
    CHECK(data.meta.solver == "reference");
    CHECK(data.meta.seed == 99);

    // Same seed, same bytes.
    const auto again = synthesize(kite_curve(kScale), d, synthesis_grid(), noisy);
    CHECK(again.data == data.data);

    // Coarse direct forward map at the truth differs by more than rounding
    // but by less than 3 sigma per point on average.
    const ForwardModel model(inference_grid(), d);
    const auto field = geometry::rasterize(sample_curve(kite_curve(kScale), 10000), inference_grid(), 25.0);
    const auto coarse = model.predict(field);
    double num = 0.0, den = 0.0, mean_abs = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      num += std::norm(coarse[i] - exact.data[i]);
      den += std::norm(exact.data[i]);
      mean_abs += std::abs(coarse[i] - exact.data[i]);
    }
    mean_abs /= static_cast<double>(coarse.size());
    CHECK(std::sqrt(num / den) > 1e-6);
    CHECK(mean_abs < 3 * 0.012);
  }

  TEST_CASE("noise standard deviation") {
    // Every node of the synthesis grid observed: 6561 points x 8 directions x 2 parts.
    std::vector<Point2> pts;
    const Grid2D g = Grid2D::centered(0.4, 0.01);
    for (std::size_t i = 0; i < g.size(); ++i) pts.push_back(g.node(i));
    const auto d = ObservationDesign::standard(pts, 0.0, 0.012, 0.012);
    SynthesisOptions clean;
    clean.noise_free = true;
    SynthesisOptions noisy;
    noisy.seed = 5;
    const auto a = synthesize(kite_curve(kScale), d, g, clean);
    const auto b = synthesize(kite_curve(kScale), d, g, noisy);
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      const cplx e = b.data[i] - a.data[i];
      for (double x : {e.real(), e.imag()}) {
        sum += x;
        sum2 += x * x;
        ++n;
      }
    }
    REQUIRE(n >= 100000);
    const double mean = sum / n;
    CHECK(std::sqrt(sum2 / n - mean * mean) == doctest::Approx(0.012).epsilon(0.01));
  }

  TEST_CASE("synthesis needs common nodes") {
    auto d = kite_design();
    d.points[0] = {0.005, 0.3};  // a node of neither grid
    CHECK_THROWS_AS(synthesize(kite_curve(kScale), d, synthesis_grid(), {}), ContractError);
  }

  TEST_CASE("energy") {
    const auto d = kite_design();
    SynthesisOptions opts;
    opts.seed = 3;
    const auto obs = synthesize(kite_curve(kScale), d, synthesis_grid(), opts);
    const auto model = std::make_shared<const ForwardModel>(inference_grid(), d);
    const GaussianLikelihood lik(model, obs);
    const PriorSpec prior;

    // A 12-point cloud on the kite boundary with its convex hull, versus a
    // disc of the wrong size and place.
    std::vector<Point2> kite_pts;
    for (int i = 0; i < 12; ++i) kite_pts.push_back(kite_curve(kScale)(2 * std::numbers::pi * i / 12));
    Theta truth{{kite_pts, 0.3}, 25.0};
    Theta wrong{{octagon(0.05, {0.2, 0.2}), 0.3}, 5.0};
    const double e_truth = energy(truth, lik, prior);
    const double e_wrong = energy(wrong, lik, prior);
    CHECK(std::isfinite(e_truth));
    CHECK(e_truth < e_wrong);
    CHECK(energy(truth, lik, prior) == e_truth);  // bit-for-bit

    auto other = truth;
    other.b = 30.0;
    const auto shape = geometry::build_shape(truth.cloud);
    const double de = energy(other, shape, lik, prior) - energy(truth, shape, lik, prior);
    const double want = -(lik(shape, 30.0) - lik(shape, 25.0)) - (gamma_log_pdf(30.0, 2, 0.05) - gamma_log_pdf(25.0, 2, 0.05));
    CHECK(de == doctest::Approx(want).epsilon(1e-12));

    auto impossible = truth;
    impossible.b = -2.0;
    CHECK(energy(impossible, lik, prior) == kInfiniteEnergy);
    Theta invalid{{{{0, 0}, {0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}}, 0.5}, 25.0};
    CHECK(energy(invalid, lik, prior) == kInfiniteEnergy);
  }

  TEST_CASE("observation files round-trip") {
    const auto d = kite_design(std::numbers::pi / 6);
    Observations obs = toy_observations(d, 8);
    obs.meta = {42, 0.012, 0.012, std::numbers::pi / 6, false, "reference", 80, 0.01, {-0.4, -0.4}};
    std::stringstream csv, meta;
    write_observations_csv(csv, obs, d);
    write_meta(meta, obs.meta);
    const auto back = read_observations_csv(csv, d);
    CHECK(back.data == obs.data);
    const auto m = read_meta(meta);
    CHECK(m.seed == 42);
    CHECK(m.zeta == obs.meta.zeta);
    CHECK(m.solver == "reference");
    CHECK(m.grid_n == 80);

    std::stringstream csv2;
    write_observations_csv(csv2, obs, d);
    // Point order is free, but every row must name a design point.
    auto swapped = d;
    std::swap(swapped.points[0], swapped.points[1]);
    const auto reordered = read_observations_csv(csv2, swapped);
    CHECK(reordered.value(0, 0) == obs.value(0, 1));
    std::stringstream csv3;
    write_observations_csv(csv3, obs, d);
    auto moved = d;
    moved.points[0] = moved.points[0] + Point2{0.02, 0.0};
    CHECK_THROWS_AS(read_observations_csv(csv3, moved), ContractError);
  }

  TEST_CASE("kite") {
    const auto k = kite_curve(1.0);
    CHECK(k(0.0).x == doctest::Approx(0.0));
    CHECK(k(0.0).y == doctest::Approx(1.0));
    CHECK(kite_area(0.1) == doctest::Approx(3 * std::numbers::pi / 200));
  }
}
