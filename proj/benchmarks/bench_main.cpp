#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qoe/brisque.hpp"
#include "qoe/pipeline.hpp"
#include "qoe/regression.hpp"

using namespace qoe;

namespace {

iqa::GrayImage noise_image(int w, int h) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = u(rng);
  return iqa::GrayImage(w, h, std::move(v));
}

Eigen::MatrixXd random_inputs(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = d(rng);
  return m;
}

std::vector<int> classes_of(const Eigen::MatrixXd& in) {
  std::vector<int> y;
  for (Eigen::Index r = 0; r < in.rows(); ++r) y.push_back(1 + static_cast<int>(r % 5));
  return y;
}

}  // namespace

static void BM_ExtractFeatures(benchmark::State& state) {
  const auto side = static_cast<int>(state.range(0));
  const auto img = noise_image(side, side);
  for (auto _ : state) benchmark::DoNotOptimize(iqa::extract_features(img));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_ExtractFeatures)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_FitLinear(benchmark::State& state) {
  const regression::PolynomialBasis basis(24, static_cast<int>(state.range(0)));
  const auto x = basis.expand_rows(random_inputs(432, 24, 2));
  const Eigen::VectorXd y = random_inputs(432, 1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(regression::fit_linear(basis, x, y));
}
BENCHMARK(BM_FitLinear)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_FitLogistic(benchmark::State& state) {
  const regression::PolynomialBasis basis(24, static_cast<int>(state.range(0)));
  const auto in = random_inputs(static_cast<Eigen::Index>(state.range(1)), 24, 4);
  const auto x = basis.expand_rows(in);
  const auto y = classes_of(in);
  for (auto _ : state) benchmark::DoNotOptimize(regression::fit_logistic(basis, x, y));
}
BENCHMARK(BM_FitLogistic)->Args({1, 432})->Args({2, 28})->Unit(benchmark::kMillisecond);

static void BM_StageOne(benchmark::State& state) {
  pipeline::Dataset data{random_inputs(540, 1, 5), Eigen::VectorXd(540), {}};
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (Eigen::Index r = 0; r < 540; ++r) {
    data.targets(r) = 3.0 - 0.8 * data.inputs(r, 0) + noise(rng);
    data.labels.push_back({"s", "i", 0});
  }
  pipeline::PredictionSpec spec;
  spec.degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::stage_one(data, spec));
}
BENCHMARK(BM_StageOne)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
