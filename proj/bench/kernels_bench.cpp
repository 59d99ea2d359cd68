// Copyright 2026 The msgm-bench Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP batch kernels.
//   msgm_bench --benchmark_filter=Lstm

#include <benchmark/benchmark.h>
#include <omp.h>

#include <numeric>

#include "msgm/neural/batch_ops.hpp"
#include "msgm/rng.hpp"

namespace {

using namespace msgm;

struct Fixture {
  std::unique_ptr<neural::Network> net;
  std::vector<double> params;
  splitting::WindowBatch batch;
  std::vector<std::size_t> idx;

  explicit Fixture(neural::Arch arch) {
    neural::ModelSpec s;
    s.arch = arch;
    s.hidden = 32;
    s.layers = 2;
    s.heads = arch == neural::Arch::kTransformer ? 4 : 1;
    net = neural::make_network(s);
    params.resize(net->param_count());
    net->init_params(params, 1);
    auto series = std::make_shared<dataio::NormalizedSeries>();
    series->schema = {{"a", "b", "c", "d", "e"}, "y", 15};
    series->rows = 400;
    series->cols = 6;
    Rng rng(2);
    for (std::size_t i = 0; i < series->rows * series->cols; ++i)
      series->values.push_back(rng.normal());
    batch = splitting::make_windows(series, {0, series->rows}, 4);
    idx.resize(64);
    std::iota(idx.begin(), idx.end(), 0);
  }
};

Fixture& fixture(neural::Arch arch) {
  static Fixture lstm(neural::Arch::kLstm), tf(neural::Arch::kTransformer);
  return arch == neural::Arch::kLstm ? lstm : tf;
}

template <neural::Arch A, bool Parallel>
void BM_LossAndGrad(benchmark::State& state) {
  auto& f = fixture(A);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto lg = Parallel ? neural::loss_and_grad(*f.net, f.params, f.batch, f.idx)
                       : neural::loss_and_grad_serial(*f.net, f.params, f.batch, f.idx);
    benchmark::DoNotOptimize(lg.loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.idx.size()));
}

template <neural::Arch A, bool Parallel>
void BM_Forward(benchmark::State& state) {
  auto& f = fixture(A);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto out = Parallel ? neural::forward_batch(*f.net, f.params, f.batch)
                        : neural::forward_batch_serial(*f.net, f.params, f.batch);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.batch.size()));
}

const int kMaxThreads = omp_get_num_procs();

BENCHMARK(BM_LossAndGrad<neural::Arch::kLstm, false>)->Name("LossAndGrad/Lstm/serial")->Arg(1);
BENCHMARK(BM_LossAndGrad<neural::Arch::kLstm, true>)
    ->Name("LossAndGrad/Lstm/omp")
    ->RangeMultiplier(2)
    ->Range(1, kMaxThreads);
BENCHMARK(BM_LossAndGrad<neural::Arch::kTransformer, false>)
    ->Name("LossAndGrad/Transformer/serial")
    ->Arg(1);
BENCHMARK(BM_LossAndGrad<neural::Arch::kTransformer, true>)
    ->Name("LossAndGrad/Transformer/omp")
    ->RangeMultiplier(2)
    ->Range(1, kMaxThreads);
BENCHMARK(BM_Forward<neural::Arch::kLstm, false>)->Name("Forward/Lstm/serial")->Arg(1);
BENCHMARK(BM_Forward<neural::Arch::kLstm, true>)
    ->Name("Forward/Lstm/omp")
    ->RangeMultiplier(2)
    ->Range(1, kMaxThreads);

}  // namespace

BENCHMARK_MAIN();
