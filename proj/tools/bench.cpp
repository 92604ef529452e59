// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
//
// Compares the serial reference paths against the OpenMP kernels and checks
// that parallel execution does not change a single bit of the results.
#include <chrono>
#include <cstdio>
#include <functional>

#include "twdist/distributions.hpp"
#include "twdist/ensembles.hpp"
#include "twdist/fredholm.hpp"
#include "twdist/parallel.hpp"

using namespace twdist;

namespace {

double time_ms(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s %10.1f ms %10.1f ms   x%.2f   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", max_threads(Exec::Parallel));
  std::printf("%-28s %13s %13s %7s\n", "kernel", "serial", "openmp", "speedup");

  {
    std::vector<double> ser, par;
    double ts = time_ms([&] {
      for (int s = -6; s <= 4; s += 2)
        ser.push_back(fredholm_det(s, 1.0, 100, DomainMap::Rational, Exec::Serial));
    });
    double tp = time_ms([&] {
      for (int s = -6; s <= 4; s += 2)
        par.push_back(fredholm_det(s, 1.0, 100, DomainMap::Rational, Exec::Parallel));
    });
    row("fredholm det n=100", ts, tp, ser == par);
  }

  {
    EnsembleSpec spec;
    spec.beta = 1;
    spec.n = 200;
    spec.k = 4;
    spec.replicates = 4000;
    spec.master_seed = 42;
    SampleBatch a, b;
    double ts = time_ms([&] { a = sample_gaussian(spec, Exec::Serial); });
    double tp = time_ms([&] { b = sample_gaussian(spec, Exec::Parallel); });
    row("GOE tridiag N=200 x4000", ts, tp, a.rows == b.rows);
  }

  {
    WishartSpec ws;
    ws.p = 100;
    ws.n = 100;
    ws.k = 3;
    ws.replicates = 500;
    ws.master_seed = 42;
    SampleBatch a, b;
    double ts = time_ms([&] { a = sample_wishart(ws, Exec::Serial); });
    double tp = time_ms([&] { b = sample_wishart(ws, Exec::Parallel); });
    row("Wishart 100x100 x500", ts, tp, a.rows == b.rows);
  }

  {
    StateCache cache(SolverConfig{});
    build_table(1, 4, cache.base().grid, cache, Exec::Serial);  // warm the state cache
    DistributionTable a, b;
    double ts = time_ms([&] { a = build_table(1, 4, cache.base().grid, cache, Exec::Serial); });
    double tp = time_ms([&] { b = build_table(1, 4, cache.base().grid, cache, Exec::Parallel); });
    row("F1 table m<=4, 1601 pts", ts, tp, a.cdf == b.cdf && a.pdf == b.pdf);
  }
  return 0;
}
