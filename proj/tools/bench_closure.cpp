// Compares the serial reference closure against the OpenMP kernel on random
// digraphs and reports timings plus an equality check.
#include <chrono>
#include <cstdio>
#include <random>

#include "tdg/closure.hpp"

using namespace tdg;

namespace {

AdjList random_graph(int n, double avg_degree, std::mt19937& rng) {
  AdjList g(n);
  std::uniform_int_distribution<int> pick(0, n - 1);
  int edges = static_cast<int>(n * avg_degree);
  for (int e = 0; e < edges; ++e) g.add_edge(pick(rng), pick(rng));
  return g;
}

template <class F>
double time_ms(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 2000;
  double deg = argc > 2 ? std::atof(argv[2]) : 8.0;
  unsigned seed = argc > 3 ? static_cast<unsigned>(std::atoi(argv[3])) : 42;

  std::mt19937 rng(seed);
  AdjList g = random_graph(n, deg, rng);

  ReachMatrix serial, parallel;
  double ts = time_ms([&] { serial = reach_closure_serial(g); });
  double tp = time_ms([&] { parallel = reach_closure_parallel(g); });

  bool equal = serial.bits == parallel.bits;
  std::printf("n=%d avg_degree=%.1f seed=%u\n", n, deg, seed);
  std::printf("serial   %10.2f ms\n", ts);
  std::printf("parallel %10.2f ms  (speedup %.2fx)\n", tp,
              tp > 0 ? ts / tp : 0.0);
  std::printf("results %s\n", equal ? "identical" : "DIFFER");
  return equal ? 0 : 1;
}
