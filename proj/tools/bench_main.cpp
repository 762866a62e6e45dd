// Benchmark: serial reference fill vs the OpenMP fill, and the reduced
// sampler vs full-matrix assembly, verifying identical estimates where the
// contract promises them.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "qspeckle/io.hpp"
#include "qspeckle/montecarlo.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using qspeckle::EnsembleKind;
using qspeckle::EnsembleSpec;
using qspeckle::InputState;
using qspeckle::SamplerPath;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct FillTiming {
  double seconds = 0.0;
  qspeckle::RealizationTable table;
};

FillTiming timed_fill(const EnsembleSpec& spec, bool parallel, SamplerPath path) {
  const auto pairs = qspeckle::default_probe_pairs(spec.n_modes, 0);
  const auto t0 = std::chrono::steady_clock::now();
  FillTiming out;
  out.table = qspeckle::fill_realizations(spec, 0, pairs, parallel, path);
  out.seconds = seconds_since(t0);
  return out;
}

void report(const char* label, const FillTiming& timing, long long realizations) {
  std::printf("%-34s %8.3f s   %10.0f realizations/s\n", label, timing.seconds,
              realizations / std::max(timing.seconds, 1e-9));
}

}  // namespace

int main(int argc, char** argv) {
  long long realizations = 4000;
  int n_modes = 32;
  if (argc > 1) realizations = std::atoll(argv[1]);
  if (argc > 2) n_modes = std::atoi(argv[2]);

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n");
#endif

  EnsembleSpec spec;
  spec.n_modes = n_modes;
  spec.ell_over_L = 0.25;
  spec.kind = EnsembleKind::IndependentTau;
  spec.realizations = realizations;
  spec.master_seed = 99;

  std::printf("\nindependent-tau, N=%d, %lld realizations\n", n_modes, realizations);
  const auto serial_reduced = timed_fill(spec, /*parallel=*/false, SamplerPath::Auto);
  report("serial fill, reduced sampler", serial_reduced, realizations);
  const auto parallel_reduced = timed_fill(spec, /*parallel=*/true, SamplerPath::Auto);
  report("parallel fill, reduced sampler", parallel_reduced, realizations);
  const auto serial_full = timed_fill(spec, /*parallel=*/false, SamplerPath::FullMatrix);
  report("serial fill, full matrices", serial_full, realizations);
  const auto parallel_full = timed_fill(spec, /*parallel=*/true, SamplerPath::FullMatrix);
  report("parallel fill, full matrices", parallel_full, realizations);

  // contract check: serial and parallel fills give bit-identical estimates
  const InputState state = InputState::thermal(1.0);
  const std::string serial_json =
      qspeckle::estimates_to_json(qspeckle::reduce_realizations(serial_reduced.table, state));
  const std::string parallel_json =
      qspeckle::estimates_to_json(qspeckle::reduce_realizations(parallel_reduced.table, state));
  const bool identical = serial_json == parallel_json;
  std::printf("\nserial vs parallel estimates: %s\n",
              identical ? "bit-identical" : "MISMATCH");

  EnsembleSpec slices = spec;
  slices.kind = EnsembleKind::SliceComposition;
  slices.realizations = std::max<long long>(realizations / 20, 50);
  std::printf("\nslice-composition, N=%d, %lld realizations (includes calibration)\n",
              slices.n_modes, slices.realizations);
  const auto slice_serial = timed_fill(slices, /*parallel=*/false, SamplerPath::Auto);
  report("serial fill", slice_serial, slices.realizations);
  const auto slice_parallel = timed_fill(slices, /*parallel=*/true, SamplerPath::Auto);
  report("parallel fill (calibration warm)", slice_parallel, slices.realizations);

  return identical ? 0 : 1;
}
