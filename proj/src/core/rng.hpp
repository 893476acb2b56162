#pragma once

#include <cstdint>
#include <random>

namespace horocover {

// Independent, reproducible random stream keyed by (master seed, stream id).
// The engine and its seeding procedure are fully specified by the standard
// library, and the conversion to doubles below is ours, so outputs are
// identical across platforms, runs and worker counts.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

RandomStream seed_streams(std::uint64_t master_seed, std::uint64_t stream_id);

// Stream-id namespaces. Each consumer draws from (purpose, index) so that no
// two consumers ever share a stream.
enum class StreamPurpose : std::uint64_t {
  GeometryChecks = 1,
  SigmaSamples = 2,
  CltSamples = 3,
  CltJitter = 4,
  UlamCells = 5,
  ExperimentPoints = 6,
  WindingOrbit = 7,
  HtopSamples = 8,
  ReconstructPoints = 9,
  TauPoints = 10,
};

constexpr std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t index) {
  return (static_cast<std::uint64_t>(purpose) << 48) | (index & ((std::uint64_t{1} << 48) - 1));
}

}  // namespace horocover
