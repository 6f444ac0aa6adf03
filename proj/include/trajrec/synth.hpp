#ifndef TRAJREC_SYNTH_HPP_
#define TRAJREC_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trajrec/geo.hpp"
#include "trajrec/ingest.hpp"

namespace trajrec {

enum class MobilityProfile {
  kStatic,      // each user stays in one cell
  kCommuter,    // home at night, one fixed daily home -> work -> home round trip
  kRandomWalk,  // lazy random walk over neighbouring cells
};

const char* to_string(MobilityProfile profile);
MobilityProfile parse_profile(std::string_view name);

struct SynthConfig {
  std::size_t users = 10;
  std::size_t days = 7;
  std::int64_t interval_seconds = 600;
  std::size_t rows = 20;
  std::size_t cols = 20;
  double cell_side_m = 1'000.0;
  GeoPoint southwest{39.8, 116.2};
  Timestamp start = 1'224'460'800;  // 2008-10-20 00:00 UTC
  MobilityProfile profile = MobilityProfile::kCommuter;
  // Probability that a user is displaced to a neighbouring cell at a step.
  double noise = 0.0;
  std::uint64_t seed = 1;
};

struct SynthDataset {
  GridSpec grid;
  TemporalSpec temporal;
  std::vector<DiscreteTrajectory> truth;
};

// Deterministic for a given config on every platform. Throws InputError for
// out-of-range parameters.
SynthDataset synthesize(const SynthConfig& config);

// One GPS point per step at the center of the user's cell.
std::vector<RawTrajectory> to_raw(const SynthDataset& dataset);

}  // namespace trajrec

#endif  // TRAJREC_SYNTH_HPP_
