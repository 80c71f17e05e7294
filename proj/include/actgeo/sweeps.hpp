#pragma once

// Layer and token-position sweeps: k-fold CV accuracy of each probe family
// at every locus.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "actgeo/probes.hpp"
#include "actgeo/store.hpp"

namespace actgeo::probes {

enum class SweepAxis { layer, position };

struct SweepPoint {
  std::string locus;  // layer index or position tag
  Family family = Family::logistic;
  double mean = 0.0;
  double std = 0.0;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::layer;
  std::vector<SweepPoint> points;  // locus-major, families in request order
  // Layer with the highest logistic CV accuracy (lowest index on ties).
  std::optional<int> peak_linear_layer;

  std::string to_json() const;
  // One row per locus, one "mean% ± std" column per family.
  std::string to_text() const;
};

struct SweepOptions {
  std::vector<Family> families{std::begin(kAllFamilies), std::end(kAllFamilies)};
  // Per-family spec; families missing here use ProbeSpec::defaults.
  std::vector<ProbeSpec> specs;
  int k = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct LocusData {
  std::string locus;
  int layer = 0;
  Eigen::MatrixXd X;
  std::vector<int> y;
};

// Throws DataError when loci disagree on hidden_dim.
SweepReport layer_sweep(std::span<const LocusData> layers, const SweepOptions& options);
SweepReport position_sweep(std::span<const LocusData> positions, const SweepOptions& options);

// Store-backed sweeps. layer_sweep uses every snapshot layer at `position`;
// position_sweep uses the given tags (all tags present when empty) at `layer`
// and throws DataError if a record lacks one of them.
SweepReport layer_sweep(const Store& store, PositionTag position, const SweepOptions& options);
SweepReport position_sweep(const Store& store, int layer, std::vector<PositionTag> tags,
                           const SweepOptions& options);

}  // namespace actgeo::probes
