#include "actgeo/sweeps.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actgeo/errors.hpp"
#include "actgeo/random.hpp"
#include "parallel.hpp"

namespace actgeo::probes {

namespace {

ProbeSpec spec_for(Family family, const SweepOptions& options) {
  for (const auto& s : options.specs) {
    if (s.family == family) return s;
  }
  return ProbeSpec::defaults(family);
}

SweepReport run_sweep(SweepAxis axis, std::span<const LocusData> loci, const SweepOptions& options) {
  if (loci.empty()) throw std::invalid_argument("sweep needs at least one locus");
  if (options.families.empty()) throw std::invalid_argument("sweep needs at least one probe family");
  const Eigen::Index d = loci.front().X.cols();
  for (const auto& l : loci) {
    if (l.X.cols() != d) {
      throw DataError("inconsistent hidden_dim across loci: " + loci.front().locus + " has " +
                      std::to_string(d) + ", " + l.locus + " has " + std::to_string(l.X.cols()));
    }
  }

  const std::size_t nf = options.families.size();
  SweepReport report;
  report.axis = axis;
  report.points.resize(loci.size() * nf);
  detail::parallel_for(report.points.size(), options.threads, [&](std::size_t cell) {
    const LocusData& l = loci[cell / nf];
    const Family family = options.families[cell % nf];
    ProbeSpec spec = spec_for(family, options);
    spec.seed = derive_seed(options.seed, static_cast<std::uint64_t>(family));
    // Same folds at every locus so that loci are compared on paired splits.
    const CvResult cv = k_fold_cv(spec, l.X, l.y, options.k, options.seed);
    report.points[cell] = {l.locus, family, cv.mean, cv.std};
  });

  if (axis == SweepAxis::layer) {
    double best = -1.0;
    for (std::size_t i = 0; i < loci.size(); ++i) {
      for (std::size_t f = 0; f < nf; ++f) {
        const auto& p = report.points[i * nf + f];
        if (p.family == Family::logistic && p.mean > best) {
          best = p.mean;
          report.peak_linear_layer = loci[i].layer;
        }
      }
    }
  }
  return report;
}

}  // namespace

SweepReport layer_sweep(std::span<const LocusData> layers, const SweepOptions& options) {
  return run_sweep(SweepAxis::layer, layers, options);
}

SweepReport position_sweep(std::span<const LocusData> positions, const SweepOptions& options) {
  return run_sweep(SweepAxis::position, positions, options);
}

SweepReport layer_sweep(const Store& store, PositionTag position, const SweepOptions& options) {
  std::vector<LocusData> loci;
  for (int layer : store.snapshot_layers()) {
    SnapshotTable t = load_snapshots(store, layer, position);
    if (t.size() == 0) continue;
    loci.push_back({std::to_string(layer), layer, std::move(t.X), label_vector(t.labels)});
  }
  if (loci.empty()) {
    throw DataError("store has no snapshots at position " + position.to_string());
  }
  return layer_sweep(loci, options);
}

SweepReport position_sweep(const Store& store, int layer, std::vector<PositionTag> tags,
                           const SweepOptions& options) {
  if (tags.empty()) tags = snapshot_positions(store, layer);
  if (tags.empty()) throw DataError("no snapshots at layer " + std::to_string(layer));

  std::vector<SnapshotTable> tables;
  std::set<std::string> all_ids;
  for (const auto& tag : tags) {
    tables.push_back(load_snapshots(store, layer, tag));
    if (tables.back().size() == 0) {
      throw DataError("no snapshots at position " + tag.to_string() + " at layer " + std::to_string(layer));
    }
    all_ids.insert(tables.back().ids.begin(), tables.back().ids.end());
  }
  for (const auto& t : tables) {
    if (t.size() == all_ids.size()) continue;
    const std::set<std::string> have(t.ids.begin(), t.ids.end());
    for (const auto& id : all_ids) {
      if (!have.count(id)) {
        throw DataError("record '" + id + "' is missing position tag " + t.position.to_string() +
                        " at layer " + std::to_string(layer));
      }
    }
  }
  std::vector<LocusData> loci;
  for (auto& t : tables) {
    loci.push_back({t.position.to_string(), layer, std::move(t.X), label_vector(t.labels)});
  }
  return position_sweep(loci, options);
}

std::string SweepReport::to_json() const {
  using nlohmann::json;
  json pts = json::array();
  for (const auto& p : points) {
    pts.push_back({{"locus", p.locus}, {"family", std::string(to_string(p.family))},
                   {"mean", p.mean}, {"std", p.std}});
  }
  json j = {{"axis", axis == SweepAxis::layer ? "layer" : "position"}, {"points", std::move(pts)}};
  j["peak_linear_layer"] = peak_linear_layer ? json(*peak_linear_layer) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string SweepReport::to_text() const {
  std::vector<std::string> loci;
  std::vector<Family> families;
  std::map<std::pair<std::string, Family>, const SweepPoint*> cell;
  for (const auto& p : points) {
    if (std::find(loci.begin(), loci.end(), p.locus) == loci.end()) loci.push_back(p.locus);
    if (std::find(families.begin(), families.end(), p.family) == families.end()) families.push_back(p.family);
    cell[{p.locus, p.family}] = &p;
  }
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-14s", axis == SweepAxis::layer ? "layer" : "position");
  os << buf;
  for (Family f : families) {
    std::snprintf(buf, sizeof buf, " %24s", std::string(to_string(f)).c_str());
    os << buf;
  }
  os << "\n";
  for (const auto& l : loci) {
    std::snprintf(buf, sizeof buf, "%-14s", l.c_str());
    os << buf;
    for (Family f : families) {
      auto it = cell.find({l, f});
      if (it == cell.end()) {
        std::snprintf(buf, sizeof buf, " %24s", "-");
      } else {
        std::snprintf(buf, sizeof buf, " %16.1f%% ± %4.1f", 100.0 * it->second->mean,
                      100.0 * it->second->std);
      }
      os << buf;
    }
    os << "\n";
  }
  if (peak_linear_layer) os << "peak linear layer: " << *peak_linear_layer << "\n";
  return os.str();
}

}  // namespace actgeo::probes
