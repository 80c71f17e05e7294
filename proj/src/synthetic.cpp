#include "actgeo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace actgeo {

Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

namespace {

double signal_scale(const SyntheticSnapshotSpec& spec, int layer, PositionTag pos) {
  if (!spec.signal_layers.empty() &&
      std::find(spec.signal_layers.begin(), spec.signal_layers.end(), layer) ==
          spec.signal_layers.end()) {
    return 0.0;
  }
  if (spec.ramp_with_prompt_percent) {
    const auto p = pos.prompt_percent();
    return p ? *p / 100.0 : 1.0;
  }
  if (spec.signal_positions.empty()) return 1.0;
  return std::find(spec.signal_positions.begin(), spec.signal_positions.end(), pos) !=
                 spec.signal_positions.end()
             ? 1.0
             : 0.0;
}

std::string padded_id(const char* prefix, int i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s-%05d", prefix, i);
  return buf;
}

}  // namespace

SyntheticStore generate_synthetic_snapshot(const SyntheticSnapshotSpec& spec) {
  const int d = spec.hidden_dim;
  if (d <= 0 || spec.n_per_class <= 0 || spec.n_layers <= 0) {
    throw std::invalid_argument("hidden_dim, n_per_class and n_layers must be positive");
  }
  if (static_cast<int>(spec.covariance_spectrum.size()) > d) {
    throw std::invalid_argument("covariance spectrum longer than hidden_dim");
  }
  if (std::any_of(spec.covariance_spectrum.begin(), spec.covariance_spectrum.end(),
                  [](double v) { return !(v >= 0.0) || !std::isfinite(v); })) {
    throw std::invalid_argument("covariance spectrum must be finite and non-negative");
  }
  if (spec.shared_fraction < 0.0 || spec.shared_fraction > 1.0) {
    throw std::invalid_argument("shared_fraction must be in [0, 1]");
  }
  if (spec.positions.empty()) throw std::invalid_argument("at least one position required");

  Rng rng(spec.seed);
  Eigen::VectorXd sd = Eigen::VectorXd::Zero(d);
  if (spec.covariance_spectrum.empty()) {
    sd.setOnes();
  } else {
    for (std::size_t i = 0; i < spec.covariance_spectrum.size(); ++i) {
      sd(static_cast<Eigen::Index>(i)) = std::sqrt(spec.covariance_spectrum[i]);
    }
  }
  const Eigen::MatrixXd basis = random_orthogonal(d, rng);
  Eigen::VectorXd direction(d);
  for (int j = 0; j < d; ++j) direction(j) = rng.normal();
  direction.normalize();

  SyntheticStore out;
  out.class_direction = direction;
  out.manifest.dataset_name = spec.dataset_name;
  out.manifest.hidden_dim = d;
  out.manifest.n_layers = spec.n_layers;

  const double shared = std::sqrt(spec.shared_fraction);
  const double fresh = std::sqrt(1.0 - spec.shared_fraction);
  const int n_total = 2 * spec.n_per_class;
  Eigen::VectorXd base(d), z(d);
  for (int i = 0; i < n_total; ++i) {
    const bool solved = i % 2 == 0;
    RecordMeta meta;
    meta.record_id = padded_id("syn", i);
    meta.label = solved ? Label::solved : Label::unsolved;
    const auto& domains = spec.domains;
    meta.domain_tag = domains.empty() ? "numerical" : domains[(i / 2) % domains.size()];
    const double tokens = std::round(spec.mean_token_count + spec.token_count_sd * rng.normal());
    meta.token_count = std::max(1, static_cast<int>(tokens));
    meta.prompt_text = "Synthetic problem " + std::to_string(i) + ".";
    out.manifest.records.push_back(meta);

    for (int j = 0; j < d; ++j) base(j) = rng.normal();
    for (int layer = 0; layer < spec.n_layers; ++layer) {
      for (const auto& pos : spec.positions) {
        for (int j = 0; j < d; ++j) z(j) = shared * base(j) + fresh * rng.normal();
        const double half = 0.5 * spec.class_mean_separation * signal_scale(spec, layer, pos);
        const Eigen::VectorXd x =
            basis * sd.cwiseProduct(z) + (solved ? half : -half) * direction;
        ActivationRecord rec;
        rec.record_id = meta.record_id;
        rec.layer_index = layer;
        rec.position = pos;
        rec.vector.resize(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) rec.vector[static_cast<std::size_t>(j)] = static_cast<float>(x(j));
        out.records.emplace_back(std::move(rec));
      }
    }
  }
  return out;
}

namespace {

void check_trace_spec(const SyntheticTraceSpec& spec) {
  if (spec.hidden_dim <= 0 || spec.assess_rank <= 0 || spec.exec_rank <= 0) {
    throw std::invalid_argument("hidden_dim and ranks must be positive");
  }
  if (spec.assess_rank > spec.hidden_dim || spec.exec_rank > spec.hidden_dim ||
      spec.assess_rank + spec.exec_rank > spec.hidden_dim) {
    throw std::invalid_argument("assess_rank + exec_rank exceeds hidden_dim");
  }
  if (spec.prompt_len <= 0 || spec.gen_len <= 0) {
    throw std::invalid_argument("prompt_len and gen_len must be positive");
  }
  if (!(spec.noise >= 0.0)) throw std::invalid_argument("noise must be >= 0");
}

SyntheticTrace sample_trace(const SyntheticTraceSpec& spec, const Eigen::MatrixXd& q,
                            Rng& rng) {
  const int d = spec.hidden_dim;
  SyntheticTrace out;
  out.assess_basis = q.leftCols(spec.assess_rank);
  out.exec_basis = q.middleCols(spec.assess_rank, spec.exec_rank);
  const int n = spec.prompt_len + spec.gen_len;
  TraceRecord& t = out.trace;
  t.record_id = spec.record_id;
  t.layer_index = spec.layer_index;
  t.cot_start = static_cast<std::uint32_t>(spec.prompt_len);
  t.hidden_dim = d;
  t.states.resize(static_cast<std::size_t>(n) * d);
  for (int step = 0; step < n; ++step) {
    const Eigen::MatrixXd& b = step < spec.prompt_len ? out.assess_basis : out.exec_basis;
    Eigen::VectorXd z(b.cols());
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
    Eigen::VectorXd x = b * z;
    if (spec.noise > 0.0) {
      for (int j = 0; j < d; ++j) x(j) += spec.noise * rng.normal();
    }
    for (int j = 0; j < d; ++j) {
      t.states[static_cast<std::size_t>(step) * d + j] = static_cast<float>(x(j));
    }
  }
  return out;
}

}  // namespace

SyntheticTrace generate_synthetic_trace(const SyntheticTraceSpec& spec) {
  check_trace_spec(spec);
  Rng basis_rng(spec.basis_seed.value_or(spec.seed));
  const Eigen::MatrixXd q = random_orthogonal(spec.hidden_dim, basis_rng);
  Rng rng(derive_seed(spec.seed, 1));
  return sample_trace(spec, q, rng);
}

SyntheticStore generate_synthetic_trace_store(const SyntheticTraceSpec& spec, int n_traces) {
  check_trace_spec(spec);
  if (n_traces <= 0) throw std::invalid_argument("n_traces must be positive");
  Rng basis_rng(spec.basis_seed.value_or(spec.seed));
  const Eigen::MatrixXd q = random_orthogonal(spec.hidden_dim, basis_rng);

  SyntheticStore out;
  out.manifest.dataset_name = "synthetic-traces";
  out.manifest.hidden_dim = spec.hidden_dim;
  out.manifest.n_layers = spec.layer_index + 1;
  for (int i = 0; i < n_traces; ++i) {
    SyntheticTraceSpec s = spec;
    s.record_id = padded_id("trace", i);
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i) + 1));
    SyntheticTrace tr = sample_trace(s, q, rng);
    RecordMeta meta;
    meta.record_id = s.record_id;
    meta.label = i % 2 == 0 ? Label::solved : Label::unsolved;
    meta.domain_tag = "numerical";
    meta.token_count = spec.prompt_len;
    out.manifest.records.push_back(meta);
    out.records.emplace_back(std::move(tr.trace));
  }
  out.class_direction = Eigen::VectorXd::Zero(spec.hidden_dim);
  return out;
}

}  // namespace actgeo
