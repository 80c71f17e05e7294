#include "actgeo/store.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace actgeo {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'A', 'C', 'T', 'B'};
constexpr std::uint16_t kVersion = 1;
constexpr const char* kManifestName = "manifest.json";
constexpr const char* kLockName = ".lock";

// ---- little-endian byte IO ----

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
  }
}

void put_floats(std::string& out, std::span<const float> values) {
  for (float f : values) put_le(out, std::bit_cast<std::uint32_t>(f));
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) return false;
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
  }
  value = static_cast<T>(u);
  return true;
}

std::uint32_t crc_of(const unsigned char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t crc_of_floats(std::span<const float> values) {
  std::string bytes;
  bytes.reserve(values.size() * 4);
  put_floats(bytes, values);
  return crc_of(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
}

std::string snapshot_file_name(int layer) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "layer_%03d.actb", layer);
  return buf;
}

std::string trace_file_name(int layer) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "traces_layer_%03d.actb", layer);
  return buf;
}

// Parses "layer_007.actb" / "traces_layer_007.actb".
std::optional<std::pair<bool, int>> parse_file_name(const std::string& name) {
  std::string_view v = name;
  bool trace = false;
  if (v.starts_with("traces_")) {
    trace = true;
    v.remove_prefix(7);
  }
  if (!v.starts_with("layer_") || !v.ends_with(".actb")) return std::nullopt;
  v.remove_prefix(6);
  v.remove_suffix(5);
  int layer = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), layer);
  if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
  return std::make_pair(trace, layer);
}

bool all_finite(std::span<const float> values) {
  return std::all_of(values.begin(), values.end(), [](float f) { return std::isfinite(f); });
}

class StoreLock {
 public:
  explicit StoreLock(const fs::path& dir) : path_(dir / kLockName) {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST) {
        throw StoreError(StoreError::Kind::locked, "",
                         "store is locked by another writer: " + path_.string());
      }
      throw StoreError(StoreError::Kind::io, "",
                       "cannot create lock file " + path_.string() + ": " + std::strerror(errno));
    }
  }
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;
  ~StoreLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }

 private:
  fs::path path_;
  int fd_ = -1;
};

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw StoreError(StoreError::Kind::io, "", "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string& record_id_of(const StoredRecord& r) {
  return std::visit([](const auto& rec) -> const std::string& { return rec.record_id; }, r);
}

int layer_of(const StoredRecord& r) {
  return std::visit([](const auto& rec) { return rec.layer_index; }, r);
}

}  // namespace

// ---- labels and tags ----

std::string_view to_string(Label label) {
  return label == Label::solved ? "solved" : "unsolved";
}

Label parse_label(std::string_view text) {
  if (text == "solved") return Label::solved;
  if (text == "unsolved") return Label::unsolved;
  throw DataError("invalid label '" + std::string(text) + "' (expected solved|unsolved)");
}

PositionTag PositionTag::custom(int percent) {
  if (percent < 0 || percent > 100) {
    throw std::invalid_argument("custom position percent must be in [0, 100]");
  }
  return {Kind::custom, static_cast<std::uint8_t>(percent)};
}

std::string PositionTag::to_string() const {
  switch (kind) {
    case Kind::pct10: return "pct10";
    case Kind::pct50: return "pct50";
    case Kind::last_input: return "last_input";
    case Kind::eos: return "eos";
    case Kind::custom: return "custom:" + std::to_string(percent);
  }
  return "?";
}

PositionTag PositionTag::parse(std::string_view text) {
  if (text == "pct10") return pct10();
  if (text == "pct50") return pct50();
  if (text == "last_input") return last_input();
  if (text == "eos") return eos();
  if (text.starts_with("custom:")) {
    text.remove_prefix(7);
    int p = -1;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    if (ec == std::errc() && ptr == text.data() + text.size() && p >= 0 && p <= 100) {
      return custom(p);
    }
  }
  throw DataError("invalid position tag '" + std::string(text) + "'");
}

std::optional<int> PositionTag::prompt_percent() const {
  switch (kind) {
    case Kind::pct10: return 10;
    case Kind::pct50: return 50;
    case Kind::last_input: return 100;
    case Kind::custom: return percent;
    case Kind::eos: return std::nullopt;
  }
  return std::nullopt;
}

// ---- manifest ----

const RecordMeta* DatasetManifest::find(std::string_view record_id) const {
  for (const auto& r : records) {
    if (r.record_id == record_id) return &r;
  }
  return nullptr;
}

std::size_t DatasetManifest::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [&](const RecordMeta& r) { return r.label == label; }));
}

Eigen::MatrixXd TraceRecord::matrix() const {
  const auto n = static_cast<Eigen::Index>(n_states());
  Eigen::MatrixXd m(n, hidden_dim);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (int j = 0; j < hidden_dim; ++j) {
      m(t, j) = states[static_cast<std::size_t>(t) * hidden_dim + j];
    }
  }
  return m;
}

StoreError::StoreError(Kind kind, std::string record_id, const std::string& message)
    : DataError(record_id.empty() ? message : "record '" + record_id + "': " + message),
      kind_(kind),
      record_id_(std::move(record_id)) {}

void validate_manifest(const DatasetManifest& manifest) {
  using K = StoreError::Kind;
  if (manifest.hidden_dim <= 0) {
    throw StoreError(K::corrupt_manifest, "", "hidden_dim must be > 0");
  }
  if (manifest.n_layers <= 0) {
    throw StoreError(K::corrupt_manifest, "", "n_layers must be > 0");
  }
  if (manifest.n_layers > 0xFFFF) {
    throw StoreError(K::corrupt_manifest, "", "n_layers exceeds the u16 layer field");
  }
  std::set<std::string_view> seen;
  for (const auto& r : manifest.records) {
    if (r.record_id.empty() || r.record_id.size() > 0xFFFF) {
      throw StoreError(K::invalid_record, r.record_id, "record_id length must be in [1, 65535]");
    }
    if (!seen.insert(r.record_id).second) {
      throw StoreError(K::duplicate_id, r.record_id, "duplicate record_id in manifest");
    }
    if (r.token_count < 1) {
      throw StoreError(K::invalid_record, r.record_id, "token_count must be >= 1");
    }
  }
}

void validate_record(const DatasetManifest& manifest, const StoredRecord& record) {
  using K = StoreError::Kind;
  const std::string& id = record_id_of(record);
  if (manifest.find(id) == nullptr) {
    throw StoreError(K::unknown_id, id, "record_id not present in manifest");
  }
  const int layer = layer_of(record);
  if (layer < 0 || layer >= manifest.n_layers) {
    throw StoreError(K::invalid_record, id,
                     "layer " + std::to_string(layer) + " outside [0, n_layers)");
  }
  if (const auto* a = std::get_if<ActivationRecord>(&record)) {
    if (a->vector.size() != static_cast<std::size_t>(manifest.hidden_dim)) {
      throw StoreError(K::dimension_mismatch, id,
                       "vector length " + std::to_string(a->vector.size()) +
                           " != hidden_dim " + std::to_string(manifest.hidden_dim));
    }
    if (a->position.kind == PositionTag::Kind::custom && a->position.percent > 100) {
      throw StoreError(K::invalid_record, id, "custom percent > 100");
    }
    if (!all_finite(a->vector)) {
      throw StoreError(K::non_finite, id, "vector contains NaN or Inf");
    }
  } else {
    const auto& t = std::get<TraceRecord>(record);
    if (t.hidden_dim != manifest.hidden_dim ||
        t.states.size() % static_cast<std::size_t>(manifest.hidden_dim) != 0) {
      throw StoreError(K::dimension_mismatch, id, "trace state length does not match hidden_dim");
    }
    const std::size_t n = t.n_states();
    if (!(t.cot_start > 0 && t.cot_start < n)) {
      throw StoreError(K::invalid_record, id, "cot_start must satisfy 0 < cot_start < state count");
    }
    if (!all_finite(t.states)) {
      throw StoreError(K::non_finite, id, "trace contains NaN or Inf");
    }
  }
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json records = json::array();
  for (const auto& r : manifest.records) {
    json j = {{"record_id", r.record_id},
              {"label", std::string(to_string(r.label))},
              {"domain_tag", r.domain_tag},
              {"token_count", r.token_count}};
    if (r.prompt_text) j["prompt_text"] = *r.prompt_text;
    records.push_back(std::move(j));
  }
  json doc = {{"dataset_name", manifest.dataset_name},
              {"hidden_dim", manifest.hidden_dim},
              {"n_layers", manifest.n_layers},
              {"records", std::move(records)}};
  return doc.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    DatasetManifest m;
    m.dataset_name = doc.at("dataset_name").get<std::string>();
    m.hidden_dim = doc.at("hidden_dim").get<int>();
    m.n_layers = doc.at("n_layers").get<int>();
    for (const auto& j : doc.at("records")) {
      RecordMeta r;
      r.record_id = j.at("record_id").get<std::string>();
      r.label = parse_label(j.at("label").get<std::string>());
      r.domain_tag = j.at("domain_tag").get<std::string>();
      r.token_count = j.at("token_count").get<int>();
      if (j.contains("prompt_text") && !j["prompt_text"].is_null()) {
        r.prompt_text = j["prompt_text"].get<std::string>();
      }
      m.records.push_back(std::move(r));
    }
    return m;
  } catch (const json::exception& e) {
    throw StoreError(StoreError::Kind::corrupt_manifest, "",
                     std::string("malformed manifest: ") + e.what());
  }
}

// ---- reading ----

Store Store::open(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw StoreError(StoreError::Kind::io, "", "not a store directory: " + dir.string());
  }
  Store s;
  s.dir_ = dir;
  s.manifest_ = manifest_from_json(read_text_file(dir / kManifestName));
  validate_manifest(s.manifest_);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".actb") {
      s.files_.push_back(entry.path());
    }
  }
  std::sort(s.files_.begin(), s.files_.end());
  // Check every header up front so a corrupt file fails at open.
  for (const auto& f : s.files_) {
    std::ifstream in(f, std::ios::binary);
    char magic[4] = {};
    std::uint16_t version = 0;
    std::uint32_t count = 0;
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
      throw StoreError(StoreError::Kind::corrupt_header, "", "bad magic in " + f.string());
    }
    if (!get_le(in, version) || version != kVersion) {
      throw StoreError(StoreError::Kind::corrupt_header, "",
                       "unsupported version in " + f.string());
    }
    if (!get_le(in, count)) {
      throw StoreError(StoreError::Kind::corrupt_header, "", "truncated header in " + f.string());
    }
  }
  return s;
}

RecordCursor Store::records() const { return RecordCursor(&manifest_, files_); }

RecordCursor Store::records_for_layer(int layer) const {
  std::vector<fs::path> selected;
  for (const auto& f : files_) {
    auto parsed = parse_file_name(f.filename().string());
    if (!parsed || parsed->second == layer) selected.push_back(f);
  }
  return RecordCursor(&manifest_, std::move(selected));
}

std::vector<int> Store::snapshot_layers() const {
  std::set<int> layers;
  for (const auto& f : files_) {
    if (auto p = parse_file_name(f.filename().string()); p && !p->first) layers.insert(p->second);
  }
  return {layers.begin(), layers.end()};
}

std::vector<int> Store::trace_layers() const {
  std::set<int> layers;
  for (const auto& f : files_) {
    if (auto p = parse_file_name(f.filename().string()); p && p->first) layers.insert(p->second);
  }
  return {layers.begin(), layers.end()};
}

RecordCursor::RecordCursor(const DatasetManifest* manifest, std::vector<fs::path> files)
    : manifest_(manifest), files_(std::move(files)) {}
RecordCursor::RecordCursor(RecordCursor&&) noexcept = default;
RecordCursor& RecordCursor::operator=(RecordCursor&&) noexcept = default;
RecordCursor::~RecordCursor() = default;

bool RecordCursor::open_next_file() {
  while (file_index_ < files_.size()) {
    const fs::path& f = files_[file_index_++];
    in_ = std::make_unique<std::ifstream>(f, std::ios::binary);
    char magic[4] = {};
    std::uint16_t version = 0;
    if (!in_->read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
      throw StoreError(StoreError::Kind::corrupt_header, "", "bad magic in " + f.string());
    }
    if (!get_le(*in_, version) || version != kVersion) {
      throw StoreError(StoreError::Kind::corrupt_header, "", "unsupported version in " + f.string());
    }
    if (!get_le(*in_, remaining_)) {
      throw StoreError(StoreError::Kind::corrupt_header, "", "truncated header in " + f.string());
    }
    record_index_ = 0;
    if (remaining_ > 0) return true;
  }
  in_.reset();
  return false;
}

std::optional<StoredRecord> RecordCursor::next() {
  using K = StoreError::Kind;
  while (!in_ || remaining_ == 0) {
    if (in_ && remaining_ == 0) {
      char extra = 0;
      if (in_->read(&extra, 1)) {
        throw StoreError(K::corrupt_header, "",
                         "trailing bytes after last record in " +
                             files_[file_index_ - 1].string());
      }
    }
    if (!open_next_file()) return std::nullopt;
  }
  std::istream& in = *in_;
  const std::string where =
      files_[file_index_ - 1].filename().string() + " #" + std::to_string(record_index_);
  auto truncated = [&](const std::string& id) {
    return StoreError(K::truncated, id.empty() ? where : id,
                      "truncated tensor block in " + files_[file_index_ - 1].string());
  };

  std::uint16_t id_len = 0;
  if (!get_le(in, id_len)) throw truncated("");
  std::string id(id_len, '\0');
  if (!in.read(id.data(), id_len)) throw truncated("");
  std::uint16_t layer = 0;
  std::uint8_t tag = 0, percent = 0, kind = 0;
  if (!get_le(in, layer) || !get_le(in, tag) || !get_le(in, percent) || !get_le(in, kind)) {
    throw truncated(id);
  }
  if (tag > 4 || kind > 1) {
    throw StoreError(K::corrupt_header, id, "invalid tag/kind byte");
  }
  if (percent != 0 && tag != static_cast<std::uint8_t>(PositionTag::Kind::custom)) {
    throw StoreError(K::corrupt_header, id, "nonzero percent byte on a fixed position tag");
  }
  if (auto parsed = parse_file_name(files_[file_index_ - 1].filename().string())) {
    if (parsed->first != (kind == 1) || parsed->second != layer) {
      throw StoreError(K::corrupt_header, id, "record layer/kind disagrees with its file name");
    }
  }
  const auto dim = static_cast<std::size_t>(manifest_->hidden_dim);
  std::size_t n_floats = dim;
  std::uint32_t cot_start = 0, n_states = 0;
  if (kind == 1) {
    if (!get_le(in, cot_start) || !get_le(in, n_states)) throw truncated(id);
    n_floats = dim * n_states;
  }
  std::vector<unsigned char> bytes(n_floats * 4);
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()))) {
    throw truncated(id);
  }
  std::uint32_t stored_crc = 0;
  if (!get_le(in, stored_crc)) throw truncated(id);
  if (crc_of(bytes.data(), bytes.size()) != stored_crc) {
    throw StoreError(K::checksum, id, "CRC32 mismatch on tensor payload");
  }
  std::vector<float> values(n_floats);
  for (std::size_t i = 0; i < n_floats; ++i) {
    std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
    values[i] = std::bit_cast<float>(u);
  }
  --remaining_;
  ++record_index_;

  StoredRecord rec;
  if (kind == 0) {
    ActivationRecord a;
    a.record_id = std::move(id);
    a.layer_index = layer;
    a.position = {static_cast<PositionTag::Kind>(tag), percent};
    a.vector = std::move(values);
    rec = std::move(a);
  } else {
    TraceRecord t;
    t.record_id = std::move(id);
    t.layer_index = layer;
    t.cot_start = cot_start;
    t.hidden_dim = manifest_->hidden_dim;
    t.states = std::move(values);
    rec = std::move(t);
  }
  validate_record(*manifest_, rec);
  return rec;
}

// ---- writing ----

Store write_store(const DatasetManifest& manifest, std::span<const StoredRecord> records,
                  const fs::path& dir) {
  using K = StoreError::Kind;
  validate_manifest(manifest);

  // Validate everything before touching the filesystem.
  std::set<std::tuple<std::string, int, int, int, int>> keys;
  std::map<std::pair<bool, int>, std::vector<const StoredRecord*>> by_file;
  for (const auto& r : records) {
    validate_record(manifest, r);
    const bool trace = std::holds_alternative<TraceRecord>(r);
    int tag = -1, pct = -1;
    if (!trace) {
      const auto& p = std::get<ActivationRecord>(r).position;
      tag = static_cast<int>(p.kind);
      pct = p.percent;
    }
    if (!keys.emplace(record_id_of(r), layer_of(r), trace ? 1 : 0, tag, pct).second) {
      throw StoreError(K::duplicate_id, record_id_of(r),
                       "duplicate record for this layer/position/kind");
    }
    by_file[{trace, layer_of(r)}].push_back(&r);
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw StoreError(K::io, "", "cannot create store directory " + dir.string());
  }
  StoreLock lock(dir);

  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".actb") fs::remove(entry.path());
  }

  auto write_file = [&](const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())) ||
        !out.flush()) {
      throw StoreError(K::io, "", "cannot write " + path.string());
    }
  };

  for (const auto& [key, recs] : by_file) {
    const auto [trace, layer] = key;
    std::string bytes(kMagic, 4);
    put_le(bytes, kVersion);
    put_le(bytes, static_cast<std::uint32_t>(recs.size()));
    for (const StoredRecord* r : recs) {
      const std::string& id = record_id_of(*r);
      put_le(bytes, static_cast<std::uint16_t>(id.size()));
      bytes.append(id);
      put_le(bytes, static_cast<std::uint16_t>(layer));
      if (const auto* a = std::get_if<ActivationRecord>(r)) {
        put_le(bytes, static_cast<std::uint8_t>(a->position.kind));
        put_le(bytes, a->position.percent);
        put_le(bytes, std::uint8_t{0});
        put_floats(bytes, a->vector);
        put_le(bytes, crc_of_floats(a->vector));
      } else {
        const auto& t = std::get<TraceRecord>(*r);
        put_le(bytes, static_cast<std::uint8_t>(PositionTag::Kind::last_input));
        put_le(bytes, std::uint8_t{0});
        put_le(bytes, std::uint8_t{1});
        put_le(bytes, t.cot_start);
        put_le(bytes, static_cast<std::uint32_t>(t.n_states()));
        put_floats(bytes, t.states);
        put_le(bytes, crc_of_floats(t.states));
      }
    }
    write_file(dir / (trace ? trace_file_name(layer) : snapshot_file_name(layer)), bytes);
  }
  write_file(dir / kManifestName, manifest_to_json(manifest));
  return Store::open(dir);
}

std::vector<std::string> validate_store(const fs::path& dir) {
  std::vector<std::string> problems;
  try {
    Store store = Store::open(dir);
    for (const auto& f : store.files()) {
      RecordCursor cursor(&store.manifest(), {f});
      try {
        std::set<std::tuple<std::string, int, int, int, int>> keys;
        while (auto rec = cursor.next()) {
          const bool trace = std::holds_alternative<TraceRecord>(*rec);
          int tag = -1, pct = -1;
          if (!trace) {
            const auto& p = std::get<ActivationRecord>(*rec).position;
            tag = static_cast<int>(p.kind);
            pct = p.percent;
          }
          if (!keys.emplace(record_id_of(*rec), layer_of(*rec), trace, tag, pct).second) {
            problems.push_back(f.filename().string() + ": record '" + record_id_of(*rec) +
                               "': duplicate record");
          }
        }
      } catch (const DataError& e) {
        problems.push_back(f.filename().string() + ": " + e.what());
      }
    }
  } catch (const DataError& e) {
    problems.emplace_back(e.what());
  }
  return problems;
}

// ---- loading helpers ----

SnapshotTable SnapshotTable::subset(Label label) const {
  SnapshotTable out;
  out.layer = layer;
  out.position = position;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (labels[i] == label) rows.push_back(static_cast<Eigen::Index>(i));
  }
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
    out.ids.push_back(ids[rows[r]]);
    out.labels.push_back(labels[rows[r]]);
  }
  return out;
}

SnapshotTable load_snapshots(const Store& store, int layer, PositionTag position) {
  const auto& m = store.manifest();
  std::map<std::string, std::vector<float>> found;
  auto cursor = store.records_for_layer(layer);
  while (auto rec = cursor.next()) {
    const auto* a = std::get_if<ActivationRecord>(&*rec);
    if (a == nullptr || a->layer_index != layer || a->position != position) continue;
    found.emplace(a->record_id, a->vector);
  }
  SnapshotTable t;
  t.layer = layer;
  t.position = position;
  t.X.resize(static_cast<Eigen::Index>(found.size()), m.hidden_dim);
  Eigen::Index row = 0;
  for (const auto& meta : m.records) {
    auto it = found.find(meta.record_id);
    if (it == found.end()) continue;
    for (int j = 0; j < m.hidden_dim; ++j) t.X(row, j) = it->second[static_cast<std::size_t>(j)];
    t.ids.push_back(meta.record_id);
    t.labels.push_back(meta.label);
    ++row;
  }
  return t;
}

std::vector<PositionTag> snapshot_positions(const Store& store, int layer) {
  std::set<PositionTag> tags;
  auto cursor = store.records_for_layer(layer);
  while (auto rec = cursor.next()) {
    if (const auto* a = std::get_if<ActivationRecord>(&*rec); a && a->layer_index == layer) {
      tags.insert(a->position);
    }
  }
  return {tags.begin(), tags.end()};
}

std::vector<TraceRecord> load_traces(const Store& store, std::optional<int> layer) {
  std::vector<TraceRecord> out;
  auto cursor = layer ? store.records_for_layer(*layer) : store.records();
  while (auto rec = cursor.next()) {
    if (auto* t = std::get_if<TraceRecord>(&*rec)) {
      if (!layer || t->layer_index == *layer) out.push_back(std::move(*t));
    }
  }
  return out;
}

std::vector<int> label_vector(std::span<const Label> labels) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (Label l : labels) y.push_back(l == Label::solved ? 1 : 0);
  return y;
}

}  // namespace actgeo
