#pragma once

// On-disk activation dataset: a directory holding manifest.json plus one or
// more little-endian .actb tensor files.
//
// .actb layout:
//   magic "ACTB" | version u16 (=1) | record count u32
//   per record:
//     id length u16 | id bytes (UTF-8) | layer u16 | position tag u8 |
//     custom percent u8 | kind u8 (0 snapshot, 1 trace) |
//     [trace only: cot_start u32 | state count u32] |
//     float32 payload | CRC32 u32 of the payload bytes

#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "actgeo/errors.hpp"

namespace actgeo {

enum class Label : std::uint8_t { unsolved = 0, solved = 1 };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);

struct PositionTag {
  enum class Kind : std::uint8_t { pct10 = 0, pct50 = 1, last_input = 2, eos = 3, custom = 4 };

  Kind kind = Kind::last_input;
  std::uint8_t percent = 0;  // only meaningful for Kind::custom

  static PositionTag pct10() { return {Kind::pct10, 0}; }
  static PositionTag pct50() { return {Kind::pct50, 0}; }
  static PositionTag last_input() { return {Kind::last_input, 0}; }
  static PositionTag eos() { return {Kind::eos, 0}; }
  static PositionTag custom(int percent);

  // "pct10", "pct50", "last_input", "eos", "custom:37"
  std::string to_string() const;
  static PositionTag parse(std::string_view text);

  // Fraction of the prompt consumed at this locus, in percent. eos has none.
  std::optional<int> prompt_percent() const;

  auto operator<=>(const PositionTag&) const = default;
};

struct RecordMeta {
  std::string record_id;
  Label label = Label::unsolved;
  std::string domain_tag;
  int token_count = 1;
  std::optional<std::string> prompt_text;
};

struct DatasetManifest {
  std::string dataset_name;
  int hidden_dim = 0;
  int n_layers = 0;
  std::vector<RecordMeta> records;

  const RecordMeta* find(std::string_view record_id) const;
  std::size_t count(Label label) const;
};

struct ActivationRecord {
  std::string record_id;
  int layer_index = 0;
  PositionTag position;
  std::vector<float> vector;
};

// States are stored row-major: state t occupies [t*hidden_dim, (t+1)*hidden_dim).
struct TraceRecord {
  std::string record_id;
  int layer_index = 0;
  std::uint32_t cot_start = 0;
  int hidden_dim = 0;
  std::vector<float> states;

  std::size_t n_states() const {
    return hidden_dim > 0 ? states.size() / static_cast<std::size_t>(hidden_dim) : 0;
  }
  std::span<const float> state(std::size_t t) const {
    return {states.data() + t * static_cast<std::size_t>(hidden_dim),
            static_cast<std::size_t>(hidden_dim)};
  }
  // n_states x hidden_dim, upcast to double.
  Eigen::MatrixXd matrix() const;
};

using StoredRecord = std::variant<ActivationRecord, TraceRecord>;

class StoreError : public DataError {
 public:
  enum class Kind {
    corrupt_header,
    corrupt_manifest,
    checksum,
    truncated,
    dimension_mismatch,
    duplicate_id,
    unknown_id,
    non_finite,
    invalid_record,
    io,
    locked,
  };

  StoreError(Kind kind, std::string record_id, const std::string& message);

  Kind kind() const { return kind_; }
  const std::string& record_id() const { return record_id_; }

 private:
  Kind kind_;
  std::string record_id_;
};

// Throws StoreError on the first violated manifest invariant.
void validate_manifest(const DatasetManifest& manifest);
// Throws StoreError if the record is inconsistent with the manifest.
void validate_record(const DatasetManifest& manifest, const StoredRecord& record);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view text);

class RecordCursor;

// An opened store. Immutable after open, so one instance may be shared by
// many threads, each iterating through its own cursor.
class Store {
 public:
  static Store open(const std::filesystem::path& dir);

  const DatasetManifest& manifest() const { return manifest_; }
  const std::filesystem::path& path() const { return dir_; }
  const std::vector<std::filesystem::path>& files() const { return files_; }

  // Streams every record in file order; holds at most one record in memory.
  RecordCursor records() const;
  // Streams only the files holding the given layer.
  RecordCursor records_for_layer(int layer) const;

  // Layers with at least one snapshot file, ascending.
  std::vector<int> snapshot_layers() const;
  // Layers with at least one trace file, ascending.
  std::vector<int> trace_layers() const;

 private:
  std::filesystem::path dir_;
  DatasetManifest manifest_;
  std::vector<std::filesystem::path> files_;
};

class RecordCursor {
 public:
  RecordCursor(const DatasetManifest* manifest, std::vector<std::filesystem::path> files);
  RecordCursor(RecordCursor&&) noexcept;
  RecordCursor& operator=(RecordCursor&&) noexcept;
  ~RecordCursor();

  std::optional<StoredRecord> next();

 private:
  bool open_next_file();

  const DatasetManifest* manifest_;
  std::vector<std::filesystem::path> files_;
  std::size_t file_index_ = 0;
  std::unique_ptr<std::ifstream> in_;
  std::uint32_t remaining_ = 0;
  std::uint32_t record_index_ = 0;
};

// Writes the store; the directory is created if missing and any previous
// manifest.json / .actb content is replaced. A `.lock` file guards against
// concurrent writers for the duration of the call.
Store write_store(const DatasetManifest& manifest, std::span<const StoredRecord> records,
                  const std::filesystem::path& dir);

// Reads the whole store and reports every problem found (empty = valid).
std::vector<std::string> validate_store(const std::filesystem::path& dir);

// Snapshot vectors for one (layer, position) in manifest order.
struct SnapshotTable {
  int layer = 0;
  PositionTag position;
  std::vector<std::string> ids;
  std::vector<Label> labels;
  Eigen::MatrixXd X;  // rows = records

  std::size_t size() const { return ids.size(); }
  // Row subset where label matches.
  SnapshotTable subset(Label label) const;
};

SnapshotTable load_snapshots(const Store& store, int layer, PositionTag position);

// Distinct position tags present at the given layer, ascending.
std::vector<PositionTag> snapshot_positions(const Store& store, int layer);

std::vector<TraceRecord> load_traces(const Store& store, std::optional<int> layer = std::nullopt);

// Labels of a row-aligned table as 0/1 integers (solved = 1).
std::vector<int> label_vector(std::span<const Label> labels);

}  // namespace actgeo
