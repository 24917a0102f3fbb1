#include "simcmp/contextual.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "simcmp/error.hpp"

namespace simcmp::contextual {

namespace {

constexpr std::string_view kMagic = "CEMB1\n";

void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_f32le(std::string& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((bits >> shift) & 0xFF));
  }
}

// Sequential little-endian reader that reports the offset of a short read.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::size_t offset, const std::string& source)
      : bytes_(bytes), pos_(offset), source_(source) {}

  std::size_t offset() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

  std::uint16_t u16(const char* what) {
    need(2, what);
    const auto lo = static_cast<unsigned char>(bytes_[pos_]);
    const auto hi = static_cast<unsigned char>(bytes_[pos_ + 1]);
    pos_ += 2;
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  float f32(const char* what) {
    need(4, what);
    std::uint32_t bits = 0;
    for (int k = 0; k < 4; ++k) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
    }
    pos_ += 4;
    return std::bit_cast<float>(bits);
  }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(fmt::format("{}: truncated record at byte offset {} (reading {})",
                                    source_, pos_, what));
    }
  }

  std::string_view bytes_;
  std::size_t pos_;
  const std::string& source_;
};

template <typename T>
double cosine_impl(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) {
    throw DimensionError(fmt::format("cosine of vectors with {} and {} components", u.size(),
                                     v.size()));
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double a = u[k];
    const double b = v[k];
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

void check_coverage(const corpus::Dataset& dataset, const ScoreVector& out,
                    const std::string& provider) {
  if (2 * out.scored.size() < dataset.size()) {
    throw CoverageError(fmt::format(
        "provider '{}' covers {} of {} records of '{}'; check that the file was exported "
        "from this dataset",
        provider, out.scored.size(), dataset.size(), dataset.name));
  }
}

}  // namespace

// --- EmbeddingStore ------------------------------------------------------

EmbeddingStore::EmbeddingStore(std::string provider, std::size_t dim)
    : provider_(std::move(provider)), dim_(dim) {
  if (provider_.empty()) throw FormatError("embedding provider name is empty");
  if (dim_ == 0) throw FormatError("embedding dim must be positive");
}

const EmbeddingStore::Entry* EmbeddingStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

void EmbeddingStore::add(std::string id, std::vector<float> first, std::vector<float> second) {
  if (index_.count(id) != 0) throw FormatError("duplicate embedding id '" + id + "'");
  if (id.size() > 0xFFFF) throw FormatError("embedding id longer than 65535 bytes");
  if (first.size() != dim_ || second.size() != dim_) {
    throw FormatError(fmt::format("embedding '{}' does not have {} components", id, dim_));
  }
  for (const auto* vec : {&first, &second}) {
    for (float x : *vec) {
      if (!std::isfinite(x)) throw FormatError("embedding '" + id + "' is not finite");
    }
  }
  index_.emplace(id, entries_.size());
  entries_.push_back({std::move(id), std::move(first), std::move(second)});
}

std::string encode_embeddings(const EmbeddingStore& store) {
  std::string out(kMagic);
  out += fmt::format("{{\"provider\": {}, \"dim\": {}, \"count\": {}}}\n",
                     nlohmann::json(store.provider()).dump(), store.dim(), store.size());
  for (const auto& e : store.entries()) {
    put_u16le(out, static_cast<std::uint16_t>(e.id.size()));
    out += e.id;
    for (float x : e.first) put_f32le(out, x);
    for (float x : e.second) put_f32le(out, x);
  }
  return out;
}

EmbeddingStore decode_embeddings(std::string_view bytes, const std::string& source) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError(source + ": bad magic, not a CEMB1 file");
  }
  const auto header_end = bytes.find('\n', kMagic.size());
  if (header_end == std::string_view::npos) {
    throw FormatError(source + ": header line is not terminated");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kMagic.size(), header_end - kMagic.size()));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(source + ": header is not valid JSON: " + e.what());
  }
  if (!header.is_object() || !header.contains("provider") || !header["provider"].is_string() ||
      !header.contains("dim") || !header["dim"].is_number_integer() ||
      !header.contains("count") || !header["count"].is_number_integer()) {
    throw FormatError(source + ": header needs string 'provider' and integer 'dim', 'count'");
  }
  const auto dim = header["dim"].get<std::int64_t>();
  const auto count = header["count"].get<std::int64_t>();
  if (dim <= 0) throw FormatError(source + ": dim must be positive, got " + std::to_string(dim));
  if (count < 0) throw FormatError(source + ": negative count");
  const auto provider = header["provider"].get<std::string>();
  if (provider.empty()) throw FormatError(source + ": provider name is empty");

  EmbeddingStore store(provider, static_cast<std::size_t>(dim));
  ByteReader reader(bytes, header_end + 1, source);
  for (std::int64_t r = 0; r < count; ++r) {
    const std::size_t record_offset = reader.offset();
    const auto id_len = reader.u16("id length");
    std::string id(reader.take(id_len, "id"));
    std::vector<float> first(static_cast<std::size_t>(dim));
    std::vector<float> second(static_cast<std::size_t>(dim));
    for (auto& x : first) x = reader.f32("sentence 1 vector");
    for (auto& x : second) x = reader.f32("sentence 2 vector");
    try {
      store.add(std::move(id), std::move(first), std::move(second));
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("{}: record at byte offset {}: {}", source, record_offset,
                                    e.what()));
    }
  }
  if (!reader.at_end()) {
    throw FormatError(fmt::format("{}: trailing bytes after {} records at byte offset {}", source,
                                  count, reader.offset()));
  }
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path.string());
  return decode_embeddings(bytes, path.string());
}

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const auto bytes = encode_embeddings(store);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

// --- DirectScoreStore ----------------------------------------------------

DirectScoreStore::DirectScoreStore(std::string provider) : provider_(std::move(provider)) {
  if (provider_.empty()) throw FormatError("score provider name is empty");
}

const double* DirectScoreStore::find(std::string_view id) const {
  auto it = scores_.find(std::string(id));
  return it == scores_.end() ? nullptr : &it->second;
}

void DirectScoreStore::add(std::string id, double score) {
  if (!std::isfinite(score)) throw FormatError("score for '" + id + "' is not finite");
  if (!scores_.emplace(id, score).second) throw FormatError("duplicate score id '" + id + "'");
  order_.push_back(std::move(id));
}

DirectScoreStore load_direct_scores(const std::filesystem::path& path) {
  const std::string source = path.string();
  const auto text = detail::read_file(source);
  constexpr std::string_view kPrefix = "# provider=";
  const auto first_nl = text.find('\n');
  std::string_view first_line(text.data(), first_nl == std::string::npos ? text.size() : first_nl);
  first_line = detail::trim(first_line);
  if (first_line.substr(0, kPrefix.size()) != kPrefix) {
    throw FormatError(source + ":1: expected '# provider=<name>' first line");
  }
  DirectScoreStore store{std::string(detail::trim(first_line.substr(kPrefix.size())))};
  if (first_nl == std::string::npos) return store;

  auto rows = detail::parse_delimited(std::string_view(text).substr(first_nl + 1), ',');
  std::size_t start = 0;
  if (!rows.empty() && rows[0].fields.size() == 2 && detail::trim(rows[0].fields[0]) == "id" &&
      detail::trim(rows[0].fields[1]) == "score") {
    start = 1;
  }
  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto line = rows[r].line + 1;
    const auto& f = rows[r].fields;
    double score = 0.0;
    if (f.size() != 2 || !detail::parse_double(f[1], score)) {
      throw FormatError(fmt::format("{}:{}: expected 'id,score'", source, line));
    }
    try {
      store.add(std::string(detail::trim(f[0])), score);
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("{}:{}: {}", source, line, e.what()));
    }
  }
  return store;
}

void write_direct_scores(const DirectScoreStore& store, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "# provider=" << store.provider() << "\nid,score\n";
  for (const auto& id : store.ids()) {
    out << detail::escape_field(id) << ',' << fmt::format("{}", *store.find(id)) << '\n';
  }
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

// --- scoring ---------------------------------------------------------------

double cosine(std::span<const double> u, std::span<const double> v) { return cosine_impl(u, v); }
double cosine(std::span<const float> u, std::span<const float> v) { return cosine_impl(u, v); }

ScoreVector score_dataset_contextual(const corpus::Dataset& dataset, const EmbeddingStore& store) {
  ScoreVector out;
  out.dataset_name = dataset.name;
  out.metric_name = store.provider();
  for (const auto& record : dataset.records) {
    const auto* entry = store.find(record.id);
    if (entry == nullptr) {
      out.skipped.push_back(record.id);
      continue;
    }
    out.scored.push_back({record.id, cosine(std::span<const float>(entry->first),
                                            std::span<const float>(entry->second))});
  }
  check_coverage(dataset, out, store.provider());
  return out;
}

ScoreVector score_dataset_contextual(const corpus::Dataset& dataset,
                                     const DirectScoreStore& store) {
  ScoreVector out;
  out.dataset_name = dataset.name;
  out.metric_name = store.provider();
  for (const auto& record : dataset.records) {
    if (const auto* score = store.find(record.id)) {
      out.scored.push_back({record.id, *score});
    } else {
      out.skipped.push_back(record.id);
    }
  }
  check_coverage(dataset, out, store.provider());
  return out;
}

}  // namespace simcmp::contextual
