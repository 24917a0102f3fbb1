#include "simcmp/score_vector.hpp"

#include <fstream>

#include <fmt/format.h>

#include "csv.hpp"
#include "simcmp/error.hpp"

namespace simcmp {

std::vector<double> ScoreVector::values() const {
  std::vector<double> out;
  out.reserve(scored.size());
  for (const auto& r : scored) out.push_back(r.score);
  return out;
}

void write_scores_csv(const ScoreVector& scores, std::ostream& out) {
  out << "id,score\n";
  for (const auto& r : scores.scored) {
    out << detail::escape_field(r.id) << ',' << fmt::format("{}", r.score) << '\n';
  }
}

std::filesystem::path skipped_sidecar_path(const std::filesystem::path& path) {
  auto sidecar = path;
  sidecar += ".skipped";
  return sidecar;
}

void export_scores(const ScoreVector& scores, const std::filesystem::path& path) {
  {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_scores_csv(scores, out);
    if (!out) throw IoError("error writing '" + path.string() + "'");
  }
  const auto sidecar = skipped_sidecar_path(path);
  std::ofstream out(sidecar);
  if (!out) throw IoError("cannot write '" + sidecar.string() + "'");
  for (const auto& id : scores.skipped) out << id << '\n';
  if (!out) throw IoError("error writing '" + sidecar.string() + "'");
}

}  // namespace simcmp
