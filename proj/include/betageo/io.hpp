#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "betageo/fit.hpp"
#include "betageo/manifold.hpp"

namespace betageo::io {

/// Input file could not be parsed; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, const std::filesystem::path& file,
             std::size_t line)
      : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + msg),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// JSON-lines cohort: one {"id": str, "label": str, "samples": [..]} per line.
std::vector<fit::SubjectRecord> read_subjects_jsonl(
    const std::filesystem::path& path);

/// Mesh-areas CSV `cell_id,area_t0,area_t1` for one subject; samples become
/// the per-cell area strain. id/label are taken from the file name
/// `<id>__<label>.csv`.
fit::SubjectRecord read_areas_csv(const std::filesystem::path& path);

/// All `*.csv` area files of a directory, sorted by file name.
std::vector<fit::SubjectRecord> read_areas_dir(
    const std::filesystem::path& dir);

/// Fitted cohort CSV `id,label,x,y`.
void write_fitted_cohort_csv(const std::filesystem::path& path,
                             const std::vector<fit::FittedSubject>& subjects);
std::vector<fit::FittedSubject> read_fitted_cohort_csv(
    const std::filesystem::path& path);

/// Exclusion report CSV `id,label,reason`.
void write_exclusions_csv(const std::filesystem::path& path,
                          const std::vector<fit::FitExclusion>& exclusions);

/// Geodesic CSV `t,x,y,u,v`.
void write_geodesic_csv(const std::filesystem::path& path,
                        const GeodesicPath& path_data);

/// Serialize a double with full round-trip precision (deterministic output).
std::string format_double(double v);

/// Write via a temporary file in the same directory, then rename.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace betageo::io
