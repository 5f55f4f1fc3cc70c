#include "betageo/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace betageo::io {

namespace {

using nlohmann::json;

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& file,
                    std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", file, line);
  }
}

}  // namespace

std::vector<fit::SubjectRecord> read_subjects_jsonl(
    const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<fit::SubjectRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), path, line_no);
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("label") ||
        !obj.contains("samples") || !obj["id"].is_string() ||
        !obj["label"].is_string() || !obj["samples"].is_array()) {
      throw ParseError("expected {\"id\": str, \"label\": str, \"samples\": [..]}",
                       path, line_no);
    }
    fit::SubjectRecord rec;
    rec.id = obj["id"].get<std::string>();
    rec.label = obj["label"].get<std::string>();
    for (const auto& v : obj["samples"]) {
      if (!v.is_number()) {
        throw ParseError("samples must be numbers", path, line_no);
      }
      rec.samples.push_back(v.get<double>());
    }
    if (rec.samples.empty()) {
      throw ParseError("samples must be nonempty", path, line_no);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

fit::SubjectRecord read_areas_csv(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<double> a0, a1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line_no == 1 && line.rfind("cell_id", 0) == 0) continue;  // header
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw ParseError("expected cell_id,area_t0,area_t1", path, line_no);
    }
    a0.push_back(parse_double(fields[1], path, line_no));
    a1.push_back(parse_double(fields[2], path, line_no));
  }
  // id and label from `<id>__<label>.csv`
  const std::string stem = path.stem().string();
  const std::size_t sep = stem.find("__");
  fit::SubjectRecord rec;
  rec.id = sep == std::string::npos ? stem : stem.substr(0, sep);
  rec.label = sep == std::string::npos ? "" : stem.substr(sep + 2);
  rec.samples = fit::area_strain(a0, a1);
  return rec;
}

std::vector<fit::SubjectRecord> read_areas_dir(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<fit::SubjectRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) records.push_back(read_areas_csv(f));
  return records;
}

void write_fitted_cohort_csv(const std::filesystem::path& path,
                             const std::vector<fit::FittedSubject>& subjects) {
  std::string out = "id,label,x,y\n";
  for (const auto& s : subjects) {
    out += s.id + "," + s.label + "," + format_double(s.point.x()) + "," +
           format_double(s.point.y()) + "\n";
  }
  atomic_write_text(path, out);
}

std::vector<fit::FittedSubject> read_fitted_cohort_csv(
    const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<fit::FittedSubject> subjects;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line_no == 1 && line.rfind("id,", 0) == 0) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw ParseError("expected id,label,x,y", path, line_no);
    }
    const double x = parse_double(fields[2], path, line_no);
    const double y = parse_double(fields[3], path, line_no);
    if (!(x > 0.0) || !(y > 0.0)) {
      throw ParseError("beta parameters must be positive", path, line_no);
    }
    subjects.push_back({fields[0], fields[1], BetaPoint(x, y)});
  }
  return subjects;
}

void write_exclusions_csv(const std::filesystem::path& path,
                          const std::vector<fit::FitExclusion>& exclusions) {
  std::string out = "id,label,reason\n";
  for (const auto& e : exclusions) {
    std::string reason = e.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out += e.id + "," + e.label + "," + reason + "\n";
  }
  atomic_write_text(path, out);
}

void write_geodesic_csv(const std::filesystem::path& path,
                        const GeodesicPath& path_data) {
  std::string out = "t,x,y,u,v\n";
  for (std::size_t i = 0; i < path_data.times.size(); ++i) {
    out += format_double(path_data.times[i]) + "," +
           format_double(path_data.points[i].x()) + "," +
           format_double(path_data.points[i].y()) + "," +
           format_double(path_data.velocities[i][0]) + "," +
           format_double(path_data.velocities[i][1]) + "\n";
  }
  atomic_write_text(path, out);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace betageo::io
