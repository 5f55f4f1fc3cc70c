#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "betageo/io.hpp"

using namespace betageo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("betageo-io-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("jsonl subjects round trip") {
  TempDir tmp;
  const fs::path file = tmp.path / "subjects.jsonl";
  write_file(file,
             R"({"id": "s1", "label": "a", "samples": [0.1, 0.2, 0.3]})"
             "\n\n"
             R"({"id": "s2", "label": "b", "samples": [0.5, 0.6]})"
             "\n");
  const auto records = io::read_subjects_jsonl(file);
  REQUIRE(records.size() == 2);
  CHECK(records[0].id == "s1");
  CHECK(records[0].label == "a");
  CHECK(records[0].samples == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(records[1].id == "s2");
}

TEST_CASE("jsonl parse errors carry the line number") {
  TempDir tmp;
  const fs::path file = tmp.path / "bad.jsonl";
  write_file(file,
             R"({"id": "s1", "label": "a", "samples": [0.1]})"
             "\n"
             "this is not json\n");
  try {
    io::read_subjects_jsonl(file);
    FAIL("expected ParseError");
  } catch (const io::ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  write_file(file, R"({"id": "s1", "label": "a", "samples": []})" "\n");
  CHECK_THROWS_AS(io::read_subjects_jsonl(file), io::ParseError);
  write_file(file, R"({"id": 7, "label": "a", "samples": [0.1]})" "\n");
  CHECK_THROWS_AS(io::read_subjects_jsonl(file), io::ParseError);
}

TEST_CASE("areas csv becomes a strain subject") {
  TempDir tmp;
  const fs::path file = tmp.path / "p7__diseased.csv";
  write_file(file,
             "cell_id,area_t0,area_t1\n"
             "0,2.0,1.0\n"
             "1,1.0,3.0\n");
  const auto rec = io::read_areas_csv(file);
  CHECK(rec.id == "p7");
  CHECK(rec.label == "diseased");
  REQUIRE(rec.samples.size() == 2);
  CHECK(rec.samples[0] == doctest::Approx(-0.5));
  CHECK(rec.samples[1] == doctest::Approx(2.0));

  write_file(tmp.path / "bad__x.csv", "cell_id,area_t0,area_t1\n0,oops,1\n");
  CHECK_THROWS_AS(io::read_areas_csv(tmp.path / "bad__x.csv"), io::ParseError);
}

TEST_CASE("fitted cohort csv round trips and validates") {
  TempDir tmp;
  const fs::path file = tmp.path / "cohort.csv";
  const std::vector<fit::FittedSubject> subjects{
      {"s1", "a", BetaPoint(2.25, 8.125)},
      {"s2", "b", BetaPoint(0.1234567890123456, 9.87654321)},
  };
  io::write_fitted_cohort_csv(file, subjects);
  const auto loaded = io::read_fitted_cohort_csv(file);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].id == "s1");
  CHECK(loaded[0].point.x() == subjects[0].point.x());
  CHECK(loaded[1].point.x() == subjects[1].point.x());
  CHECK(loaded[1].point.y() == subjects[1].point.y());

  write_file(file, "id,label,x,y\ns1,a,-1.0,2.0\n");
  CHECK_THROWS_AS(io::read_fitted_cohort_csv(file), io::ParseError);
}

TEST_CASE("atomic writes leave no temporary behind") {
  TempDir tmp;
  const fs::path file = tmp.path / "out.txt";
  io::atomic_write_text(file, "payload");
  CHECK(fs::exists(file));
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
  std::ifstream in(file);
  std::string content;
  std::getline(in, content);
  CHECK(content == "payload");
}
