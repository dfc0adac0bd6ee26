#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

namespace {

const std::string kCli = THERMOFORM_CLI;
const std::string kData = THERMOFORM_DATA;
const std::string kWork = THERMOFORM_WORK;

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const std::string err = kWork + "/stderr_" + std::to_string(counter++) + ".txt";
  const std::string cmd = env + " " + kCli + " " + args + " 2>" + err;
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.err = slurp(err);
  return r;
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
  }
  std::string summary(const std::string& key) const {
    const std::string prefix = "# " + key + ": ";
    for (const auto& c : comments)
      if (c.rfind(prefix, 0) == 0) return c.substr(prefix.size());
    return "";
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) c.comments.push_back(line);
    else if (c.header.empty()) c.header = split(line);
    else c.rows.push_back(split(line));
  }
  return c;
}

// Everything except the manifest line, which carries the timestamp.
std::string without_manifest(const std::string& text) {
  return text.substr(text.find('\n') + 1);
}

}  // namespace

TEST_CASE("ex6.1 gap column matches log(1 + e^-t)") {
  const auto r = run("example ex6.1 --t-max 30");
  REQUIRE(r.status == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 81);
  const auto it = csv.column("t"), ig = csv.column("gap");
  double worst = 0.0;
  for (const auto& row : csv.rows) {
    const double t = std::stod(row[it]);
    worst = std::max(worst, std::abs(std::stod(row[ig]) - std::log1p(std::exp(-t))));
  }
  CHECK(worst < 1e-9);
  CHECK(csv.rows.back()[it] == "30");
}

TEST_CASE("convexity on a constant potential") {
  const auto r = run("convexity --sft " + kData + "/full3.json --potential " + kData + "/constant.json --t-min -5 --t-max 5 --t-steps 11");
  REQUIRE(r.status == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.summary("verdict") == "cohomologous-to-constant");
  REQUIRE(csv.rows.size() == 44);
  for (const auto& row : csv.rows) CHECK(std::stod(row[csv.column("gap")]) == 0.0);
}

TEST_CASE("gap-curve on the ex6.2 preset is sub-exponential") {
  const auto r = run("gap-curve --potential ex6.2 --t-min 1 --t-max 200 --t-steps 16");
  REQUIRE(r.status == 0);
  CHECK(parse_csv(r.out).summary("verdict") == "sub-exponential");
}

TEST_CASE("reruns are identical apart from the manifest") {
  const std::string args = "pressure-curve --sft " + kData + "/golden_mean.json --potential " + kData +
                           "/golden_depth2.json --t-min -10 --t-max 10 --t-steps 41";
  const auto a = run(args, "THERMOFORM_THREADS=1");
  const auto b = run(args, "THERMOFORM_THREADS=4");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(without_manifest(a.out) == without_manifest(b.out));
  const auto s1 = run("splice --len 200000 --seed 5");
  const auto s2 = run("splice --len 200000 --seed 5");
  REQUIRE(s1.status == 0);
  CHECK(without_manifest(s1.out) == without_manifest(s2.out));
}

TEST_CASE("files carry the manifest") {
  const std::string out = kWork + "/curve.json";
  std::remove(out.c_str());
  const auto r = run("pressure-curve --t-steps 5 --format json --seed 3 --out " + out);
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["manifest"]["command"] == "pressure-curve");
  CHECK(j["manifest"]["seed"] == 3);
  CHECK(j["manifest"].contains("version"));
  CHECK(j["manifest"].contains("wall_seconds"));
  CHECK(j["manifest"]["inputs"]["--t-steps"] == "5");
  CHECK(j["rows"].size() == 5);
  CHECK(j["columns"][1] == "pressure");

  const std::string csv_out = kWork + "/entropy.csv";
  REQUIRE(run("entropy --sft golden-mean --out " + csv_out).status == 0);
  CHECK(slurp(csv_out).rfind("# manifest: {", 0) == 0);
}

TEST_CASE("errors exit nonzero with one line") {
  for (const std::string args : {"pressure-curve --sft missing.json", "pressure-curve --t-min 3 --t-max 1",
                                 "pressure-curve --t-steps x", "example nothing", "beta-shift --digits 1,2",
                                 "splice --eta 1e-9"}) {
    const auto r = run(args);
    CHECK_MESSAGE(r.status != 0, args);
    CHECK_MESSAGE(r.err.rfind("error: E_", 0) == 0, args << " -> " << r.err);
    CHECK_MESSAGE(r.err.find('\n') == r.err.size() - 1, args);
  }
}

TEST_CASE("every subcommand runs") {
  for (const std::string& args : std::vector<std::string>{"entropy --sft full3", "asymptote --sft " + kData + "/golden_mean.json --potential " + kData + "/golden_depth2.json",
        "tangent-gap --at 2 --t-steps 9", "gibbs --sft golden-mean --potential " + kData + "/golden_depth2.json --t-steps 5",
        "rothstein --n-seq 2,3,4", "beta-shift --digits 1,1", "beta-shift --beta 2.5", "build-y --b 0.3 --u 01",
        "example ex4.2", "example generic-upper --t-steps 41", "example ex6.2 --t-steps 12",
        "gap-curve --potential " + kData + "/neg_x0.json --t-min 5 --t-max 40 --t-steps 36"}) {
    const auto r = run(args);
    CHECK_MESSAGE(r.status == 0, args << " -> " << r.err);
    CHECK_MESSAGE(r.out.rfind("# manifest: {", 0) == 0, args);
  }
  const auto ex = parse_csv(run("example ex4.2 --values 2,-1,0.5").out);
  for (const auto& row : ex.rows) CHECK(std::stod(row[ex.column("abs_error")]) < 1e-9);
  const auto gu = parse_csv(run("example generic-upper").out);
  CHECK(gu.summary("upper_bound_check") == "pass");
  CHECK(gu.summary("verdict") == "exponential");
  const auto rs = parse_csv(run("rothstein --n-seq 2,3").out);
  REQUIRE(rs.rows.size() == 3);
  CHECK(rs.rows[2][rs.column("word_length")] == "24");
  CHECK(rs.rows[2][rs.column("word_count")] == "64");
}
