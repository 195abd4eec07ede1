#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

using namespace twinflip;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
  nlohmann::json doc() const { return nlohmann::json::parse(out); }
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "twinflip");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/twinflip_cli_" + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("coxeter command") {
  auto r = run({"coxeter", "--type", "A2", "--twist", "id"});
  REQUIRE(r.code == 0);
  auto d = r.doc();
  CHECK(d["schema_version"] == 1);
  CHECK(d["pass"] == true);
  CHECK(d["report"]["twisted_involutions"][0]["count"] == 4);
  r = run({"coxeter", "--type", "A3", "--twist", "13"});
  CHECK(r.code == 0);
  CHECK(r.doc()["report"]["twisted_involutions"][0]["count"] == 10);
  CHECK(run({"coxeter", "--type", "A3", "--twist", "12"}).code == 2);
  CHECK(run({"coxeter", "--matrix", temp_file("bad.txt", "2\n1 3\n4 1\n")}).code == 2);
  CHECK(run({"coxeter", "--matrix", "/nonexistent/matrix"}).code == 2);
  CHECK(run({"coxeter", "--type", "A8", "--max-weyl", "100"}).code == 3);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"rgd", "--n", "5", "--q", "3"}).code == 2);
  CHECK(run({"rgd", "--n", "2", "--q", "3", "--threads", "0"}).code == 2);
  CHECK(run({"flip", "--n", "2", "--q", "9", "--form", "quadratic"}).code == 2);
  CHECK(run({"building", "--n", "2", "--q", "9", "--format", "xml"}).code == 2);
}

TEST_CASE("module commands") {
  auto r = run({"rgd", "--n", "2", "--q", "3"});
  CHECK(r.code == 0);
  CHECK(r.doc()["report"]["group_order"] == 48);
  r = run({"building", "--n", "3", "--q", "4"});
  CHECK(r.code == 0);
  CHECK(r.doc()["report"]["flags"] == 105);
  r = run({"flip", "--n", "3", "--q", "9", "--form", "hermitian"});
  CHECK(r.code == 0);
  CHECK(r.doc()["report"]["proper"] == true);
  CHECK(r.doc()["report"]["K"] == "{}");
  r = run({"cosets", "--n", "3", "--q", "4", "--form", "hermitian"});
  CHECK(r.code == 0);
  CHECK(r.doc()["report"]["count"] == 4);
  CHECK(r.doc()["report"]["springer_V"] == 4);
}

TEST_CASE("guards and hypotheses") {
  CHECK(run({"building", "--n", "4", "--q", "3", "--max-flags", "100"}).code == 3);
  CHECK(run({"rgd", "--n", "3", "--q", "4", "--max-group", "1000"}).code == 3);
  auto r = run({"flip", "--n", "4", "--q", "3", "--form", "alternating"});
  CHECK(r.code == 4);
  CHECK(r.err.find("HypothesisNotMet") != std::string::npos);
  r = run({"flip", "--n", "4", "--q", "3", "--form", "alternating", "--override-hypotheses"});
  CHECK(r.code == 0);
  CHECK(r.err.find("overridden") != std::string::npos);
  CHECK(r.doc()["report"]["overridden"] == true);
  CHECK(r.doc()["report"]["K"] == "{s1,s3}");
  CHECK(run({"cosets", "--n", "2", "--q", "4", "--form", "alternating"}).code == 4);
}

TEST_CASE("config files, gram files and output") {
  const auto cfg = temp_file("cfg.ini", "n = 2\nq = 9\nform = hermitian\nseed = 5\n");
  auto r = run({"cosets", "--config", cfg});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["seed"] == 5);
  CHECK(r.doc()["report"]["count"] == 2);
  r = run({"cosets", "--config", cfg, "--seed", "6"});
  CHECK(r.doc()["seed"] == 6);
  // The Gram matrix [[1,0],[0,2]] is hermitian over GF(9): 2 lies in GF(3).
  const auto gram = temp_file("gram.txt", "1 0\n0 2\n");
  r = run({"flip", "--n", "2", "--q", "9", "--gram", gram});
  CHECK(r.code == 0);
  CHECK(r.doc()["report"]["gram"] == "[1,0;0,2]");
  CHECK(run({"flip", "--n", "2", "--q", "9", "--gram", temp_file("short.txt", "1 0\n")}).code == 2);
  const std::string out = "/tmp/twinflip_cli_out.json";
  std::remove(out.c_str());
  CHECK(run({"rgd", "--n", "2", "--q", "3", "--out", out}).code == 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == run({"rgd", "--n", "2", "--q", "3"}).out);
  r = run({"rgd", "--n", "2", "--q", "3", "--format", "text"});
  CHECK(r.out.find("PASS RGD0") != std::string::npos);
  CHECK(r.out.find("report.group_order: 48") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"coxeter", "--type", "B2", "--twist", "all"},
           {"flip", "--n", "2", "--q", "9"},
           {"cosets", "--n", "2", "--q", "3", "--seed", "11"}}) {
    CHECK(run(args).out == run(args).out);
  }
}
