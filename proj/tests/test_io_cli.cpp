#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "spirality/cli.hpp"
#include "spirality/io.hpp"
#include "support/random_instances.hpp"

using namespace spirality;
namespace fs = std::filesystem;

namespace {

std::string fixture_path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = spirality::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("spirality_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(ParseInstance, MinimalSinglePiece) {
  auto p = io::parse_instance(slurp(fixture_path("trivial.json")));
  ASSERT_TRUE(p.ok());
  EXPECT_TRUE(p.errors.empty());
  EXPECT_TRUE(p.value->jsj.trivial_decomposition);
  EXPECT_TRUE(validate(p.value->jsj).empty());
}

TEST(ParseInstance, DeterminantTwoIsInvariantError) {
  auto p = io::parse_instance(slurp(fixture_path("invalid_det.json")));
  ASSERT_FALSE(p.ok());
  ASSERT_EQ(p.errors.size(), 1u);
  EXPECT_EQ(p.errors[0].kind, io::InputErrorKind::InvariantError);
  EXPECT_NE(p.errors[0].message.find("determinant 2"), std::string::npos);
  EXPECT_NE(p.errors[0].message.find("/jsj/edges/0/gluing"), std::string::npos);
}

TEST(ParseInstance, DanglingPieceIsReferenceError) {
  auto p = io::parse_instance(slurp(fixture_path("dangling_ref.json")));
  ASSERT_FALSE(p.ok());
  ASSERT_FALSE(p.errors.empty());
  EXPECT_EQ(p.errors[0].kind, io::InputErrorKind::ReferenceError);
  EXPECT_EQ(p.errors[0].name, "P9");
  EXPECT_EQ(p.errors[0].to_string().rfind("ReferenceError(P9): ", 0), 0u);
}

TEST(ParseInstance, SyntaxErrorHasPosition) {
  auto p = io::parse_instance("{\n  \"version\": ,\n}");
  ASSERT_FALSE(p.ok());
  EXPECT_EQ(p.errors[0].kind, io::InputErrorKind::SyntaxError);
  EXPECT_EQ(p.errors[0].line, 2u);
  EXPECT_GT(p.errors[0].column, 1u);
}

TEST(ParseInstance, StrictFields) {
  io::json j = io::json::parse(slurp(fixture_path("aspiral.json")));
  io::json extra = j;
  extra["jsj"]["colour"] = "red";
  auto p = io::parse_instance(extra.dump());
  ASSERT_FALSE(p.ok());
  EXPECT_NE(p.errors[0].message.find("unknown field \"colour\""), std::string::npos);

  io::json missing = j;
  missing.erase("subgroup");
  EXPECT_FALSE(io::parse_instance(missing.dump()).ok());

  io::json big = j;
  big["phi"]["vertices"][0]["circles"][0]["seifert_intersection"] = 18446744073709551615ull;
  auto q = io::parse_instance(big.dump());
  ASSERT_FALSE(q.ok());
  EXPECT_NE(q.errors[0].message.find("64-bit"), std::string::npos);

  io::json version = j;
  version["version"] = "2";
  EXPECT_FALSE(io::parse_instance(version.dump()).ok());
}

TEST(RoundTrip, FixturesSurviveSerialization) {
  int parsed = 0;
  for (const auto& entry : fs::directory_iterator(FIXTURE_DIR)) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".cert.json")) continue;
    auto p = io::parse_instance(slurp(entry.path().string()));
    if (!p.ok()) continue;
    ++parsed;
    const std::string text = io::serialize_instance(*p.value);
    auto again = io::parse_instance(text);
    ASSERT_TRUE(again.ok()) << name;
    EXPECT_EQ(*again.value, *p.value) << name;
    EXPECT_EQ(io::serialize_instance(*again.value), text) << name;
  }
  EXPECT_GE(parsed, 8);
}

TEST(RoundTrip, RandomInstances) {
  gen::Rng rng(51);
  gen::InstanceOptions o;
  o.max_cover_vertices = 4;
  o.max_extra_cover_edges = 4;
  for (int i = 0; i < 100; ++i) {
    Instance inst = gen::random_instance(rng, o);
    auto p = io::parse_instance(io::serialize_instance(inst));
    ASSERT_TRUE(p.ok()) << p.errors.front().to_string();
    EXPECT_EQ(*p.value, inst);
  }
}

TEST(RoundTrip, Certificates) {
  gen::Rng rng(52);
  gen::InstanceOptions o;
  o.max_cover_vertices = 4;
  o.max_extra_cover_edges = 4;
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    Instance inst = gen::random_instance(rng, o);
    auto res = assemble(inst);
    if (!std::holds_alternative<CoverCertificate>(res)) continue;
    io::CertificateFile f{"00ff", std::get<CoverCertificate>(res)};
    auto p = io::parse_certificate(io::serialize_certificate(f));
    ASSERT_TRUE(p.ok()) << p.errors.front().to_string();
    EXPECT_EQ(p.value->instance_sha256, "00ff");
    EXPECT_EQ(p.value->certificate, f.certificate);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Digest, IgnoresFormattingOnly) {
  const std::string text = slurp(fixture_path("aspiral.json"));
  io::json j = io::json::parse(text);
  EXPECT_EQ(io::instance_digest(text), io::instance_digest(j.dump()));
  j["subgroup"]["infinite_index"] = false;
  EXPECT_NE(io::instance_digest(text), io::instance_digest(j.dump()));
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, LerfVerdicts) {
  CliRun r = invoke({"lerf", fixture_path("graph_manifold.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "NotLerf edge=e1\n");
  r = invoke({"lerf", fixture_path("mixed_adjacent.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "NotLerf edge=a2\n");
  r = invoke({"lerf", fixture_path("genus2_adjacent.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Lerf\n");
}

TEST(Cli, SeparableVerdicts) {
  CliRun r = invoke({"separable", fixture_path("spiral_loop.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "NotSeparable cycle=[e1,e2] value=1/4\n");
  r = invoke({"separable", fixture_path("aspiral.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Separable\n");
  for (const char* name : {"trivial.json", "sol.json", "finite_index.json"}) {
    r = invoke({"separable", fixture_path(name)});
    EXPECT_EQ(r.code, 3) << name;
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("HypothesesViolated"), std::string::npos) << r.err;
  }
}

TEST(Cli, SpiralityListsBasisCycles) {
  CliRun r = invoke({"spirality", fixture_path("spiral_loop.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "cycle=[e1,e2] value=1/4\n");
  r = invoke({"spirality", fixture_path("graph_manifold.json")});
  EXPECT_EQ(r.out, "no cycles\n");
}

TEST(Cli, MalformedInputExitsTwo) {
  CliRun r = invoke({"lerf", fixture_path("invalid_det.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("InvariantError"), std::string::npos);
  r = invoke({"lerf", fixture_path("dangling_ref.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ReferenceError(P9)"), std::string::npos);
  r = invoke({"lerf", fixture_path("no_such_file.json")});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"lerf"}).code, 2);
  EXPECT_EQ(invoke({"verify", fixture_path("aspiral.json")}).code, 2);
  EXPECT_EQ(invoke({"lerf", "a.json", "--each", FIXTURE_DIR}).code, 2);
}

TEST(Cli, AssembleAndVerify) {
  const std::string cert = scratch("aspiral.cert.json").string();
  CliRun r = invoke({"assemble", fixture_path("aspiral.json"), "--out", cert});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("Assembled frak_a=", 0), 0u);
  r = invoke({"verify", fixture_path("aspiral.json"), cert});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out, "Verified\n");

  // The certificate is bound to its instance.
  r = invoke({"verify", fixture_path("spiral_loop.json"), cert});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("certificate is bound to a different instance"), std::string::npos);

  // A tampered lattice is caught.
  io::json j = io::json::parse(slurp(cert));
  j["edges"][0]["side_a"]["lattice"][0] = "7";
  const std::string bad = scratch("tampered.cert.json").string();
  std::ofstream(bad) << j.dump(2);
  r = invoke({"verify", fixture_path("aspiral.json"), bad});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.rfind("Rejected\n", 0), 0u);
}

TEST(Cli, CommittedCertificateVerifies) {
  CliRun r = invoke({"verify", fixture_path("aspiral.json"), fixture_path("aspiral.cert.json")});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(Cli, AssembleReportsObstruction) {
  CliRun r = invoke({"assemble", fixture_path("spiral_loop.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.rfind("SpiralObstruction chord=e2 cycle=", 0), 0u);
}

TEST(Cli, AssembleWithoutOutPrintsCertificate) {
  CliRun r = invoke({"assemble", fixture_path("mixed_cover.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto p = io::parse_certificate(r.out);
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p.value->instance_sha256, io::instance_digest(slurp(fixture_path("mixed_cover.json"))));
}

TEST(Cli, JsonReports) {
  CliRun r = invoke({"--json", "separable", fixture_path("spiral_loop.json")});
  EXPECT_EQ(r.code, 1);
  io::json j = io::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "NotSeparable");
  EXPECT_EQ(j["value"], "1/4");
  EXPECT_EQ(j["cycle"], io::json::array({"e1", "e2"}));
  CliRun s = invoke({"lerf", "--json", fixture_path("graph_manifold.json")});
  EXPECT_EQ(io::json::parse(s.out)["edge"], "e1");
}

TEST(Cli, EachDirectoryIsDeterministic) {
  CliRun a = invoke({"lerf", "--each", FIXTURE_DIR});
  CliRun b = invoke({"lerf", "--each", FIXTURE_DIR});
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
  EXPECT_EQ(a.code, 2);
  EXPECT_NE(a.out.find("== graph_manifold.json ==\nNotLerf edge=e1\n"), std::string::npos);
  EXPECT_EQ(a.out.find("aspiral.cert.json"), std::string::npos);
  CliRun j = invoke({"--json", "separable", "--each", FIXTURE_DIR});
  io::json arr = io::json::parse(j.out);
  ASSERT_TRUE(arr.is_array());
  EXPECT_GE(arr.size(), 10u);
}
