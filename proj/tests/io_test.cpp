#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "test_support.hpp"

using namespace orthofair;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = ORTHOFAIR_FIXTURES;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "orthofair_io_test";
  fs::create_directories(dir);
  return dir / name;
}

Errc parse_code(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_features(in);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return Errc::IoError;
}

const char* const kT1Body = "s1,0,0,0,0\ns2,0,1,2,1\ns3,1,0,1,3\ns4,1,1,3,2\n";

}  // namespace

TEST(Features, ReadsT1Fixture) {
  const FeatureDataset d = read_features(kFixtures / "t1.csv");
  EXPECT_EQ(d.size(), 4u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d, orthofair::testing::t1());
}

TEST(Features, HeaderErrors) {
  EXPECT_EQ(parse_code("id,label,f0\ns1,0,1\n"), Errc::SchemaError);
  EXPECT_EQ(parse_code("id,label,attr,f1,f0\n"), Errc::SchemaError);
  EXPECT_EQ(parse_code(""), Errc::SchemaError);
}

TEST(Features, NonBinaryLabelReportsLine) {
  std::istringstream in(std::string("id,label,attr,f0,f1\n") + "s1,0,0,0,0\ns2,2,1,2,1\ns3,1,0,1,3\ns4,1,1,3,2\n");
  try {
    parse_features(in, "bad.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaError);
    EXPECT_EQ(e.index(), std::optional<std::size_t>(3));
    EXPECT_NE(e.message().find("bad.csv:3"), std::string::npos) << e.message();
  }
}

TEST(Features, RaggedRowAndBadNumbers) {
  EXPECT_EQ(parse_code("id,label,attr,f0,f1\ns1,0,0,0\n"), Errc::SchemaError);
  EXPECT_EQ(parse_code(std::string("id,label,attr,f0,f1\n") + "s1,0,0,abc,0\n"), Errc::ParseError);
  EXPECT_EQ(parse_code(std::string("id,label,attr,f0,f1\n") + "s1,0,0,1e999,0\n"), Errc::ParseError);
  EXPECT_EQ(parse_code(std::string("id,label,attr,f0,f1\n") + "s1,0,0,nan,0\n"), Errc::ParseError);
}

TEST(Features, TooFewPerClassIsDegenerate) {
  EXPECT_EQ(parse_code("id,label,attr,f0,f1\ns1,0,0,0,0\ns2,1,1,2,1\ns3,1,0,1,3\ns4,1,1,3,2\n"),
            Errc::DegenerateClass);
}

TEST(Features, AcceptsScientificNotationCrlfAndBom) {
  std::istringstream in("\xEF\xBB\xBFid,label,attr,f0,f1\r\ns1,0,0,0e0,+0\r\ns2,0,1,2.0E0,1\r\ns3,1,0,1,3\r\n"
                        "s4,1,1,3,2e+0\r\n");
  EXPECT_EQ(parse_features(in), orthofair::testing::t1());
}

TEST(Features, RoundTripIsExact) {
  std::mt19937_64 gen(71);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureDataset d = orthofair::testing::random_dataset(gen, 40, 3);
    for (double& x : d.X.data()) x *= std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    const fs::path p = scratch("round.csv");
    write_features(p, d);
    EXPECT_EQ(read_features(p), d);
  }
}

TEST(Features, DigestIsStableAndContentSensitive) {
  const fs::path p = scratch("digest.csv");
  write_features(p, orthofair::testing::t1());
  const std::string a = file_digest(p);
  EXPECT_EQ(a.rfind("fnv1a64:", 0), 0u);
  EXPECT_EQ(a, file_digest(p));
  FeatureDataset d = orthofair::testing::t1();
  d.X(0, 0) = 1e-300;
  write_features(p, d);
  EXPECT_NE(a, file_digest(p));
}

TEST(Model, RoundTripReproducesScoresBitIdentically) {
  std::mt19937_64 gen(72);
  const FeatureDataset d = orthofair::testing::random_dataset(gen, 150, 6);
  for (ProjectionMode mode : {ProjectionMode::PrimaryOnly, ProjectionMode::Full2d}) {
    ModelArtifact art;
    art.model = fit_model(d, mode, 1e-3, 0.7);
    art.tuning = SvmTuning{0.7, 0.81, {{-0.2, 0.8}, {0.1, 0.81}}};
    art.provenance = {"fnv1a64:0123456789abcdef", 42, std::string(kToolVersion), "2026-01-01T00:00:00Z"};
    const fs::path p = scratch("model.json");
    write_model(p, art);
    const ModelArtifact back = read_model(p);
    EXPECT_EQ(back.model.basis.d1, art.model.basis.d1);
    EXPECT_EQ(back.model.basis.d2, art.model.basis.d2);
    EXPECT_EQ(back.model.basis.mu, art.model.basis.mu);
    EXPECT_EQ(back.model.basis.eigengap, art.model.basis.eigengap);
    EXPECT_EQ(back.model.scaler, art.model.scaler);
    EXPECT_EQ(back.model.w, art.model.w);
    EXPECT_EQ(back.model.b, art.model.b);
    EXPECT_EQ(back.model.mode, mode);
    ASSERT_TRUE(back.tuning.has_value());
    EXPECT_EQ(back.tuning->trace, art.tuning->trace);
    EXPECT_EQ(back.provenance.seed, 42u);
    EXPECT_EQ(decision_scores(back.model, d).scores, decision_scores(art.model, d).scores);
    EXPECT_EQ(to_json(back), to_json(art));
  }
}

TEST(Model, InfiniteEigengapSurvivesRoundTrip) {
  ModelArtifact art;
  art.model = fit_model(orthofair::testing::t1(), ProjectionMode::PrimaryOnly, 0.0, 1.0);
  ASSERT_TRUE(std::isinf(art.model.basis.eigengap));
  EXPECT_TRUE(std::isinf(model_from_json(to_json(art)).model.basis.eigengap));
}

TEST(Model, RejectsInconsistentDimensions) {
  ModelArtifact art;
  art.model = fit_model(orthofair::testing::t1(), ProjectionMode::PrimaryOnly, 0.0, 1.0);
  auto j = to_json(art);
  j["basis"]["d2"] = {1.0, 2.0, 3.0};
  EXPECT_THROW(model_from_json(j), Error);
  j = to_json(art);
  j["format_version"] = "something/9";
  EXPECT_THROW(model_from_json(j), Error);
}

TEST(Audit, ReportAndRocFiles) {
  std::mt19937_64 gen(73);
  const FeatureDataset d = orthofair::testing::random_dataset(gen, 100, 3);
  const FittedModel m = fit_model(d, ProjectionMode::PrimaryOnly, 0.0, 1.0);
  AuditConfig cfg;
  cfg.replicates = 2;
  const AuditReport rep = run_audit(m, d, cfg);
  const auto j = to_json(rep);
  EXPECT_EQ(j["format_version"], kAuditFormat);
  EXPECT_EQ(j["records"].size(), 2u);
  EXPECT_EQ(j["records"][0]["threshold"].get<double>(), rep.records[0].threshold);
  EXPECT_EQ(j["records"][1]["roc"]["overall"]["threshold"][0], "inf");

  const fs::path dir = scratch("roc");
  fs::remove_all(dir);
  write_roc_files(dir, rep);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 6u);
  std::ifstream in(dir / "replicate1_group0.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "threshold,fpr,tpr");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, rep.records[1].groups[0].points.size());
}
