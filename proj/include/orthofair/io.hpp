#pragma once

// File formats:
//   features  CSV, header `id,label,attr,f0,...,f{M-1}`, one sample per row
//   model     JSON document, format_version "orthofair.model/1"
//   audit     JSON document, format_version "orthofair.audit/1"
//   ROC       CSV, header `threshold,fpr,tpr`

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "orthofair/classify.hpp"
#include "orthofair/dataset.hpp"
#include "orthofair/error.hpp"
#include "orthofair/evaluate.hpp"
#include "orthofair/orthodisc.hpp"
#include "orthofair/rng.hpp"
#include "orthofair/tune.hpp"

namespace orthofair {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kModelFormat = "orthofair.model/1";
inline constexpr std::string_view kAuditFormat = "orthofair.audit/1";

// ---------------------------------------------------------------------------
// Feature CSV

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string where(std::string_view source, std::size_t line, std::size_t column = 0) {
  std::string s(source);
  s += ":" + std::to_string(line);
  if (column > 0) s += ":" + std::to_string(column);
  return s;
}

}  // namespace detail

/// Parses and validates a feature file. Line numbers in errors are 1-based and
/// count the header; columns are 1-based field positions.
inline FeatureDataset parse_features(std::istream& in, std::string_view source = "<input>") {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(Errc::SchemaError, detail::where(source, 1) + ": empty file", 1);
  ++line_no;
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = detail::split_commas(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "label" || header[2] != "attr")
    throw Error(Errc::SchemaError, detail::where(source, 1) + ": header must start with id,label,attr,f0", 1);
  const std::size_t m = header.size() - 3;
  for (std::size_t k = 0; k < m; ++k)
    if (header[3 + k] != "f" + std::to_string(k))
      throw Error(Errc::SchemaError,
                  detail::where(source, 1, 4 + k) + ": expected feature column f" + std::to_string(k), 1);

  FeatureDataset data;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != m + 3)
      throw Error(Errc::SchemaError,
                  detail::where(source, line_no) + ": expected " + std::to_string(m + 3) + " fields, found " +
                      std::to_string(fields.size()),
                  line_no);
    if (fields[0].empty())
      throw Error(Errc::SchemaError, detail::where(source, line_no, 1) + ": empty id", line_no);
    int binary[2];
    for (int c = 0; c < 2; ++c) {
      const auto f = fields[1 + c];
      if (f != "0" && f != "1")
        throw Error(Errc::SchemaError,
                    detail::where(source, line_no, 2 + c) + ": " + (c == 0 ? "label" : "attr") +
                        " must be 0 or 1, found '" + std::string(f) + "'",
                    line_no);
      binary[c] = f == "1" ? 1 : 0;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const auto f = fields[3 + k];
      double v = 0.0;
      const char* first = f.data();
      const char* last = f.data() + f.size();
      if (!f.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (f.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        throw Error(Errc::ParseError,
                    detail::where(source, line_no, 4 + k) + ": invalid number '" + std::string(f) + "'",
                    line_no);
      values.push_back(v);
    }
    data.ids.emplace_back(fields[0]);
    data.y.push_back(binary[0]);
    data.a.push_back(binary[1]);
  }
  data.X = Matrix(data.ids.size(), m, std::move(values));
  validate(data);
  return data;
}

inline FeatureDataset read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return parse_features(in, path.string());
}

inline void write_features(std::ostream& out, const FeatureDataset& data) {
  out << "id,label,attr";
  for (std::size_t k = 0; k < data.dim(); ++k) out << ",f" << k;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.ids[i] << ',' << data.y[i] << ',' << data.a[i];
    for (double v : data.X.row(i)) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

inline void write_features(const std::filesystem::path& path, const FeatureDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  write_features(out, data);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

inline std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  char buf[40];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(ss.str())));
  return buf;
}

// ---------------------------------------------------------------------------
// Model artifact

struct Provenance {
  std::string input_digest;
  std::uint64_t seed = 0;
  std::string tool_version{kToolVersion};
  std::string created_at;  // excluded from artifact equality
};

struct ModelArtifact {
  FittedModel model;
  std::optional<SvmTuning> tuning;
  Provenance provenance;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

using nlohmann::json;

inline json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

inline double read_number_or_inf(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(Errc::SchemaError, "unexpected string where a number was expected: " + s);
  }
  return j.get<double>();
}

inline void require_dim(const Vector& v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw Error(Errc::SchemaError, std::string("model field ") + what + " has length " + std::to_string(v.size()) +
                                       ", expected " + std::to_string(n));
}

}  // namespace detail

inline nlohmann::json to_json(const ModelArtifact& art) {
  using nlohmann::json;
  const FittedModel& m = art.model;
  json j;
  j["format_version"] = kModelFormat;
  j["M"] = m.basis.dim();
  j["gamma"] = m.basis.gamma;
  j["mode"] = mode_name(m.mode);
  j["basis"] = {{"d1", m.basis.d1},
                {"d2", m.basis.d2},
                {"mu", m.basis.mu},
                {"alpha1", m.basis.alpha1},
                {"fisher_primary", m.basis.fisher_primary},
                {"fisher_protected", m.basis.fisher_protected},
                {"eigengap", detail::number_or_inf(m.basis.eigengap)}};
  j["scaler"] = {{"mean", m.scaler.mean}, {"sd", m.scaler.sd}};
  j["svm"] = {{"w", m.w}, {"b", m.b}, {"C", m.C}, {"train_objective", m.train_objective}};
  if (art.tuning) {
    json trace = json::array();
    for (const auto& o : art.tuning->trace) trace.push_back({{"log10_C", o.x}, {"cv_auc", o.f}});
    j["tuner"] = {{"best_C", art.tuning->C}, {"best_cv_auc", art.tuning->objective}, {"trace", trace}};
  } else {
    j["tuner"] = nullptr;
  }
  j["provenance"] = {{"input_digest", art.provenance.input_digest},
                     {"seed", art.provenance.seed},
                     {"tool_version", art.provenance.tool_version},
                     {"created_at", art.provenance.created_at}};
  return j;
}

inline ModelArtifact model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<std::string>() != kModelFormat)
      throw Error(Errc::SchemaError, "unsupported model format " + j.at("format_version").dump());
    ModelArtifact art;
    FittedModel& m = art.model;
    const std::size_t dim = j.at("M").get<std::size_t>();
    const auto& b = j.at("basis");
    m.basis.d1 = b.at("d1").get<Vector>();
    m.basis.d2 = b.at("d2").get<Vector>();
    m.basis.mu = b.at("mu").get<double>();
    m.basis.alpha1 = b.at("alpha1").get<double>();
    m.basis.fisher_primary = b.at("fisher_primary").get<double>();
    m.basis.fisher_protected = b.at("fisher_protected").get<double>();
    m.basis.eigengap = detail::read_number_or_inf(b.at("eigengap"));
    m.basis.gamma = j.at("gamma").get<double>();
    m.mode = parse_mode(j.at("mode").get<std::string>());
    m.scaler.mean = j.at("scaler").at("mean").get<Vector>();
    m.scaler.sd = j.at("scaler").at("sd").get<Vector>();
    m.w = j.at("svm").at("w").get<Vector>();
    m.b = j.at("svm").at("b").get<double>();
    m.C = j.at("svm").at("C").get<double>();
    m.train_objective = j.at("svm").at("train_objective").get<double>();

    detail::require_dim(m.basis.d1, dim, "basis.d1");
    detail::require_dim(m.basis.d2, dim, "basis.d2");
    const std::size_t inputs =
        m.mode == ProjectionMode::PrimaryOnly ? 1 : m.mode == ProjectionMode::Full2d ? 2 : dim;
    detail::require_dim(m.scaler.mean, inputs, "scaler.mean");
    detail::require_dim(m.scaler.sd, inputs, "scaler.sd");
    detail::require_dim(m.w, inputs, "svm.w");
    for (double sd : m.scaler.sd)
      if (!(sd > 0.0)) throw Error(Errc::SchemaError, "scaler standard deviations must be positive");
    if (!(m.C > 0.0)) throw Error(Errc::SchemaError, "svm.C must be positive");

    if (j.contains("tuner") && !j.at("tuner").is_null()) {
      const auto& t = j.at("tuner");
      SvmTuning tuning;
      tuning.C = t.at("best_C").get<double>();
      tuning.objective = t.at("best_cv_auc").get<double>();
      for (const auto& o : t.at("trace")) tuning.trace.push_back({o.at("log10_C").get<double>(), o.at("cv_auc").get<double>()});
      art.tuning = std::move(tuning);
    }
    const auto& p = j.at("provenance");
    art.provenance.input_digest = p.at("input_digest").get<std::string>();
    art.provenance.seed = p.at("seed").get<std::uint64_t>();
    art.provenance.tool_version = p.at("tool_version").get<std::string>();
    art.provenance.created_at = p.at("created_at").get<std::string>();
    return art;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaError, std::string("malformed model document: ") + e.what());
  }
}

inline void write_model(const std::filesystem::path& path, const ModelArtifact& art) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << to_json(art).dump(2) << '\n';
}

inline ModelArtifact read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

// ---------------------------------------------------------------------------
// Audit report and ROC files

struct AuditMetadata {
  bool baseline = false;
  std::string model_digest;
  std::string test_digest;
  std::string tool_version{kToolVersion};
};

inline nlohmann::json to_json(const RocCurve& roc) {
  using nlohmann::json;
  json fpr = json::array(), tpr = json::array(), thr = json::array();
  for (std::size_t k = 0; k < roc.points.size(); ++k) {
    fpr.push_back(roc.points[k].fpr);
    tpr.push_back(roc.points[k].tpr);
    thr.push_back(detail::number_or_inf(roc.thresholds[k]));
  }
  return {{"auc", roc.auc}, {"positives", roc.positives}, {"negatives", roc.negatives},
          {"threshold", thr}, {"fpr", fpr}, {"tpr", tpr}};
}

inline nlohmann::json to_json(const AuditReport& report, const AuditMetadata& meta = {}) {
  using nlohmann::json;
  json records = json::array();
  for (std::size_t r = 0; r < report.records.size(); ++r) {
    const AuditRecord& rec = report.records[r];
    records.push_back({{"replicate", r},
                       {"seed", rec.seed},
                       {"auc", rec.overall.auc},
                       {"threshold", detail::number_or_inf(rec.threshold)},
                       {"tpr", rec.tpr},
                       {"fpr", rec.fpr},
                       {"tpr_gap", rec.tpr_gap},
                       {"leakage", {{"d1", rec.leakage[0]}, {"d2", rec.leakage[1]}}},
                       {"roc",
                        {{"overall", to_json(rec.overall)},
                         {"group0", to_json(rec.groups[0])},
                         {"group1", to_json(rec.groups[1])}}}});
  }
  return {{"format_version", kAuditFormat},
          {"config",
           {{"replicates", report.config.replicates},
            {"seed", report.config.seed},
            {"identity_resample", report.config.identity_resample},
            {"baseline", meta.baseline}}},
          {"provenance",
           {{"model_digest", meta.model_digest}, {"test_digest", meta.test_digest}, {"tool_version", meta.tool_version}}},
          {"records", records},
          {"aggregate",
           {{"auc_mean", report.aggregate.auc_mean},
            {"auc_sd", report.aggregate.auc_sd},
            {"tpr_gap_mean", report.aggregate.tpr_gap_mean},
            {"tpr_gap_sd", report.aggregate.tpr_gap_sd}}}};
}

inline void write_roc_csv(std::ostream& out, const RocCurve& roc) {
  out << "threshold,fpr,tpr\n";
  for (std::size_t k = 0; k < roc.points.size(); ++k)
    out << detail::format_double(roc.thresholds[k]) << ',' << detail::format_double(roc.points[k].fpr) << ','
        << detail::format_double(roc.points[k].tpr) << '\n';
}

/// replicate{r}_{overall,group0,group1}.csv under dir.
inline void write_roc_files(const std::filesystem::path& dir, const AuditReport& report) {
  std::filesystem::create_directories(dir);
  for (std::size_t r = 0; r < report.records.size(); ++r) {
    const AuditRecord& rec = report.records[r];
    const std::pair<const char*, const RocCurve*> curves[] = {
        {"overall", &rec.overall}, {"group0", &rec.groups[0]}, {"group1", &rec.groups[1]}};
    for (const auto& [name, curve] : curves) {
      const auto path = dir / ("replicate" + std::to_string(r) + "_" + name + ".csv");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
      write_roc_csv(out, *curve);
    }
  }
}

}  // namespace orthofair
