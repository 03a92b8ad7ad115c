// orthofair command-line tool: synth | fit | audit
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical error.
// Every failure prints one line: `orthofair: error[<Code>]: <message>`.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "orthofair/orthofair.hpp"

namespace of = orthofair;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericalError = 3 };

int report(std::string_view code, const std::string& message, int exit_code) {
  std::string flat = message;
  for (char& c : flat)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "orthofair: error[" << code << "]: " << flat << '\n';
  return exit_code;
}

[[noreturn]] void invalid(const std::string& message) { throw of::Error(of::Errc::InvalidArgument, message); }

struct SynthArgs {
  std::string out_train;
  std::string out_test;
  of::ConfoundSpec spec;
};

struct FitArgs {
  std::string train;
  std::string mode = "primary-only";
  double gamma = 1e-6;
  bool tune = true;
  std::size_t budget = 20;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<double> c;
};

struct AuditArgs {
  std::string model;
  std::string test;
  std::size_t replicates = 5;
  std::uint64_t seed = 0;
  std::string out;
  std::string roc_dir;
  bool baseline = false;
  std::string train;
  std::optional<double> baseline_c;
  bool identity_resample = false;
};

void run_synth(const SynthArgs& args) {
  const auto [train, test] = of::generate(args.spec);
  of::write_features(args.out_train, train);
  of::write_features(args.out_test, test);
}

void run_fit(const FitArgs& args) {
  if (args.mode != "primary-only" && args.mode != "full-2d") invalid("--mode must be primary-only or full-2d");
  if (!(args.gamma >= 0.0) || !std::isfinite(args.gamma)) invalid("--gamma must be a nonnegative number");
  if (!args.tune && !args.c) invalid("--C is required with --no-tune");
  if (args.c && !(*args.c > 0.0 && std::isfinite(*args.c))) invalid("--C must be positive");
  if (args.tune && args.budget < 6) invalid("--budget must be at least 6");

  const of::FeatureDataset train = of::read_features(args.train);
  const of::ProjectionMode mode = of::parse_mode(args.mode);
  const of::DiscriminantBasis basis = of::fit_basis(train, args.gamma);

  of::ModelArtifact art;
  double c = args.c.value_or(1.0);
  if (args.tune) {
    art.tuning = of::tune_svm(train, mode, basis.gamma, args.budget, args.seed);
    c = art.tuning->C;
  }
  art.model = of::fit_classifier_on_basis(train, basis, mode, c);
  art.provenance.input_digest = of::file_digest(args.train);
  art.provenance.seed = args.seed;
  art.provenance.created_at = of::utc_timestamp();
  of::write_model(args.out, art);
}

void run_audit(const AuditArgs& args) {
  if (args.replicates < 1) invalid("--replicates must be at least 1");
  if (args.baseline && args.train.empty()) invalid("--baseline requires --train");
  if (args.baseline_c && !(*args.baseline_c > 0.0 && std::isfinite(*args.baseline_c)))
    invalid("--baseline-C must be positive");

  const of::ModelArtifact art = of::read_model(args.model);
  const of::FeatureDataset test = of::read_features(args.test);
  if (test.dim() != art.model.basis.dim())
    throw of::Error(of::Errc::DimensionMismatch, "test features have dimension " + std::to_string(test.dim()) +
                                                     ", model expects " + std::to_string(art.model.basis.dim()));

  of::FittedModel scored = art.model;
  if (args.baseline) {
    // Same basis for leakage reporting; scores come from an SVM on all features.
    const of::FeatureDataset train = of::read_features(args.train);
    double c = art.model.C;
    if (args.baseline_c) {
      c = *args.baseline_c;
    } else if (art.tuning) {
      const auto budget = std::max<std::size_t>(art.tuning->trace.size(), 6);
      c = of::tune_svm(train, of::ProjectionMode::FullFeatures, art.model.basis.gamma, budget,
                       art.provenance.seed)
              .C;
    }
    scored = of::fit_classifier_on_basis(train, art.model.basis, of::ProjectionMode::FullFeatures, c);
  }

  of::AuditConfig cfg;
  cfg.replicates = args.replicates;
  cfg.seed = args.seed;
  cfg.identity_resample = args.identity_resample;
  const of::AuditReport rep = of::run_audit(scored, test, cfg);

  of::AuditMetadata meta;
  meta.baseline = args.baseline;
  meta.model_digest = of::file_digest(args.model);
  meta.test_digest = of::file_digest(args.test);
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw of::Error(of::Errc::IoError, "cannot write " + args.out);
  out << of::to_json(rep, meta).dump(2) << '\n';
  if (!args.roc_dir.empty()) of::write_roc_files(args.roc_dir, rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal discriminant bias analysis"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic confounded train/test pair");
  synth_cmd->add_option("--out-train", synth.out_train, "training feature file")->required();
  synth_cmd->add_option("--out-test", synth.out_test, "test feature file")->required();
  synth_cmd->add_option("--seed", synth.spec.seed, "generator seed");
  synth_cmd->add_option("--n-train", synth.spec.n_train, "training samples")->capture_default_str();
  synth_cmd->add_option("--n-test", synth.spec.n_test, "test samples")->capture_default_str();
  synth_cmd->add_option("--dim", synth.spec.dim, "feature dimension (>= 2)")->capture_default_str();
  synth_cmd->add_option("--mu-y", synth.spec.mu_y, "label signal")->capture_default_str();
  synth_cmd->add_option("--mu-a", synth.spec.mu_a, "attribute signal")->capture_default_str();
  synth_cmd->add_option("--sigma", synth.spec.sigma, "noise standard deviation")->capture_default_str();
  synth_cmd->add_option("--rho-train", synth.spec.rho_train, "label/attribute coupling in train")->capture_default_str();
  synth_cmd->add_option("--rho-test", synth.spec.rho_test, "label/attribute coupling in test")->capture_default_str();

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit basis and classifier, write a model artifact");
  fit_cmd->add_option("--train", fit.train, "training feature file")->required();
  fit_cmd->add_option("--mode", fit.mode, "primary-only | full-2d")->capture_default_str();
  fit_cmd->add_option("--gamma", fit.gamma, "within-scatter shrinkage")->capture_default_str();
  fit_cmd->add_flag("--tune,!--no-tune", fit.tune, "tune C by Bayesian optimization (default on)");
  fit_cmd->add_option("--budget", fit.budget, "tuner evaluations")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "seed for folds and tuner");
  fit_cmd->add_option("--out", fit.out, "model artifact path")->required();
  fit_cmd->add_option("--C", fit.c, "SVM C (required with --no-tune)");

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "bootstrap audit of ROC/AUC and TPR gap by attribute group");
  audit_cmd->add_option("--model", audit.model, "model artifact")->required();
  audit_cmd->add_option("--test", audit.test, "test feature file")->required();
  audit_cmd->add_option("--replicates", audit.replicates, "bootstrap replicates")->capture_default_str();
  audit_cmd->add_option("--seed", audit.seed, "resampling seed");
  audit_cmd->add_option("--out", audit.out, "audit report path")->required();
  audit_cmd->add_option("--roc-csv", audit.roc_dir, "directory for ROC point files");
  audit_cmd->add_flag("--baseline", audit.baseline, "score with an SVM on the full standardized features");
  audit_cmd->add_option("--train", audit.train, "training features for --baseline");
  audit_cmd->add_option("--baseline-C", audit.baseline_c, "fixed C for the baseline SVM");
  audit_cmd->add_flag("--identity-resample", audit.identity_resample, "audit the test set without resampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("Usage", e.what(), kUsage);
  }

  try {
    if (*synth_cmd) run_synth(synth);
    if (*fit_cmd) run_fit(fit);
    if (*audit_cmd) run_audit(audit);
  } catch (const of::Error& e) {
    return report(of::errc_name(e.code()), e.message(), of::is_numerical(e.code()) ? kNumericalError : kDataError);
  } catch (const std::exception& e) {
    return report("Internal", e.what(), kDataError);
  }
  return kOk;
}
