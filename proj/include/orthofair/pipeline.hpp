#pragma once

#include <cstddef>
#include <span>

#include "orthofair/classify.hpp"
#include "orthofair/dataset.hpp"
#include "orthofair/orthodisc.hpp"

namespace orthofair {

/// Scaler and SVM for a mode on top of an existing basis.
inline FittedModel fit_classifier_on_basis(const FeatureDataset& train, const DiscriminantBasis& basis,
                                           ProjectionMode mode, double c, const SvmOptions& options = {}) {
  const Matrix coords = mode_coordinates(mode, basis, train.X);
  TrainedClassifier tc = train_classifier(coords, train.y, c, options);
  FittedModel model;
  model.basis = basis;
  model.mode = mode;
  model.scaler = std::move(tc.scaler);
  model.w = std::move(tc.svm.w);
  model.b = tc.svm.b;
  model.C = c;
  model.train_objective = tc.svm.objective;
  return model;
}

/// Basis, scaler and SVM at a fixed C.
inline FittedModel fit_model(const FeatureDataset& train, ProjectionMode mode, double gamma, double c,
                             const SvmOptions& options = {}) {
  return fit_classifier_on_basis(train, fit_basis(train, gamma), mode, c, options);
}

/// Decision values for held-out rows of a model trained on the other rows.
/// Full-feature mode skips the basis entirely.
inline Vector fit_and_score(const FeatureDataset& train, const FeatureDataset& held_out, ProjectionMode mode,
                            double gamma, double c, const SvmOptions& options = {}) {
  if (mode == ProjectionMode::FullFeatures) {
    TrainedClassifier tc = train_classifier(train.X, train.y, c, options);
    return decision_values(held_out.X, tc.scaler, tc.svm.w, tc.svm.b);
  }
  const FittedModel model = fit_model(train, mode, gamma, c, options);
  return decision_scores(model, held_out).scores;
}

}  // namespace orthofair
