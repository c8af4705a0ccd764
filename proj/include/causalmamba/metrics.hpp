#pragma once

#include <vector>

#include "causalmamba/cascade.hpp"

namespace causalmamba {

struct ClassificationMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::size_t count = 0;
};

/// Per-class F1 = 2tp / (2tp + fp + fn). A class absent from both
/// predictions and labels scores 0 and still counts toward the average.
ClassificationMetrics classification_metrics(const std::vector<int>& preds, const std::vector<int>& labels,
                                             std::size_t num_classes = kNumClasses);

double macro_f1(const std::vector<int>& preds, const std::vector<int>& labels, std::size_t num_classes = kNumClasses);
double accuracy(const std::vector<int>& preds, const std::vector<int>& labels);

}  // namespace causalmamba
