#include "causalmamba/metrics.hpp"

#include "causalmamba/error.hpp"

namespace causalmamba {

ClassificationMetrics classification_metrics(const std::vector<int>& preds, const std::vector<int>& labels,
                                             std::size_t num_classes) {
  if (preds.size() != labels.size()) throw Error(Errc::LengthMismatch, "predictions and labels differ in length");
  if (num_classes == 0) throw Error(Errc::InvalidConfig, "num_classes must be positive");
  ClassificationMetrics m;
  m.count = preds.size();
  m.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || labels[i] < 0 || static_cast<std::size_t>(preds[i]) >= num_classes ||
        static_cast<std::size_t>(labels[i]) >= num_classes)
      throw Error(Errc::IndexOutOfRange, "class index outside [0, num_classes)");
    ++m.confusion[labels[i]][preds[i]];
    if (preds[i] == labels[i]) ++correct;
  }
  m.accuracy = preds.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(preds.size());
  m.per_class_f1.assign(num_classes, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double tp = static_cast<double>(m.confusion[k][k]);
    double fp = 0.0, fn = 0.0;
    for (std::size_t j = 0; j < num_classes; ++j) {
      if (j == k) continue;
      fp += static_cast<double>(m.confusion[j][k]);
      fn += static_cast<double>(m.confusion[k][j]);
    }
    const double denom = 2.0 * tp + fp + fn;
    m.per_class_f1[k] = denom > 0.0 ? 2.0 * tp / denom : 0.0;
    total += m.per_class_f1[k];
  }
  m.macro_f1 = total / static_cast<double>(num_classes);
  return m;
}

double macro_f1(const std::vector<int>& preds, const std::vector<int>& labels, std::size_t num_classes) {
  return classification_metrics(preds, labels, num_classes).macro_f1;
}

double accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
  return classification_metrics(preds, labels, kNumClasses).accuracy;
}

}  // namespace causalmamba
