#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gdivide::stats {

enum class TermKind { kRaw, kRanked, kRankedRescaled };

std::string_view to_string(TermKind kind);

struct Term {
  std::string name;
  TermKind kind = TermKind::kRaw;
  Eigen::VectorXd values;
};

/// Listwise-complete regression design. The intercept, when present, is
/// implicit and always the first design column.
class ModelFrame {
 public:
  ModelFrame() = default;
  ModelFrame(std::string outcome_name, Eigen::VectorXd outcome, std::vector<std::string> labels = {},
             bool intercept = true);

  /// Appends a term; throws DomainError on length mismatch or non-finite values.
  ModelFrame& add(std::string name, std::span<const double> values, TermKind kind = TermKind::kRaw);
  ModelFrame& add(Term term);

  const std::string& outcome_name() const { return outcome_name_; }
  const Eigen::VectorXd& outcome() const { return outcome_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_intercept() const { return intercept_; }
  Eigen::Index n() const { return outcome_.size(); }

  const Term& term(std::string_view name) const;  // throws ConfigError
  std::optional<std::size_t> term_index(std::string_view name) const;

  /// n x p design, intercept column first when present.
  Eigen::MatrixXd design() const;
  /// Column names matching design(); the intercept is "(Intercept)".
  std::vector<std::string> design_names() const;

  /// Same frame with a different outcome vector.
  ModelFrame with_outcome(Eigen::VectorXd outcome) const;
  /// Rows selected by index (resampling, subsetting).
  ModelFrame select_rows(std::span<const Eigen::Index> rows) const;
  /// Frame restricted to the named terms, in the given order.
  ModelFrame select_terms(std::span<const std::string> names) const;

 private:
  std::string outcome_name_;
  Eigen::VectorXd outcome_;
  std::vector<std::string> labels_;
  bool intercept_ = true;
  std::vector<Term> terms_;
};

inline constexpr const char* kInterceptName = "(Intercept)";

}  // namespace gdivide::stats
