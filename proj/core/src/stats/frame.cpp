#include "gdivide/stats/frame.hpp"

#include <cmath>

#include "gdivide/error.hpp"

namespace gdivide::stats {

std::string_view to_string(TermKind kind) {
  switch (kind) {
    case TermKind::kRaw: return "raw";
    case TermKind::kRanked: return "ranked";
    case TermKind::kRankedRescaled: return "ranked_rescaled";
  }
  return "?";
}

ModelFrame::ModelFrame(std::string outcome_name, Eigen::VectorXd outcome, std::vector<std::string> labels,
                       bool intercept)
    : outcome_name_(std::move(outcome_name)),
      outcome_(std::move(outcome)),
      labels_(std::move(labels)),
      intercept_(intercept) {
  if (!outcome_.allFinite()) throw DomainError("outcome '" + outcome_name_ + "' has non-finite values");
  if (!labels_.empty() && static_cast<Eigen::Index>(labels_.size()) != outcome_.size()) {
    throw DomainError("row labels do not match outcome length");
  }
}

ModelFrame& ModelFrame::add(std::string name, std::span<const double> values, TermKind kind) {
  Term t{std::move(name), kind, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))};
  return add(std::move(t));
}

ModelFrame& ModelFrame::add(Term term) {
  if (term.values.size() != outcome_.size()) {
    throw DomainError("term '" + term.name + "' has " + std::to_string(term.values.size()) + " rows, outcome has " +
                      std::to_string(outcome_.size()));
  }
  if (!term.values.allFinite()) throw DomainError("term '" + term.name + "' has non-finite values");
  if (term_index(term.name)) throw ConfigError("duplicate term '" + term.name + "'");
  terms_.push_back(std::move(term));
  return *this;
}

std::optional<std::size_t> ModelFrame::term_index(std::string_view name) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].name == name) return i;
  }
  return std::nullopt;
}

const Term& ModelFrame::term(std::string_view name) const {
  auto i = term_index(name);
  if (!i) throw ConfigError("no term named '" + std::string(name) + "'");
  return terms_[*i];
}

Eigen::MatrixXd ModelFrame::design() const {
  const Eigen::Index offset = intercept_ ? 1 : 0;
  Eigen::MatrixXd x(n(), static_cast<Eigen::Index>(terms_.size()) + offset);
  if (intercept_) x.col(0).setOnes();
  for (std::size_t j = 0; j < terms_.size(); ++j) x.col(static_cast<Eigen::Index>(j) + offset) = terms_[j].values;
  return x;
}

std::vector<std::string> ModelFrame::design_names() const {
  std::vector<std::string> names;
  if (intercept_) names.emplace_back(kInterceptName);
  for (const auto& t : terms_) names.push_back(t.name);
  return names;
}

ModelFrame ModelFrame::with_outcome(Eigen::VectorXd outcome) const {
  ModelFrame copy = *this;
  if (outcome.size() != outcome_.size()) throw DomainError("replacement outcome has wrong length");
  copy.outcome_ = std::move(outcome);
  return copy;
}

ModelFrame ModelFrame::select_rows(std::span<const Eigen::Index> rows) const {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd y(m);
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < m; ++i) {
    y[i] = outcome_[rows[static_cast<std::size_t>(i)]];
    if (!labels_.empty()) labels.push_back(labels_[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])]);
  }
  ModelFrame out(outcome_name_, std::move(y), std::move(labels), intercept_);
  for (const auto& t : terms_) {
    Term copy{t.name, t.kind, Eigen::VectorXd(m)};
    for (Eigen::Index i = 0; i < m; ++i) copy.values[i] = t.values[rows[static_cast<std::size_t>(i)]];
    out.terms_.push_back(std::move(copy));
  }
  return out;
}

ModelFrame ModelFrame::select_terms(std::span<const std::string> names) const {
  ModelFrame out(outcome_name_, outcome_, labels_, intercept_);
  for (const auto& name : names) out.terms_.push_back(term(name));
  return out;
}

}  // namespace gdivide::stats
