#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "anova/basis.hpp"

namespace anova {

// A variable subset u of {0, ..., d-1}, ascending, no duplicates.
using Term = std::vector<std::size_t>;

// Strict weak order used everywhere terms are listed: by order |u|, then
// lexicographically. Term #8 of U_2 for d = 4 is therefore {1, 2} (0-based).
bool term_less(const Term& a, const Term& b) noexcept;

bool is_subset(const Term& inner, const Term& outer) noexcept;

// Collection U of ANOVA terms over dimension d. Always contains the empty
// term, stored in term_less order without duplicates. Not necessarily
// downward closed: thresholded sets keep only their surviving terms and
// absent subsets count as zero terms.
class TermSet {
 public:
  TermSet() = default;
  TermSet(std::size_t dimension, std::vector<Term> terms);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const Term& operator[](std::size_t i) const { return terms_[i]; }
  auto begin() const noexcept { return terms_.begin(); }
  auto end() const noexcept { return terms_.end(); }

  bool contains(const Term& u) const;
  std::optional<std::size_t> index_of(const Term& u) const;

  // Largest order present (0 for {empty}).
  std::size_t max_order() const noexcept;
  bool is_downward_closed() const;

  // Superposition threshold the set was built with, if any.
  std::optional<std::size_t> superposition_threshold() const noexcept {
    return threshold_;
  }
  void set_superposition_threshold(std::size_t ds) noexcept { threshold_ = ds; }

  friend bool operator==(const TermSet& a, const TermSet& b) noexcept {
    return a.dimension_ == b.dimension_ && a.terms_ == b.terms_;
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<Term> terms_;
  std::optional<std::size_t> threshold_;
};

// U_{d_s} = { u : |u| <= d_s }.
TermSet superposition_terms(std::size_t dimension, std::size_t ds);

// Minimal downward-closed superset.
TermSet closure(const TermSet& terms);

// Renumbers the variables of terms contained in keep to 0..|keep|-1 (the
// position in keep); other terms are dropped. Pairs with project_columns.
TermSet reindex_terms(const TermSet& terms, const Term& keep);

// Order-dependent bandwidths N_l (even, >= 2) for l >= 1.
class BandwidthProfile {
 public:
  BandwidthProfile() = default;
  explicit BandwidthProfile(std::map<std::size_t, int> by_order);
  BandwidthProfile(std::initializer_list<std::pair<const std::size_t, int>> by_order)
      : BandwidthProfile(std::map<std::size_t, int>(by_order)) {}
  // bandwidths[i] is N_{i+1}.
  static BandwidthProfile from_list(std::span<const int> bandwidths);

  int at(std::size_t order) const;
  bool has(std::size_t order) const noexcept;
  const std::map<std::size_t, int>& by_order() const noexcept { return n_; }

  friend bool operator==(const BandwidthProfile&,
                         const BandwidthProfile&) = default;

 private:
  std::map<std::size_t, int> n_;
};

// {-N/2, ..., -1, 1, ..., N/2-1} (periodic) or {1, ..., N-1}.
std::vector<int> full_grid_1d(BasisKind kind, int bandwidth);

// I(U): frequencies grouped by term, columns enumerated term by term in
// TermSet order, each term's grid in row-major order of its 1-d sets.
// Frequencies are stored sparsely as their values on supp k = u.
class FrequencyIndexUnion {
 public:
  struct Group {
    Term term;
    std::size_t first = 0;  // first column
    std::size_t count = 0;  // number of columns
  };

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return group_of_.size(); }
  const std::vector<Group>& groups() const noexcept { return groups_; }

  std::size_t group_of(std::size_t column) const { return group_of_[column]; }
  // Values of k on its support, aligned with groups()[group_of(col)].term.
  std::span<const int> local_frequency(std::size_t column) const;
  // Dense d-dimensional frequency vector.
  std::vector<int> frequency(std::size_t column) const;

  int max_abs_frequency() const noexcept { return max_abs_; }

 private:
  friend FrequencyIndexUnion build_index_union(const TermSet&,
                                               const BandwidthProfile&,
                                               BasisKind);
  std::size_t dimension_ = 0;
  std::vector<Group> groups_;
  std::vector<std::size_t> group_of_;
  std::vector<std::size_t> offset_;  // into local_ per column
  std::vector<int> local_;
  int max_abs_ = 0;
};

FrequencyIndexUnion build_index_union(const TermSet& terms,
                                      const BandwidthProfile& bandwidths,
                                      BasisKind kind);

// 1 + sum_{u != empty} (N_|u| - 1)^|u|.
std::size_t index_union_size(const TermSet& terms,
                             const BandwidthProfile& bandwidths);

}  // namespace anova
