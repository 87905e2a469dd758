#include "anova/terms.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "anova/error.hpp"

namespace anova {

bool term_less(const Term& a, const Term& b) noexcept {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool is_subset(const Term& inner, const Term& outer) noexcept {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

TermSet::TermSet(std::size_t dimension, std::vector<Term> terms)
    : dimension_(dimension), terms_(std::move(terms)) {
  if (dimension_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  }
  for (Term& u : terms_) {
    std::sort(u.begin(), u.end());
    if (std::adjacent_find(u.begin(), u.end()) != u.end()) {
      throw Error(ErrorCode::InvalidArgument, "term repeats a variable");
    }
    if (!u.empty() && u.back() >= dimension_) {
      throw Error(ErrorCode::InvalidArgument,
                  "term references variable " + std::to_string(u.back() + 1) +
                      " beyond dimension " + std::to_string(dimension_));
    }
  }
  terms_.emplace_back();
  std::sort(terms_.begin(), terms_.end(), term_less);
  terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
}

bool TermSet::contains(const Term& u) const { return index_of(u).has_value(); }

std::optional<std::size_t> TermSet::index_of(const Term& u) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), u, term_less);
  if (it == terms_.end() || *it != u) return std::nullopt;
  return static_cast<std::size_t>(it - terms_.begin());
}

std::size_t TermSet::max_order() const noexcept {
  return terms_.empty() ? 0 : terms_.back().size();
}

bool TermSet::is_downward_closed() const {
  for (const Term& u : terms_) {
    // checking the immediate subsets suffices by induction
    for (std::size_t drop = 0; drop < u.size(); ++drop) {
      Term v;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (i != drop) v.push_back(u[i]);
      }
      if (!contains(v)) return false;
    }
  }
  return true;
}

namespace {

void append_combinations(std::size_t n, std::size_t order, Term& current,
                         std::size_t start, std::vector<Term>& out) {
  if (current.size() == order) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    current.push_back(i);
    append_combinations(n, order, current, i + 1, out);
    current.pop_back();
  }
}

}  // namespace

TermSet superposition_terms(std::size_t dimension, std::size_t ds) {
  if (ds < 1 || ds > dimension) {
    throw Error(ErrorCode::InvalidArgument,
                "superposition threshold " + std::to_string(ds) +
                    " outside [1, " + std::to_string(dimension) + "]");
  }
  std::vector<Term> terms;
  Term scratch;
  for (std::size_t order = 1; order <= ds; ++order) {
    append_combinations(dimension, order, scratch, 0, terms);
  }
  TermSet set(dimension, std::move(terms));
  set.set_superposition_threshold(ds);
  return set;
}

TermSet closure(const TermSet& terms) {
  std::set<Term> all;
  for (const Term& u : terms) {
    const std::size_t n = u.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Term v;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::size_t{1} << i)) v.push_back(u[i]);
      }
      all.insert(std::move(v));
    }
  }
  TermSet closed(terms.dimension(), {all.begin(), all.end()});
  if (auto ds = terms.superposition_threshold()) {
    closed.set_superposition_threshold(*ds);
  }
  return closed;
}

TermSet reindex_terms(const TermSet& terms, const Term& keep) {
  Term sorted_keep = keep;
  std::sort(sorted_keep.begin(), sorted_keep.end());
  if (sorted_keep.empty()) {
    throw Error(ErrorCode::InvalidArgument, "reindexing keeps no variables");
  }
  std::vector<Term> mapped;
  for (const Term& u : terms) {
    if (!is_subset(u, sorted_keep)) continue;
    Term v;
    for (std::size_t i : u) {
      v.push_back(static_cast<std::size_t>(
          std::lower_bound(sorted_keep.begin(), sorted_keep.end(), i) -
          sorted_keep.begin()));
    }
    mapped.push_back(std::move(v));
  }
  TermSet out(sorted_keep.size(), std::move(mapped));
  if (auto ds = terms.superposition_threshold()) {
    out.set_superposition_threshold(std::min(*ds, sorted_keep.size()));
  }
  return out;
}

BandwidthProfile::BandwidthProfile(std::map<std::size_t, int> by_order)
    : n_(std::move(by_order)) {
  for (const auto& [order, n] : n_) {
    if (order == 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "bandwidth for order 0 is implicit");
    }
    if (n < 2 || n % 2 != 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "bandwidth N_" + std::to_string(order) + " = " +
                      std::to_string(n) + " must be even and >= 2");
    }
  }
}

BandwidthProfile BandwidthProfile::from_list(std::span<const int> bandwidths) {
  std::map<std::size_t, int> m;
  for (std::size_t i = 0; i < bandwidths.size(); ++i) m[i + 1] = bandwidths[i];
  return BandwidthProfile(std::move(m));
}

bool BandwidthProfile::has(std::size_t order) const noexcept {
  return n_.count(order) != 0;
}

int BandwidthProfile::at(std::size_t order) const {
  auto it = n_.find(order);
  if (it == n_.end()) {
    throw Error(ErrorCode::MissingBandwidth,
                "no bandwidth given for terms of order " +
                    std::to_string(order));
  }
  return it->second;
}

std::vector<int> full_grid_1d(BasisKind kind, int bandwidth) {
  if (bandwidth < 2 || bandwidth % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "bandwidth " + std::to_string(bandwidth) +
                    " must be even and >= 2");
  }
  std::vector<int> grid;
  grid.reserve(static_cast<std::size_t>(bandwidth - 1));
  if (is_periodic(kind)) {
    for (int k = -bandwidth / 2; k < bandwidth / 2; ++k) {
      if (k != 0) grid.push_back(k);
    }
  } else {
    for (int k = 1; k < bandwidth; ++k) grid.push_back(k);
  }
  return grid;
}

std::span<const int> FrequencyIndexUnion::local_frequency(
    std::size_t column) const {
  const std::size_t order = groups_[group_of_[column]].term.size();
  return {local_.data() + offset_[column], order};
}

std::vector<int> FrequencyIndexUnion::frequency(std::size_t column) const {
  std::vector<int> k(dimension_, 0);
  const Term& u = groups_[group_of_[column]].term;
  const auto local = local_frequency(column);
  for (std::size_t s = 0; s < u.size(); ++s) k[u[s]] = local[s];
  return k;
}

FrequencyIndexUnion build_index_union(const TermSet& terms,
                                      const BandwidthProfile& bandwidths,
                                      BasisKind kind) {
  FrequencyIndexUnion out;
  out.dimension_ = terms.dimension();
  for (const Term& u : terms) {
    FrequencyIndexUnion::Group group{u, out.group_of_.size(), 0};
    const std::size_t order = u.size();
    const std::size_t gi = out.groups_.size();
    if (order == 0) {
      out.group_of_.push_back(gi);
      out.offset_.push_back(out.local_.size());
      group.count = 1;
      out.groups_.push_back(std::move(group));
      continue;
    }
    const std::vector<int> grid = full_grid_1d(kind, bandwidths.at(order));
    for (int k : grid) out.max_abs_ = std::max(out.max_abs_, std::abs(k));
    // odometer over grid^order, last coordinate fastest
    std::vector<std::size_t> digit(order, 0);
    bool done = false;
    while (!done) {
      out.group_of_.push_back(gi);
      out.offset_.push_back(out.local_.size());
      for (std::size_t s = 0; s < order; ++s) {
        out.local_.push_back(grid[digit[s]]);
      }
      ++group.count;
      std::size_t pos = order;
      while (true) {
        if (pos == 0) {
          done = true;
          break;
        }
        --pos;
        if (++digit[pos] < grid.size()) break;
        digit[pos] = 0;
      }
    }
    out.groups_.push_back(std::move(group));
  }
  return out;
}

std::size_t index_union_size(const TermSet& terms,
                             const BandwidthProfile& bandwidths) {
  std::size_t total = 0;
  for (const Term& u : terms) {
    std::size_t count = 1;
    if (!u.empty()) {
      const auto per_axis = static_cast<std::size_t>(bandwidths.at(u.size()) - 1);
      for (std::size_t s = 0; s < u.size(); ++s) count *= per_axis;
    }
    total += count;
  }
  return total;
}

}  // namespace anova
