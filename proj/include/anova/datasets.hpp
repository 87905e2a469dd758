#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "anova/matrix.hpp"
#include "anova/terms.hpp"

namespace anova {

// Per-column min/max of the training data, optionally also of the target.
struct Normalization {
  std::vector<double> min;
  std::vector<double> max;
  std::optional<std::pair<double, double>> target;  // (min, max)
};

struct Dataset {
  Matrix nodes;                 // M x d
  std::vector<double> values;   // observed targets
  // Noise-free targets, known for synthetic data only.
  std::vector<double> clean_values;
  std::vector<std::string> columns;
  std::string target_name;
  std::optional<Normalization> normalization;

  std::size_t size() const noexcept { return nodes.rows(); }
  std::size_t dimension() const noexcept { return nodes.cols(); }
};

// Seedable generator with a portable output sequence: mt19937_64 seeded
// through splitmix64 from (seed, stream, purpose), with hand-written
// uniform and normal transforms (the std distributions are not portable).
class RandomStream {
 public:
  enum class Purpose : std::uint64_t {
    TrainNodes = 1,
    TestNodes = 2,
    Split = 3,
    General = 4,
  };

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0,
                        Purpose purpose = Purpose::General);

  // uniform on [0, 1) with 53 random bits
  double uniform();
  // standard normal (Marsaglia polar method)
  double normal();
  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct FriedmanSpec {
  int which = 1;               // 1, 2 or 3
  std::size_t dimension = 10;  // 10 for f1, 4 for f2 and f3
  double noise_sd = 1.0;       // standard deviation of the additive noise

  // The benchmark setting: sd 1, 125 and 0.1 respectively.
  static FriedmanSpec standard(int which);
};

// Noise-free value of f1, f2 or f3 at x in [0, 1]^d.
double friedman_eval(const FriedmanSpec& spec, std::span<const double> x);

// M uniform i.i.d. nodes, values f(x) + N(0, noise_sd^2).
Dataset friedman_sample(const FriedmanSpec& spec, std::size_t count,
                        RandomStream& rng);
Dataset friedman_sample(const FriedmanSpec& spec, std::size_t count,
                        std::uint64_t seed);

// Target column chosen by header name or by 0-based position; NoTarget
// reads features only and leaves values empty.
using NoTarget = std::monostate;
using TargetColumn = std::variant<std::string, std::size_t, NoTarget>;

// Comma separated, header row, decimal point.
Dataset read_csv(std::istream& in, const TargetColumn& target);
Dataset load_csv(const std::string& path, const TargetColumn& target);

Normalization compute_normalization(const Dataset& reference,
                                    bool include_target = false);
// x -> (x - min) / (max - min) clamped to [0, 1]; constant columns map
// to 0.5.
Dataset apply_normalization(const Dataset& ds, const Normalization& stats);
// Normalizes with statistics of reference (ds itself when absent).
Dataset normalize(const Dataset& ds, const Dataset* reference = nullptr,
                  bool include_target = false);
// Maps normalized targets back to the original scale.
std::vector<double> denormalize_targets(std::span<const double> values,
                                        const Normalization& stats);

// Keeps the listed columns (0-based, ascending).
Dataset project_columns(const Dataset& ds, const Term& keep);

struct SplitPlan {
  struct Fraction {
    double train = 0.7;
  };
  struct Generated {
    std::size_t train = 200;
    std::size_t test = 1000;
  };

  std::variant<Fraction, Generated> mode = Fraction{};
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Random disjoint partition seeded by (seed, repetition).
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitPlan& plan,
                                  std::size_t repetition);

// Fresh training and test samples for one repetition of a generated plan.
std::pair<Dataset, Dataset> generate_pair(const FriedmanSpec& spec,
                                          const SplitPlan& plan,
                                          std::size_t repetition);

struct EvaluationSummary {
  std::string metric;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t repetitions = 0;
  std::size_t failures = 0;
  std::vector<double> values;  // successful repetitions, in repetition order
  std::vector<std::string> failure_messages;
};

// Median and quartiles (linear interpolation between order statistics).
EvaluationSummary summarize(std::string metric, std::vector<double> values,
                            std::vector<std::string> failures);

// Metric of one repetition from its training and test sets. Must be safe
// to call concurrently.
using Recipe = std::function<double(const Dataset& train, const Dataset& test,
                                    std::size_t repetition)>;

// Repetitions run in parallel; a throwing repetition is recorded as a
// failure. Throws AllRepetitionsFailed when nothing succeeded.
EvaluationSummary median_evaluate(const Recipe& recipe, const Dataset& ds,
                                  const SplitPlan& plan, std::string metric);
EvaluationSummary median_evaluate(const Recipe& recipe,
                                  const FriedmanSpec& spec,
                                  const SplitPlan& plan, std::string metric);

}  // namespace anova
