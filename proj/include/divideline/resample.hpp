#pragma once

// Class-balanced subsampling and holdout splitting. Every random choice is a
// pure function of (seed, index) so resamples can be generated in any order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "divideline/error.hpp"
#include "divideline/geodata.hpp"
#include "divideline/random.hpp"

namespace divideline {

struct split_spec {
  double train_fraction = 0.8;
  bool stratified = true;
  std::uint64_t seed = 0;
};

struct resample_plan {
  std::size_t n_resamples = 1000;
  std::uint64_t seed = 0;
};

struct balanced_sample {
  std::vector<labeled_point> points;
};

struct index_split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Training share of a group of n: floor(n * fraction), where a product that
/// is an integer up to rounding counts as that integer; clamped so both
/// sides keep at least one member.
inline std::size_t train_count(std::size_t n, double fraction) {
  const double exact = static_cast<double>(n) * fraction;
  auto k = static_cast<std::size_t>(std::floor(exact + 1e-9 * std::max(1.0, exact)));
  if (n >= 2) k = std::clamp<std::size_t>(k, 1, n - 1);
  return k;
}

namespace detail {

inline void check_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) throw error(errc::invalid_argument, "train_fraction must lie in (0, 1)");
}

/// Shuffles `members` and moves the first train_count of them to train.
inline void split_group(std::vector<std::size_t> members, double fraction, rng& gen, index_split& out) {
  std::shuffle(members.begin(), members.end(), gen);
  const std::size_t k = train_count(members.size(), fraction);
  out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
  out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
}

}  // namespace detail

/// Unstratified holdout split of n items. Both index lists come back sorted.
inline index_split split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
  detail::check_fraction(train_fraction);
  if (n < 2) throw error(errc::class_too_small, "need at least 2 items to split");
  auto gen = make_rng(seed, stream::split);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  index_split out;
  detail::split_group(std::move(all), train_fraction, gen, out);
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

/// Disjoint train/test partition. Stratified splits divide each class
/// separately. Output keeps the input order within each side.
inline std::pair<store_dataset, store_dataset> split(const store_dataset& dataset, const split_spec& spec) {
  detail::check_fraction(spec.train_fraction);
  index_split parts;
  if (spec.stratified) {
    auto gen = make_rng(spec.seed, stream::split);
    for (const brand_class c : {brand_class::north, brand_class::south}) {
      std::vector<std::size_t> members;
      for (std::size_t k = 0; k < dataset.points.size(); ++k)
        if (dataset.points[k].label == c) members.push_back(k);
      if (members.size() < 2)
        throw error(errc::class_too_small, "class " + std::to_string(static_cast<int>(c)) + " has " +
                                               std::to_string(members.size()) + " point(s)");
      detail::split_group(std::move(members), spec.train_fraction, gen, parts);
    }
    std::sort(parts.train.begin(), parts.train.end());
    std::sort(parts.test.begin(), parts.test.end());
  } else {
    parts = split_indices(dataset.points.size(), spec.train_fraction, spec.seed);
  }
  store_dataset train, test;
  train.brand_names = test.brand_names = dataset.brand_names;
  for (const auto k : parts.train) train.points.push_back(dataset.points[k]);
  for (const auto k : parts.test) test.points.push_back(dataset.points[k]);
  return {std::move(train), std::move(test)};
}

/// All minority-class points plus an equally sized subset of the majority
/// class drawn without replacement. Points keep their dataset order.
inline balanced_sample make_balanced_sample(const store_dataset& dataset, std::uint64_t index,
                                            const resample_plan& plan) {
  std::vector<std::size_t> north, south;
  for (std::size_t k = 0; k < dataset.points.size(); ++k)
    (dataset.points[k].label == brand_class::north ? north : south).push_back(k);
  if (north.empty() || south.empty()) throw error(errc::empty_class, "balanced sampling needs both classes");

  auto& majority = north.size() >= south.size() ? north : south;
  const auto& minority = north.size() >= south.size() ? south : north;
  if (majority.size() > minority.size()) {
    auto gen = make_rng(plan.seed, stream::resample, index);
    // Partial Fisher-Yates: the first minority.size() slots become the subset.
    for (std::size_t k = 0; k < minority.size(); ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, majority.size() - 1);
      std::swap(majority[k], majority[pick(gen)]);
    }
    majority.resize(minority.size());
  }
  std::vector<std::size_t> chosen(minority.begin(), minority.end());
  chosen.insert(chosen.end(), majority.begin(), majority.end());
  std::sort(chosen.begin(), chosen.end());

  balanced_sample out;
  out.points.reserve(chosen.size());
  for (const auto k : chosen) out.points.push_back(dataset.points[k]);
  return out;
}

}  // namespace divideline
