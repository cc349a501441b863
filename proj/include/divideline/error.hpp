#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divideline {

enum class errc {
  missing_file,
  malformed_row,
  unknown_brand,
  coordinate_out_of_range,
  fewer_than_two_per_class,
  non_positive_income,
  duplicate_region,
  not_a_polygon,
  degenerate_ring,
  degenerate_bbox,
  class_too_small,
  empty_class,
  zero_variance,
  degenerate_hyperplane,
  empty_ensemble,
  cancellation_degenerate,
  no_intersection,
  divergence_detected,
  all_equal,
  test_set_empty,
  no_crossing,
  empty_scene,
  invalid_argument,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::missing_file: return "MissingFile";
    case errc::malformed_row: return "MalformedRow";
    case errc::unknown_brand: return "UnknownBrand";
    case errc::coordinate_out_of_range: return "CoordinateOutOfRange";
    case errc::fewer_than_two_per_class: return "FewerThanTwoPerClass";
    case errc::non_positive_income: return "NonPositiveIncome";
    case errc::duplicate_region: return "DuplicateRegion";
    case errc::not_a_polygon: return "NotAPolygon";
    case errc::degenerate_ring: return "DegenerateRing";
    case errc::degenerate_bbox: return "DegenerateBbox";
    case errc::class_too_small: return "ClassTooSmall";
    case errc::empty_class: return "EmptyClass";
    case errc::zero_variance: return "ZeroVariance";
    case errc::degenerate_hyperplane: return "DegenerateHyperplane";
    case errc::empty_ensemble: return "EmptyEnsemble";
    case errc::cancellation_degenerate: return "CancellationDegenerate";
    case errc::no_intersection: return "NoIntersection";
    case errc::divergence_detected: return "DivergenceDetected";
    case errc::all_equal: return "AllEqual";
    case errc::test_set_empty: return "TestSetEmpty";
    case errc::no_crossing: return "NoCrossing";
    case errc::empty_scene: return "EmptyScene";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Input-validation failures (bad files, bad arguments) as opposed to
/// failures of a numerical pipeline stage on valid input.
constexpr bool is_input_error(errc code) noexcept {
  switch (code) {
    case errc::missing_file:
    case errc::malformed_row:
    case errc::unknown_brand:
    case errc::coordinate_out_of_range:
    case errc::fewer_than_two_per_class:
    case errc::non_positive_income:
    case errc::duplicate_region:
    case errc::not_a_polygon:
    case errc::degenerate_ring:
    case errc::degenerate_bbox:
    case errc::invalid_argument:
      return true;
    default:
      return false;
  }
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace divideline
