#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace curvkit {

/// Closed enumeration of every check this toolkit can emit. Report records
/// always carry one of these identifiers.
enum class CheckId {
  kFieldSummary,
  kOracleCompare,
  kMetricCompatibility,
  kContractedBianchi,
  kWeylDivergenceCotton,
  kBachTwoRoute,
  kThetaIdentity,
  kTracefreeRicciGradient,
  kBachFlatGradientIdentity,
  kWeylLaplacianIdentity,
  kKatoEinstein,
  kKatoCodazzi,
  kGaussBonnet4d,
  kGaussBonnetRearranged,
  kPointwisePinching4d,
  kRemarkChain4d,
  kLpPinching,
  kHarmonicPinching,
  kBachFlatIntegralPinchingA,
  kBachFlatIntegralPinchingB,
  kEulerFormA,
  kEulerFormB,
  kYamabeLowerBound4d,
  kSobolevBound,
  kYamabeQuotient,
  kKatoCombination,
  kSharpQuadraticCubicEstimate,
  kTuvNormIdentity,
  kCombinedNormIdentity,
  kCubicWeylBound,
  kThetaCoefficientMinimum,
  kWeylCubicConstants,
  kPinchingConstantTable,
};

const char *check_id_name(CheckId id);

/// lhs/rhs/slack summary of one inequality, the universal checker output.
struct EstimateReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0; // rhs - lhs
  bool satisfied = false;

  struct Witness {
    std::int64_t flat_index = -1;
    std::vector<double> coords;
  };
  std::optional<Witness> witness; // location of minimum slack, if any
};

inline EstimateReport make_report(double lhs, double rhs, double margin = 0.0) {
  EstimateReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.satisfied = r.slack >= -margin;
  return r;
}

/// Residual of a two-sided identity with the documented relative floor.
struct IdentityResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  std::vector<double> grid_spacing;

  static constexpr double kFloor = 1e-14;
};

inline IdentityResidual make_residual(double lhs, double rhs,
                                      std::vector<double> spacing = {}) {
  IdentityResidual r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_residual = std::abs(lhs - rhs);
  const double denom =
      std::max({std::abs(lhs), std::abs(rhs), IdentityResidual::kFloor});
  r.rel_residual = r.abs_residual / denom;
  r.grid_spacing = std::move(spacing);
  return r;
}

/// One line of a structured report.
struct CheckRecord {
  enum class Status { kSatisfied, kViolated, kNotApplicable, kInfo };

  std::string name;
  CheckId id = CheckId::kFieldSummary;
  Status status = Status::kInfo;
  EstimateReport report;
  std::string note; // refusal reason, Yamabe source tag, etc.
  std::map<std::string, double> values;
};

const char *status_name(CheckRecord::Status s);

/// Outcome statistics of a random sampling batch.
struct BatchStats {
  long samples = 0;
  long violations = 0;
  double min_slack = 0.0;
  double max_ratio = 0.0; // max lhs/rhs over samples with rhs above floor
  double max_identity_rel_err = 0.0;
  std::uint64_t seed = 0;
};

} // namespace curvkit
