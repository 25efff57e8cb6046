#include "curvkit/report.hpp"

namespace curvkit {

const char *check_id_name(CheckId id) {
  switch (id) {
  case CheckId::kFieldSummary: return "field-summary";
  case CheckId::kOracleCompare: return "oracle-compare";
  case CheckId::kMetricCompatibility: return "metric-compatibility";
  case CheckId::kContractedBianchi: return "contracted-bianchi";
  case CheckId::kWeylDivergenceCotton: return "weyl-divergence-cotton";
  case CheckId::kBachTwoRoute: return "bach-two-route";
  case CheckId::kThetaIdentity: return "theta-identity";
  case CheckId::kTracefreeRicciGradient: return "tracefree-ricci-gradient";
  case CheckId::kBachFlatGradientIdentity: return "bachflat-gradient-identity";
  case CheckId::kWeylLaplacianIdentity: return "weyl-laplacian-identity";
  case CheckId::kKatoEinstein: return "kato-einstein";
  case CheckId::kKatoCodazzi: return "kato-codazzi";
  case CheckId::kGaussBonnet4d: return "gauss-bonnet-4d";
  case CheckId::kGaussBonnetRearranged: return "gauss-bonnet-rearranged";
  case CheckId::kPointwisePinching4d: return "pointwise-pinching-4d";
  case CheckId::kRemarkChain4d: return "remark-chain-4d";
  case CheckId::kLpPinching: return "lp-pinching";
  case CheckId::kHarmonicPinching: return "harmonic-pinching";
  case CheckId::kBachFlatIntegralPinchingA: return "bachflat-integral-pinching-a";
  case CheckId::kBachFlatIntegralPinchingB: return "bachflat-integral-pinching-b";
  case CheckId::kEulerFormA: return "euler-form-a";
  case CheckId::kEulerFormB: return "euler-form-b";
  case CheckId::kYamabeLowerBound4d: return "yamabe-lower-bound-4d";
  case CheckId::kSobolevBound: return "sobolev-bound";
  case CheckId::kYamabeQuotient: return "yamabe-quotient";
  case CheckId::kKatoCombination: return "kato-combination";
  case CheckId::kSharpQuadraticCubicEstimate: return "sharp-quadratic-cubic-estimate";
  case CheckId::kTuvNormIdentity: return "tuv-norm-identity";
  case CheckId::kCombinedNormIdentity: return "combined-norm-identity";
  case CheckId::kCubicWeylBound: return "cubic-weyl-bound";
  case CheckId::kThetaCoefficientMinimum: return "theta-coefficient-minimum";
  case CheckId::kWeylCubicConstants: return "weyl-cubic-constants";
  case CheckId::kPinchingConstantTable: return "pinching-constant-table";
  }
  return "unknown";
}

const char *status_name(CheckRecord::Status s) {
  switch (s) {
  case CheckRecord::Status::kSatisfied: return "satisfied";
  case CheckRecord::Status::kViolated: return "violated";
  case CheckRecord::Status::kNotApplicable: return "not-applicable";
  case CheckRecord::Status::kInfo: return "info";
  }
  return "unknown";
}

} // namespace curvkit
