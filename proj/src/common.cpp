#include "landscape_lab/common.hpp"

namespace landscape_lab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GramNotSPD: return "GramNotSPD";
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::NotHorizontal: return "NotHorizontal";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidSampleCount: return "InvalidSampleCount";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::SamplerStarved: return "SamplerStarved";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidRank: return "InvalidRank";
    case ErrorCode::ZeroTruthSignal: return "ZeroTruthSignal";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidTruth: return "InvalidTruth";
  }
  return "Unknown";
}

}  // namespace landscape_lab
