#include "stereogt/error.hpp"

namespace stereogt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidCalibration: return "invalid calibration";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kDivergentCalibration: return "divergent calibration";
    case ErrorCode::kInvalidDepth: return "invalid depth";
    case ErrorCode::kInvalidDisparity: return "invalid disparity";
    case ErrorCode::kBehindCamera: return "behind camera";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kCorruptDataset: return "corrupt dataset";
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kRangeOverflow: return "range overflow";
    case ErrorCode::kDivideByZero: return "divide by zero";
    case ErrorCode::kInput: return "input error";
    case ErrorCode::kEmptyEvaluation: return "empty evaluation";
    case ErrorCode::kPairing: return "pairing error";
    case ErrorCode::kSpec: return "spec error";
  }
  return "unknown error";
}

}  // namespace stereogt
