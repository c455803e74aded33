#include "cryptolstm/error.hpp"

namespace cryptolstm {

std::string_view to_string(ErrorCode code) {
	switch (code) {
	case ErrorCode::MissingHeader: return "MissingHeader";
	case ErrorCode::EmptySeries: return "EmptySeries";
	case ErrorCode::MalformedRow: return "MalformedRow";
	case ErrorCode::HttpError: return "HttpError";
	case ErrorCode::ApiShapeError: return "ApiShapeError";
	case ErrorCode::DegenerateRange: return "DegenerateRange";
	case ErrorCode::SeriesTooShort: return "SeriesTooShort";
	case ErrorCode::NonFiniteActivation: return "NonFiniteActivation";
	case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
	case ErrorCode::LengthMismatch: return "LengthMismatch";
	case ErrorCode::DegenerateVariance: return "DegenerateVariance";
	case ErrorCode::EmptyChart: return "EmptyChart";
	case ErrorCode::TimerMisuse: return "TimerMisuse";
	case ErrorCode::InvalidArgument: return "InvalidArgument";
	case ErrorCode::IoError: return "IoError";
	}
	return "Unknown";
}

} // namespace cryptolstm
