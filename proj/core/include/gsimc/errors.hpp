#pragma once

#include <stdexcept>
#include <string>

namespace gsimc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class SplitError : public Error { using Error::Error; };
class HoldoutError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };

// graph
class DegenerateDegreeError : public Error { using Error::Error; };
class DegenerateRowError : public Error { using Error::Error; };

// spectral
class NumericError : public Error { using Error::Error; };
class RankDeficiencyError : public Error { using Error::Error; };

// kernels
class KernelDomainError : public Error { using Error::Error; };

// evaluation / estimation
class ProtocolError : public Error { using Error::Error; };
class EstimationError : public Error { using Error::Error; };

// theory
class BandlimitError : public Error { using Error::Error; };
class BoundUndefinedError : public Error { using Error::Error; };
class InterpolationError : public Error { using Error::Error; };

}  // namespace gsimc
