#ifndef sketchla_errors_hh
#define sketchla_errors_hh

#include <stdexcept>
#include <string>

namespace sketchla {

/// Operand dimensions do not conform.
class ShapeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A kernel received a matrix in the wrong storage order. Kernels never
/// convert silently; callers decide who pays for a transpose.
class LayoutError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class NotPositiveDefinite : public std::runtime_error {
  public:
    NotPositiveDefinite(std::size_t pivot, double value)
        : std::runtime_error("cholesky: non-positive pivot " + std::to_string(value) +
                             " at index " + std::to_string(pivot)),
          pivot_index(pivot) {}
    std::size_t pivot_index;
};

/// Triangular factor with a zero diagonal entry.
class SingularError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SymmetryError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Requested object would exceed a size guard (densify, bench memory budget).
class CapacityError : public std::length_error {
  public:
    using std::length_error::length_error;
};

class PartitionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace sketchla

#endif
