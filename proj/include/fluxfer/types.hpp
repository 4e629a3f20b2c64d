#ifndef FLUXFER_TYPES_HPP
#define FLUXFER_TYPES_HPP

#include <complex>

#include <Eigen/Dense>

namespace fluxfer {

inline constexpr const char* kVersion = "0.1.0";

using complexd = std::complex<double>;

using Matrix5c = Eigen::Matrix<complexd, 5, 5>;
using Matrix3c = Eigen::Matrix<complexd, 3, 3>;
using Vector5c = Eigen::Matrix<complexd, 5, 1>;
using Vector3c = Eigen::Matrix<complexd, 3, 1>;

// Five-mode amplitude vector, ordered (a_L, a_M, a_R, b_1, b_2).
using FluctuationState = Vector5c;

// Dense 5x5 density matrix in the same ordering.
using DensityMatrix5 = Matrix5c;

enum ModeIndex : int {
    kCavityLeft = 0,
    kCavityMiddle = 1,
    kCavityRight = 2,
    kMembrane1 = 3,
    kMembrane2 = 4,
};

inline constexpr complexd kImagUnit{0.0, 1.0};

} // namespace fluxfer

#endif
