#pragma once

namespace sscw {

/// Default tolerances shared by the library, the tests and the CLI.
struct Tolerances {
  /// Allowed deviation of fitted Novikov-Shubin exponents from their targets (finite-size fitting).
  static constexpr double fit = 0.1;
  /// Slack for identities that hold exactly up to floating-point error.
  static constexpr double identity = 1e-10;
  /// Eigenvalues with |λ| <= spectral * max(1, λ_max) are treated as exact zeros.
  static constexpr double spectral = 1e-8;
  /// Relative variation of the local log-log slope admitted inside an automatic fit window.
  static constexpr double slope_variation = 0.05;
};

}  // namespace sscw
