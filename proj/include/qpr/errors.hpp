#ifndef QPR_ERRORS_HPP
#define QPR_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "qpr/multiindex.hpp"

namespace qpr {

struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested evaluation width exceeds the declared analyticity width.
struct width_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A divisor fell below the admissible floor; carries the offending mode.
struct small_divisor_error : std::runtime_error {
    MultiIndex mode;
    double magnitude;
    small_divisor_error(const std::string& msg, MultiIndex k, double mag)
        : std::runtime_error(msg), mode(std::move(k)), magnitude(mag) {}
};

struct spectrum_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Perturbed matrix lies outside the Lemma A.1 ball of the base frame.
struct outside_ball_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A Diophantine check failed at some iteration depth: the parameter is resonant.
struct resonant_epsilon_error : std::runtime_error {
    int m;
    MultiIndex mode;
    double lhs = 0.0, rhs = 0.0;  // the failing inequality's two sides
    int i = -1, j = -1;           // offending eigenvalue index (pair)
    resonant_epsilon_error(const std::string& msg, int m_, MultiIndex k, double lhs_ = 0.0,
                           double rhs_ = 0.0, int i_ = -1, int j_ = -1)
        : std::runtime_error(msg), m(m_), mode(std::move(k)), lhs(lhs_), rhs(rhs_), i(i_), j(j_) {}
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qpr

#endif
