#pragma once

#include "fkpath/model.hpp"

namespace fkpath {

// Two-sided minorization check for the transition kernel over a step of
// length h: with mu fixed to the column average of P_{t,t+h}, returns the
// largest rho in (0,1] with rho*mu(y) <= P(x,y) <= mu(y)/rho for all x,y.
// Returns 0 when the bound degenerates (some transition probability vanishes
// while its reference mass does not, or an all-zero column).
double check_h0_doeblin(const FiniteCtmcModel& model, double t, double h, double rtol = 1e-10);

// Uniform log-ratio bound of the weighted survival mass:
// max over state pairs of log(Q_{s,t}(1)(x) / Q_{s,t}(1)(y)), computed from
// the exact semigroup matrix. Throws NumericError when some Q_{s,t}(1)(y)
// is not strictly positive.
double check_h2_q(const FiniteCtmcModel& model, double s, double t, double rtol = 1e-10);

}  // namespace fkpath
