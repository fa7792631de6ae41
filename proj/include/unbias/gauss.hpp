#pragma once

namespace unbias::gauss {

// Standard normal density.
double pdf(double x);

// Standard normal CDF, evaluated through erfc so the tails keep full
// relative accuracy down to ~1e-300.
double cdf(double x);

// Inverse standard normal CDF (quantile), accurate to ~1 ulp over (0,1).
double ppf(double p);

} // namespace unbias::gauss
