#include "fas/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fas/error.hpp"

namespace fas {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Wichura, Algorithm AS241 (PPND16), Appl. Statist. 37(3), 1988.
double std_normal_quantile_fast(double u) noexcept {
    if (!(u > 0.0)) return -std::numeric_limits<double>::infinity();
    if (!(u < 1.0)) return std::numeric_limits<double>::infinity();

    const double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((r * 5226.495278852854561 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }

    double r = q < 0.0 ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                   1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
                4.6303378461565452959) * r + 1.42343711074968357734) /
              (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                   0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
                2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                   0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
                5.4637849111641143699) * r + 6.6579046435011037772) /
              (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                   7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

double std_normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("std_normal_quantile: probability " + std::to_string(u) + " outside (0, 1)");
    }
    double v = std_normal_quantile_fast(u);
    // Newton against the tail that carries the precision.
    const double pdf = std_normal_pdf(v);
    if (pdf > 0.0) {
        const double resid = u < 0.5 ? std_normal_cdf(v) - u : (1.0 - u) - std_normal_cdf(-v);
        v -= resid / pdf;
    }
    return v;
}

double truncated_normal_mean_below(double x) {
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    if (x < -30.0) {
        // Φ(x)/φ(x) = 1/(t + 1/(t + 2/(t + 3/(t + ...)))), t = -x, evaluated bottom-up.
        const double t = -x;
        double d = t;
        for (int k = 40; k >= 1; --k) d = t + k / d;
        return -d;
    }
    return -std_normal_pdf(x) / std_normal_cdf(x);
}

}  // namespace fas
