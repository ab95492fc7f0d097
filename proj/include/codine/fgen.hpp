#ifndef CODINE_FGEN_HPP
#define CODINE_FGEN_HPP

#include <string>
#include <string_view>

namespace codine {

enum class GenName { Gan, Kl, Hd };

GenName parse_generator(std::string_view name);  // "gan" | "kl" | "hd"
std::string to_string(GenName name);

// One f-divergence generator: f, its derivative, the Fenchel conjugate f*,
// the conjugate derivative (f*)', and the output activation that maps a raw
// network output into the domain where f* is defined.
//
//   GAN: f(u) = u ln u - (u+1) ln(u+1) + ln 4        t in (-inf, 0)
//   KL:  f(u) = u ln u                               t in (-inf, inf)
//   HD:  f(u) = (sqrt(u) - 1)^2                      t in (-inf, 1)
//
// The GAN conjugate carries the -ln 4 constant so that f* is the exact
// conjugate of the shifted generator above; with it, f*(f'(u)) = u f'(u) - f(u)
// holds for every generator and the value function is tight at independence.
//
// Copula densities are recovered through (f*)', the inverse of f', so that
// recover(f'(u)) = u exactly. f*(T) itself only coincides with (f*)' for KL.
struct FGenerator {
    GenName name = GenName::Kl;
    double t_lo = 0.0;  // open lower end of the valid T domain (-inf allowed)
    double t_hi = 0.0;  // open upper end

    double f(double u) const;
    double f_prime(double u) const;
    double f_star(double t) const;
    double f_star_prime(double t) const;
    // ln (f*)'(t); overflow-safe route used for log-density arithmetic.
    double log_f_star_prime(double t) const;

    // Smooth strictly monotone map from all of R into (t_lo, t_hi).
    double activation(double raw) const;
    double activation_deriv(double raw) const;

    bool in_domain(double t) const { return t > t_lo && t < t_hi; }
};

FGenerator make_generator(GenName name);
FGenerator make_generator(std::string_view name);

// Numerically stable ln(1 + e^x) and logistic function.
double softplus(double x);
double sigmoid(double x);

}  // namespace codine

#endif  // CODINE_FGEN_HPP
