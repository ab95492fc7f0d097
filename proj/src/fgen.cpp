#include "codine/fgen.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace codine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLog4 = std::log(4.0);

void require_positive(double u, const char *who) {
    if (!(u > 0.0)) throw std::domain_error(std::string(who) + ": argument must be > 0");
}

}  // namespace

double softplus(double x) { return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

GenName parse_generator(std::string_view name) {
    if (name == "gan") return GenName::Gan;
    if (name == "kl") return GenName::Kl;
    if (name == "hd") return GenName::Hd;
    throw std::invalid_argument("unknown generator '" + std::string(name) +
                                "' (expected gan, kl or hd)");
}

std::string to_string(GenName name) {
    switch (name) {
        case GenName::Gan: return "gan";
        case GenName::Kl: return "kl";
        case GenName::Hd: return "hd";
    }
    throw std::invalid_argument("invalid GenName");
}

double FGenerator::f(double u) const {
    require_positive(u, "f");
    switch (name) {
        case GenName::Gan:
            return u * std::log(u) - (u + 1.0) * std::log(u + 1.0) + kLog4;
        case GenName::Kl: return u * std::log(u);
        case GenName::Hd: {
            const double s = std::sqrt(u) - 1.0;
            return s * s;
        }
    }
    return 0.0;
}

double FGenerator::f_prime(double u) const {
    require_positive(u, "f_prime");
    switch (name) {
        case GenName::Gan: return std::log(u) - std::log(u + 1.0);
        case GenName::Kl: return std::log(u) + 1.0;
        case GenName::Hd: return 1.0 - 1.0 / std::sqrt(u);
    }
    return 0.0;
}

double FGenerator::f_star(double t) const {
    if (!in_domain(t)) throw std::domain_error("f_star: t outside the generator domain");
    switch (name) {
        case GenName::Gan: return -std::log(-std::expm1(t)) - kLog4;
        case GenName::Kl: return std::exp(t - 1.0);
        case GenName::Hd: return t / (1.0 - t);
    }
    return 0.0;
}

double FGenerator::f_star_prime(double t) const {
    if (!in_domain(t)) throw std::domain_error("f_star_prime: t outside the generator domain");
    switch (name) {
        case GenName::Gan: return 1.0 / std::expm1(-t);
        case GenName::Kl: return std::exp(t - 1.0);
        case GenName::Hd: {
            const double d = 1.0 - t;
            return 1.0 / (d * d);
        }
    }
    return 0.0;
}

double FGenerator::log_f_star_prime(double t) const {
    if (!in_domain(t))
        throw std::domain_error("log_f_star_prime: t outside the generator domain");
    switch (name) {
        case GenName::Gan: return -std::log(std::expm1(-t));
        case GenName::Kl: return t - 1.0;
        case GenName::Hd: return -2.0 * std::log(1.0 - t);
    }
    return 0.0;
}

double FGenerator::activation(double raw) const {
    switch (name) {
        case GenName::Gan: return -softplus(raw);
        case GenName::Kl: return raw;
        case GenName::Hd: return 1.0 - softplus(raw);
    }
    return 0.0;
}

double FGenerator::activation_deriv(double raw) const {
    switch (name) {
        case GenName::Gan: return -sigmoid(raw);
        case GenName::Kl: return 1.0;
        case GenName::Hd: return -sigmoid(raw);
    }
    return 0.0;
}

FGenerator make_generator(GenName name) {
    FGenerator g;
    g.name = name;
    switch (name) {
        case GenName::Gan:
            g.t_lo = -kInf;
            g.t_hi = 0.0;
            break;
        case GenName::Kl:
            g.t_lo = -kInf;
            g.t_hi = kInf;
            break;
        case GenName::Hd:
            g.t_lo = -kInf;
            g.t_hi = 1.0;
            break;
    }
    return g;
}

FGenerator make_generator(std::string_view name) { return make_generator(parse_generator(name)); }

}  // namespace codine
