// model.hpp — physical parameters, lattice indexing and the power-law rate kernel

#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>

#include "lrhsr/errors.hpp"

namespace lrhsr {

enum class Boundary { periodic, open };

inline std::string to_string(Boundary bc) { return bc == Boundary::periodic ? "periodic" : "open"; }

inline Boundary parse_boundary(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "open") return Boundary::open;
    throw ConfigError("bc", "expected 'periodic' or 'open', got '" + s + "'");
}

using Coord = std::array<long, 3>; // lattice coordinates or displacement; unused axes are 0

struct ModelParams {
    int d{1};
    double alpha{1.0};
    double J{1.0};
    double gamma{10.0};
    long N{101};
    Boundary bc{Boundary::open};

    double kappa() const {
        if (!(gamma > 0.0)) throw DomainError("kappa requires gamma > 0");
        return 2.0 * J * J / gamma;
    }

    long sites() const {
        long n = 1;
        for (int a = 0; a < d; ++a) n *= N;
        return n;
    }

    void validate() const {
        if (d < 1 || d > 3) throw DomainError("lattice dimension must be 1, 2 or 3");
        if (N < 2) throw DomainError("N must be at least 2");
        if (!std::isfinite(alpha) || alpha <= 0.0) throw DomainError("alpha must be finite and positive");
        if (!std::isfinite(J)) throw DomainError("J must be finite");
        if (!std::isfinite(gamma) || gamma < 0.0) throw DomainError("gamma must be finite and non-negative");
    }
};

inline double alpha_critical(int d) { return (d + 2) / 2.0; }

// Flat key-value form; keys d, alpha, J, gamma, N, bc.
inline std::map<std::string, std::string> to_key_values(const ModelParams& p) {
    auto num = [](double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    };
    return {{"d", std::to_string(p.d)}, {"alpha", num(p.alpha)}, {"J", num(p.J)},
            {"gamma", num(p.gamma)},    {"N", std::to_string(p.N)}, {"bc", to_string(p.bc)}};
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw ConfigError(key, "not a finite number: '" + s + "'");
    return v;
}

inline long parse_long(const std::string& key, const std::string& s) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) throw ConfigError(key, "not an integer: '" + s + "'");
    return v;
}

} // namespace detail

// Missing keys keep the defaults of `base`; unknown keys are rejected.
inline ModelParams from_key_values(const std::map<std::string, std::string>& kv, ModelParams base = {}) {
    for (const auto& [k, v] : kv) {
        if (k == "d") base.d = static_cast<int>(detail::parse_long(k, v));
        else if (k == "alpha") base.alpha = detail::parse_double(k, v);
        else if (k == "J") base.J = detail::parse_double(k, v);
        else if (k == "gamma") base.gamma = detail::parse_double(k, v);
        else if (k == "N") base.N = detail::parse_long(k, v);
        else if (k == "bc") base.bc = parse_boundary(v);
        else throw ConfigError(k, "unknown model key");
    }
    try {
        base.validate();
    } catch (const DomainError& e) {
        throw ConfigError("model", e.what());
    }
    return base;
}

// ---- lattice indexing (row-major, axis 0 slowest) ----

inline long flatten(const Coord& c, long N, int d) {
    long idx = 0;
    for (int a = 0; a < d; ++a) {
        if (c[a] < 0 || c[a] >= N) throw DomainError("lattice coordinate out of range");
        idx = idx * N + c[a];
    }
    return idx;
}

inline Coord unflatten(long idx, long N, int d) {
    if (idx < 0) throw DomainError("negative lattice index");
    Coord c{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
        c[a] = idx % N;
        idx /= N;
    }
    if (idx != 0) throw DomainError("lattice index out of range");
    return c;
}

// Signed minimum-image representative of x modulo N, in (-N/2, N/2].
inline long min_image(long x, long N) {
    long m = ((x % N) + N) % N;
    if (2 * m > N) m -= N;
    return m;
}

inline Coord displacement(const Coord& from, const Coord& to, const ModelParams& p) {
    Coord r{0, 0, 0};
    for (int a = 0; a < p.d; ++a) {
        r[a] = to[a] - from[a];
        if (p.bc == Boundary::periodic) r[a] = min_image(r[a], p.N);
    }
    return r;
}

inline long norm2(const Coord& r, int d) {
    long s = 0;
    for (int a = 0; a < d; ++a) s += r[a] * r[a];
    return s;
}

// |r|^{-p} from the squared integer norm.
inline double inverse_power(long r2, double p) { return std::pow(static_cast<double>(r2), -0.5 * p); }

// ---- rate kernel ----

inline double hopping_amplitude(const ModelParams& p, const Coord& r) {
    if (p.bc == Boundary::periodic && p.d == 1) {
        long m = ((r[0] % p.N) + p.N) % p.N;
        if (m == 0) throw DomainError("hopping amplitude requires r != 0");
        return p.J * (std::pow(static_cast<double>(m), -p.alpha) +
                      std::pow(static_cast<double>(p.N - m), -p.alpha));
    }
    Coord rr = r;
    if (p.bc == Boundary::periodic)
        for (int a = 0; a < p.d; ++a) rr[a] = min_image(rr[a], p.N);
    long r2 = norm2(rr, p.d);
    if (r2 == 0) throw DomainError("hopping amplitude requires r != 0");
    return p.J * inverse_power(r2, p.alpha);
}

inline double classical_rate(const ModelParams& p, const Coord& r) {
    if (!(p.gamma > 0.0)) throw DomainError("classical rate requires gamma > 0");
    Coord rr = r;
    if (p.bc == Boundary::periodic)
        for (int a = 0; a < p.d; ++a) rr[a] = min_image(rr[a], p.N);
    long r2 = norm2(rr, p.d);
    if (r2 == 0) throw DomainError("classical rate requires r != 0");
    return p.kappa() * inverse_power(r2, 2.0 * p.alpha);
}

} // namespace lrhsr
