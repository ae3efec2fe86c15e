#pragma once

// One-way ANOVA and Tukey HSD (Tukey-Kramer for unequal group sizes) with
// self-contained F and studentized-range tail probabilities.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "percept/errors.hpp"

namespace percept {

struct GroupSample {
    std::string name;
    std::vector<double> observations;
};

struct AnovaResult {
    double f = 0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
    double p = 1;
    double ss_between = 0;
    double ss_within = 0;
    double ms_within = 0;
};

struct TukeyEntry {
    std::string a;
    std::string b;
    double difference = 0;  // mean(a) - mean(b)
    double q = 0;
    double p = 1;
    bool significant = false;
};

struct TukeyResult {
    double alpha = 0.05;
    std::size_t groups = 0;
    std::size_t df_within = 0;
    double ms_within = 0;
    std::vector<TukeyEntry> entries;  // pairs (i, j) with i < j in input order

    /// Entry for (a, b) in either orientation; the difference follows the
    /// requested orientation.
    TukeyEntry entry(const std::string& a, const std::string& b) const {
        for (const auto& e : entries) {
            if (e.a == a && e.b == b) return e;
            if (e.a == b && e.b == a) {
                TukeyEntry flipped = e;
                std::swap(flipped.a, flipped.b);
                flipped.difference = -e.difference;
                return flipped;
            }
        }
        throw ConfigError("no Tukey entry for groups '" + a + "' and '" + b + "'");
    }
};

// ---------------------------------------------------------------------------
// Distribution tails

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 10000;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) return h;
    }
    throw AccuracyError("incomplete beta continued fraction did not converge for a=" + std::to_string(a) +
                        " b=" + std::to_string(b) + " x=" + std::to_string(x));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// 15-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
inline constexpr std::array<double, 8> kGlNodes = {
    0.000000000000000000000000000000, 0.201194093997434522300628303395, 0.394151347077563369897207370981,
    0.570972172608538847537226737254, 0.724417731360170047416186054614, 0.848206583410427216200648320774,
    0.937273392400705904307758947710, 0.987992518020485428489565718587};
inline constexpr std::array<double, 8> kGlWeights = {
    0.202578241925561272880620199968, 0.198431485327111576456118326444, 0.186161000015562211026800561866,
    0.166269205816993933553200860481, 0.139570677926154314447804794511, 0.107159220467171935011869546686,
    0.070366047488108124709267416451, 0.030753241996117268354628393577};

inline double gauss_legendre_15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = kGlWeights[0] * f(mid);
    for (std::size_t i = 1; i < kGlNodes.size(); ++i) {
        const double dx = half * kGlNodes[i];
        sum += kGlWeights[i] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
}

struct Quadrature {
    double value = 0;
    double error = 0;
};

// Adaptive bisection: accept a panel when the 15-point estimate and the sum
// of its two halves agree to within the panel's share of the tolerance.
inline Quadrature adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b, double tol,
                                          int max_depth = 30) {
    Quadrature out;
    std::function<void(double, double, double, double, int)> refine = [&](double lo, double hi, double whole,
                                                                          double t, int depth) {
        const double mid = 0.5 * (lo + hi);
        const double left = gauss_legendre_15(f, lo, mid);
        const double right = gauss_legendre_15(f, mid, hi);
        const double err = std::abs(left + right - whole);
        if (err <= t || depth >= max_depth) {
            out.value += left + right;
            out.error += err;
            return;
        }
        refine(lo, mid, left, 0.5 * t, depth + 1);
        refine(mid, hi, right, 0.5 * t, depth + 1);
    };
    refine(a, b, gauss_legendre_15(f, a, b), tol, 0);
    return out;
}

// Probability that the range of k iid standard normals is below w.
inline double normal_range_cdf(double w, int k, double tol, double& error) {
    if (w <= 0) return 0.0;
    const auto integrand = [&](double z) {
        const double inner = normal_cdf(z) - normal_cdf(z - w);
        return normal_pdf(z) * std::pow(inner, k - 1);
    };
    const auto q = adaptive_gauss_legendre(integrand, -8.5, 8.5 + w, tol);
    error = std::max(error, k * q.error);
    return std::clamp(k * q.value, 0.0, 1.0);
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) throw ConfigError("incomplete beta needs positive shape parameters");
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(F > f) for the F(d1, d2) distribution.
inline double f_tail(double f, double d1, double d2) {
    if (!(d1 > 0) || !(d2 > 0)) throw ConfigError("F distribution needs positive degrees of freedom");
    if (std::isnan(f)) throw ConfigError("F statistic is NaN");
    if (f <= 0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

inline constexpr double kStudentizedRangeTolerance = 1e-5;

/// P(Q > q) for the studentized range of k means with df degrees of freedom,
/// by adaptive quadrature of
///   P(Q < q) = integral_0^inf f_S(s) P_k(q s) ds,   S = sqrt(chi2_df / df).
inline double studentized_range_tail(double q, int k, double df) {
    if (k < 2) throw ConfigError("studentized range needs k >= 2, got " + std::to_string(k));
    if (!(df > 0)) throw ConfigError("studentized range needs df > 0");
    if (std::isnan(q)) throw ConfigError("studentized range statistic is NaN");
    if (q <= 0) return 1.0;
    if (std::isinf(q)) return 0.0;

    // Worst inner-integral error, plus the outer error below.
    double error = 0;
    constexpr double inner_tol = 1e-10;
    double cdf;
    if (df > 1e6) {
        cdf = detail::normal_range_cdf(q, k, inner_tol, error);
    } else {
        const double log_norm = 0.5 * df * std::log(df) - std::lgamma(0.5 * df) - (0.5 * df - 1.0) * std::log(2.0);
        const auto density = [&](double s) {
            if (s <= 0) return 0.0;
            return std::exp(log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s);
        };
        const auto integrand = [&](double s) {
            const double d = density(s);
            if (d < 1e-300) return 0.0;
            return d * detail::normal_range_cdf(q * s, k, inner_tol, error);
        };
        // S concentrates around 1 with spread about 1/sqrt(2 df).
        const double spread = 1.0 / std::sqrt(2.0 * df);
        const double lo = std::max(0.0, 1.0 - 14.0 * spread);
        const double hi = 1.0 + 14.0 * spread + (df < 4 ? 6.0 : 0.0);
        const auto outer = detail::adaptive_gauss_legendre(integrand, lo, hi, 1e-9);
        error += outer.error;
        cdf = outer.value;
    }
    if (error > kStudentizedRangeTolerance)
        throw AccuracyError("studentized range quadrature reached only " + std::to_string(error) +
                            " (target " + std::to_string(kStudentizedRangeTolerance) + ")");
    return std::clamp(1.0 - cdf, 0.0, 1.0);
}

enum class TailKind { F, StudentizedRange };

/// Upper-tail probability. F takes (d1, d2); the studentized range takes
/// (k, df).
inline double dist_tail(TailKind kind, double statistic, double dof1, double dof2) {
    if (kind == TailKind::F) return f_tail(statistic, dof1, dof2);
    if (dof1 != std::floor(dof1)) throw ConfigError("studentized range group count must be an integer");
    return studentized_range_tail(statistic, static_cast<int>(dof1), dof2);
}

// ---------------------------------------------------------------------------
// Tests

namespace detail {

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline void check_groups(const std::vector<GroupSample>& groups) {
    if (groups.size() < 2) throw ConfigError("ANOVA needs at least 2 groups, got " + std::to_string(groups.size()));
    for (const auto& g : groups)
        if (g.observations.size() < 2)
            throw InsufficientRunsError("group '" + g.name + "' has " + std::to_string(g.observations.size()) +
                                        " observations; at least 2 are required");
}

}  // namespace detail

inline AnovaResult anova_oneway(const std::vector<GroupSample>& groups) {
    detail::check_groups(groups);
    std::size_t n = 0;
    double total = 0;
    for (const auto& g : groups) {
        n += g.observations.size();
        for (double x : g.observations) total += x;
    }
    const double grand = total / static_cast<double>(n);

    AnovaResult r;
    for (const auto& g : groups) {
        const double m = detail::mean(g.observations);
        r.ss_between += static_cast<double>(g.observations.size()) * (m - grand) * (m - grand);
        for (double x : g.observations) r.ss_within += (x - m) * (x - m);
    }
    r.df_between = groups.size() - 1;
    r.df_within = n - groups.size();
    if (r.ss_within == 0) {
        if (r.ss_between > 0) throw DegenerateVarianceError("zero within-group variance: F is infinite");
        throw DegenerateVarianceError("all observations are identical: F is undefined");
    }
    r.ms_within = r.ss_within / static_cast<double>(r.df_within);
    r.f = (r.ss_between / static_cast<double>(r.df_between)) / r.ms_within;
    r.p = f_tail(r.f, static_cast<double>(r.df_between), static_cast<double>(r.df_within));
    return r;
}

inline TukeyResult tukey_hsd(const std::vector<GroupSample>& groups, double alpha = 0.05) {
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
    const auto anova = anova_oneway(groups);
    TukeyResult r;
    r.alpha = alpha;
    r.groups = groups.size();
    r.df_within = anova.df_within;
    r.ms_within = anova.ms_within;
    const int k = static_cast<int>(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i)
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const auto& a = groups[i];
            const auto& b = groups[j];
            TukeyEntry e;
            e.a = a.name;
            e.b = b.name;
            e.difference = detail::mean(a.observations) - detail::mean(b.observations);
            const double se = std::sqrt(0.5 * anova.ms_within *
                                        (1.0 / static_cast<double>(a.observations.size()) +
                                         1.0 / static_cast<double>(b.observations.size())));
            e.q = std::abs(e.difference) / se;
            e.p = studentized_range_tail(e.q, k, static_cast<double>(anova.df_within));
            e.significant = e.p < alpha;
            r.entries.push_back(e);
        }
    return r;
}

}  // namespace percept
