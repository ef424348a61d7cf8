#include "nlpf/potential.hpp"

#include <cmath>
#include <numbers>

#include "nlpf/errors.hpp"

namespace nlpf {

std::string to_string(PotentialFamily f) {
    return f == PotentialFamily::HardLog ? "hardlog" : "doublelog";
}

namespace {

// Chebyshev-distributed samples on (−1,1) plus r = 0.
std::vector<double> sample_points(int count) {
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(count) + 1);
    for (int k = 0; k < count; ++k)
        r.push_back(std::cos(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * count)));
    r.push_back(0.0);
    return r;
}

}  // namespace

PotentialSpec PotentialSpec::hard_log(double c1, double lambda_w) {
    if (!(c1 >= 0.0) || !std::isfinite(c1))
        throw ConfigError("hardlog: barrier coefficient c1 must be >= 0");
    if (!(lambda_w >= 0.0) || !std::isfinite(lambda_w))
        throw ConfigError("hardlog: well coefficient lambda_w must be >= 0");
    PotentialSpec p;
    p.family_ = PotentialFamily::HardLog;
    p.c1_ = c1;
    p.lambda_w_ = lambda_w;
    // Offset c0 so that min W = 0. Without the offset the minimum sits at 0
    // when lambda_w <= 2c1, else at r* with 1 − r*² = 2c1/lambda_w.
    if (lambda_w > 2.0 * c1 && lambda_w > 0.0) {
        const double one_minus_r2 = 2.0 * c1 / lambda_w;
        const double rstar_sq = 1.0 - one_minus_r2;
        p.c0_ = c1 * std::log(one_minus_r2) + 0.5 * lambda_w * rstar_sq;
    } else {
        p.c0_ = 0.0;
    }
    p.satisfies_w1_ = c1 > 0.0;  // c1 = 0 degenerates to a bounded well
    p.finalize();
    return p;
}

PotentialSpec PotentialSpec::double_log(double lambda_param) {
    if (!std::isfinite(lambda_param)) throw ConfigError("doublelog: lambda must be finite");
    PotentialSpec p;
    p.family_ = PotentialFamily::DoubleLog;
    p.lambda_param_ = lambda_param;
    p.satisfies_w1_ = false;  // bounded on [−1,1]
    p.finalize();
    return p;
}

void PotentialSpec::finalize() {
    const auto pts = sample_points(20001);
    double sup_neg = -std::numeric_limits<double>::infinity();
    double inf_d2 = std::numeric_limits<double>::infinity();
    for (double r : pts) {
        const double d2 = d2w(r);
        sup_neg = std::max(sup_neg, -d2);
        inf_d2 = std::min(inf_d2, d2);
    }
    lambda_ = std::max(0.0, sup_neg + 1e-9);
    min_d2w_ = inf_d2;
    w0_ = w(0.0);
}

void PotentialSpec::check_domain(double r) const {
    if (!(std::fabs(r) < 1.0))
        throw NumericError("pure state reached: potential evaluated at r = " + std::to_string(r));
}

double PotentialSpec::w(double r) const {
    check_domain(r);
    if (family_ == PotentialFamily::HardLog)
        return -c1_ * std::log1p(-r * r) - 0.5 * lambda_w_ * r * r + c0_;
    return (1.0 + r) * std::log1p(r) + (1.0 - r) * std::log1p(-r) - 0.5 * lambda_param_ * r * r;
}

double PotentialSpec::dw(double r) const {
    check_domain(r);
    if (family_ == PotentialFamily::HardLog)
        return 2.0 * c1_ * r / (1.0 - r * r) - lambda_w_ * r;
    return std::log1p(r) - std::log1p(-r) - lambda_param_ * r;
}

double PotentialSpec::d2w(double r) const {
    check_domain(r);
    if (family_ == PotentialFamily::HardLog) {
        const double q = 1.0 - r * r;
        return 2.0 * c1_ * (1.0 + r * r) / (q * q) - lambda_w_;
    }
    return 2.0 / (1.0 - r * r) - lambda_param_;
}

PotentialSpec PotentialSpec::with_lambda(double lambda) const {
    PotentialSpec p = *this;
    p.lambda_ = lambda;
    return p;
}

PotentialCheckReport check_semiconvexity(const PotentialSpec& spec, int sample_count) {
    if (sample_count < 100) throw ConfigError("check_semiconvexity: sample_count must be >= 100");
    const auto pts = sample_points(sample_count);
    PotentialCheckReport rep;
    rep.samples = static_cast<int>(pts.size());
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (double r : pts) {
        const double slack = spec.d2w(r) + spec.lambda();
        if (slack < rep.min_slack) {
            rep.min_slack = slack;
            rep.witness_r = r;
        }
    }
    rep.passed = rep.min_slack >= -1e-12;
    return rep;
}

PotentialCheckReport check_w25(const PotentialSpec& spec, int sample_count) {
    if (sample_count < 100) throw ConfigError("check_w25: sample_count must be >= 100");
    const auto pts = sample_points(sample_count);
    PotentialCheckReport rep;
    rep.samples = static_cast<int>(pts.size());
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (double r : pts) {
        const double slack =
            spec.dw(r) * r - spec.w(r) + 0.5 * spec.lambda() * r * r + spec.w0();
        if (slack < rep.min_slack) {
            rep.min_slack = slack;
            rep.witness_r = r;
        }
    }
    rep.passed = rep.min_slack >= -1e-10;
    return rep;
}

double separation_radius(const PotentialSpec& spec, double w_max) {
    if (!spec.satisfies_w1())
        throw NumericError(
            "potential bounded on [-1,1]; separation radius undefined via W-bound");
    if (!std::isfinite(w_max)) throw NumericError("no separation: W bound is not finite");
    if (w_max < 0.0) throw NumericError("separation_radius: W_max below min W = 0");

    // Positive minimizer of W: 0 unless the well wins over the barrier.
    double rstar = 0.0;
    if (spec.lambda_w() > 2.0 * spec.c1())
        rstar = std::sqrt(1.0 - 2.0 * spec.c1() / spec.lambda_w());

    double lo = rstar;
    double hi = 1.0 - 1e-16;
    if (spec.w(hi) <= w_max)
        throw NumericError("separation radius below floating-point resolution for this W bound");
    // W is strictly increasing on [rstar, 1); bisect W(r) = w_max.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (spec.w(mid) <= w_max)
            lo = mid;
        else
            hi = mid;
    }
    return 1.0 - lo;
}

}  // namespace nlpf
