#include "lcid/params.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace lcid {

namespace {

std::string fmt(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void check_finite(const Eigen::VectorXd& v, const char* name, ValidationVerdict& out) {
    if (!v.allFinite()) out.violations.push_back(std::string(name) + " has non-finite entries");
}

void check_finite(double v, const char* name, ValidationVerdict& out) {
    if (!std::isfinite(v)) out.violations.push_back(std::string(name) + " is not finite");
}

void check_sum_one(const Eigen::VectorXd& v, const char* name, ValidationVerdict& out) {
    if (v.size() == 0) {
        out.violations.push_back(std::string(name) + " is empty");
        return;
    }
    const double s = compensated_sum(v);
    if (!(std::abs(s - 1.0) <= kSumToOneTolerance)) {
        out.violations.push_back("sum(" + std::string(name) + ")=" + fmt(s) + "≠1");
    }
}

void check_positive(double v, const char* name, ValidationVerdict& out) {
    if (!(v > 0.0)) out.violations.push_back(std::string(name) + "=" + fmt(v) + " must be > 0");
}

void check_open_unit(double v, const char* name, ValidationVerdict& out) {
    if (!(std::abs(v) < 1.0)) out.violations.push_back(std::string(name) + "=" + fmt(v) + " must lie in (-1,1)");
}

void check_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* na, const char* nb,
                       ValidationVerdict& out) {
    if (a.size() != b.size()) {
        out.violations.push_back(std::string(na) + " and " + nb + " differ in length (" +
                                 std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

template <typename P>
void validate_age_period(const P& p, ValidationVerdict& out) {
    check_same_length(p.alpha, p.beta, "alpha", "beta", out);
    check_finite(p.alpha, "alpha", out);
    check_finite(p.beta, "beta", out);
    check_finite(p.mu, "mu", out);
    check_sum_one(p.beta, "beta", out);
    check_positive(p.sigma2_e, "sigma2_e", out);
    check_positive(p.sigma2_eps, "sigma2_eps", out);
}

}  // namespace

double compensated_sum(const Eigen::Ref<const Eigen::VectorXd>& v) noexcept {
    double sum = 0.0;
    double comp = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double x = v[i];
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

Family family_of(const ModelParams& params) noexcept {
    return static_cast<Family>(params.index());
}

std::string_view family_tag(Family family) noexcept {
    switch (family) {
        case Family::ApRw: return "ap_rw";
        case Family::ApArima110: return "ap_arima110";
        case Family::ApArima011: return "ap_arima011";
        case Family::ApcRw: return "apc_rw";
    }
    return "unknown";
}

Family family_from_tag(std::string_view tag) {
    for (Family f : {Family::ApRw, Family::ApArima110, Family::ApArima011, Family::ApcRw}) {
        if (family_tag(f) == tag) return f;
    }
    throw InputError("unknown model tag '" + std::string(tag) + "'");
}

int age_count(const ModelParams& params) noexcept {
    return std::visit([](const auto& p) { return static_cast<int>(p.alpha.size()); }, params);
}

ValidationVerdict validate(const ApRwParams& p) {
    ValidationVerdict out;
    validate_age_period(p, out);
    return out;
}

ValidationVerdict validate(const ApArima110Params& p) {
    ValidationVerdict out;
    validate_age_period(p, out);
    check_open_unit(p.rho, "rho", out);
    return out;
}

ValidationVerdict validate(const ApArima011Params& p) {
    ValidationVerdict out;
    validate_age_period(p, out);
    check_open_unit(p.phi, "phi", out);
    return out;
}

ValidationVerdict validate(const ApcRwParams& p) {
    ValidationVerdict out;
    check_same_length(p.alpha, p.beta0, "alpha", "beta0", out);
    check_same_length(p.alpha, p.beta1, "alpha", "beta1", out);
    check_finite(p.alpha, "alpha", out);
    check_finite(p.beta0, "beta0", out);
    check_finite(p.beta1, "beta1", out);
    check_finite(p.mu0, "mu0", out);
    check_finite(p.mu1, "mu1", out);
    check_sum_one(p.beta0, "beta0", out);
    check_sum_one(p.beta1, "beta1", out);
    if (p.beta0.size() == p.beta1.size() && p.beta0.size() > 0 &&
        (p.beta0 - p.beta1).cwiseAbs().maxCoeff() <= kDistinctLoadingsTolerance) {
        out.violations.push_back("beta0 = beta1 excluded");
    }
    check_positive(p.sigma2_e0, "sigma2_e0", out);
    check_positive(p.sigma2_e1, "sigma2_e1", out);
    check_positive(p.sigma2_eps, "sigma2_eps", out);
    return out;
}

ValidationVerdict validate(const ModelParams& p) {
    return std::visit([](const auto& v) { return validate(v); }, p);
}

ValidationVerdict validate(const PanelDims& dims) {
    ValidationVerdict out;
    if (dims.X < 0) out.violations.push_back("X=" + std::to_string(dims.X) + " must be >= 0");
    if (dims.T < 1) out.violations.push_back("T=" + std::to_string(dims.T) + " must be >= 1");
    return out;
}

ValidationVerdict validate(const ModelParams& p, const PanelDims& dims) {
    ValidationVerdict out = validate(dims);
    ValidationVerdict inner = validate(p);
    out.violations.insert(out.violations.end(), inner.violations.begin(), inner.violations.end());
    if (dims.X >= 0 && age_count(p) != dims.ages()) {
        out.violations.push_back("parameter vectors have length " + std::to_string(age_count(p)) +
                                 " but X+1=" + std::to_string(dims.ages()));
    }
    return out;
}

ValidationVerdict validate(const FullyParametricApcParams& p, int X, int T) {
    ValidationVerdict out;
    const Eigen::Index ages = X + 1;
    if (p.alpha.size() != ages || p.beta0.size() != ages || p.beta1.size() != ages) {
        out.violations.push_back("age vectors must have length X+1=" + std::to_string(ages));
        return out;
    }
    if (p.kappa.size() != T) {
        out.violations.push_back("kappa must have length T=" + std::to_string(T));
        return out;
    }
    if (p.iota.size() != T + X) {
        out.violations.push_back("iota must have length T+X=" + std::to_string(T + X));
        return out;
    }
    check_sum_one(p.beta0, "beta0", out);
    check_sum_one(p.beta1, "beta1", out);
    if (p.constraints == ApcConstraintSet::A) {
        if (p.kappa[0] != 0.0) out.violations.push_back("kappa_1=" + fmt(p.kappa[0]) + "≠0");
        for (Eigen::Index x = 0; x < ages; ++x) {
            if (!(p.beta1[x] > 0.0)) {
                out.violations.push_back("beta1[" + std::to_string(x) + "]=" + fmt(p.beta1[x]) + " must be > 0");
            }
        }
    } else {
        const double sk = compensated_sum(p.kappa);
        const double si = compensated_sum(p.iota);
        if (std::abs(sk) > kSumToOneTolerance) out.violations.push_back("sum(kappa)=" + fmt(sk) + "≠0");
        if (std::abs(si) > kSumToOneTolerance) out.violations.push_back("sum(iota)=" + fmt(si) + "≠0");
    }
    return out;
}

Eigen::VectorXd normalize_betas(const Eigen::VectorXd& raw) {
    if (raw.size() == 0) throw InputError("normalize_betas: empty loading vector");
    if (!raw.allFinite()) throw InputError("normalize_betas: non-finite loading");
    const double s = compensated_sum(raw);
    if (s == 0.0 || std::abs(s) <= 1e-15 * raw.cwiseAbs().sum()) {
        throw InputError("normalize_betas: loadings sum to zero, cannot rescale to sum one");
    }
    Eigen::VectorXd out = raw / s;
    Eigen::Index k = 0;
    out.cwiseAbs().minCoeff(&k);
    Eigen::VectorXd others = out;
    others[k] = 0.0;
    out[k] = 1.0 - compensated_sum(others);
    return out;
}

}  // namespace lcid
