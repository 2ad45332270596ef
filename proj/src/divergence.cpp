#include "rdro/divergence.hpp"

#include <cmath>
#include <limits>

namespace rdro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DiscreteMeasure::DiscreteMeasure(Vector w, std::vector<Vector> labels,
                                 bool probability)
    : weights_(std::move(w)), labels_(std::move(labels)),
      probability_(probability) {
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] >= 0.0)) {
            throw DomainError("measure weight " + std::to_string(i) +
                              " is negative or NaN");
        }
    }
    if (!labels_.empty() &&
        static_cast<Eigen::Index>(labels_.size()) != weights_.size()) {
        throw DimensionError("label count does not match weight count");
    }
    if (probability_ && std::abs(weights_.sum() - 1.0) > 1e-12) {
        throw DomainError("probability weights sum to " +
                          std::to_string(weights_.sum()) + ", expected 1");
    }
}

DiscreteMeasure DiscreteMeasure::masses(Vector weights,
                                        std::vector<Vector> labels) {
    return DiscreteMeasure(std::move(weights), std::move(labels), false);
}

DiscreteMeasure DiscreteMeasure::probability(Vector weights,
                                             std::vector<Vector> labels) {
    return DiscreteMeasure(std::move(weights), std::move(labels), true);
}

DiscreteMeasure DiscreteMeasure::uniform(Eigen::Index n) {
    if (n <= 0) throw DomainError("uniform measure needs n >= 1");
    return probability(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

std::pair<DiscreteMeasure, DiscreteMeasure> marginals(const Matrix& gamma) {
    return {DiscreteMeasure::masses(gamma.rowwise().sum()),
            DiscreteMeasure::masses(gamma.colwise().sum().transpose())};
}

std::string to_string(DivergenceKind kind) {
    switch (kind) {
        case DivergenceKind::kl: return "kl";
        case DivergenceKind::equality_indicator: return "equality";
        case DivergenceKind::chi_squared: return "chi_squared";
        case DivergenceKind::total_variation: return "total_variation";
    }
    return "?";
}

DivergenceKind divergence_kind_from_string(const std::string& name) {
    if (name == "kl") return DivergenceKind::kl;
    if (name == "equality") return DivergenceKind::equality_indicator;
    if (name == "chi_squared") return DivergenceKind::chi_squared;
    if (name == "total_variation") return DivergenceKind::total_variation;
    throw ConfigError("unknown divergence kind '" + name + "'");
}

DivergenceSpec DivergenceSpec::kl(double scale) {
    return {DivergenceKind::kl, scale};
}
DivergenceSpec DivergenceSpec::equality() {
    return {DivergenceKind::equality_indicator, 1.0};
}
DivergenceSpec DivergenceSpec::chi_squared(double scale) {
    return {DivergenceKind::chi_squared, scale};
}
DivergenceSpec DivergenceSpec::total_variation(double scale) {
    return {DivergenceKind::total_variation, scale};
}
DivergenceSpec DivergenceSpec::make(DivergenceKind kind, double scale) {
    DivergenceSpec spec{kind, scale};
    spec.validate();
    return spec;
}

void DivergenceSpec::validate() const {
    if (!(scale >= 0.0)) throw DomainError("divergence scale must be >= 0");
}

double DivergenceSpec::recession() const {
    return kind == DivergenceKind::total_variation ? 1.0 : kInf;
}

double DivergenceSpec::phi(double s) const {
    if (s < 0.0) return kInf;
    switch (kind) {
        case DivergenceKind::kl:
            // s ln s - s + 1, continuous at 0 with value 1
            return s == 0.0 ? 1.0 : s * std::log(s) - s + 1.0;
        case DivergenceKind::equality_indicator:
            return s == 1.0 ? 0.0 : kInf;
        case DivergenceKind::chi_squared:
            return (s - 1.0) * (s - 1.0);
        case DivergenceKind::total_variation:
            return std::abs(s - 1.0);
    }
    return kInf;
}

double eval_divergence(const DivergenceSpec& spec, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu) {
    spec.validate();
    if (mu.size() != nu.size()) {
        throw DimensionError("divergence of measures with different atom counts");
    }
    if (spec.scale == 0.0) return 0.0;  // D_{0*phi} = 0 (phi == 0)

    double regular = 0.0;
    double singular_mass = 0.0;
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
        const double nj = nu.weights()[j];
        const double mj = mu.weights()[j];
        if (nj > 0.0) {
            regular += spec.phi(mj / nj) * nj;
        } else {
            singular_mass += mj;
        }
        if (regular == kInf) return kInf;
    }
    // 0 * inf = 0: no mass on the null set costs nothing.
    const double singular =
        singular_mass > 0.0 ? spec.recession() * singular_mass : 0.0;
    return spec.scale * (regular + singular);
}

namespace {

// Componentwise root of  2*scale*(rho/ref - 1) + eps*ln(rho/s) = 0, the
// optimality condition of the chi^2 marginal prox. Monotone in ln(rho);
// bracketed bisection is plenty at this problem scale.
double chi_squared_prox_factor(double s, double ref, double scale,
                               double eps) {
    auto h = [&](double z) {
        const double rho = std::exp(z);
        return 2.0 * scale * (rho / ref - 1.0) + eps * (z - std::log(s));
    };
    double lo = std::log(std::min(s, ref)) - 40.0;
    double hi = std::log(std::max(s, ref)) + 40.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? hi : lo) = mid;
    }
    return std::exp(0.5 * (lo + hi)) / s;
}

}  // namespace

Vector proxdiv(const DivergenceSpec& spec, const Vector& s,
               const DiscreteMeasure& reference, double epsilon,
               ProxdivVariant variant) {
    spec.validate();
    if (s.size() != reference.size()) {
        throw DimensionError("proxdiv input and reference differ in length");
    }
    if (!(epsilon > 0.0)) throw DomainError("proxdiv needs epsilon > 0");
    for (Eigen::Index j = 0; j < s.size(); ++j) {
        if (!(s[j] > 0.0)) {
            throw DomainError("proxdiv input has nonpositive component " +
                              std::to_string(j));
        }
    }

    const Vector& ref = reference.weights();
    Vector out(s.size());
    switch (spec.kind) {
        case DivergenceKind::equality_indicator:
            out = ref.array() / s.array();
            break;
        case DivergenceKind::kl: {
            const double lambda = spec.scale;
            const double expo = lambda / (lambda + epsilon);
            out = (ref.array() / s.array()).pow(expo);
            if (variant == ProxdivVariant::paper_factored) {
                out *= std::exp(-epsilon / (lambda + epsilon));
            }
            break;
        }
        case DivergenceKind::total_variation: {
            const double band = std::exp(spec.scale / epsilon);
            out = (ref.array() / s.array()).min(band).max(1.0 / band);
            break;
        }
        case DivergenceKind::chi_squared: {
            for (Eigen::Index j = 0; j < s.size(); ++j) {
                if (!(ref[j] > 0.0)) {
                    throw DomainError(
                        "chi^2 proxdiv needs a strictly positive reference");
                }
                out[j] = spec.scale == 0.0
                             ? 1.0
                             : chi_squared_prox_factor(s[j], ref[j],
                                                       spec.scale, epsilon);
            }
            break;
        }
    }
    return out;
}

}  // namespace rdro
