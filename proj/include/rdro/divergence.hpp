#pragma once

#include <string>

#include "rdro/measure.hpp"

namespace rdro {

enum class DivergenceKind {
    kl,                  // phi(s) = s ln s - s + 1
    equality_indicator,  // phi = indicator of {1}
    chi_squared,         // phi(s) = (s - 1)^2
    total_variation,     // phi(s) = |s - 1|
};

std::string to_string(DivergenceKind kind);
DivergenceKind divergence_kind_from_string(const std::string& name);

// Which form of the KL proxdiv the scaling loop applies. The standard form
// is (ref/s)^{scale/(scale+eps)}; the factored form multiplies by
// exp(-eps/(scale+eps)), which corresponds to regularizing with the plain
// sum(gamma log gamma) entropy instead. Both converge to the same plan as
// eps -> 0; the standard form is the default and is the one checked against
// the brute-force inner oracle.
enum class ProxdivVariant { standard, paper_factored };

// A scaled phi-divergence D_{t*phi}. `scale` is the multiplier t (e.g. the
// ambiguity penalty theta); `recession()` is the growth rate phi'_inf of the
// unscaled entropy function.
struct DivergenceSpec {
    DivergenceKind kind = DivergenceKind::kl;
    double scale = 1.0;

    static DivergenceSpec kl(double scale = 1.0);
    static DivergenceSpec equality();
    static DivergenceSpec chi_squared(double scale = 1.0);
    static DivergenceSpec total_variation(double scale = 1.0);
    static DivergenceSpec make(DivergenceKind kind, double scale);

    // phi'_inf of the unscaled phi: +inf for kl/equality/chi_squared, 1 for
    // total variation.
    double recession() const;
    // Unscaled phi evaluated at s >= 0.
    double phi(double s) const;

    void validate() const;
};

// D_{t*phi}(mu, nu) on a common atom list:
//   t * [ sum_{nu_j>0} phi(mu_j/nu_j) nu_j + phi'_inf * sum_{nu_j=0} mu_j ]
// with the convention 0*inf = 0 in the singular part, and D identically 0
// when t = 0. Returns +inf when mu puts mass where nu vanishes and phi is
// superlinear.
double eval_divergence(const DivergenceSpec& spec, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu);

// The multiplicative marginal update of the scaling loop: given the current
// kernel image s (componentwise positive), returns the factor that moves the
// marginal to the prox of the divergence against `reference`.
//   equality:  ref / s
//   kl:        (ref/s)^{scale/(scale+eps)}          (exponent 0 when scale=0)
//   tv:        clamp(ref/s, e^{-scale/eps}, e^{scale/eps})
//   chi^2:     solved componentwise (monotone root of
//              2*scale*(rho/ref - 1) + eps*ln(rho/s) = 0)
Vector proxdiv(const DivergenceSpec& spec, const Vector& s,
               const DiscreteMeasure& reference, double epsilon,
               ProxdivVariant variant = ProxdivVariant::standard);

}  // namespace rdro
