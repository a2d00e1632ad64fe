#pragma once

#include <span>
#include <vector>

#include "ras/rng.hpp"
#include "ras/triangular.hpp"

namespace ras {

struct MomentPair {
    double mean = 0.0;
    double scv = 0.0;  // squared coefficient of variation, Var/mean^2
};

struct FitConfig {
    double scv_min = 1e-3;  // below this the Erlang order explodes
    int max_dim = 1000;     // hard cap on the per-variable matrix dimension
    // Policy for scv under the floor (including zero variance): refuse by
    // default, or clamp up to scv_min when set. Raise scv_min when enabling
    // this, otherwise the clamped fit usually overruns max_dim.
    bool clamp_scv = false;
};

// Absorption time of a finite-state Markov chain, characterized by the
// number of transient states, the initial row distribution over them, and
// the (upper-triangular) transition-rate matrix between them. The exit rate
// to the absorbing state in row i is -sum(rates.row(i)).
class PhaseType {
  public:
    // Shape of the representation; the fitting step produces only the first
    // two, which carry closed forms for sampling and the newsvendor excess.
    enum class Kind { general, erlang_mixture, hyperexponential };

    // Empty placeholder (dim 0); assign from a factory before use.
    PhaseType() = default;

    static PhaseType exponential(double rate);
    static PhaseType erlang(int k, double rate);
    // Erlang with order-1 phases w.p. p and order phases w.p. 1-p, all rate mu.
    static PhaseType erlang_mixture(int order, double mu, double p);
    static PhaseType hyperexponential(double p, double mu1, double mu2);
    static PhaseType general(std::vector<double> alpha, UpperTriangular rates);

    int dim() const { return dim_; }
    std::span<const double> alpha() const { return alpha_; }
    const UpperTriangular& rates() const { return rates_; }
    Kind kind() const { return kind_; }

    // Mixture parameters; only meaningful for the non-general kinds.
    double mix_p() const { return p_; }
    int erlang_order() const { return order_; }
    double rate1() const { return mu1_; }
    double rate2() const { return mu2_; }

  private:
    void validate() const;

    int dim_ = 0;
    std::vector<double> alpha_;
    UpperTriangular rates_;
    Kind kind_ = Kind::general;
    double p_ = 0.0;
    int order_ = 0;
    double mu1_ = 0.0;
    double mu2_ = 0.0;
};

// Matches the first two moments with a mixed-Erlang distribution (scv <= 1)
// or a balanced-means hyperexponential (scv > 1). Throws FitError when the
// scv is under cfg.scv_min or the required Erlang order exceeds cfg.max_dim,
// std::invalid_argument for a nonpositive mean.
//
// Note on the hyperexponential branch: with balanced means the scv of the
// fitted variable is 1/(2p(1-p)) - 1 (direct moment computation); the p
// chosen below reproduces the target scv exactly under that identity.
PhaseType fit_phase_type(MomentPair m, const FitConfig& cfg = {});

// First two moments from the matrix representation.
MomentPair moments(const PhaseType& pt);

// P(X <= x) = 1 - alpha e^{Vx} 1.
double cdf(const PhaseType& pt, double x);

// Smallest x with |cdf(x) - q| <= 1e-10, by bracketing and bisection.
double quantile(const PhaseType& pt, double q);

// E(X - x)^+ = -alpha V^{-1} e^{Vx} 1.
double expected_excess(const PhaseType& pt, double x);

// Same quantity through the closed forms for the two fitted shapes
// (exponential sums; the incomplete gamma with integer first argument is
// expanded as a finite sum). Throws std::invalid_argument for Kind::general.
double expected_excess_closed_form(const PhaseType& pt, double x);

// One draw of the absorption time. The two fitted shapes sample from their
// mixture representation; general representations walk the chain.
double sample(const PhaseType& pt, Rng& rng);

}  // namespace ras
