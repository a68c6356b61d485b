#pragma once

#include <string_view>
#include <variant>
#include <vector>

namespace nslwr {

// eta(k) = V (1 - k/K)
struct Greenshields {
  double V = 20.0;
  double K = 1.0 / 7.0;
  friend bool operator==(const Greenshields&, const Greenshields&) = default;
};

// eta(k) = min{V, W (K/k - 1)}
struct Triangular {
  double V = 20.0;
  double W = 5.0;
  double K = 1.0 / 7.0;

  // Time gap 1/(K W).
  double tau() const { return 1.0 / (K * W); }
  double critical_density() const { return W * K / (V + W); }
  friend bool operator==(const Triangular&, const Triangular&) = default;
};

// Sigmoid speed-density law with a non-concave flow-density relation:
//   eta(k) = c1 [ (1 + exp((k/K - c2)/c3))^-1 - c4 ] l / T_rel
// The c4 offset leaves eta(K) slightly negative (about -1e-7 m/s); with
// clamp_nonnegative the law is cut at zero on [0, K].
struct Kerner {
  double l = 28.0;
  double T_rel = 5.0;
  double K = 0.18;
  double c1 = 5.0461;
  double c2 = 0.25;
  double c3 = 0.06;
  double c4 = 3.73e-6;
  bool clamp_nonnegative = true;

  double raw_eta(double k) const;
  double raw_eta_prime(double k) const;
  double raw_eta_second(double k) const;
  // Density where the raw law crosses zero; >= K when the law stays positive.
  double zero_crossing() const;
  friend bool operator==(const Kerner&, const Kerner&) = default;
};

// Speed-density relation eta(k) on [0, K] together with the derived
// flow-density phi(k) = k eta(k) and speed-spacing theta(s) = eta(1/s).
//
// At kinks (the triangular critical density, the Kerner clamp point) and at
// k = K every derivative returns the congested-branch value, i.e. the limit
// taken from higher densities.
class FundamentalDiagram {
 public:
  using Law = std::variant<Greenshields, Triangular, Kerner>;

  explicit FundamentalDiagram(Law law);

  static FundamentalDiagram greenshields(double V, double K) {
    return FundamentalDiagram(Greenshields{V, K});
  }
  static FundamentalDiagram triangular(double V, double W, double K) {
    return FundamentalDiagram(Triangular{V, W, K});
  }
  static FundamentalDiagram kerner(Kerner params = {}) {
    return FundamentalDiagram(params);
  }

  const Law& law() const { return law_; }
  std::string_view type_name() const;

  double jam_density() const { return jam_density_; }
  double jam_spacing() const { return 1.0 / jam_density_; }
  double free_flow_speed() const;

  double eta(double k) const;
  double eta_prime(double k) const;
  double eta_second(double k) const;
  double phi(double k) const;
  double phi_prime(double k) const;

  // Requires s >= S; throws DomainError below the jam spacing.
  double theta(double s) const;
  // Requires s > S.
  double theta_prime(double s) const;
  // theta(s) for s >= S, continued linearly below S with the slope of the
  // analytic law at S (ignoring any clamp). Negative below S. Used by the
  // platoon update once vehicles have collided.
  double theta_extended(double s) const;

  // Density kinks inside (0, K), sorted.
  std::vector<double> kinks() const;

  friend bool operator==(const FundamentalDiagram&, const FundamentalDiagram&) = default;

 private:
  double check_density(double k) const;

  Law law_;
  double jam_density_;
};

}  // namespace nslwr
