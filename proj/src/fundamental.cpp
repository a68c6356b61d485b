#include "nslwr/fundamental.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nslwr/errors.hpp"

namespace nslwr {

namespace {

// Relative slack on the density domain so that 1/(1/K) and similar
// round-off does not trip the range check.
constexpr double kDomainSlack = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sigmoid_of(const Kerner& p, double k) {
  return 1.0 / (1.0 + std::exp((k / p.K - p.c2) / p.c3));
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ArgumentError(std::string("fundamental diagram parameter ") + what +
                        " must be positive and finite");
  }
}

}  // namespace

double Kerner::raw_eta(double k) const {
  return c1 * (sigmoid_of(*this, k) - c4) * l / T_rel;
}

double Kerner::raw_eta_prime(double k) const {
  const double s = sigmoid_of(*this, k);
  return -c1 * (l / T_rel) * s * (1.0 - s) / (c3 * K);
}

double Kerner::raw_eta_second(double k) const {
  const double s = sigmoid_of(*this, k);
  const double scale = c3 * K;
  return c1 * (l / T_rel) * s * (1.0 - s) * (1.0 - 2.0 * s) / (scale * scale);
}

double Kerner::zero_crossing() const {
  if (c4 <= 0.0) return 2.0 * K;
  if (c4 >= 1.0) return 0.0;
  return K * (c2 + c3 * std::log(1.0 / c4 - 1.0));
}

FundamentalDiagram::FundamentalDiagram(Law law) : law_(law) {
  jam_density_ = std::visit([](const auto& p) { return p.K; }, law_);
  std::visit(overloaded{
                 [](const Greenshields& p) {
                   require_positive(p.V, "V");
                   require_positive(p.K, "K");
                 },
                 [](const Triangular& p) {
                   require_positive(p.V, "V");
                   require_positive(p.W, "W");
                   require_positive(p.K, "K");
                 },
                 [](const Kerner& p) {
                   require_positive(p.l, "l");
                   require_positive(p.T_rel, "T_rel");
                   require_positive(p.K, "K");
                   require_positive(p.c1, "c1");
                   require_positive(p.c3, "c3");
                 },
             },
             law_);
}

std::string_view FundamentalDiagram::type_name() const {
  return std::visit(overloaded{
                        [](const Greenshields&) { return std::string_view("greenshields"); },
                        [](const Triangular&) { return std::string_view("triangular"); },
                        [](const Kerner&) { return std::string_view("kerner"); },
                    },
                    law_);
}

double FundamentalDiagram::free_flow_speed() const {
  return std::visit(overloaded{
                        [](const Greenshields& p) { return p.V; },
                        [](const Triangular& p) { return p.V; },
                        [](const Kerner& p) { return std::max(0.0, p.raw_eta(0.0)); },
                    },
                    law_);
}

double FundamentalDiagram::check_density(double k) const {
  const double K = jam_density_;
  if (!(k >= 0.0) || k > K * (1.0 + kDomainSlack)) {
    throw DomainError("density " + std::to_string(k) + " outside [0, " +
                      std::to_string(K) + "]");
  }
  return std::min(k, K);
}

double FundamentalDiagram::eta(double k) const {
  k = check_density(k);
  return std::visit(overloaded{
                        [k](const Greenshields& p) { return p.V * (1.0 - k / p.K); },
                        [k](const Triangular& p) {
                          if (k == 0.0) return p.V;
                          return std::min(p.V, p.W * (p.K / k - 1.0));
                        },
                        [k](const Kerner& p) {
                          const double v = p.raw_eta(k);
                          return p.clamp_nonnegative ? std::max(v, 0.0) : v;
                        },
                    },
                    law_);
}

double FundamentalDiagram::eta_prime(double k) const {
  k = check_density(k);
  return std::visit(overloaded{
                        [](const Greenshields& p) { return -p.V / p.K; },
                        [k](const Triangular& p) {
                          if (k < p.critical_density()) return 0.0;
                          return -p.W * p.K / (k * k);
                        },
                        [k](const Kerner& p) {
                          if (p.clamp_nonnegative && k >= p.zero_crossing()) return 0.0;
                          return p.raw_eta_prime(k);
                        },
                    },
                    law_);
}

double FundamentalDiagram::eta_second(double k) const {
  k = check_density(k);
  return std::visit(overloaded{
                        [](const Greenshields&) { return 0.0; },
                        [k](const Triangular& p) {
                          if (k < p.critical_density()) return 0.0;
                          return 2.0 * p.W * p.K / (k * k * k);
                        },
                        [k](const Kerner& p) {
                          if (p.clamp_nonnegative && k >= p.zero_crossing()) return 0.0;
                          return p.raw_eta_second(k);
                        },
                    },
                    law_);
}

double FundamentalDiagram::phi(double k) const { return k * eta(k); }

double FundamentalDiagram::phi_prime(double k) const {
  return eta(k) + k * eta_prime(k);
}

double FundamentalDiagram::theta(double s) const {
  const double S = jam_spacing();
  if (!(s >= S * (1.0 - kDomainSlack))) {
    throw DomainError("spacing " + std::to_string(s) + " below jam spacing " +
                      std::to_string(S));
  }
  return eta(std::min(1.0 / s, jam_density_));
}

double FundamentalDiagram::theta_prime(double s) const {
  const double S = jam_spacing();
  if (!(s > S)) {
    throw DomainError("theta_prime needs spacing above jam spacing " + std::to_string(S));
  }
  const double k = std::min(1.0 / s, jam_density_);
  return -eta_prime(k) * k * k;
}

double FundamentalDiagram::theta_extended(double s) const {
  const double S = jam_spacing();
  if (s >= S) return theta(s);
  const double K = jam_density_;
  const double raw_slope_k = std::visit(
      overloaded{
          [](const Greenshields& p) { return -p.V / p.K; },
          [](const Triangular& p) { return -p.W / p.K; },
          [](const Kerner& p) { return p.raw_eta_prime(p.K); },
      },
      law_);
  const double slope_s = -raw_slope_k * K * K;
  return slope_s * (s - S);
}

std::vector<double> FundamentalDiagram::kinks() const {
  return std::visit(overloaded{
                        [](const Greenshields&) { return std::vector<double>{}; },
                        [](const Triangular& p) {
                          return std::vector<double>{p.critical_density()};
                        },
                        [](const Kerner& p) {
                          const double z = p.zero_crossing();
                          if (p.clamp_nonnegative && z > 0.0 && z < p.K) {
                            return std::vector<double>{z};
                          }
                          return std::vector<double>{};
                        },
                    },
                    law_);
}

}  // namespace nslwr
