#include "lubrex/universal_constants.hpp"

namespace lubrex {

std::vector<RhoThetaRow> rho_theta(const std::vector<KRow>& K, const std::vector<KRow>& Kt) {
  std::vector<RhoThetaRow> rows(K.size());
  double running_max = 0;
  for (std::size_t k = 0; k < K.size(); ++k) {
    double m1 = 5.0 * K[k].K0_after;
    double m2 = 5.0 * K[k].K1_after + 7.5;
    if (k >= 1) {
      m1 += Kt[k - 1].K0_after;
      m2 += Kt[k - 1].K1_after;
    }
    const double chain = running_max;  // rho_{k-1}^{-2k} equals the previous max
    double mx = std::max(m1, m2);
    bool chain_wins = false;
    if (k >= 1 && chain > mx) {
      mx = chain;
      chain_wins = true;
    }
    running_max = mx;
    auto& r = rows[k];
    r.max_value = mx;
    r.chain_term_argmax = chain_wins;
    r.rho = std::pow(mx, -1.0 / static_cast<double>(2 * k + 2));
    r.theta = 15.0 / mx * std::sqrt(85.0 / 16.0 + 20.0 * static_cast<double>(k) / 3.0);
  }
  return rows;
}

template std::vector<KappaRow> kappa_constants<Rational>(
    const std::vector<OrderMatrices<Rational>>&);
template std::vector<KappaRow> kappa_constants<double>(const std::vector<OrderMatrices<double>>&);
template std::pair<std::vector<KRow>, std::vector<KRow>> k_constants<Rational>(
    const std::vector<OrderMatrices<Rational>>&, const std::vector<DerivativeMatrices<Rational>>&,
    const std::vector<LegendreBasisChange<Rational>>&, const std::vector<KappaRow>&);
template std::pair<std::vector<KRow>, std::vector<KRow>> k_constants<double>(
    const std::vector<OrderMatrices<double>>&, const std::vector<DerivativeMatrices<double>>&,
    const std::vector<LegendreBasisChange<double>>&, const std::vector<KappaRow>&);
template ConstantsTables compute_constants<Rational>(int);
template ConstantsTables compute_constants<double>(int);

}  // namespace lubrex
