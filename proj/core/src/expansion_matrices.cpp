#include "lubrex/expansion_matrices.hpp"

namespace lubrex {

// Explicit instantiations for the two supported scalars.
template OrderMatrices<Rational> base_case<Rational>();
template OrderMatrices<double> base_case<double>();
template OrderMatrices<Rational> next_order<Rational>(const std::vector<OrderMatrices<Rational>>&,
                                                      const OperatorTable&);
template OrderMatrices<double> next_order<double>(const std::vector<OrderMatrices<double>>&,
                                                  const OperatorTable&);
template std::vector<OrderMatrices<Rational>> build_stack<Rational>(const OperatorTable&, int);
template std::vector<OrderMatrices<double>> build_stack<double>(const OperatorTable&, int);
template SecondDerivativeMatrices<Rational> derive_second<Rational>(const OrderMatrices<Rational>&,
                                                                    const OperatorTable&);
template SecondDerivativeMatrices<double> derive_second<double>(const OrderMatrices<double>&,
                                                                const OperatorTable&);
template FourthDerivativeMatrices<Rational> derive_fourth<Rational>(const OrderMatrices<Rational>&,
                                                                    const OperatorTable&);
template FourthDerivativeMatrices<double> derive_fourth<double>(const OrderMatrices<double>&,
                                                                const OperatorTable&);
template LegendreBasisChange<Rational> legendre_change_of_basis<Rational>(int);
template LegendreBasisChange<double> legendre_change_of_basis<double>(int);
template Rational transformed_frobenius_squared<Rational>(const LegendreBasisChange<Rational>&,
                                                          const Matrix<Rational>&);
template double transformed_frobenius_squared<double>(const LegendreBasisChange<double>&,
                                                      const Matrix<double>&);

}  // namespace lubrex
