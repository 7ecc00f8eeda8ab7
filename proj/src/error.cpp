#include "wmp/error.hpp"

#include <sstream>

namespace wmp {

namespace {

std::string describe(const char* head, double value) {
  std::ostringstream os;
  os << head << value;
  return os.str();
}

}  // namespace

NonExistent::NonExistent(std::string factor, double condition_number)
    : MathError(describe(("weighted inverse does not exist: " + factor +
                          " is not invertible (condition number ")
                             .c_str(),
                         condition_number) +
                ")"),
      factor_(std::move(factor)),
      cond_(condition_number) {}

NotIdempotent::NotIdempotent(double residual)
    : MathError(describe("matrix is not idempotent: ||Q^2 - Q|| = ", residual)),
      residual_(residual) {}

NotPositiveOnRange::NotPositiveOnRange(double smallest_eigenvalue)
    : MathError(describe(
          "A*XA + B*WB is not positive definite on range(A*A + B*B): smallest eigenvalue ",
          smallest_eigenvalue)),
      smallest_(smallest_eigenvalue) {}

NotPSD::NotPSD(std::string which, double smallest_eigenvalue)
    : MathError(describe((which + " is not positive semidefinite: smallest eigenvalue ").c_str(),
                         smallest_eigenvalue)),
      smallest_(smallest_eigenvalue) {}

CriteriaDisagree::CriteriaDisagree(double pq_norm, double two_minus_sum_cond)
    : MathError(describe("separated-pair criteria disagree: ||PQ|| = ", pq_norm) +
                describe(", cond(2I - P - Q) = ", two_minus_sum_cond)),
      pq_norm_(pq_norm),
      cond_(two_minus_sum_cond) {}

}  // namespace wmp
