#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dimsim/linalg.hpp"

namespace dimsim {

/// Coefficients of an IMEX general linear method. The explicit part is
/// (A, U, B, V), the implicit part is (Astar, U, Bstar, V); both share the
/// abscissae c. A is strictly lower triangular and Astar is lower triangular
/// with the constant diagonal `lambda`.
struct Tableau {
  std::string name;
  int s = 0;  // internal stages
  int r = 0;  // external stages
  int p = 0;  // order
  int q = 0;  // stage order
  Vector c;
  Matrix A;
  Matrix Astar;
  Matrix U;
  Matrix B;
  Matrix Bstar;
  Matrix V;
  double lambda = 0.0;

  /// Throws InvalidArgument when dimensions or triangular structure are wrong.
  void validate() const;
};

/// The quantities printed for a transformed method: B̄ and B̄* are absent and
/// must be rebuilt from the order conditions.
struct AppendixData {
  std::string name;
  int p = 0;
  Vector c;
  Matrix Abar;
  Matrix Astarbar;
  Matrix Ubar;
  Matrix Vbar;
};

/// Taylor coefficients q_0..q_p of the external stages:
/// y^[n] = sum_k q_k h^k y^(k)(t_n) + O(h^{p+1}).
struct QVectors {
  std::vector<Vector> q;

  int order() const { return static_cast<int>(q.size()) - 1; }
};

enum class Part { Explicit, Implicit };

struct BMatrices {
  Matrix B;
  Matrix Bstar;
};

/// The three Lagrange-basis integral matrices used by build_b_matrices.
struct LagrangeIntegrals {
  Matrix B0;
  Matrix B1;
  Matrix B2;
};

LagrangeIntegrals lagrange_integrals(const Vector& c);

/// B and B* that give order p = s and stage order q = p for the given
/// abscissae, stage matrices and V.
BMatrices build_b_matrices(const Vector& c, const Matrix& A, const Matrix& Astar, const Matrix& V);

/// Rebuilds the complete transformed tableau from printed appendix data.
/// Throws SingularMatrixError for a singular Ubar and ReconstructionError if
/// the result fails the order conditions.
Tableau reconstruct_from_appendix(const AppendixData& data);

/// Similarity change of the external stages: U -> U T^{-1}, B -> T B,
/// B* -> T B*, V -> T V T^{-1}; A and A* are unchanged.
Tableau transform(const Tableau& t, const Matrix& T);

QVectors q_vectors(const Tableau& t, Part part = Part::Explicit);

struct OrderReport {
  double stage_residual_explicit = 0.0;
  double stage_residual_implicit = 0.0;
  double update_residual_explicit = 0.0;
  double update_residual_implicit = 0.0;

  double max_residual() const;
};

/// Largest Taylor-coefficient mismatch of the stage and update order
/// conditions through z^p, evaluated in extended precision.
OrderReport verify_order(const Tableau& t);

const std::vector<std::string>& catalog_names();
const AppendixData& appendix_data(std::string_view name);

/// Reconstructed catalog method; throws UnknownNameError.
Tableau catalog(std::string_view name);

void to_json(nlohmann::json& j, const Tableau& t);
void from_json(const nlohmann::json& j, Tableau& t);

}  // namespace dimsim
