#include "dimsim/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dimsim/errors.hpp"

namespace dimsim {
namespace {

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Monomial coefficients (lowest degree first) of prod_{k != j} (x - c_k).
std::vector<double> basis_polynomial(const Vector& c, Eigen::Index j) {
  std::vector<double> poly{1.0};
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (k == j) continue;
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t m = 0; m < poly.size(); ++m) {
      next[m + 1] += poly[m];
      next[m] -= c(k) * poly[m];
    }
    poly = std::move(next);
  }
  return poly;
}

double evaluate(const std::vector<double>& poly, double x) {
  double acc = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Antiderivative vanishing at 0, evaluated at x.
double integrate_from_zero(const std::vector<double>& poly, double x) {
  double acc = 0.0;
  for (std::size_t m = poly.size(); m-- > 0;) acc = acc * x + poly[m] / static_cast<double>(m + 1);
  return acc * x;
}

bool strictly_lower(const Matrix& M, double tol) {
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = i; j < M.cols(); ++j)
      if (std::abs(M(i, j)) > tol) return false;
  return true;
}

void require_square(const Matrix& M, Eigen::Index n, const char* what) {
  if (M.rows() != n || M.cols() != n)
    throw InvalidArgument(std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n));
}

LongMatrix widen(const Matrix& M) { return M.cast<long double>(); }

long double factorial(int k) {
  long double f = 1.0L;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Componentwise c^k / k!.
LongVector scaled_power(const LongVector& c, int k) {
  LongVector out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) out(i) = std::pow(c(i), static_cast<long double>(k)) / factorial(k);
  return out;
}

struct PartResiduals {
  long double stage = 0.0L;
  long double update = 0.0L;
};

// Taylor matching of
//   exp(cz) = z A exp(cz) + U W(z)         (stage order)
//   exp(z) W(z) = z B exp(cz) + V W(z)     (order)
// through z^p, where W(z) = sum_k q_k z^k is defined from the stage relation.
PartResiduals order_residuals(const Tableau& t, const Matrix& A, const Matrix& B) {
  const LongVector c = t.c.cast<long double>();
  const LongMatrix Al = widen(A), Bl = widen(B), Ul = widen(t.U), Vl = widen(t.V);
  const auto lu = Ul.fullPivLu();
  const int p = t.p;

  std::vector<LongVector> q(p + 1);
  for (int k = 0; k <= p; ++k) {
    LongVector rhs = scaled_power(c, k);
    if (k > 0) rhs -= Al * scaled_power(c, k - 1);
    q[k] = lu.solve(rhs);
  }

  PartResiduals res;
  for (int k = 0; k <= p; ++k) {
    LongVector stage = scaled_power(c, k) - Ul * q[k];
    if (k > 0) stage -= Al * scaled_power(c, k - 1);
    res.stage = std::max(res.stage, stage.cwiseAbs().maxCoeff());

    LongVector update = LongVector::Zero(t.r);
    for (int j = 0; j <= k; ++j) update += q[j] / factorial(k - j);
    if (k > 0) update -= Bl * scaled_power(c, k - 1);
    update -= Vl * q[k];
    res.update = std::max(res.update, update.cwiseAbs().maxCoeff());
  }
  return res;
}

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) M(i, j++) = v;
    ++i;
  }
  return M;
}

Vector from_list(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// Appendix tables. Ubar is stored exactly as displayed (unit lower triangular).
std::map<std::string, AppendixData, std::less<>> make_appendix() {
  std::map<std::string, AppendixData, std::less<>> out;

  out["DIMSIM2A"] = AppendixData{
      "DIMSIM2A", 2, from_list({0.5207015987954746, 1}),
      from_rows({{0, 0}, {0.6335780271090006, 0}}),
      from_rows({{0.9756662942012514, 0}, {1.065344873186484, 0.9756662942012514}}),
      from_rows({{1, 0}, {0.8760323181723925, 1}}),
      from_rows({{0.8035259425918053, 1.584881273180670}, {0.09961124839144930, 0.1964740574081947}})};

  out["DIMSIM2L"] = AppendixData{
      "DIMSIM2L", 2, from_list({0.5725000000000000, 1}),
      from_rows({{0, 0}, {0.5507246376811594, 0}}),
      from_rows({{0.4025509997331064, 0}, {0.3054637337141530, 0.4025509997331064}}),
      from_rows({{1, 0}, {0.8970000000000000, 1}}),
      from_rows({{0.7976747326679189, 1.964322983806612}, {0.08216049746479565, 0.2023252673320811}})};

  out["DIMSIM3A"] = AppendixData{
      "DIMSIM3A", 3, from_list({0.3785922442536512, 0.7369632894601272, 1}),
      from_rows({{0, 0, 0}, {0.6105030326964779, 0, 0}, {0.5054775907409634, 0.3826213150653439, 0}}),
      from_rows({{0.5023463944444552, 0, 0},
                 {-0.8899211224523407, 0.5023463944444552, 0},
                 {-3.305290943287502, 0.4193402392399124, 0.5023463944444552}}),
      from_rows({{1, 0, 0}, {0.6070215241878391, 1, 0}, {0.5361152778084712, 1.091180739129647, 1}}),
      from_rows({{0.5418838673478645, 0.9017144383487438, 2.958352027358458},
                 {0.2129486962575630, 0.3543543656001081, 1.162568670627143},
                 {0.01900613148571312, 0.03162689316015439, 0.1037617670520274}})};

  out["DIMSIM3L"] = AppendixData{
      "DIMSIM3L", 3, from_list({0.4020684033460171, 0.7554528159803609, 1}),
      from_rows({{0, 0, 0}, {0.5925366351567699, 0, 0}, {0.5582112117594124, 0.3256969821842126, 0}}),
      from_rows({{0.5201730949739405, 0, 0},
                 {-1.082981144838764, 0.5201730949739405, 0},
                 {-2.860648399647160, 0.2917933416909193, 0.5201730949739405}}),
      from_rows({{1, 0, 0}, {0.6343850217261301, 1, 0}, {0.5123644514467803, 1.138668063964801, 1}}),
      from_rows({{0.4816666646770200, 0.7031253548332313, 3.663136087971684},
                 {0.1761045471411361, 0.2570731613311589, 1.339297421217996},
                 {0.03435316450098294, 0.05014791919551827, 0.2612601739918211}})};

  out["DIMSIM4A"] = AppendixData{
      "DIMSIM4A", 4,
      from_list({0.2561983471074380, 0.4485981308411215, 0.7622950819672131, 1}),
      from_rows({{0, 0, 0, 0},
                 {0.3245033112582781, 0, 0, 0},
                 {0.1102941176470588, 0.6486486486486486, 0, 0},
                 {0.3111111111111111, 0.1603053435114504, 0.4729729729729730, 0}}),
      from_rows({{1.228571428571429, 0, 0, 0},
                 {-2.659574468085106, 1.228571428571429, 0, 0},
                 {-6.431818181818182, -0.4444444444444444, 1.228571428571429, 0},
                 {-5.931034482758621, -4.906250000000000, 1.103448275862069, 1.228571428571429}}),
      from_rows({{1, 0, 0, 0},
                 {0.7011494252873563, 1, 0, 0},
                 {0.2363213391750847, 0.3563218390804598, 1, 0},
                 {0.3704826947154125, 0.5083355703606088, 0.6222222222222222, 1}}),
      from_rows({{0.3181770223788457, 1.319227410800732, 0.2619374293792898, 1.680623378297797},
                 {0.09508738599827574, 0.3942518698944718, 0.07828015130875329, 0.5022552624798014},
                 {0.2091032901032768, 0.8669852710621154, 0.1721430978104653, 1.104491692074865},
                 {0.02185292729383308, 0.09060673356209266, 0.01799029847272758, 0.1154280099162172}})};
  return out;
}

const std::map<std::string, AppendixData, std::less<>>& appendix_table() {
  static const auto table = make_appendix();
  return table;
}

// First-order pair: explicit Euler and a theta-type implicit stage sharing c = [1].
Tableau euler_pair(std::string name, double lambda) {
  Tableau t;
  t.name = std::move(name);
  t.s = t.r = t.p = t.q = 1;
  t.c = Vector::Ones(1);
  t.A = Matrix::Zero(1, 1);
  t.Astar = Matrix::Constant(1, 1, lambda);
  t.U = Matrix::Identity(1, 1);
  t.V = Matrix::Identity(1, 1);
  t.lambda = lambda;
  auto b = build_b_matrices(t.c, t.A, t.Astar, t.V);
  t.B = std::move(b.B);
  t.Bstar = std::move(b.Bstar);
  return t;
}

}  // namespace

void Tableau::validate() const {
  if (s < 1 || r < 1) throw InvalidArgument("tableau needs s >= 1 and r >= 1");
  if (c.size() != s) throw InvalidArgument("abscissa vector must have length s");
  require_square(A, s, "A");
  require_square(Astar, s, "Astar");
  require_square(V, r, "V");
  if (U.rows() != s || U.cols() != r) throw InvalidArgument("U must be s x r");
  if (B.rows() != r || B.cols() != s) throw InvalidArgument("B must be r x s");
  if (Bstar.rows() != r || Bstar.cols() != s) throw InvalidArgument("Bstar must be r x s");
  if (!strictly_lower(A, 0.0)) throw InvalidArgument("A must be strictly lower triangular");
  for (Eigen::Index i = 0; i < s; ++i) {
    if (Astar(i, i) != lambda) throw InvalidArgument("Astar diagonal must equal lambda");
    for (Eigen::Index j = i + 1; j < s; ++j)
      if (Astar(i, j) != 0.0) throw InvalidArgument("Astar must be lower triangular");
  }
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
}

double OrderReport::max_residual() const {
  return std::max({stage_residual_explicit, stage_residual_implicit, update_residual_explicit,
                   update_residual_implicit});
}

LagrangeIntegrals lagrange_integrals(const Vector& c) {
  const Eigen::Index s = c.size();
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = i + 1; j < s; ++j)
      if (c(i) == c(j))
        throw DegenerateBasisError("abscissae " + std::to_string(i) + " and " + std::to_string(j) +
                                   " coincide");

  LagrangeIntegrals out{Matrix(s, s), Matrix(s, s), Matrix(s, s)};
  for (Eigen::Index j = 0; j < s; ++j) {
    const auto phi = basis_polynomial(c, j);
    const double scale = evaluate(phi, c(j));
    for (Eigen::Index i = 0; i < s; ++i) {
      out.B0(i, j) = integrate_from_zero(phi, 1.0 + c(i)) / scale;
      out.B1(i, j) = evaluate(phi, 1.0 + c(i)) / scale;
      out.B2(i, j) = integrate_from_zero(phi, c(i)) / scale;
    }
  }
  return out;
}

BMatrices build_b_matrices(const Vector& c, const Matrix& A, const Matrix& Astar, const Matrix& V) {
  const Eigen::Index s = c.size();
  require_square(A, s, "A");
  require_square(Astar, s, "Astar");
  require_square(V, s, "V");
  const auto L = lagrange_integrals(c);
  BMatrices out;
  out.B = L.B0 - A * L.B1 - V * L.B2 + V * A;
  out.Bstar = L.B0 - Astar * L.B1 - V * L.B2 + V * Astar;
  return out;
}

Tableau transform(const Tableau& t, const Matrix& T) {
  require_square(T, t.r, "T");
  const auto lu = T.fullPivLu();
  if (!lu.isInvertible()) throw SingularMatrixError("transformation matrix is singular");
  const Matrix Tinv = lu.inverse();
  Tableau out = t;
  out.U = t.U * Tinv;
  out.B = T * t.B;
  out.Bstar = T * t.Bstar;
  out.V = T * t.V * Tinv;
  return out;
}

Tableau reconstruct_from_appendix(const AppendixData& data) {
  const Eigen::Index s = data.c.size();
  require_square(data.Abar, s, "Abar");
  require_square(data.Astarbar, s, "Astarbar");
  require_square(data.Ubar, s, "Ubar");
  require_square(data.Vbar, s, "Vbar");

  // U = I for the untransformed method, so Ubar = T^{-1}.
  const auto lu = data.Ubar.fullPivLu();
  if (!lu.isInvertible()) throw SingularMatrixError(data.name + ": Ubar is singular");
  const Matrix T = lu.inverse();
  const Matrix V = data.Ubar * data.Vbar * T;

  const auto b = build_b_matrices(data.c, data.Abar, data.Astarbar, V);

  Tableau t;
  t.name = data.name;
  t.s = t.r = static_cast<int>(s);
  t.p = t.q = data.p;
  t.c = data.c;
  t.A = data.Abar;
  t.Astar = data.Astarbar;
  t.U = data.Ubar;
  t.B = T * b.B;
  t.Bstar = T * b.Bstar;
  t.V = data.Vbar;
  t.lambda = data.Astarbar(0, 0);
  t.validate();

  const auto report = verify_order(t);
  if (!(report.max_residual() < 1e-10))
    throw ReconstructionError(data.name + ": order residual " + std::to_string(report.max_residual()));
  return t;
}

QVectors q_vectors(const Tableau& t, Part part) {
  const Matrix& A = part == Part::Explicit ? t.A : t.Astar;
  const auto lu = t.U.fullPivLu();
  if (!lu.isInvertible()) throw SingularMatrixError("U is singular");
  QVectors out;
  out.q.reserve(t.p + 1);
  Vector prev = Vector::Ones(t.s);  // c^{k-1}/(k-1)!
  out.q.push_back(lu.solve(Vector::Ones(t.s)));
  for (int k = 1; k <= t.p; ++k) {
    Vector cur = prev.cwiseProduct(t.c) / static_cast<double>(k);
    out.q.push_back(lu.solve(Vector(cur - A * prev)));
    prev = std::move(cur);
  }
  return out;
}

OrderReport verify_order(const Tableau& t) {
  const auto ex = order_residuals(t, t.A, t.B);
  const auto im = order_residuals(t, t.Astar, t.Bstar);
  OrderReport out;
  out.stage_residual_explicit = static_cast<double>(ex.stage);
  out.update_residual_explicit = static_cast<double>(ex.update);
  out.stage_residual_implicit = static_cast<double>(im.stage);
  out.update_residual_implicit = static_cast<double>(im.update);
  return out;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"DIMSIM1A", "DIMSIM1L", "DIMSIM2A", "DIMSIM2L",
                                              "DIMSIM3A", "DIMSIM3L", "DIMSIM4A"};
  return names;
}

const AppendixData& appendix_data(std::string_view name) {
  const auto& table = appendix_table();
  auto it = table.find(name);
  if (it == table.end()) throw UnknownNameError("no appendix data for method '" + std::string(name) + "'");
  return it->second;
}

Tableau catalog(std::string_view name) {
  if (name == "DIMSIM1A") return euler_pair("DIMSIM1A", 0.5);
  if (name == "DIMSIM1L") return euler_pair("DIMSIM1L", 1.0);
  const auto& table = appendix_table();
  auto it = table.find(name);
  if (it == table.end()) throw UnknownNameError("unknown method '" + std::string(name) + "'");
  return reconstruct_from_appendix(it->second);
}

namespace {

nlohmann::json matrix_json(const Matrix& M) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const char* field) {
  const auto& rows = j.at(field);
  if (!rows.is_array() || rows.empty()) throw InvalidArgument(std::string(field) + " must be a non-empty array");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(rows.front().size());
  Matrix M(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != m) throw InvalidArgument(std::string(field) + " is ragged");
    for (Eigen::Index k = 0; k < m; ++k) M(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return M;
}

}  // namespace

void to_json(nlohmann::json& j, const Tableau& t) {
  j = nlohmann::json::object();
  if (!t.name.empty()) j["name"] = t.name;
  j["s"] = t.s;
  j["r"] = t.r;
  j["p"] = t.p;
  j["q"] = t.q;
  j["c"] = std::vector<double>(t.c.data(), t.c.data() + t.c.size());
  j["A"] = matrix_json(t.A);
  j["Astar"] = matrix_json(t.Astar);
  j["U"] = matrix_json(t.U);
  j["B"] = matrix_json(t.B);
  j["Bstar"] = matrix_json(t.Bstar);
  j["V"] = matrix_json(t.V);
  j["lambda"] = t.lambda;
}

void from_json(const nlohmann::json& j, Tableau& t) {
  t.name = j.value("name", std::string{});
  t.s = j.at("s").get<int>();
  t.r = j.at("r").get<int>();
  t.p = j.at("p").get<int>();
  t.q = j.at("q").get<int>();
  const auto c = j.at("c").get<std::vector<double>>();
  t.c = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
  t.A = matrix_from_json(j, "A");
  t.Astar = matrix_from_json(j, "Astar");
  t.U = matrix_from_json(j, "U");
  t.B = matrix_from_json(j, "B");
  t.Bstar = matrix_from_json(j, "Bstar");
  t.V = matrix_from_json(j, "V");
  t.lambda = j.at("lambda").get<double>();
  t.validate();
}

}  // namespace dimsim
