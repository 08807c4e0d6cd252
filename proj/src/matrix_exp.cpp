#include "qvol/matrix_exp.hpp"

#include <algorithm>
#include <cmath>

#include "qvol/errors.hpp"

namespace qvol {

namespace {

constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

void check_finite(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) throw NumericalOverflow("matrix exponential produced non-finite entries");
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw InvalidArgument("expm requires a square matrix");
    if (n == 0) return a;
    check_finite(a);

    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 == 0.0) return Eigen::MatrixXd::Identity(n, n);
    int squarings = 0;
    if (norm1 > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
    const Eigen::MatrixXd as = a / std::ldexp(1.0, squarings);

    const auto& b = kPade13;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd a2 = as * as;
    const Eigen::MatrixXd a4 = a2 * a2;
    const Eigen::MatrixXd a6 = a4 * a2;

    Eigen::MatrixXd inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    Eigen::MatrixXd u = as * (a6 * inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
    Eigen::MatrixXd v = a6 * inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    check_finite(r);
    return r;
}

Eigen::VectorXd expm_action(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
    if (a.rows() != a.cols() || a.cols() != v.size())
        throw InvalidArgument("expm_action dimension mismatch");
    const double norm1 = a.rows() == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
    const int steps = std::max(1, static_cast<int>(std::ceil(norm1)));
    const Eigen::MatrixXd as = a / steps;

    Eigen::VectorXd result = v;
    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXd term = result;
        Eigen::VectorXd sum = result;
        for (int k = 1; k < 60; ++k) {
            term = as * term / static_cast<double>(k);
            sum += term;
            if (term.lpNorm<Eigen::Infinity>() <= 1e-17 * sum.lpNorm<Eigen::Infinity>()) break;
        }
        result = sum;
    }
    if (!result.allFinite()) throw NumericalOverflow("exp-action produced non-finite entries");
    return result;
}

}  // namespace qvol
