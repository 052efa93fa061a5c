#include "oracle.hpp"

#include <cmath>
#include <complex>

namespace oracle {

namespace {

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// op_{n-1} ⊗ … ⊗ op_0, so that qubit 0 is the least significant index bit.
Mat kron_all(const std::vector<Mat>& ops_by_qubit) {
    Mat out = Mat::Identity(1, 1);
    for (auto it = ops_by_qubit.rbegin(); it != ops_by_qubit.rend(); ++it) out = kron(out, *it);
    return out;
}

Mat pauli_z() {
    Mat z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

Mat pauli_x() {
    Mat x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

Mat hadamard() {
    Mat h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

}  // namespace

Eigen::VectorXcd dense_qaoa(int n, const EdgeList& edges, const std::vector<double>& params, int p) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    const Mat id = Mat::Identity(dim, dim);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi[0] = 1.0;
    psi = kron_all(std::vector<Mat>(static_cast<std::size_t>(n), hadamard())) * psi;

    for (int layer = 0; layer < p; ++layer) {
        const double beta = params[static_cast<std::size_t>(2 * layer)];
        const double gamma = params[static_cast<std::size_t>(2 * layer + 1)];
        for (const auto& [u, v] : edges) {
            std::vector<Mat> ops(static_cast<std::size_t>(n), Mat::Identity(2, 2));
            ops[static_cast<std::size_t>(u)] = pauli_z();
            ops[static_cast<std::size_t>(v)] = pauli_z();
            const Mat zz = kron_all(ops);
            // (Z_u Z_v)^2 = I, so exp(-i g ZZ) = cos g I - i sin g ZZ.
            psi = (std::cos(gamma) * id - cd(0, 1) * std::sin(gamma) * zz) * psi;
        }
        const Mat rx = std::cos(beta) * Mat::Identity(2, 2) - cd(0, 1) * std::sin(beta) * pauli_x();
        psi = kron_all(std::vector<Mat>(static_cast<std::size_t>(n), rx)) * psi;
    }
    return psi;
}

int cut_of(const EdgeList& edges, std::uint64_t word) {
    int c = 0;
    for (const auto& [u, v] : edges) c += static_cast<int>(((word >> u) & 1U) != ((word >> v) & 1U));
    return c;
}

int max_cut(int n, const EdgeList& edges) {
    int best = 0;
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) best = std::max(best, cut_of(edges, w));
    return best;
}

EdgeList complete_graph(int n) {
    EdgeList e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return e;
}

EdgeList complete_bipartite(int a, int b) {
    EdgeList e;
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) e.emplace_back(i, a + j);
    return e;
}

EdgeList petersen() {
    EdgeList e;
    for (int i = 0; i < 5; ++i) {
        e.emplace_back(i, (i + 1) % 5);          // outer cycle
        e.emplace_back(i, i + 5);                // spokes
        e.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
    }
    return e;
}

}  // namespace oracle
