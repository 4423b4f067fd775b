#pragma once

#include "mixhit/gallery.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

namespace mixhit::testing {

// exp(t (P - I)) by Eigen's Pade scaling-and-squaring; independent of the library's routes.
inline Matrix expm_oracle(const ReversibleChain& chain, double t) {
    const auto n = static_cast<Eigen::Index>(chain.size());
    Matrix g = t * (chain.kernel() - Matrix::Identity(n, n));
    return g.exp();
}

// E_x[T_A] by a plain dense solve written here, not through the library.
inline Vector hitting_oracle(const Matrix& P, const std::vector<std::size_t>& A) {
    const auto n = P.rows();
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    for (auto a : A) in[a] = 1;
    Matrix M = Matrix::Identity(n, n) - P;
    Vector b = Vector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (in[static_cast<std::size_t>(i)]) {
            M.row(i).setZero();
            M(i, i) = 1.0;
            b(i) = 0.0;
        }
    return M.fullPivLu().solve(b);
}

// P_x[T_hit < T_avoid] by a dense solve.
inline Vector absorption_oracle(const Matrix& P, const std::vector<std::size_t>& hit,
                                const std::vector<std::size_t>& avoid) {
    const auto n = P.rows();
    Matrix M = Matrix::Identity(n, n) - P;
    Vector b = Vector::Zero(n);
    auto pin = [&](std::size_t x, double v) {
        M.row(static_cast<Eigen::Index>(x)).setZero();
        M(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = 1.0;
        b(static_cast<Eigen::Index>(x)) = v;
    };
    for (auto x : hit) pin(x, 1.0);
    for (auto x : avoid) pin(x, 0.0);
    return M.fullPivLu().solve(b);
}

struct CommandResult {
    int exit_code;
    std::string output;
};

// Captures stdout; stderr is merged in when asked, dropped otherwise.
inline CommandResult run_command(const std::string& cmd, bool merge_stderr = false) {
    CommandResult r{-1, {}};
    FILE* pipe = popen((cmd + (merge_stderr ? " 2>&1" : " 2>/dev/null")).c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string cli() { return MIXHIT_CLI_PATH; }
inline std::string data_path(const std::string& name) { return std::string(MIXHIT_TEST_DATA) + "/" + name; }

}  // namespace mixhit::testing
