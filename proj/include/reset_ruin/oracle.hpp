#ifndef RESET_RUIN_ORACLE_HPP
#define RESET_RUIN_ORACLE_HPP

// Ground-truth engines built only from the one-step law of the walk. Nothing
// here touches the spectral formulas, so these can arbitrate between them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "reset_ruin/compensated_sum.hpp"
#include "reset_ruin/config.hpp"
#include "reset_ruin/renewal.hpp"

namespace reset_ruin {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense square system for the ruin profile over interior sites 1..a-1.
template <typename Scalar>
struct LinearSystem {
    int dimension;
    Matrix<Scalar> matrix;
    Vector<Scalar> rhs;

    /// Partial-pivoting LU; throws NumericError on a singular or inaccurate solve.
    Vector<Scalar> solve() const
    {
        const Eigen::PartialPivLU<Matrix<Scalar>> lu(matrix);
        return checked_solve(lu, rhs);
    }

    Vector<Scalar> checked_solve(const Eigen::PartialPivLU<Matrix<Scalar>>& lu,
                                 const Vector<Scalar>& b) const
    {
        using std::isfinite;
        if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > Scalar(0)))
            throw NumericError("linear system is singular");
        Vector<Scalar> x = lu.solve(b);
        const Scalar residual = (matrix * x - b).template lpNorm<Eigen::Infinity>();
        const Scalar bound = Scalar(1e-12) * matrix.cwiseAbs().rowwise().sum().maxCoeff() *
                             x.template lpNorm<Eigen::Infinity>();
        if (!isfinite(residual) || residual > bound)
            throw NumericError("linear system residual " + std::to_string(double(residual)) +
                               " exceeds bound");
        return x;
    }
};

/**
 * phi(x) = gamma phi(z) + (1-gamma) (p phi(x+1) + q phi(x-1)), phi(0) = 1,
 * phi(a) = 0, written as M phi = b over x = 1..a-1. The reset term puts a
 * full column at index z-1.
 *
 * Solving this system directly is only accurate while the reset column does
 * not dominate: every phi(x) sits within roughly s^|x-z| of phi(z), so the
 * condition number grows like (1-gamma)^-min(z, a-z). exact_ruin() solves
 * it through the rank-one reduction below instead.
 */
template <typename Scalar>
LinearSystem<Scalar> ruin_system(const WalkConfig<Scalar>& config)
{
    const int n = config.a() - 1;
    const Scalar g = config.gamma();
    const Scalar move = Scalar(1) - g;
    LinearSystem<Scalar> sys{n, Matrix<Scalar>::Identity(n, n), Vector<Scalar>::Zero(n)};
    sys.matrix.col(config.z() - 1).array() -= g;
    for (int i = 0; i < n; ++i) {
        if (i + 1 < n)
            sys.matrix(i, i + 1) -= move * config.p();
        if (i > 0)
            sys.matrix(i, i - 1) -= move * config.q();
        else
            sys.rhs(i) += move * config.q();
    }
    return sys;
}

/**
 * Ruin profile with resets to config.z(), by splitting off the reset column.
 *
 * With K = I - (1-gamma) Q (Q the reset-free interior operator),
 *   K U = (1-gamma) q e_1,   K S = (1-gamma) (q e_1 + p e_{a-1})
 * are the discounted ruin and absorption probabilities of the killed walk,
 * and K 1 = gamma 1 + (1-gamma)(q e_1 + p e_{a-1}) turns the reset term into
 * phi = U + (1 - S) phi(z), so phi(z) = U(z) / S(z). K is a nonsingular
 * M-matrix with positive right-hand sides, so U and S come out accurate to
 * working precision relative to their own size.
 */
template <typename Scalar>
Vector<Scalar> ruin_profile(const WalkConfig<Scalar>& config)
{
    const int n = config.a() - 1;
    const Scalar move = Scalar(1) - config.gamma();
    LinearSystem<Scalar> killed{n, Matrix<Scalar>::Identity(n, n), Vector<Scalar>::Zero(n)};
    for (int i = 0; i + 1 < n; ++i) {
        killed.matrix(i, i + 1) -= move * config.p();
        killed.matrix(i + 1, i) -= move * config.q();
    }
    killed.rhs(0) = move * config.q();
    Vector<Scalar> both = killed.rhs;
    both(n - 1) += move * config.p();

    const Eigen::PartialPivLU<Matrix<Scalar>> lu(killed.matrix);
    const Vector<Scalar> U = killed.checked_solve(lu, killed.rhs);
    const Vector<Scalar> S = killed.checked_solve(lu, both);
    const int z = config.z() - 1;
    if (!(S(z) > Scalar(0)))
        throw NumericError("absorption probability before reset vanished");
    const Scalar at_z = U(z) / S(z);
    return (U.array() + (Scalar(1) - S.array()) * at_z).matrix();
}

template <typename Scalar>
Scalar exact_ruin(const WalkConfig<Scalar>& config)
{
    return std::clamp(ruin_profile(config)(config.z() - 1), Scalar(0), Scalar(1));
}

/// Reset-free probability propagation with absorbing ends:
/// u_k = q * mass_{k-1}(1), v_k = p * mass_{k-1}(a-1).
template <typename Scalar>
FiniteTimeDistribution<Scalar> finite_time_dp(int a, int z, Scalar p, int horizon)
{
    if (horizon < 1)
        throw DomainError("horizon must be >= 1");
    const WalkConfig<Scalar> config(a, z, p, Scalar(0));
    const Scalar q = config.q();
    const auto n = static_cast<std::size_t>(horizon);
    FiniteTimeDistribution<Scalar> out{config, horizon, std::vector<Scalar>(n),
                                       std::vector<Scalar>(n), std::vector<Scalar>(n)};

    Vector<Scalar> mass = Vector<Scalar>::Zero(a + 1);
    mass(z) = Scalar(1);
    Vector<Scalar> next(a + 1);
    for (std::size_t k = 0; k < n; ++k) {
        next.setZero();
        for (int x = 1; x < a; ++x) {
            next(x + 1) += p * mass(x);
            next(x - 1) += q * mass(x);
        }
        out.u[k] = next(0);
        out.v[k] = next(a);
        out.s[k] = next(0) + next(a);
        next(0) = next(a) = Scalar(0);
        mass.swap(next);
    }
    return out;
}

/// Largest |interior mass + cumulative ruin + cumulative success - 1| seen
/// over the first `horizon` steps of the propagation above.
template <typename Scalar>
Scalar dp_conservation_defect(int a, int z, Scalar p, int horizon)
{
    using std::abs;
    using std::max;
    const auto dist = finite_time_dp(a, z, p, horizon);
    Vector<Scalar> mass = Vector<Scalar>::Zero(a + 1);
    mass(z) = Scalar(1);
    CompensatedSum<Scalar> absorbed;
    Scalar worst{0};
    Vector<Scalar> next(a + 1);
    for (int k = 0; k < horizon; ++k) {
        next.setZero();
        for (int x = 1; x < a; ++x) {
            next(x + 1) += p * mass(x);
            next(x - 1) += (Scalar(1) - p) * mass(x);
        }
        absorbed += dist.s[static_cast<std::size_t>(k)];
        next(0) = next(a) = Scalar(0);
        mass.swap(next);
        worst = max(worst, abs(mass.sum() + absorbed.value() - Scalar(1)));
    }
    return worst;
}

template <typename Scalar>
struct DiscountedSums {
    Scalar U;          ///< sum_k u_k s^k
    Scalar S;          ///< sum_k (u_k + v_k) s^k
    int steps;         ///< propagation steps taken
    Scalar tail_bound; ///< certified bound on the omitted tail of either sum

    Scalar ruin() const { return U / S; }
};

/// Discounted first-passage sums by propagation, stopped once the surviving
/// mass times s^(k+1), which bounds the remaining terms of either sum, drops
/// below 2^-42 in absolute terms and below 2^-42 of the absorbed sum S.
template <typename Scalar>
DiscountedSums<Scalar> discounted_dp(int a, int z, Scalar p, Scalar s)
{
    if (!(s > Scalar(0) && s <= Scalar(1)))
        throw DomainError("discount s must lie in (0, 1]");
    const WalkConfig<Scalar> config(a, z, p, Scalar(0));
    const Scalar q = config.q();
    const Scalar target = std::ldexp(Scalar(1), -42);
    constexpr int max_steps = 100'000'000;

    Vector<Scalar> mass = Vector<Scalar>::Zero(a + 1);
    mass(z) = Scalar(1);
    Vector<Scalar> next(a + 1);
    CompensatedSum<Scalar> ruin;
    CompensatedSum<Scalar> absorbed;
    Scalar discount{1};
    for (int k = 1; k <= max_steps; ++k) {
        next.setZero();
        for (int x = 1; x < a; ++x) {
            next(x + 1) += p * mass(x);
            next(x - 1) += q * mass(x);
        }
        discount *= s;
        ruin += next(0) * discount;
        absorbed += (next(0) + next(a)) * discount;
        next(0) = next(a) = Scalar(0);
        mass.swap(next);
        const Scalar tail = mass.sum() * discount * s;
        if (tail < target && tail < target * absorbed.value())
            return {ruin.value(), absorbed.value(), k, tail};
    }
    throw NumericError("discounted propagation did not converge");
}

/// Sub-stochastic interior block Q of the reset-free walk.
template <typename Scalar>
Matrix<Scalar> interior_operator(int a, Scalar p)
{
    if (a < 2)
        throw DomainError("domain size a must be >= 2");
    if (!(p > Scalar(0) && p < Scalar(1)))
        throw DomainError("step probability p must lie in (0, 1)");
    const int n = a - 1;
    Matrix<Scalar> Q = Matrix<Scalar>::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        Q(i, i + 1) = p;
        Q(i + 1, i) = Scalar(1) - p;
    }
    return Q;
}

/// D^-1 Q D with D = diag((q/p)^{x/2}), x = 1..a-1.
template <typename Scalar>
Matrix<Scalar> doob_operator(int a, Scalar p)
{
    using std::pow;
    const Matrix<Scalar> Q = interior_operator(a, p);
    Vector<Scalar> weight(a - 1);
    const Scalar ratio = (Scalar(1) - p) / p;
    for (int x = 1; x < a; ++x)
        weight(x - 1) = pow(ratio, Scalar(x) / Scalar(2));
    return weight.cwiseInverse().asDiagonal() * Q * weight.asDiagonal();
}

/// max |P(x,y) - P(y,x)| of the Doob-conjugated interior operator.
template <typename Scalar>
Scalar doob_symmetry_check(int a, Scalar p)
{
    const Matrix<Scalar> P = doob_operator(a, p);
    return (P - P.transpose()).cwiseAbs().maxCoeff();
}

/// Eigenvalues of the conjugated operator by a symmetric tridiagonal QR
/// solver, in decreasing order (the nu = 1 .. a-1 ordering).
template <typename Scalar>
Vector<Scalar> doob_eigenvalues(int a, Scalar p)
{
    const Matrix<Scalar> P = doob_operator(a, p);
    const Matrix<Scalar> symmetric = (P + P.transpose()) / Scalar(2);
    const Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(symmetric, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("symmetric eigen-solver failed");
    return solver.eigenvalues().reverse();
}

} // namespace reset_ruin

#endif // RESET_RUIN_ORACLE_HPP
