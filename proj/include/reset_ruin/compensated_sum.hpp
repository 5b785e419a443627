#ifndef RESET_RUIN_COMPENSATED_SUM_HPP
#define RESET_RUIN_COMPENSATED_SUM_HPP

#include <cmath>

namespace reset_ruin {

/// Neumaier's variant of Kahan summation. Also tracks the sum of absolute
/// values, which bounds the rounding error of the individual terms.
template <typename Scalar>
class CompensatedSum {
public:
    CompensatedSum& operator+=(Scalar term)
    {
        using std::abs;
        const Scalar t = sum_ + term;
        if (abs(sum_) >= abs(term))
            carry_ += (sum_ - t) + term;
        else
            carry_ += (term - t) + sum_;
        sum_ = t;
        magnitude_ += abs(term);
        return *this;
    }

    Scalar value() const { return sum_ + carry_; }
    Scalar magnitude() const { return magnitude_; }

private:
    Scalar sum_{0};
    Scalar carry_{0};
    Scalar magnitude_{0};
};

} // namespace reset_ruin

#endif // RESET_RUIN_COMPENSATED_SUM_HPP
