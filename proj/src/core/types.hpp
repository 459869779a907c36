#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace onenet {

// All numeric work is double precision; vectors are n x 1 matrices,
// scalars 1 x 1.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

using Rng = std::mt19937_64;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void check(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

}  // namespace onenet
