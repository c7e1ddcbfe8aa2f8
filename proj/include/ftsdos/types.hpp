#pragma once

#include <Eigen/Dense>

namespace ftsdos {

using Vector = Eigen::VectorXd;

}  // namespace ftsdos
