#pragma once

#include <Eigen/Dense>

namespace candyman {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace candyman
