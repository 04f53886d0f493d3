// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace sbgp {

/// A bivariate sample: one replicate per row, one margin per column.
using Sample = Eigen::Matrix<double, Eigen::Dynamic, 2>;

}  // namespace sbgp
