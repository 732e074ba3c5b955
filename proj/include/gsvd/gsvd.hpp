// Umbrella header.

#ifndef GSVD_GSVD_HPP
#define GSVD_GSVD_HPP

#include "gsvd/analysis.hpp"
#include "gsvd/core.hpp"
#include "gsvd/deflation.hpp"
#include "gsvd/dense.hpp"
#include "gsvd/gdgsvd.hpp"
#include "gsvd/matrix_market.hpp"
#include "gsvd/mdgsvd.hpp"
#include "gsvd/operator.hpp"
#include "gsvd/problems.hpp"
#include "gsvd/regularization.hpp"

#endif  // GSVD_GSVD_HPP
