#pragma once

#include "lanczos/errors.hpp"
#include "lanczos/vector.hpp"
#include "lanczos/linear_operator.hpp"
#include "lanczos/fop_oracle.hpp"
#include "lanczos/solvers.hpp"
#include "lanczos/problem.hpp"
#include "lanczos/bench.hpp"
