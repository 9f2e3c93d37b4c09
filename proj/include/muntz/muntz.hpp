#pragma once

#include "muntz/errors.hpp"
#include "muntz/numerics/scalar.hpp"
#include "muntz/numerics/complex.hpp"
#include "muntz/numerics/matrix.hpp"
#include "muntz/numerics/linalg.hpp"
#include "muntz/numerics/quadrature.hpp"
#include "muntz/interval.hpp"
#include "muntz/spaces.hpp"
#include "muntz/biorth.hpp"
#include "muntz/expand.hpp"
#include "muntz/hereditary.hpp"
#include "muntz/operators.hpp"
