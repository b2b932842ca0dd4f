#pragma once

#include "leray/types.hpp"
#include "leray/expr.hpp"
#include "leray/linalg.hpp"
#include "leray/forms.hpp"
#include "leray/geometry.hpp"
#include "leray/quadrature.hpp"
#include "leray/cycles.hpp"
#include "leray/kernels.hpp"
#include "leray/report.hpp"
#include "leray/casebook.hpp"
