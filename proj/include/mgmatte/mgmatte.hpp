#pragma once

#include "mgmatte/dense.hpp"
#include "mgmatte/diagnostics.hpp"
#include "mgmatte/grid.hpp"
#include "mgmatte/image_io.hpp"
#include "mgmatte/laplacian.hpp"
#include "mgmatte/model_problem.hpp"
#include "mgmatte/relaxation.hpp"
#include "mgmatte/runtime.hpp"
#include "mgmatte/solvers.hpp"
#include "mgmatte/stencil.hpp"
#include "mgmatte/system.hpp"
#include "mgmatte/trace.hpp"
#include "mgmatte/transfer.hpp"
#include "mgmatte/work.hpp"
