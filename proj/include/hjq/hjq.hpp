#pragma once

// Umbrella header for the whole library.

#include "hjq/action.hpp"
#include "hjq/analysis.hpp"
#include "hjq/ast.hpp"
#include "hjq/chain.hpp"
#include "hjq/expr.hpp"
#include "hjq/flow.hpp"
#include "hjq/hamiltonian.hpp"
#include "hjq/legendre.hpp"
#include "hjq/linsolve.hpp"
#include "hjq/model.hpp"
#include "hjq/numeric.hpp"
#include "hjq/oracle.hpp"
#include "hjq/parse.hpp"
#include "hjq/phase_space.hpp"
#include "hjq/rational.hpp"
#include "hjq/reduce.hpp"
#include "hjq/report.hpp"
#include "hjq/symbol.hpp"
