#pragma once

#include "guichard/symmetry/expression.hpp"
#include "guichard/symmetry/group_action.hpp"
#include "guichard/symmetry/prolongation.hpp"
#include "guichard/symmetry/reduce.hpp"
#include "guichard/symmetry/verify.hpp"
