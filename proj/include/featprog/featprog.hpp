#pragma once

#include "featprog/csv.hpp"
#include "featprog/engine.hpp"
#include "featprog/errors.hpp"
#include "featprog/evaluation.hpp"
#include "featprog/expr.hpp"
#include "featprog/handcrafted.hpp"
#include "featprog/kernels.hpp"
#include "featprog/program.hpp"
#include "featprog/series.hpp"
#include "featprog/spin_checks.hpp"
#include "featprog/spin_gas.hpp"
