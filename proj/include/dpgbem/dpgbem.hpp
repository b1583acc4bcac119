#pragma once

#include "adaptivity.hpp"
#include "bem.hpp"
#include "coupling.hpp"
#include "dpg_local.hpp"
#include "driver.hpp"
#include "errors.hpp"
#include "fespace.hpp"
#include "mesh.hpp"
#include "polynomial.hpp"
#include "problem.hpp"
#include "problems.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"
