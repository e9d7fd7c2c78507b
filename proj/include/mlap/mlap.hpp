#pragma once

#include "mlap/boundary.hpp"
#include "mlap/energy.hpp"
#include "mlap/error.hpp"
#include "mlap/fixtures.hpp"
#include "mlap/green.hpp"
#include "mlap/io.hpp"
#include "mlap/learn.hpp"
#include "mlap/linalg.hpp"
#include "mlap/network.hpp"
#include "mlap/operators.hpp"
#include "mlap/paths.hpp"
#include "mlap/suite.hpp"
#include "mlap/types.hpp"
