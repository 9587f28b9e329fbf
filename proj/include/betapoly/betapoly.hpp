#pragma once

#include "betapoly/cli.hpp"
#include "betapoly/closedform.hpp"
#include "betapoly/geometry.hpp"
#include "betapoly/quadrature.hpp"
#include "betapoly/sampling.hpp"
#include "betapoly/specfun.hpp"
