#pragma once

#include "core.hpp"
#include "bodies.hpp"
#include "quadrature.hpp"
#include "simplex_integrals.hpp"
#include "support.hpp"
#include "polar.hpp"
#include "sampling.hpp"
#include "mahler.hpp"
#include "steiner.hpp"
#include "isotropic.hpp"
#include "oracle.hpp"
#include "io.hpp"
