#pragma once

#include "approx.hpp"
#include "contfrac.hpp"
#include "errors.hpp"
#include "laurent.hpp"
#include "padic.hpp"
#include "poly.hpp"
#include "rational.hpp"
#include "structure.hpp"
