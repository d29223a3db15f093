#pragma once

#include "apoly.hpp"
#include "expr.hpp"
#include "field.hpp"
#include "lattice.hpp"
#include "module.hpp"
#include "scalars.hpp"
#include "specialfn.hpp"
#include "tate.hpp"
#include "twisted.hpp"
#include "verify.hpp"
