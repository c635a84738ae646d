#pragma once

#include "stokeslab/error.hpp"
#include "stokeslab/vec.hpp"
#include "stokeslab/quadrature.hpp"
#include "stokeslab/forms.hpp"
#include "stokeslab/exceptional_set.hpp"
#include "stokeslab/dyadic.hpp"
#include "stokeslab/planar.hpp"
#include "stokeslab/currents.hpp"
#include "stokeslab/circulation.hpp"
#include "stokeslab/minkowski.hpp"
#include "stokeslab/cousin.hpp"
#include "stokeslab/certify.hpp"
#include "stokeslab/integration.hpp"
#include "stokeslab/counterexample.hpp"
#include "stokeslab/cylindrical.hpp"
#include "stokeslab/config.hpp"
#include "stokeslab/io.hpp"
