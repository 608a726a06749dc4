#pragma once

#include "covex/types.hpp"
#include "covex/simplex.hpp"
#include "covex/complex.hpp"
#include "covex/quadrature.hpp"
#include "covex/smooth.hpp"
#include "covex/builtins.hpp"
#include "covex/bundle.hpp"
#include "covex/forms.hpp"
#include "covex/calculus.hpp"
#include "covex/harness.hpp"
#include "covex/identities.hpp"
#include "covex/io.hpp"
