#pragma once

#include "mouldcalc/cli.hpp"
#include "mouldcalc/epsjet.hpp"
#include "mouldcalc/field_io.hpp"
#include "mouldcalc/mould.hpp"
#include "mouldcalc/nil.hpp"
#include "mouldcalc/rng.hpp"
#include "mouldcalc/sampling.hpp"
#include "mouldcalc/scalar.hpp"
#include "mouldcalc/variance.hpp"
#include "mouldcalc/vfield.hpp"
#include "mouldcalc/words.hpp"
