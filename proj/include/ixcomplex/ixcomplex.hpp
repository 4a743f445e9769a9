#pragma once

#include "ixcomplex/bigi.hpp"
#include "ixcomplex/concept.hpp"
#include "ixcomplex/error.hpp"
#include "ixcomplex/klm.hpp"
#include "ixcomplex/log_analytics.hpp"
#include "ixcomplex/rounding.hpp"
#include "ixcomplex/speed.hpp"
#include "ixcomplex/symexpr.hpp"
#include "ixcomplex/synth.hpp"
