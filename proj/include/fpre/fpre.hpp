// Umbrella header for the fpre toolkit.
#pragma once

#include "fpre/bench.hpp"
#include "fpre/compensated.hpp"
#include "fpre/dd.hpp"
#include "fpre/ddgemm.hpp"
#include "fpre/eft.hpp"
#include "fpre/instrument.hpp"
#include "fpre/oracle.hpp"
#include "fpre/softfloat.hpp"
#include "fpre/verify.hpp"
