#pragma once

#include "thermoecon/core.hpp"
#include "thermoecon/effectgraph.hpp"
#include "thermoecon/eos.hpp"
#include "thermoecon/error.hpp"
#include "thermoecon/estimation.hpp"
#include "thermoecon/kvdoc.hpp"
#include "thermoecon/thermo.hpp"

namespace thermoecon {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace thermoecon
