#pragma once

// Implicit stress integration for the Menetrey-Willam surface with
// hardening/softening and a dedicated return-to-apex branch, plus a
// single-point mixed-control driver.

#include "mwapex/config.hpp"
#include "mwapex/driver.hpp"
#include "mwapex/errors.hpp"
#include "mwapex/io.hpp"
#include "mwapex/return_map.hpp"
#include "mwapex/surface.hpp"
#include "mwapex/tensor.hpp"
