// Umbrella header.

#pragma once

#include "dmmv/builders/fir.hpp"
#include "dmmv/builders/quant.hpp"
#include "dmmv/builders/subsetsum.hpp"
#include "dmmv/builders/tomo.hpp"
#include "dmmv/controller.hpp"
#include "dmmv/core.hpp"
#include "dmmv/io.hpp"
#include "dmmv/localsearch.hpp"
#include "dmmv/operators.hpp"
#include "dmmv/oracle.hpp"
#include "dmmv/version.hpp"
