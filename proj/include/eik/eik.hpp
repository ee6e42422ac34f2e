// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_EIK_HPP
#define EIK_EIK_HPP

#include "eik/besov.hpp"
#include "eik/entropy.hpp"
#include "eik/fft.hpp"
#include "eik/field.hpp"
#include "eik/field_io.hpp"
#include "eik/grid.hpp"
#include "eik/jumpset.hpp"
#include "eik/kinetic.hpp"
#include "eik/parallel.hpp"
#include "eik/production.hpp"
#include "eik/solutions.hpp"
#include "eik/test_battery.hpp"

#endif
