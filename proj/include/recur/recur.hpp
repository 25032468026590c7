#pragma once

#include "recur/bounds.hpp"
#include "recur/diophantine.hpp"
#include "recur/errors.hpp"
#include "recur/exact.hpp"
#include "recur/io.hpp"
#include "recur/oracle.hpp"
#include "recur/recurrence.hpp"
#include "recur/spectrum.hpp"
