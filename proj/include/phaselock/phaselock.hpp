#pragma once

#include <phaselock/analysis.hpp>
#include <phaselock/errors.hpp>
#include <phaselock/flow.hpp>
#include <phaselock/heun.hpp>
#include <phaselock/matrix.hpp>
#include <phaselock/ode.hpp>
#include <phaselock/parallel.hpp>
#include <phaselock/params.hpp>
#include <phaselock/portrait.hpp>
#include <phaselock/random.hpp>
#include <phaselock/su11.hpp>
