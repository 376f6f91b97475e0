#pragma once

#include <sqbath/analytics.hpp>
#include <sqbath/correlations.hpp>
#include <sqbath/cross_decay.hpp>
#include <sqbath/error.hpp>
#include <sqbath/experiments.hpp>
#include <sqbath/expm.hpp>
#include <sqbath/liouville.hpp>
#include <sqbath/models.hpp>
#include <sqbath/operator.hpp>
#include <sqbath/parallel.hpp>
#include <sqbath/params.hpp>
#include <sqbath/trajectories.hpp>
