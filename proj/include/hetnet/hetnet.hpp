#pragma once

#include "hetnet/association.hpp"
#include "hetnet/baselines.hpp"
#include "hetnet/channel.hpp"
#include "hetnet/config.hpp"
#include "hetnet/experiment.hpp"
#include "hetnet/instance_io.hpp"
#include "hetnet/metrics.hpp"
#include "hetnet/oracle.hpp"
#include "hetnet/phy.hpp"
#include "hetnet/topology.hpp"
