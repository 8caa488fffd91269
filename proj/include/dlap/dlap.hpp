#pragma once

#include "dlap/components.hpp"
#include "dlap/digraph.hpp"
#include "dlap/dynamics.hpp"
#include "dlap/forests.hpp"
#include "dlap/fuzz.hpp"
#include "dlap/report.hpp"
#include "dlap/spectral.hpp"
