#pragma once

#include "eprb/behavior.hpp"
#include "eprb/boxes.hpp"
#include "eprb/errors.hpp"
#include "eprb/hardy.hpp"
#include "eprb/linsys.hpp"
#include "eprb/optimizer.hpp"
#include "eprb/quantum.hpp"
#include "eprb/report.hpp"
