#pragma once

#include "applications.hpp"
#include "bench.hpp"
#include "errors.hpp"
#include "functions.hpp"
#include "labeling.hpp"
#include "matching.hpp"
#include "mis.hpp"
#include "poset.hpp"
#include "random_tape.hpp"
#include "sorter.hpp"
