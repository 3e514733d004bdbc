#pragma once

#include "expertise/agm.hpp"
#include "expertise/collections.hpp"
#include "expertise/decomposed.hpp"
#include "expertise/operators.hpp"
#include "expertise/parser.hpp"
#include "expertise/partition.hpp"
#include "expertise/postulates.hpp"
#include "expertise/prop.hpp"
#include "expertise/report.hpp"
#include "expertise/scenario.hpp"
#include "expertise/selection.hpp"
#include "expertise/world.hpp"
