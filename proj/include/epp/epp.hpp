#pragma once

#include "graph.hpp"
#include "boundaried.hpp"
#include "certificate.hpp"
#include "subdivision.hpp"
#include "oracles.hpp"
#include "degree_packing.hpp"
#include "tree_partition.hpp"
#include "folio.hpp"
#include "reduce.hpp"
#include "structure_finder.hpp"
#include "approx.hpp"
#include "generators.hpp"
#include "experiment.hpp"
